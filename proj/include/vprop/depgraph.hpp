// Copyright (c) 2026 The vprop Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef VPROP_DEPGRAPH_HPP
#define VPROP_DEPGRAPH_HPP

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vprop/snapshot.hpp"

namespace vprop {

/// Project-level dependency graph. Edges run upstream -> downstream
/// (the downstream project declares a dependency on the upstream one).
/// Version detail is deliberately absent; pv_dep_records() recovers it
/// when a specific edge is inspected.
struct PDepGraph {
    std::set<ProjectId> nodes;
    std::map<ProjectId, std::set<ProjectId>> downstream; // upstream -> dependents
    std::map<std::pair<ProjectId, ProjectId>, std::size_t> edge_support;
    // PVs depending on another version of their own project are excluded
    // from traversal but tallied here for the report.
    std::map<ProjectId, std::size_t> self_dep_support;

    std::size_t edge_count() const
    {
        std::size_t n = 0;
        for (const auto& [up, downs] : downstream)
            n += downs.size();
        return n;
    }

    nlohmann::json to_json() const
    {
        nlohmann::json edges = nlohmann::json::array();
        for (const auto& [up, downs] : downstream)
            for (const auto& down : downs)
                edges.push_back({ { "up", up },
                                  { "down", down },
                                  { "support", edge_support.at({ up, down }) } });
        nlohmann::json self = nlohmann::json::object();
        for (const auto& [p, n] : self_dep_support)
            self[p] = n;
        return { { "schema_version", 1 },
                 { "nodes", nodes },
                 { "edges", edges },
                 { "self_deps", self } };
    }
};

/// Aggregates PV-level dependency records into the P-level graph.
/// Unresolved dependency targets are skipped; they are surfaced by
/// validate_snapshot and carry no weight in propagation.
inline PDepGraph build_p_graph(const EcosystemSnapshot& s)
{
    PDepGraph g;
    for (const auto& [project, versions] : s.index)
        g.nodes.insert(project);

    for (const auto& [id, m] : s.pvs) {
        for (const auto& dep : m.deps) {
            if (!s.find(dep))
                continue;
            if (dep.project == id.project) {
                ++g.self_dep_support[id.project];
                continue;
            }
            g.downstream[dep.project].insert(id.project);
            ++g.edge_support[{ dep.project, id.project }];
        }
    }
    return g;
}

/// Direct dependents of `p`, sorted. Empty when `p` is unknown or a leaf.
inline std::vector<ProjectId> direct_downstream(const PDepGraph& g, const ProjectId& p)
{
    auto it = g.downstream.find(p);
    if (it == g.downstream.end())
        return {};
    return { it->second.begin(), it->second.end() };
}

/// The PV-level dependency records backing the edge up -> down:
/// every (downstream PV, upstream PV) pair where the downstream PV's deps
/// contain the upstream PV. Complete, duplicate-free, in index order.
inline std::vector<std::pair<PvId, PvId>>
pv_dep_records(const EcosystemSnapshot& s, const ProjectId& down, const ProjectId& up)
{
    std::vector<std::pair<PvId, PvId>> records;
    auto it = s.index.find(down);
    if (it == s.index.end())
        return records;
    for (const auto& down_pv : it->second) {
        const PvManifest& m = *s.find(down_pv);
        for (const auto& dep : m.deps) {
            if (dep.project == up && s.find(dep))
                records.emplace_back(down_pv, dep);
        }
    }
    return records;
}

} // namespace vprop

#endif // VPROP_DEPGRAPH_HPP
