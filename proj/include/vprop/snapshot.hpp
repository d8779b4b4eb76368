// Copyright (c) 2026 The vprop Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef VPROP_SNAPSHOT_HPP
#define VPROP_SNAPSHOT_HPP

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "vprop/common.hpp"

namespace vprop {

enum class Visibility { Public, Internal };

inline const char* to_string(Visibility v)
{
    return v == Visibility::Public ? "public" : "internal";
}

struct FunctionDecl {
    std::string fqn;
    std::string file;
    Visibility visibility = Visibility::Internal;
};

struct CallEdge {
    std::string caller;
    std::string callee;

    friend auto operator<=>(const CallEdge&, const CallEdge&) = default;
};

/// Everything a snapshot records about one released project-version.
struct PvManifest {
    PvId id;
    std::int64_t released_at = 0;
    std::vector<PvId> deps;            // resolved, exact versions
    std::set<std::string> files;       // file identifiers shipped in the release
    std::set<std::string> imports;     // file identifiers referenced from other PVs
    std::vector<FunctionDecl> functions;
    std::vector<CallEdge> calls;

    const FunctionDecl* find_function(const std::string& fqn) const
    {
        for (const auto& f : functions)
            if (f.fqn == fqn)
                return &f;
        return nullptr;
    }
};

/// Immutable view of an ecosystem. Safe for concurrent readers after load.
struct EcosystemSnapshot {
    std::string name;
    std::map<PvId, PvManifest> pvs;
    // Per project, versions ordered by (released_at, version string).
    std::map<ProjectId, std::vector<PvId>> index;

    std::size_t total_p() const { return index.size(); }
    std::size_t total_pv() const { return pvs.size(); }

    const PvManifest* find(const PvId& id) const
    {
        auto it = pvs.find(id);
        return it == pvs.end() ? nullptr : &it->second;
    }

    bool has_project(const ProjectId& p) const { return index.count(p) != 0; }
};

class snapshot_error : public std::runtime_error {
public:
    enum class Kind { MissingIndex, MalformedRecord, DuplicatePv };

    snapshot_error(Kind k, std::string path, int line, const std::string& what)
        : std::runtime_error(what)
        , kind(k)
        , path(std::move(path))
        , line(line)
    {
    }

    Kind kind;
    std::string path; // offending file
    int line;         // 0 when unknown
};

struct ValidationFinding {
    bool fatal = false;
    std::string kind;    // unresolved_dep, dangling_caller, unknown_file, ...
    std::string subject; // PvId or similar
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationFinding> findings;

    bool ok() const
    {
        return std::none_of(findings.begin(), findings.end(),
                            [](const ValidationFinding& f) { return f.fatal; });
    }

    std::size_t fatal_count() const
    {
        return static_cast<std::size_t>(
            std::count_if(findings.begin(), findings.end(),
                          [](const ValidationFinding& f) { return f.fatal; }));
    }

    nlohmann::json to_json() const
    {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& f : findings)
            arr.push_back({ { "fatal", f.fatal },
                            { "kind", f.kind },
                            { "subject", f.subject },
                            { "detail", f.detail } });
        return { { "schema_version", 1 }, { "fatal_count", fatal_count() }, { "findings", arr } };
    }
};

namespace detail {

inline nlohmann::json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw snapshot_error(snapshot_error::Kind::MalformedRecord, path.string(), 0,
                             "cannot open " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // Map the parser's byte offset back to a line number.
        int line = 1;
        for (std::size_t i = 0; i < e.byte && i < text.size(); ++i)
            if (text[i] == '\n')
                ++line;
        throw snapshot_error(snapshot_error::Kind::MalformedRecord, path.string(), line,
                             path.string() + ":" + std::to_string(line) + ": " + e.what());
    }
}

// Missing per-PV files are treated as empty: harvesters routinely omit
// records a PV has none of.
inline nlohmann::json read_optional_array(const std::filesystem::path& path)
{
    if (!std::filesystem::exists(path))
        return nlohmann::json::array();
    nlohmann::json j = read_json_file(path);
    if (!j.is_array())
        throw snapshot_error(snapshot_error::Kind::MalformedRecord, path.string(), 0,
                             path.string() + ": expected a JSON array");
    return j;
}

inline std::string require_string(const nlohmann::json& obj, const char* key,
                                  const std::filesystem::path& path, std::size_t idx)
{
    if (!obj.is_object() || !obj.contains(key) || !obj[key].is_string())
        throw snapshot_error(snapshot_error::Kind::MalformedRecord, path.string(), 0,
                             path.string() + ": entry " + std::to_string(idx)
                                 + " lacks string field \"" + key + "\"");
    return obj[key].get<std::string>();
}

} // namespace detail

/// Loads a snapshot from the on-disk layout:
///   index.json                                  [{project, version, released_at}, ...]
///   pv/<project>/<version>/deps.json            [{project, version}, ...]
///   pv/<project>/<version>/files.json           [file, ...]
///   pv/<project>/<version>/imports.json         [file, ...]
///   pv/<project>/<version>/functions.json       [{fqn, file, visibility}, ...]
///   pv/<project>/<version>/calls.json           [{caller, callee}, ...]
/// Path components are percent-encoded ('/', ':', '%'). Missing per-PV record
/// files are read as empty. Throws snapshot_error on structural problems.
inline EcosystemSnapshot load_snapshot(const std::filesystem::path& root)
{
    namespace fs = std::filesystem;

    const fs::path index_path = root / "index.json";
    if (!fs::exists(index_path))
        throw snapshot_error(snapshot_error::Kind::MissingIndex, index_path.string(), 0,
                             "missing index.json under " + root.string());

    EcosystemSnapshot snap;
    snap.name = root.filename().string();

    nlohmann::json index = detail::read_json_file(index_path);
    if (!index.is_array())
        throw snapshot_error(snapshot_error::Kind::MalformedRecord, index_path.string(), 0,
                             "index.json must be a JSON array");

    std::size_t idx = 0;
    for (const auto& entry : index) {
        PvId id { detail::require_string(entry, "project", index_path, idx),
                  detail::require_string(entry, "version", index_path, idx) };
        if (id.project.empty() || id.version.empty())
            throw snapshot_error(snapshot_error::Kind::MalformedRecord, index_path.string(), 0,
                                 index_path.string() + ": entry " + std::to_string(idx)
                                     + " has an empty project or version");
        const std::string released = detail::require_string(entry, "released_at", index_path, idx);
        std::int64_t released_at;
        try {
            released_at = parse_rfc3339(released);
        } catch (const time_error& e) {
            throw snapshot_error(snapshot_error::Kind::MalformedRecord, index_path.string(), 0,
                                 index_path.string() + ": entry " + std::to_string(idx) + ": "
                                     + e.what());
        }
        if (snap.pvs.count(id))
            throw snapshot_error(snapshot_error::Kind::DuplicatePv, index_path.string(), 0,
                                 "duplicate project-version in index: " + id.str());

        PvManifest m;
        m.id = id;
        m.released_at = released_at;

        const fs::path pv_dir = root / "pv" / encode_path_component(id.project)
            / encode_path_component(id.version);

        const fs::path deps_path = pv_dir / "deps.json";
        std::size_t dep_idx = 0;
        for (const auto& d : detail::read_optional_array(deps_path)) {
            PvId dep { detail::require_string(d, "project", deps_path, dep_idx),
                       detail::require_string(d, "version", deps_path, dep_idx) };
            if (dep == id)
                throw snapshot_error(snapshot_error::Kind::MalformedRecord, deps_path.string(), 0,
                                     deps_path.string() + ": self-dependency on " + id.str());
            if (std::find(m.deps.begin(), m.deps.end(), dep) == m.deps.end())
                m.deps.push_back(dep);
            ++dep_idx;
        }

        for (const auto& f : detail::read_optional_array(pv_dir / "files.json")) {
            if (!f.is_string())
                throw snapshot_error(snapshot_error::Kind::MalformedRecord,
                                     (pv_dir / "files.json").string(), 0,
                                     "files.json entries must be strings");
            m.files.insert(f.get<std::string>());
        }
        for (const auto& f : detail::read_optional_array(pv_dir / "imports.json")) {
            if (!f.is_string())
                throw snapshot_error(snapshot_error::Kind::MalformedRecord,
                                     (pv_dir / "imports.json").string(), 0,
                                     "imports.json entries must be strings");
            m.imports.insert(f.get<std::string>());
        }

        const fs::path funcs_path = pv_dir / "functions.json";
        std::size_t fn_idx = 0;
        std::set<std::string> seen_fqns;
        for (const auto& f : detail::read_optional_array(funcs_path)) {
            FunctionDecl decl;
            decl.fqn = detail::require_string(f, "fqn", funcs_path, fn_idx);
            decl.file = detail::require_string(f, "file", funcs_path, fn_idx);
            const std::string vis = detail::require_string(f, "visibility", funcs_path, fn_idx);
            if (vis == "public")
                decl.visibility = Visibility::Public;
            else if (vis == "internal")
                decl.visibility = Visibility::Internal;
            else
                throw snapshot_error(snapshot_error::Kind::MalformedRecord, funcs_path.string(), 0,
                                     funcs_path.string() + ": unknown visibility \"" + vis + "\"");
            if (!seen_fqns.insert(decl.fqn).second)
                throw snapshot_error(snapshot_error::Kind::MalformedRecord, funcs_path.string(), 0,
                                     funcs_path.string() + ": duplicate fqn " + decl.fqn);
            m.functions.push_back(std::move(decl));
            ++fn_idx;
        }

        const fs::path calls_path = pv_dir / "calls.json";
        std::size_t call_idx = 0;
        for (const auto& c : detail::read_optional_array(calls_path)) {
            CallEdge edge { detail::require_string(c, "caller", calls_path, call_idx),
                            detail::require_string(c, "callee", calls_path, call_idx) };
            if (std::find(m.calls.begin(), m.calls.end(), edge) == m.calls.end())
                m.calls.push_back(std::move(edge));
            ++call_idx;
        }

        snap.index[id.project].push_back(id);
        snap.pvs.emplace(std::move(id), std::move(m));
        ++idx;
    }

    for (auto& [project, versions] : snap.index) {
        std::sort(versions.begin(), versions.end(), [&](const PvId& a, const PvId& b) {
            const auto ra = snap.pvs.at(a).released_at;
            const auto rb = snap.pvs.at(b).released_at;
            return std::tie(ra, a.version) < std::tie(rb, b.version);
        });
    }
    return snap;
}

/// Structural checks beyond what loading enforces. Warnings (unresolved deps,
/// unresolvable callees) leave the snapshot usable; fatal findings do not.
inline ValidationReport validate_snapshot(const EcosystemSnapshot& s)
{
    ValidationReport report;

    for (const auto& [id, m] : s.pvs) {
        for (const auto& dep : m.deps) {
            if (!s.find(dep))
                report.findings.push_back({ false, "unresolved_dep", id.str(),
                                            "dependency target " + dep.str()
                                                + " is not in the snapshot" });
        }

        std::set<std::string> declared;
        for (const auto& f : m.functions) {
            declared.insert(f.fqn);
            if (!m.files.count(f.file))
                report.findings.push_back({ true, "unknown_file", id.str(),
                                            "function " + f.fqn + " references file " + f.file
                                                + " not in the PV file set" });
        }

        for (const auto& c : m.calls) {
            if (!declared.count(c.caller)) {
                report.findings.push_back({ true, "dangling_caller", id.str(),
                                            "call edge caller " + c.caller
                                                + " is not declared in this PV" });
                continue;
            }
            if (declared.count(c.callee))
                continue;
            bool resolvable = false;
            for (const auto& dep : m.deps) {
                const PvManifest* dm = s.find(dep);
                if (!dm)
                    continue;
                const FunctionDecl* fn = dm->find_function(c.callee);
                if (fn && fn->visibility == Visibility::Public) {
                    resolvable = true;
                    break;
                }
            }
            if (!resolvable)
                report.findings.push_back({ false, "dangling_callee", id.str(),
                                            "callee " + c.callee
                                                + " resolves to no local or dependency function" });
        }

        for (const auto& imp : m.imports) {
            if (m.files.count(imp))
                report.findings.push_back({ false, "import_of_own_file", id.str(),
                                            "import " + imp + " is part of the PV's own files" });
        }
    }
    return report;
}

/// Canonical JSON rendering of a snapshot; loads of the same directory
/// serialize byte-identically.
inline std::string serialize_snapshot(const EcosystemSnapshot& s)
{
    nlohmann::json pvs = nlohmann::json::object();
    for (const auto& [id, m] : s.pvs) {
        nlohmann::json deps = nlohmann::json::array();
        for (const auto& d : m.deps)
            deps.push_back({ { "project", d.project }, { "version", d.version } });
        nlohmann::json functions = nlohmann::json::array();
        for (const auto& f : m.functions)
            functions.push_back({ { "fqn", f.fqn },
                                  { "file", f.file },
                                  { "visibility", to_string(f.visibility) } });
        nlohmann::json calls = nlohmann::json::array();
        for (const auto& c : m.calls)
            calls.push_back({ { "caller", c.caller }, { "callee", c.callee } });
        pvs[id.str()] = { { "released_at", format_rfc3339(m.released_at) },
                          { "deps", deps },
                          { "files", m.files },
                          { "imports", m.imports },
                          { "functions", functions },
                          { "calls", calls } };
    }
    nlohmann::json index = nlohmann::json::object();
    for (const auto& [project, versions] : s.index) {
        nlohmann::json v = nlohmann::json::array();
        for (const auto& pv : versions)
            v.push_back(pv.version);
        index[project] = v;
    }
    nlohmann::json root = { { "name", s.name },
                            { "total_p", s.total_p() },
                            { "total_pv", s.total_pv() },
                            { "index", index },
                            { "pvs", pvs } };
    return root.dump(2) + "\n";
}

/// Writes a snapshot in the on-disk layout load_snapshot expects.
inline void write_snapshot(const EcosystemSnapshot& s, const std::filesystem::path& root)
{
    namespace fs = std::filesystem;
    fs::create_directories(root);

    auto dump = [](const fs::path& path, const nlohmann::json& j) {
        std::ofstream out(path);
        out << j.dump(2) << "\n";
    };

    nlohmann::json index = nlohmann::json::array();
    // Index entries in per-project release order so regeneration is stable.
    for (const auto& [project, versions] : s.index) {
        for (const auto& id : versions) {
            index.push_back({ { "project", id.project },
                              { "version", id.version },
                              { "released_at", format_rfc3339(s.pvs.at(id).released_at) } });
        }
    }
    dump(root / "index.json", index);

    for (const auto& [id, m] : s.pvs) {
        const fs::path pv_dir = root / "pv" / encode_path_component(id.project)
            / encode_path_component(id.version);
        fs::create_directories(pv_dir);

        nlohmann::json deps = nlohmann::json::array();
        for (const auto& d : m.deps)
            deps.push_back({ { "project", d.project }, { "version", d.version } });
        dump(pv_dir / "deps.json", deps);
        dump(pv_dir / "files.json", nlohmann::json(m.files));
        dump(pv_dir / "imports.json", nlohmann::json(m.imports));

        nlohmann::json functions = nlohmann::json::array();
        for (const auto& f : m.functions)
            functions.push_back({ { "fqn", f.fqn },
                                  { "file", f.file },
                                  { "visibility", to_string(f.visibility) } });
        dump(pv_dir / "functions.json", functions);

        nlohmann::json calls = nlohmann::json::array();
        for (const auto& c : m.calls)
            calls.push_back({ { "caller", c.caller }, { "callee", c.callee } });
        dump(pv_dir / "calls.json", calls);
    }
}

} // namespace vprop

#endif // VPROP_SNAPSHOT_HPP
