// Copyright (c) 2026 The vprop Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef VPROP_COMMON_HPP
#define VPROP_COMMON_HPP

#include <cctype>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <tuple>

namespace vprop {

/// A project is a named software unit comprising many released versions.
using ProjectId = std::string;

/// One released version of a project; the unit of dependency resolution.
struct PvId {
    ProjectId project;
    std::string version;

    friend auto operator<=>(const PvId&, const PvId&) = default;

    std::string str() const { return project + "@" + version; }
};

class time_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d)
{
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d)
{
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

} // namespace detail

/// Parses an RFC 3339 timestamp ("2020-01-02T03:04:05Z", fractional seconds
/// and numeric offsets accepted) into seconds since the Unix epoch.
/// Fractional seconds are truncated. Throws time_error on malformed input.
inline std::int64_t parse_rfc3339(const std::string& text)
{
    const char* p = text.c_str();
    auto digits = [&](int n) -> std::int64_t {
        std::int64_t v = 0;
        for (int i = 0; i < n; ++i) {
            if (!std::isdigit(static_cast<unsigned char>(*p)))
                throw time_error("invalid RFC 3339 timestamp: " + text);
            v = v * 10 + (*p++ - '0');
        }
        return v;
    };
    auto expect = [&](char c) {
        if (*p != c)
            throw time_error("invalid RFC 3339 timestamp: " + text);
        ++p;
    };

    const std::int64_t year = digits(4);
    expect('-');
    const std::int64_t month = digits(2);
    expect('-');
    const std::int64_t day = digits(2);
    if (*p != 'T' && *p != 't' && *p != ' ')
        throw time_error("invalid RFC 3339 timestamp: " + text);
    ++p;
    const std::int64_t hour = digits(2);
    expect(':');
    const std::int64_t minute = digits(2);
    expect(':');
    const std::int64_t second = digits(2);
    if (*p == '.') {
        ++p;
        if (!std::isdigit(static_cast<unsigned char>(*p)))
            throw time_error("invalid RFC 3339 timestamp: " + text);
        while (std::isdigit(static_cast<unsigned char>(*p)))
            ++p;
    }

    std::int64_t offset = 0;
    if (*p == 'Z' || *p == 'z') {
        ++p;
    } else if (*p == '+' || *p == '-') {
        const int sign = (*p == '-') ? -1 : 1;
        ++p;
        const std::int64_t oh = digits(2);
        expect(':');
        const std::int64_t om = digits(2);
        offset = sign * (oh * 3600 + om * 60);
    } else {
        throw time_error("invalid RFC 3339 timestamp (missing offset): " + text);
    }
    if (*p != '\0')
        throw time_error("invalid RFC 3339 timestamp (trailing data): " + text);
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60)
        throw time_error("invalid RFC 3339 timestamp (field range): " + text);

    const std::int64_t days = detail::days_from_civil(year, static_cast<unsigned>(month),
                                                      static_cast<unsigned>(day));
    return days * 86400 + hour * 3600 + minute * 60 + second - offset;
}

/// Formats epoch seconds as "YYYY-MM-DDTHH:MM:SSZ".
inline std::string format_rfc3339(std::int64_t epoch_seconds)
{
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    std::int64_t y;
    unsigned m, d;
    detail::civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ",
                  static_cast<long long>(y), m, d,
                  static_cast<long long>(rem / 3600),
                  static_cast<long long>(rem % 3600 / 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

/// Percent-encodes the characters that are unsafe in snapshot path
/// components ('/', ':', and '%' itself).
inline std::string encode_path_component(const std::string& raw)
{
    static const char hex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(raw.size());
    for (unsigned char c : raw) {
        if (c == '/' || c == ':' || c == '%') {
            out += '%';
            out += hex[c >> 4];
            out += hex[c & 0xF];
        } else {
            out += static_cast<char>(c);
        }
    }
    return out;
}

} // namespace vprop

#endif // VPROP_COMMON_HPP
