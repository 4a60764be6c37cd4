// SPDX-License-Identifier: Apache-2.0
//
// ntnsim: system-level simulator for integrated terrestrial and non-terrestrial networks
// Copyright (C) 2026 The ntnsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "units.hpp"

namespace ntnsim {

inline constexpr double kSeFloorDb = -10.0;
inline constexpr double kSeCap = 7.8;  // bit/s/Hz

/// Truncated Shannon mapping; returns Mbit/s.
inline double rate_map(double sinr_db, double bandwidth_hz, double time_share)
{
    if (bandwidth_hz < 0.0 || time_share < 0.0 || time_share > 1.0)
        throw std::invalid_argument("rate_map: bandwidth must be >= 0 and time share in [0, 1]");
    if (!(sinr_db >= kSeFloorDb))
        return 0.0;
    const double se = std::min(std::log2(1.0 + db2lin(sinr_db)), kSeCap);
    return bandwidth_hz * time_share * se / 1e6;
}

/// Nearest-rank percentile, p in [0, 100].
inline double percentile(std::vector<double> values, double p)
{
    if (values.empty())
        throw std::invalid_argument("percentile: empty input");
    if (!(p >= 0.0 && p <= 100.0))
        throw std::invalid_argument("percentile: p must lie in [0, 100]");
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    const auto rank = std::max(1.0, std::ceil(p / 100.0 * n));
    return values[static_cast<std::size_t>(rank) - 1];
}

inline double median(std::vector<double> values) { return percentile(std::move(values), 50.0); }

/// Fraction of values strictly below the threshold.
inline double outage_fraction(const std::vector<double>& sinr_db, double threshold_db = -5.0)
{
    if (sinr_db.empty())
        throw std::invalid_argument("outage_fraction: empty input");
    const auto n = std::count_if(sinr_db.begin(), sinr_db.end(), [&](double s) { return s < threshold_db; });
    return static_cast<double>(n) / static_cast<double>(sinr_db.size());
}

/// One user in one drop of one scenario.
struct KpiRecord {
    std::string scenario_id;
    std::optional<double> isd_a;
    std::optional<std::string> precoder;
    std::optional<std::string> direction;
    std::optional<double> elevation_deg;
    std::optional<std::string> frf;
    std::optional<double> evtol_density;
    std::string user_class;
    int drop = 0;
    double sinr_db = 0.0;
    double rate_mbps = 0.0;

    friend bool operator==(const KpiRecord&, const KpiRecord&) = default;
};

/// Values of the records selected by `keep`.
template <class Pred, class Field>
std::vector<double> collect(const std::vector<KpiRecord>& records, Pred keep, Field field)
{
    std::vector<double> out;
    for (const KpiRecord& r : records)
        if (keep(r))
            out.push_back(field(r));
    return out;
}

inline constexpr const char* kCsvHeader =
    "scenario_id,isd_a,precoder,direction,elevation_deg,frf,evtol_density,user_class,drop,sinr_db,rate_mbps";

namespace detail {

inline std::string fmt6(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string fmt6(const std::optional<double>& v) { return v ? fmt6(*v) : std::string(); }

inline std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

inline std::optional<std::string> opt_str(const std::string& s)
{
    return s.empty() ? std::nullopt : std::optional<std::string>(s);
}

inline std::optional<double> opt_num(const std::string& s)
{
    return s.empty() ? std::nullopt : std::optional<double>(std::stod(s));
}

} // namespace detail

inline std::string to_csv(const std::vector<KpiRecord>& records)
{
    std::string out = std::string(kCsvHeader) + "\n";
    for (const KpiRecord& r : records) {
        out += r.scenario_id + ',' + detail::fmt6(r.isd_a) + ',' + r.precoder.value_or("") + ',' +
               r.direction.value_or("") + ',' + detail::fmt6(r.elevation_deg) + ',' + r.frf.value_or("") + ',' +
               detail::fmt6(r.evtol_density) + ',' + r.user_class + ',' + std::to_string(r.drop) + ',' +
               detail::fmt6(r.sinr_db) + ',' + detail::fmt6(r.rate_mbps) + '\n';
    }
    return out;
}

inline std::vector<KpiRecord> parse_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw std::runtime_error("parse_csv: missing or unexpected header");
    std::vector<KpiRecord> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        const auto f = detail::split_csv(line);
        if (f.size() != 11)
            throw std::runtime_error("parse_csv: line " + std::to_string(line_no) + " has " +
                                     std::to_string(f.size()) + " fields");
        KpiRecord r;
        r.scenario_id = f[0];
        r.isd_a = detail::opt_num(f[1]);
        r.precoder = detail::opt_str(f[2]);
        r.direction = detail::opt_str(f[3]);
        r.elevation_deg = detail::opt_num(f[4]);
        r.frf = detail::opt_str(f[5]);
        r.evtol_density = detail::opt_num(f[6]);
        r.user_class = f[7];
        r.drop = std::stoi(f[8]);
        r.sinr_db = std::stod(f[9]);
        r.rate_mbps = std::stod(f[10]);
        out.push_back(std::move(r));
    }
    return out;
}

inline nlohmann::json to_json(const std::vector<KpiRecord>& records)
{
    auto opt = [](const auto& v) -> nlohmann::json { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    nlohmann::json arr = nlohmann::json::array();
    for (const KpiRecord& r : records) {
        arr.push_back({{"scenario_id", r.scenario_id},
                       {"isd_a", opt(r.isd_a)},
                       {"precoder", opt(r.precoder)},
                       {"direction", opt(r.direction)},
                       {"elevation_deg", opt(r.elevation_deg)},
                       {"frf", opt(r.frf)},
                       {"evtol_density", opt(r.evtol_density)},
                       {"user_class", r.user_class},
                       {"drop", r.drop},
                       {"sinr_db", r.sinr_db},
                       {"rate_mbps", r.rate_mbps}});
    }
    return arr;
}

enum class ExportFormat { csv, json };

inline void export_records(const std::vector<KpiRecord>& records, ExportFormat format, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open " + path + " for writing");
    if (format == ExportFormat::csv)
        out << to_csv(records);
    else
        out << to_json(records).dump(1) << '\n';
    if (!out)
        throw std::runtime_error("write failed: " + path);
}

} // namespace ntnsim
