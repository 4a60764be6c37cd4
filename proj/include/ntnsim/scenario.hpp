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

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ntnsim {

enum class Precoder { zf, eda };
enum class Direction { ul, dl };
enum class Frf { frf1, frf3 };

inline std::string to_string(Precoder p) { return p == Precoder::zf ? "ZF" : "EDA"; }
inline std::string to_string(Direction d) { return d == Direction::ul ? "UL" : "DL"; }
inline std::string to_string(Frf f) { return f == Frf::frf1 ? "FRF1" : "FRF3"; }

/// Satellite (MNO_S) configuration. All beams are generated by one LEO satellite.
struct NtnConfig {
    double orbit_altitude_km = 600.0;
    int n_beams = 7;
    double elevation_deg = 90.0;  // seen from the service-area center
    Frf frf = Frf::frf3;
    double dl_bw_hz = 10e6;
    double ul_bw_hz = 10e6;
    double carrier_hz = 2e9;
    double eirp_density_dbw_per_mhz = 34.0;
    double g_over_t_db = 1.1;
    double beam_peak_gain_dbi = 30.0;
    double beam_hpbw_deg = 4.41;
    double ul_grant_hz = 360e3;
    double ul_tx_power_dbm = 23.0;
    double atmospheric_loss_db = 0.1;
    // Azimuth (from the service-area center) of the sub-satellite point.
    double satellite_azimuth_deg = 0.0;
    // Orientation of the first-tier beam ring relative to the direction from
    // nadir towards the service area. 30 deg puts an off-nadir service area
    // between two first-tier beams; 0 deg puts it on the axis of one beam.
    double lattice_rotation_deg = 30.0;
    bool offload_all = false;

    friend bool operator==(const NtnConfig&, const NtnConfig&) = default;
};

/// Nominal downlink/uplink bandwidth of one beam for a given reuse factor.
inline double nominal_beam_bandwidth(Frf frf) { return frf == Frf::frf1 ? 30e6 : 10e6; }

/// Full experiment description. Defaults reproduce the baseline system parameters.
struct Scenario {
    double isd_t = 500.0;
    std::optional<double> isd_a;  // absent: no aerial operator, UAVs served by MNO_T
    Precoder precoder = Precoder::zf;
    Direction direction = Direction::ul;
    double carrier_tn_hz = 3.5e9;
    double bandwidth_tn_hz = 100e6;
    int gue_per_cell = 15;
    double indoor_fraction = 0.8;
    double uav_per_tn_cell = 1.0;
    double evtol_per_tn_cell = 0.0;
    std::optional<NtnConfig> ntn;
    int n_drops = 50;
    std::uint64_t seed = 1;
    int rings = 2;

    double bs_height_m = 25.0;
    double tilt_t_deg = 12.0;   // positive is downtilt
    double tilt_a_deg = -45.0;  // negative is uptilt
    double mno_t_power_dbm = 46.0;
    double mno_a_power_dbm = 46.0;
    double bs_noise_figure_db = 7.0;
    double ue_noise_figure_db = 9.0;

    double pc_alpha = 0.8;
    double pc_p0_dbm = -100.0;
    double pc_pmax_dbm = 23.0;
    double rb_bandwidth_hz = 360e3;

    double dl_grant_hz = 50e6;
    double ul_grant_gue_hz = 10e6;
    double ul_grant_uav_hz = 50e6;
    int dl_max_users = 8;  // per subband
    int ul_max_users = 4;
    int dl_nulls = 16;
    int ul_nulls = 8;
    // Cap on the number of out-of-cell channels (strongest first) entering the
    // nullsteering covariance; 0 keeps all of them.
    int eda_max_channels = 64;

    double k_ground_los_db = 9.0;
    double k_aerial_los_db = 15.0;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

class ParseError : public std::runtime_error {
  public:
    ParseError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    int line() const { return line_; }

  private:
    int line_;
};

class ValidationError : public std::runtime_error {
  public:
    ValidationError(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key))
    {
    }
    const std::string& key() const { return key_; }

  private:
    std::string key_;
};

/// Throws ValidationError naming the first violated invariant.
inline void validate(const Scenario& s)
{
    auto require = [](bool ok, const char* key, const char* msg) {
        if (!ok)
            throw ValidationError(key, msg);
    };
    require(s.isd_t > 0.0, "isd_t", "must be positive");
    require(!s.isd_a || *s.isd_a > 0.0, "isd_a", "must be positive");
    require(s.carrier_tn_hz > 0.0, "carrier_tn", "must be positive");
    require(s.bandwidth_tn_hz > 0.0, "bandwidth_tn", "must be positive");
    require(s.n_drops >= 1, "n_drops", "must be at least 1");
    require(s.rings >= 0, "rings", "must be non-negative");
    require(s.gue_per_cell >= 0, "gue_per_cell", "must be non-negative");
    require(s.indoor_fraction >= 0.0 && s.indoor_fraction <= 1.0, "indoor_fraction",
            "must lie in [0, 1]");
    require(s.uav_per_tn_cell >= 0.0, "uav_per_tn_cell", "must be non-negative");
    require(s.evtol_per_tn_cell >= 0.0, "evtol_per_tn_cell", "must be non-negative");
    require(s.pc_alpha >= 0.0 && s.pc_alpha <= 1.0, "pc_alpha", "must lie in [0, 1]");
    require(s.pc_pmax_dbm >= s.pc_p0_dbm, "pc_pmax", "must not be below pc_p0");
    require(s.rb_bandwidth_hz > 0.0, "rb_bandwidth", "must be positive");
    require(s.dl_grant_hz > 0.0 && s.dl_grant_hz <= s.bandwidth_tn_hz, "dl_grant",
            "must lie in (0, bandwidth_tn]");
    require(s.ul_grant_gue_hz > 0.0 && s.ul_grant_gue_hz <= s.bandwidth_tn_hz, "ul_grant_gue",
            "must lie in (0, bandwidth_tn]");
    require(s.ul_grant_uav_hz > 0.0 && s.ul_grant_uav_hz <= s.bandwidth_tn_hz, "ul_grant_uav",
            "must lie in (0, bandwidth_tn]");
    require(s.dl_max_users >= 1, "dl_max_users", "must be at least 1");
    require(s.ul_max_users >= 1, "ul_max_users", "must be at least 1");
    require(s.dl_nulls >= 0 && s.dl_nulls + s.dl_max_users < 128, "dl_nulls",
            "must leave spatial degrees of freedom for the served users");
    require(s.ul_nulls >= 0 && s.ul_nulls + s.ul_max_users < 128, "ul_nulls",
            "must leave spatial degrees of freedom for the served users");
    require(s.eda_max_channels >= 0, "eda_max_channels", "must be non-negative");
    if (s.ntn) {
        const NtnConfig& n = *s.ntn;
        require(n.elevation_deg > 0.0 && n.elevation_deg <= 90.0, "elevation_deg",
                "must lie in (0, 90]");
        require(n.orbit_altitude_km > 0.0, "orbit_altitude", "must be positive");
        require(n.n_beams == 7, "n_beams", "only the 7-beam lattice is supported");
        require(n.dl_bw_hz == nominal_beam_bandwidth(n.frf), "dl_bw",
                "must be 30e6 for FRF1 and 10e6 for FRF3");
        require(n.ul_bw_hz == nominal_beam_bandwidth(n.frf), "ul_bw",
                "must be 30e6 for FRF1 and 10e6 for FRF3");
        require(n.carrier_hz > 0.0, "ntn_carrier", "must be positive");
        require(n.beam_hpbw_deg > 0.0 && n.beam_hpbw_deg < 90.0, "beam_hpbw_deg",
                "must lie in (0, 90)");
        require(n.ul_grant_hz > 0.0 && n.ul_grant_hz <= n.ul_bw_hz, "ul_grant",
                "must lie in (0, ul_bw]");
    }
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

inline std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

inline double parse_double(int line, std::string_view key, std::string_view v)
{
    std::string text(v);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size())
        throw ParseError(line, std::string(key) + ": expected a number, got '" + text + "'");
    return value;
}

inline long long parse_int(int line, std::string_view key, std::string_view v)
{
    long long value = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        // accept integral values written in floating-point notation, e.g. 1e3
        double d = parse_double(line, key, v);
        if (d != std::floor(d))
            throw ParseError(line, std::string(key) + ": expected an integer");
        return static_cast<long long>(d);
    }
    return value;
}

inline bool parse_bool(int line, std::string_view key, std::string_view v)
{
    std::string l = lower(v);
    if (l == "true" || l == "1" || l == "yes" || l == "on")
        return true;
    if (l == "false" || l == "0" || l == "no" || l == "off")
        return false;
    throw ParseError(line, std::string(key) + ": expected a boolean");
}

} // namespace detail

/// Parses the flat `key = value` format. Missing keys keep their defaults.
/// Setting any satellite key enables the NTN configuration; its per-beam
/// bandwidths follow the reuse factor unless given explicitly.
inline Scenario parse_scenario(std::string_view text)
{
    using namespace detail;
    Scenario s;
    NtnConfig ntn;
    bool ntn_seen = false;
    bool dl_bw_set = false;
    bool ul_bw_set = false;

    using Setter = std::function<void(int, std::string_view, std::string_view)>;
    auto num = [](double& field) -> Setter {
        return [&field](int l, std::string_view k, std::string_view v) {
            field = parse_double(l, k, v);
        };
    };
    auto integer = [](int& field) -> Setter {
        return [&field](int l, std::string_view k, std::string_view v) {
            field = static_cast<int>(parse_int(l, k, v));
        };
    };
    auto ntn_num = [&](double& field) -> Setter {
        return [&field, &ntn_seen](int l, std::string_view k, std::string_view v) {
            field = parse_double(l, k, v);
            ntn_seen = true;
        };
    };

    const std::map<std::string, Setter, std::less<>> setters = {
        {"isd_t", num(s.isd_t)},
        {"isd_a",
         [&](int l, std::string_view k, std::string_view v) {
             std::string lv = lower(v);
             if (lv == "inf" || lv == "none" || lv == "absent" || lv.empty())
                 s.isd_a.reset();
             else
                 s.isd_a = parse_double(l, k, v);
         }},
        {"precoder",
         [&](int l, std::string_view, std::string_view v) {
             std::string lv = lower(v);
             if (lv == "zf")
                 s.precoder = Precoder::zf;
             else if (lv == "eda")
                 s.precoder = Precoder::eda;
             else
                 throw ParseError(l, "precoder: expected ZF or EDA");
         }},
        {"direction",
         [&](int l, std::string_view, std::string_view v) {
             std::string lv = lower(v);
             if (lv == "ul")
                 s.direction = Direction::ul;
             else if (lv == "dl")
                 s.direction = Direction::dl;
             else
                 throw ParseError(l, "direction: expected UL or DL");
         }},
        {"carrier_tn", num(s.carrier_tn_hz)},
        {"bandwidth_tn", num(s.bandwidth_tn_hz)},
        {"gue_per_cell", integer(s.gue_per_cell)},
        {"indoor_fraction", num(s.indoor_fraction)},
        {"uav_per_tn_cell", num(s.uav_per_tn_cell)},
        {"evtol_per_tn_cell", num(s.evtol_per_tn_cell)},
        {"n_drops", integer(s.n_drops)},
        {"seed",
         [&](int l, std::string_view k, std::string_view v) {
             long long x = parse_int(l, k, v);
             if (x < 0)
                 throw ParseError(l, "seed: must be non-negative");
             s.seed = static_cast<std::uint64_t>(x);
         }},
        {"rings", integer(s.rings)},
        {"bs_height", num(s.bs_height_m)},
        {"tilt_t", num(s.tilt_t_deg)},
        {"tilt_a", num(s.tilt_a_deg)},
        {"mno_t_power", num(s.mno_t_power_dbm)},
        {"mno_a_power", num(s.mno_a_power_dbm)},
        {"bs_noise_figure", num(s.bs_noise_figure_db)},
        {"ue_noise_figure", num(s.ue_noise_figure_db)},
        {"pc_alpha", num(s.pc_alpha)},
        {"pc_p0", num(s.pc_p0_dbm)},
        {"pc_pmax", num(s.pc_pmax_dbm)},
        {"rb_bandwidth", num(s.rb_bandwidth_hz)},
        {"dl_grant", num(s.dl_grant_hz)},
        {"ul_grant_gue", num(s.ul_grant_gue_hz)},
        {"ul_grant_uav", num(s.ul_grant_uav_hz)},
        {"dl_max_users", integer(s.dl_max_users)},
        {"ul_max_users", integer(s.ul_max_users)},
        {"dl_nulls", integer(s.dl_nulls)},
        {"ul_nulls", integer(s.ul_nulls)},
        {"eda_max_channels", integer(s.eda_max_channels)},
        {"k_ground_los", num(s.k_ground_los_db)},
        {"k_aerial_los", num(s.k_aerial_los_db)},
        {"ntn",
         [&](int l, std::string_view k, std::string_view v) { ntn_seen = parse_bool(l, k, v); }},
        {"orbit_altitude", ntn_num(ntn.orbit_altitude_km)},
        {"n_beams",
         [&](int l, std::string_view k, std::string_view v) {
             ntn.n_beams = static_cast<int>(parse_int(l, k, v));
             ntn_seen = true;
         }},
        {"elevation_deg", ntn_num(ntn.elevation_deg)},
        {"frf",
         [&](int l, std::string_view, std::string_view v) {
             std::string lv = lower(v);
             if (lv == "frf1" || lv == "1")
                 ntn.frf = Frf::frf1;
             else if (lv == "frf3" || lv == "3")
                 ntn.frf = Frf::frf3;
             else
                 throw ParseError(l, "frf: expected FRF1 or FRF3");
             ntn_seen = true;
         }},
        {"dl_bw",
         [&](int l, std::string_view k, std::string_view v) {
             ntn.dl_bw_hz = parse_double(l, k, v);
             ntn_seen = dl_bw_set = true;
         }},
        {"ul_bw",
         [&](int l, std::string_view k, std::string_view v) {
             ntn.ul_bw_hz = parse_double(l, k, v);
             ntn_seen = ul_bw_set = true;
         }},
        {"ntn_carrier", ntn_num(ntn.carrier_hz)},
        {"eirp_density", ntn_num(ntn.eirp_density_dbw_per_mhz)},
        {"g_over_t", ntn_num(ntn.g_over_t_db)},
        {"beam_peak_gain", ntn_num(ntn.beam_peak_gain_dbi)},
        {"beam_hpbw_deg", ntn_num(ntn.beam_hpbw_deg)},
        {"ntn_ul_grant", ntn_num(ntn.ul_grant_hz)},
        {"ntn_ul_power", ntn_num(ntn.ul_tx_power_dbm)},
        {"atmospheric_loss", ntn_num(ntn.atmospheric_loss_db)},
        {"satellite_azimuth_deg", ntn_num(ntn.satellite_azimuth_deg)},
        {"lattice_rotation_deg", ntn_num(ntn.lattice_rotation_deg)},
        {"offload_all",
         [&](int l, std::string_view k, std::string_view v) {
             ntn.offload_all = parse_bool(l, k, v);
             ntn_seen = true;
         }},
    };

    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(line_no, "expected 'key = value'");
        std::string_view key = trim(line.substr(0, eq));
        std::string_view value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ParseError(line_no, "missing key");
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'')) {
            if (value.back() != value.front())
                throw ParseError(line_no, "unterminated string");
            value = value.substr(1, value.size() - 2);
        }
        auto it = setters.find(key);
        if (it == setters.end())
            throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
        it->second(line_no, key, value);
    }

    if (ntn_seen) {
        if (!dl_bw_set)
            ntn.dl_bw_hz = nominal_beam_bandwidth(ntn.frf);
        if (!ul_bw_set)
            ntn.ul_bw_hz = nominal_beam_bandwidth(ntn.frf);
        s.ntn = ntn;
    }
    validate(s);
    return s;
}

inline Scenario load_scenario(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_scenario(buf.str());
}

} // namespace ntnsim
