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
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "geometry.hpp"
#include "kpi.hpp"
#include "ntn_phy.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "tn_phy.hpp"

namespace ntnsim {

// ---------------------------------------------------------------------------
// Terrestrial drop

/// Per-user terrestrial result of one drop; users that were not scheduled
/// (inactive) have a NaN SINR.
struct TnOutcome {
    std::vector<int> serving;
    std::vector<double> sinr_db;
    std::vector<double> rate_mbps;
};

inline double ul_grant_for(const Scenario& s, UserClass cls)
{
    return is_aerial(cls) ? s.ul_grant_uav_hz : s.ul_grant_gue_hz;
}

/// Schedules every active user over one round-robin cycle per cell and
/// evaluates each instant with all cells transmitting simultaneously. Cells
/// with shorter cycles repeat them. A user's SINR is the mean (dB) over its
/// scheduled instants; its time share is one over its cell's cycle length.
inline TnOutcome simulate_terrestrial(const DropState& d, Direction dir, Precoder precoder,
                                      const std::vector<char>& active)
{
    const Scenario& s = d.scenario();
    const int nc = d.n_cells();
    const int nu = d.n_users();
    TnOutcome out;
    out.serving = associate(d);
    out.sinr_db.assign(static_cast<std::size_t>(nu), std::numeric_limits<double>::quiet_NaN());
    out.rate_mbps.assign(static_cast<std::size_t>(nu), 0.0);

    std::vector<std::vector<int>> attached(static_cast<std::size_t>(nc));
    for (int u = 0; u < nu; ++u)
        if (active[static_cast<std::size_t>(u)])
            attached[static_cast<std::size_t>(out.serving[static_cast<std::size_t>(u)])].push_back(u);

    const SchedulerParams sp = SchedulerParams::from(s);
    std::vector<std::vector<Instant>> cycles(static_cast<std::size_t>(nc));
    std::size_t t_max = 0;
    for (int c = 0; c < nc; ++c) {
        const auto& users = attached[static_cast<std::size_t>(c)];
        std::vector<double> bw;
        for (int u : users)
            bw.push_back(ul_grant_for(s, d.user(u).cls));
        RandomStream rng = substream(s.seed, static_cast<std::uint64_t>(d.drop()), StreamTag::schedule,
                                     static_cast<std::uint64_t>(c));
        cycles[static_cast<std::size_t>(c)] = schedule(users, bw, dir, sp, rng);
        t_max = std::max(t_max, cycles[static_cast<std::size_t>(c)].size());
    }

    std::vector<double> ul_power_w(static_cast<std::size_t>(nu), 0.0);
    if (dir == Direction::ul) {
        const PowerControlParams pc = PowerControlParams::from(s);
        for (int u = 0; u < nu; ++u) {
            const int c = out.serving[static_cast<std::size_t>(u)];
            const double pl = -d.link(u, c).coupling_gain_db();
            ul_power_w[static_cast<std::size_t>(u)] = dbm2watt(ul_tx_power(pc, pl, ul_grant_for(s, d.user(u).cls)));
        }
    }

    const NoiseParams noise{s.ue_noise_figure_db, s.bs_noise_figure_db};
    std::vector<double> sum_db(static_cast<std::size_t>(nu), 0.0);
    std::vector<int> samples(static_cast<std::size_t>(nu), 0);
    std::vector<double> granted(static_cast<std::size_t>(nu), 0.0);
    for (std::size_t t = 0; t < t_max; ++t) {
        std::vector<std::vector<Grant>> grants(static_cast<std::size_t>(nc));
        for (int c = 0; c < nc; ++c) {
            const auto& cyc = cycles[static_cast<std::size_t>(c)];
            if (!cyc.empty())
                grants[static_cast<std::size_t>(c)] = cyc[t % cyc.size()];
        }
        const std::vector<TxConfig> configs = build_tx_configs(d, dir, precoder, grants, ul_power_w);
        const auto sinr = compute_sinr(dir, std::span<const TxConfig>(configs), d, noise);
        for (std::size_t k = 0; k < configs.size(); ++k) {
            for (std::size_t g = 0; g < configs[k].grants.size(); ++g) {
                const int u = configs[k].grants[g].user;
                const double v = sinr[k][g];
                if (!std::isfinite(v))
                    throw NumericalError(d.drop(), "non-finite SINR for user " + std::to_string(u));
                sum_db[static_cast<std::size_t>(u)] += lin2db(std::max(v, 1e-30));
                ++samples[static_cast<std::size_t>(u)];
                granted[static_cast<std::size_t>(u)] = configs[k].grants[g].bw_hz;
            }
        }
    }

    for (int u = 0; u < nu; ++u) {
        const auto uz = static_cast<std::size_t>(u);
        if (samples[uz] == 0)
            continue;
        out.sinr_db[uz] = sum_db[uz] / samples[uz];
        const double share = 1.0 / static_cast<double>(cycles[static_cast<std::size_t>(out.serving[uz])].size());
        out.rate_mbps[uz] = rate_map(out.sinr_db[uz], granted[uz], share);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Satellite offloading

struct NtnOutcome {
    std::vector<int> users;  // offloaded user indices
    std::vector<int> beam;
    std::vector<double> sinr_db;
    std::vector<double> rate_mbps;
};

/// Serves `users` from the satellite in DL. Shadowing is drawn per user and
/// shared by all beams and configurations of the drop.
inline NtnOutcome simulate_ntn(const DropState& d, const NtnConfig& cfg, std::vector<int> users)
{
    const Scenario& s = d.scenario();
    const SatelliteGeometry sat = satellite_geometry(cfg.elevation_deg, cfg.orbit_altitude_km, cfg.satellite_azimuth_deg);
    const BeamLattice lat = build_beams(sat, cfg);
    const AperturePattern beam = AperturePattern::make(cfg.beam_peak_gain_dbi, cfg.beam_hpbw_deg, cfg.carrier_hz);

    NtnOutcome out;
    out.users = std::move(users);
    std::vector<NtnLink> links;
    for (int u : out.users) {
        RandomStream rng = substream(s.seed, static_cast<std::uint64_t>(d.drop()), StreamTag::ntn_shadowing,
                                     static_cast<std::uint64_t>(u));
        links.push_back(ntn_link(sat, lat, beam, d.user(u), cfg, rng));
        out.beam.push_back(links.back().serving);
    }
    const auto shares = ntn_schedule(out.beam, Direction::dl, cfg);
    for (std::size_t k = 0; k < out.users.size(); ++k) {
        const double sinr = ntn_dl_sinr(links[k], lat, cfg, d.user(out.users[k]).noise_figure_db);
        out.sinr_db.push_back(sinr);
        out.rate_mbps.push_back(rate_map(sinr, shares[k].bandwidth_hz, shares[k].time_share));
    }
    return out;
}

inline std::vector<int> evtol_users(const DropState& d)
{
    std::vector<int> out;
    for (int u = 0; u < d.n_users(); ++u)
        if (d.user(u).cls == UserClass::evtol)
            out.push_back(u);
    return out;
}

/// Offloaded eVTOLs given terrestrial SINRs of the drop.
inline std::vector<int> select_offloaded(const DropState& d, const TnOutcome& tn, bool offload_all)
{
    const std::vector<int> ev = evtol_users(d);
    std::vector<double> sinr;
    for (int u : ev)
        sinr.push_back(tn.sinr_db[static_cast<std::size_t>(u)]);
    std::vector<int> out;
    for (int k : offload_rule(sinr, offload_all))
        out.push_back(ev[static_cast<std::size_t>(k)]);
    return out;
}

// ---------------------------------------------------------------------------
// Records

inline std::string class_label(UserClass c)
{
    switch (c) {
    case UserClass::gue_outdoor: return "GUE_outdoor";
    case UserClass::gue_indoor: return "GUE_indoor";
    case UserClass::uav: return "UAV";
    case UserClass::evtol: return "eVTOL";
    }
    return "unknown";
}

inline constexpr const char* kOffloadedLabel = "eVTOL_NTN";

inline KpiRecord base_record(const std::string& id, const Scenario& s)
{
    KpiRecord r;
    r.scenario_id = id;
    r.isd_a = s.isd_a;
    r.precoder = to_string(s.precoder);
    r.direction = to_string(s.direction);
    if (s.evtol_per_tn_cell > 0.0)
        r.evtol_density = s.evtol_per_tn_cell;
    return r;
}

inline void append_tn_records(std::vector<KpiRecord>& out, const std::string& id, const DropState& d,
                              const TnOutcome& tn)
{
    for (int u = 0; u < d.n_users(); ++u) {
        const auto uz = static_cast<std::size_t>(u);
        if (std::isnan(tn.sinr_db[uz]))
            continue;
        KpiRecord r = base_record(id, d.scenario());
        r.user_class = class_label(d.user(u).cls);
        r.drop = d.drop();
        r.sinr_db = tn.sinr_db[uz];
        r.rate_mbps = tn.rate_mbps[uz];
        out.push_back(std::move(r));
    }
}

inline void append_ntn_records(std::vector<KpiRecord>& out, const std::string& id, const DropState& d,
                               const NtnConfig& cfg, const NtnOutcome& ntn)
{
    for (std::size_t k = 0; k < ntn.users.size(); ++k) {
        KpiRecord r = base_record(id, d.scenario());
        r.precoder.reset();
        r.direction = "DL";
        r.elevation_deg = cfg.elevation_deg;
        r.frf = to_string(cfg.frf);
        r.user_class = kOffloadedLabel;
        r.drop = d.drop();
        r.sinr_db = ntn.sinr_db[k];
        r.rate_mbps = ntn.rate_mbps[k];
        out.push_back(std::move(r));
    }
}

// ---------------------------------------------------------------------------
// Drivers

/// Runs fn(drop) for every drop on up to `threads` workers and concatenates
/// the results in drop order, so the output does not depend on the schedule.
template <class T>
std::vector<T> run_parallel(int n_drops, int threads, const std::function<std::vector<T>(int)>& fn)
{
    std::vector<std::vector<T>> per_drop(static_cast<std::size_t>(n_drops));
    const int workers = std::max(1, std::min(threads, n_drops));
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&](int w) {
        for (int drop = w; drop < n_drops; drop += workers) {
            try {
                per_drop[static_cast<std::size_t>(drop)] = fn(drop);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                return;
            }
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(work, w);
        for (auto& t : pool)
            t.join();
    }
    if (error)
        std::rethrow_exception(error);
    std::vector<T> out;
    for (auto& v : per_drop)
        out.insert(out.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
    return out;
}

struct RunOptions {
    int threads = 1;
    std::optional<int> n_drops;  // overrides the scenario
    std::string scenario_id = "scenario";
};

/// One scenario: terrestrial records for every user and, with a satellite
/// configured, records of the offloaded eVTOLs.
inline std::vector<KpiRecord> simulate_drop(const Network& net, const Scenario& s, int drop, const std::string& id)
{
    const DropState d(net, s, drop);
    const std::vector<char> active(static_cast<std::size_t>(d.n_users()), 1);
    const TnOutcome tn = simulate_terrestrial(d, s.direction, s.precoder, active);
    std::vector<KpiRecord> out;
    append_tn_records(out, id, d, tn);
    if (s.ntn) {
        const NtnOutcome ntn = simulate_ntn(d, *s.ntn, select_offloaded(d, tn, s.ntn->offload_all));
        append_ntn_records(out, id, d, *s.ntn, ntn);
    }
    return out;
}

inline std::vector<KpiRecord> run_scenario(const Scenario& s, const RunOptions& opt = {})
{
    validate(s);
    const Network net = build_network(s);
    const int n = opt.n_drops.value_or(s.n_drops);
    return run_parallel<KpiRecord>(n, opt.threads,
                                   [&](int drop) { return simulate_drop(net, s, drop, opt.scenario_id); });
}

// ---------------------------------------------------------------------------
// Summaries

struct SummaryRow {
    std::string scenario_id;
    std::string user_class;
    std::size_t n = 0;
    double median_sinr_db = 0.0;
    double p95_sinr_db = 0.0;
    double median_rate_mbps = 0.0;
    double p95_rate_mbps = 0.0;
    double outage = 0.0;
};

inline SummaryRow summarize(const std::vector<KpiRecord>& records, const std::string& scenario_id,
                            const std::string& user_class)
{
    auto keep = [&](const KpiRecord& r) {
        if (r.scenario_id != scenario_id)
            return false;
        if (user_class == "GUE")
            return r.user_class == "GUE_outdoor" || r.user_class == "GUE_indoor";
        return r.user_class == user_class;
    };
    const auto sinr = collect(records, keep, [](const KpiRecord& r) { return r.sinr_db; });
    const auto rate = collect(records, keep, [](const KpiRecord& r) { return r.rate_mbps; });
    SummaryRow row;
    row.scenario_id = scenario_id;
    row.user_class = user_class;
    row.n = sinr.size();
    if (sinr.empty())
        return row;
    row.median_sinr_db = percentile(sinr, 50.0);
    row.p95_sinr_db = percentile(sinr, 95.0);
    row.median_rate_mbps = percentile(rate, 50.0);
    row.p95_rate_mbps = percentile(rate, 95.0);
    row.outage = outage_fraction(sinr);
    return row;
}

// ---------------------------------------------------------------------------
// Example I: terrestrial operator plus an uptilted aerial operator

struct SweepOptions {
    std::uint64_t seed = 1;
    int n_drops = 50;
    int threads = 1;
};

struct SweepResult {
    std::vector<KpiRecord> records;
    std::vector<SummaryRow> summary;
};

inline std::string isd_label(const std::optional<double>& isd_a)
{
    return isd_a ? std::to_string(static_cast<int>(std::lround(*isd_a))) : std::string("none");
}

inline Scenario example1_scenario(std::optional<double> isd_a, Precoder p, Direction dir, const SweepOptions& opt)
{
    Scenario s;
    s.isd_a = isd_a;
    s.precoder = p;
    s.direction = dir;
    s.seed = opt.seed;
    s.n_drops = opt.n_drops;
    return s;
}

inline std::string example1_id(const std::optional<double>& isd_a, Precoder p, Direction dir)
{
    return "ex1_isdA-" + isd_label(isd_a) + "_" + to_string(p) + "_" + to_string(dir);
}

inline const std::vector<std::optional<double>>& example1_isds()
{
    static const std::vector<std::optional<double>> v = {std::nullopt, 1500.0, 1000.0, 500.0};
    return v;
}

/// Runs the selected (isd_a, precoder, direction) combinations; an empty
/// filter runs all sixteen.
inline SweepResult sweep_example1(const SweepOptions& opt,
                                  const std::function<bool(const std::optional<double>&, Precoder, Direction)>& filter = {})
{
    SweepResult res;
    for (Direction dir : {Direction::ul, Direction::dl}) {
        for (const auto& isd : example1_isds()) {
            for (Precoder p : {Precoder::zf, Precoder::eda}) {
                if (filter && !filter(isd, p, dir))
                    continue;
                const Scenario s = example1_scenario(isd, p, dir, opt);
                const std::string id = example1_id(isd, p, dir);
                auto rec = run_scenario(s, {opt.threads, opt.n_drops, id});
                res.summary.push_back(summarize(rec, id, "UAV"));
                res.summary.push_back(summarize(rec, id, "GUE"));
                res.records.insert(res.records.end(), std::make_move_iterator(rec.begin()),
                                   std::make_move_iterator(rec.end()));
            }
        }
    }
    return res;
}

// ---------------------------------------------------------------------------
// Example II: eVTOLs on the terrestrial network, offloaded to a LEO satellite

inline const std::vector<double>& example2_densities()
{
    static const std::vector<double> v = {0.1, 0.2, 0.5, 1.0};
    return v;
}

inline constexpr double kExample2NtnDensity = 1.0;
inline constexpr double kRateStudyAreaKm2 = 10.8;

inline Scenario example2_scenario(double evtol_density, const SweepOptions& opt)
{
    Scenario s;
    s.isd_a.reset();
    s.precoder = Precoder::zf;
    s.direction = Direction::dl;
    s.uav_per_tn_cell = 0.0;
    s.evtol_per_tn_cell = evtol_density;
    s.seed = opt.seed;
    s.n_drops = opt.n_drops;
    return s;
}

inline std::vector<NtnConfig> example2_ntn_configs()
{
    std::vector<NtnConfig> out;
    for (double el : {90.0, 87.0}) {
        for (Frf f : {Frf::frf1, Frf::frf3}) {
            NtnConfig c;
            c.elevation_deg = el;
            c.frf = f;
            c.dl_bw_hz = c.ul_bw_hz = nominal_beam_bandwidth(f);
            out.push_back(c);
        }
    }
    return out;
}

inline std::string example2_id(double density) { return "ex2_tn_density-" + detail::fmt6(density); }

inline std::string example2_ntn_id(const NtnConfig& c)
{
    return "ex2_ntn_el-" + std::to_string(static_cast<int>(std::lround(c.elevation_deg))) + "_" + to_string(c.frf);
}

inline std::string rate_study_id(int n_users) { return "ex2_rate_users-" + std::to_string(n_users); }

/// n eVTOLs uniformly over a disc of the given area around the service-area
/// centre, all served by one satellite configuration.
inline std::vector<KpiRecord> rate_study_drop(const NtnConfig& cfg, int n_users, double area_km2, std::uint64_t seed,
                                              int drop)
{
    RandomStream rng = substream(seed, static_cast<std::uint64_t>(drop), StreamTag::rate_study,
                                 static_cast<std::uint64_t>(n_users));
    const double radius_m = std::sqrt(area_km2 / std::numbers::pi) * 1e3;
    const SatelliteGeometry sat = satellite_geometry(cfg.elevation_deg, cfg.orbit_altitude_km, cfg.satellite_azimuth_deg);
    const BeamLattice lat = build_beams(sat, cfg);
    const AperturePattern beam = AperturePattern::make(cfg.beam_peak_gain_dbi, cfg.beam_hpbw_deg, cfg.carrier_hz);
    std::vector<UserTerminal> users(static_cast<std::size_t>(n_users));
    std::vector<NtnLink> links;
    std::vector<int> serving;
    for (int k = 0; k < n_users; ++k) {
        UserTerminal& u = users[static_cast<std::size_t>(k)];
        u.id = k;
        u.cls = UserClass::evtol;
        const double r = radius_m * std::sqrt(rng.uniform());
        const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
        u.position = Vec3(r * std::cos(phi), r * std::sin(phi), kEvtolHeight);
        links.push_back(ntn_link(sat, lat, beam, u, cfg, rng));
        serving.push_back(links.back().serving);
    }
    const auto shares = ntn_schedule(serving, Direction::dl, cfg);
    std::vector<KpiRecord> out;
    for (int k = 0; k < n_users; ++k) {
        const auto kz = static_cast<std::size_t>(k);
        KpiRecord r;
        r.scenario_id = rate_study_id(n_users);
        r.direction = "DL";
        r.elevation_deg = cfg.elevation_deg;
        r.frf = to_string(cfg.frf);
        r.user_class = kOffloadedLabel;
        r.drop = drop;
        r.sinr_db = ntn_dl_sinr(links[kz], lat, cfg, users[kz].noise_figure_db);
        r.rate_mbps = rate_map(r.sinr_db, shares[kz].bandwidth_hz, shares[kz].time_share);
        out.push_back(std::move(r));
    }
    return out;
}

inline const std::vector<int>& rate_study_counts()
{
    static const std::vector<int> v = {27, 7, 1};
    return v;
}

/// Terrestrial runs for every eVTOL density; at the reference density the
/// same drops also feed the four satellite configurations. Ends with the
/// offloaded-rate study.
inline SweepResult sweep_example2(const SweepOptions& opt, bool offload_all = false)
{
    SweepResult res;
    for (double density : example2_densities()) {
        const Scenario s = example2_scenario(density, opt);
        const Network net = build_network(s);
        const std::string id = example2_id(density);
        const bool with_ntn = density == kExample2NtnDensity;
        auto configs = example2_ntn_configs();
        for (auto& c : configs)
            c.offload_all = offload_all;
        auto rec = run_parallel<KpiRecord>(opt.n_drops, opt.threads, [&](int drop) {
            const DropState d(net, s, drop);
            const std::vector<char> active(static_cast<std::size_t>(d.n_users()), 1);
            const TnOutcome tn = simulate_terrestrial(d, s.direction, s.precoder, active);
            std::vector<KpiRecord> out;
            append_tn_records(out, id, d, tn);
            if (with_ntn) {
                for (const NtnConfig& c : configs) {
                    const NtnOutcome ntn = simulate_ntn(d, c, select_offloaded(d, tn, c.offload_all));
                    append_ntn_records(out, example2_ntn_id(c), d, c, ntn);
                }
            }
            return out;
        });
        res.summary.push_back(summarize(rec, id, "eVTOL"));
        if (with_ntn)
            for (const NtnConfig& c : configs)
                res.summary.push_back(summarize(rec, example2_ntn_id(c), kOffloadedLabel));
        res.records.insert(res.records.end(), std::make_move_iterator(rec.begin()), std::make_move_iterator(rec.end()));
    }

    NtnConfig ref;  // FRF3 at zenith
    for (int n : rate_study_counts()) {
        auto rec = run_parallel<KpiRecord>(opt.n_drops, opt.threads, [&](int drop) {
            return rate_study_drop(ref, n, kRateStudyAreaKm2, opt.seed, drop);
        });
        res.summary.push_back(summarize(rec, rate_study_id(n), kOffloadedLabel));
        res.records.insert(res.records.end(), std::make_move_iterator(rec.begin()), std::make_move_iterator(rec.end()));
    }
    return res;
}

} // namespace ntnsim
