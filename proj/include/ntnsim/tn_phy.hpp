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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "antenna.hpp"
#include "channel.hpp"
#include "geometry.hpp"
#include "precoding.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "units.hpp"

namespace ntnsim {

/// Open-loop fractional uplink power control.
struct PowerControlParams {
    double alpha = 0.8;
    double p0_dbm = -100.0;  // per resource block
    double p_max_dbm = 23.0;
    double rb_bandwidth_hz = 360e3;

    static PowerControlParams from(const Scenario& s)
    {
        return {s.pc_alpha, s.pc_p0_dbm, s.pc_pmax_dbm, s.rb_bandwidth_hz};
    }
};

/// P = min(p_max, p0 + 10 log10(n_rb) + alpha * PL); partial blocks are dropped.
inline double ul_tx_power(const PowerControlParams& pc, double pathloss_db, double granted_bw_hz)
{
    const double n_rb = std::max(1.0, std::floor(granted_bw_hz / pc.rb_bandwidth_hz + 1e-9));
    return std::min(pc.p_max_dbm, pc.p0_dbm + 10.0 * std::log10(n_rb) + pc.alpha * pathloss_db);
}

class NumericalError : public std::runtime_error {
  public:
    NumericalError(int drop, const std::string& what)
        : std::runtime_error("drop " + std::to_string(drop) + ": " + what), drop_(drop)
    {
    }
    int drop() const { return drop_; }

  private:
    int drop_;
};

// ---------------------------------------------------------------------------
// Network

struct BaseStation {
    int id = 0;
    Operator op = Operator::terrestrial;
    int site = 0;
    Vec2 site_position = Vec2::Zero();
    double height = 25.0;
    ArrayConfig array;
    double power_dbm = 46.0;
};

/// Both terrestrial operators on the terrestrial wrap-around torus. Cells of
/// the terrestrial operator come first, then those of the aerial operator.
struct Network {
    Layout layout_t;
    std::optional<Layout> layout_a;
    std::vector<BaseStation> cells;
    ElementPattern pattern;
    int n_cells_t = 0;

    const Layout& layout_of(Operator op) const { return op == Operator::aerial ? *layout_a : layout_t; }

    int n_cells() const { return static_cast<int>(cells.size()); }

    double isd_of(Operator op) const { return layout_of(op).isd; }

    /// RNG key of the site hosting a cell; sectors of a site share it.
    std::uint64_t site_key(int cell) const
    {
        const BaseStation& bs = cells[static_cast<std::size_t>(cell)];
        return (bs.op == Operator::aerial ? 1'000'000ULL : 0ULL) + static_cast<std::uint64_t>(bs.site);
    }

    /// Both cells' sites within two tiers of each other (on the torus).
    bool within_two_tiers(int a, int b) const
    {
        const BaseStation& ca = cells[static_cast<std::size_t>(a)];
        const BaseStation& cb = cells[static_cast<std::size_t>(b)];
        const double radius = 2.01 * std::max(isd_of(ca.op), isd_of(cb.op));
        return wrap_distance(ca.site_position, cb.site_position, layout_t) <= radius;
    }
};

/// Offset of the aerial lattice relative to the terrestrial one: half a
/// terrestrial cell circumradius, along +y.
inline Vec2 aerial_lattice_offset(double isd_t) { return Vec2(0.0, isd_t / 6.0); }

inline Network build_network(const Scenario& s)
{
    Network net;
    net.layout_t = build_hex_layout(s.isd_t, s.rings, s.bs_height_m);
    if (s.isd_a)
        net.layout_a = build_overlay_layout(*s.isd_a, aerial_lattice_offset(s.isd_t), net.layout_t, s.bs_height_m);
    auto add_cells = [&](const Layout& layout, Operator op, double tilt, double power) {
        for (int c = 0; c < layout.n_cells(); ++c) {
            BaseStation bs;
            bs.id = static_cast<int>(net.cells.size());
            bs.op = op;
            bs.site = layout.site_of(c);
            bs.site_position = layout.sites[static_cast<std::size_t>(bs.site)].position;
            bs.height = layout.sites[static_cast<std::size_t>(bs.site)].height;
            bs.array.azimuth_deg = layout.azimuth_of(c);
            bs.array.mech_tilt_deg = tilt;
            bs.power_dbm = power;
            net.cells.push_back(bs);
        }
    };
    add_cells(net.layout_t, Operator::terrestrial, s.tilt_t_deg, s.mno_t_power_dbm);
    net.n_cells_t = net.layout_t.n_cells();
    if (net.layout_a)
        add_cells(*net.layout_a, Operator::aerial, s.tilt_a_deg, s.mno_a_power_dbm);
    return net;
}

// ---------------------------------------------------------------------------
// Per-drop link state

/// Large-scale description of a (user, cell) link as used by the engine.
struct LinkLargeScale {
    Vec3 direction = Vec3::UnitX();  // unit vector from the (wrapped) BS to the user
    double d2d = 0.0;
    double d3d = 0.0;
    bool los = true;
    PathlossBranch branch = PathlossBranch::uma_los;
    double loss_db = 0.0;          // pathloss + shadowing + entry loss
    double element_gain_db = 0.0;  // BS element gain toward the user
    double k_lin = 0.0;

    double coupling_gain_db() const { return element_gain_db - loss_db; }
};

/// Everything random about one drop: user positions, large-scale link states
/// and, on demand, small-scale channels. Channels are regenerated from their
/// own substream, so the object is read-only after construction.
class DropState {
  public:
    DropState(const Network& net, const Scenario& s, int drop) : net_(&net), scenario_(&s), drop_(drop)
    {
        RandomStream rng = substream(s.seed, static_cast<std::uint64_t>(drop), StreamTag::user_drop);
        users_ = drop_users(net.layout_t, s, rng);
        compute_links();
    }

    const Network& network() const { return *net_; }
    const Scenario& scenario() const { return *scenario_; }
    int drop() const { return drop_; }
    int n_users() const { return static_cast<int>(users_.size()); }
    int n_cells() const { return net_->n_cells(); }
    const std::vector<UserTerminal>& users() const { return users_; }
    const UserTerminal& user(int u) const { return users_[static_cast<std::size_t>(u)]; }

    const LinkLargeScale& link(int u, int c) const
    {
        return links_[static_cast<std::size_t>(u) * static_cast<std::size_t>(n_cells()) + static_cast<std::size_t>(c)];
    }

    /// Linear large-scale gain including the BS element gain.
    double large_scale_gain(int u, int c) const { return db2lin(link(u, c).coupling_gain_db()); }

    /// Channel h (ports) between cell c and user u; the user receives h^H x.
    CVec channel(int u, int c) const
    {
        const LinkLargeScale& l = link(u, c);
        const BaseStation& bs = net_->cells[static_cast<std::size_t>(c)];
        const CVec a_tx = port_response(bs.array, net_->pattern, l.direction);
        RandomStream rng = substream(scenario_->seed, static_cast<std::uint64_t>(drop_), StreamTag::small_scale,
                                     static_cast<std::uint64_t>(u), static_cast<std::uint64_t>(c));
        return synthesize_user_channel(db2lin(-l.loss_db), l.k_lin, a_tx, rng);
    }

  private:
    void compute_links()
    {
        const Scenario& s = *scenario_;
        const int nc = n_cells();
        links_.resize(users_.size() * static_cast<std::size_t>(nc));
        for (int u = 0; u < n_users(); ++u) {
            const UserTerminal& ut = users_[static_cast<std::size_t>(u)];
            const Vec2 uxy = ut.position.head<2>();
            const double h_ut = ut.position.z();
            const double o2i = entry_loss(ut, s.carrier_tn_hz);
            for (int c = 0; c < nc; ++c) {
                const BaseStation& bs = net_->cells[static_cast<std::size_t>(c)];
                const Vec2 img = nearest_image(uxy, bs.site_position, net_->layout_t);
                LinkLargeScale& l = links_[static_cast<std::size_t>(u) * static_cast<std::size_t>(nc) + static_cast<std::size_t>(c)];
                const Vec3 delta(uxy.x() - img.x(), uxy.y() - img.y(), h_ut - bs.height);
                l.d2d = delta.head<2>().norm();
                l.d3d = std::max(delta.norm(), 1.0);
                l.direction = delta.norm() > 0.0 ? Vec3(delta.normalized()) : Vec3::UnitX();

                const std::uint64_t site = net_->site_key(c);
                RandomStream los_rng = substream(s.seed, static_cast<std::uint64_t>(drop_), StreamTag::los,
                                                 static_cast<std::uint64_t>(u), site);
                l.los = los_rng.uniform() < los_probability(ut.cls, l.d2d, h_ut);
                l.branch = select_branch(ut.cls, l.los, h_ut);
                RandomStream sf_rng = substream(s.seed, static_cast<std::uint64_t>(drop_), StreamTag::shadowing,
                                                static_cast<std::uint64_t>(u), site);
                const double shadow = shadowing_draw(l.branch, h_ut, sf_rng);
                l.loss_db = pathloss(l.branch, l.d3d, l.d2d, bs.height, h_ut, s.carrier_tn_hz) + shadow + o2i;
                l.element_gain_db = element_gain_toward(net_->pattern, bs.array, l.direction);
                if (!l.los)
                    l.k_lin = 0.0;
                else
                    l.k_lin = db2lin(h_ut <= kGroundHeightLimit ? s.k_ground_los_db : s.k_aerial_los_db);
            }
        }
    }

    const Network* net_;
    const Scenario* scenario_;
    int drop_;
    std::vector<UserTerminal> users_;
    std::vector<LinkLargeScale> links_;
};

// ---------------------------------------------------------------------------
// Association

/// Index of the strongest candidate per row of `rsrp_db` (users x cells);
/// ties go to the lowest column.
inline std::vector<int> associate(const Eigen::MatrixXd& rsrp_db)
{
    std::vector<int> out(static_cast<std::size_t>(rsrp_db.rows()), -1);
    for (Eigen::Index u = 0; u < rsrp_db.rows(); ++u) {
        int best = -1;
        double best_v = -std::numeric_limits<double>::infinity();
        for (Eigen::Index c = 0; c < rsrp_db.cols(); ++c) {
            if (rsrp_db(u, c) > best_v) {
                best_v = rsrp_db(u, c);
                best = static_cast<int>(c);
            }
        }
        out[static_cast<std::size_t>(u)] = best;
    }
    return out;
}

/// Serving cell of every user among the cells of its own operator.
inline std::vector<int> associate(const DropState& d)
{
    const Network& net = d.network();
    std::vector<int> serving(static_cast<std::size_t>(d.n_users()), -1);
    for (int u = 0; u < d.n_users(); ++u) {
        const Operator op = d.user(u).serving_operator;
        const int first = op == Operator::aerial ? net.n_cells_t : 0;
        const int last = op == Operator::aerial ? net.n_cells() : net.n_cells_t;
        Eigen::MatrixXd row(1, last - first);
        for (int c = first; c < last; ++c)
            row(0, c - first) = d.link(u, c).coupling_gain_db();
        serving[static_cast<std::size_t>(u)] = first + associate(row)[0];
    }
    return serving;
}

// ---------------------------------------------------------------------------
// Scheduling

struct Grant {
    int user = 0;
    double f0_hz = 0.0;
    double bw_hz = 0.0;

    double f1_hz() const { return f0_hz + bw_hz; }
};

inline double overlap_hz(const Grant& a, const Grant& b)
{
    return std::max(0.0, std::min(a.f1_hz(), b.f1_hz()) - std::max(a.f0_hz, b.f0_hz));
}

using Instant = std::vector<Grant>;

struct SchedulerParams {
    double bandwidth_hz = 100e6;
    double dl_grant_hz = 50e6;
    int dl_max_users = 8;  // spatially multiplexed per subband
    int ul_max_users = 4;

    static SchedulerParams from(const Scenario& s)
    {
        return {s.bandwidth_tn_hz, s.dl_grant_hz, s.dl_max_users, s.ul_max_users};
    }
};

/// One round-robin cycle: every attached user is served exactly once.
///
/// The order is a random permutation fixed for the drop. In DL the band is cut
/// into subbands of dl_grant_hz, each carrying up to dl_max_users users; in UL
/// up to ul_max_users grants of the per-user size are packed from the band edge.
inline std::vector<Instant> schedule(std::span<const int> users, std::span<const double> ul_grant_hz,
                                     Direction dir, const SchedulerParams& p, RandomStream& rng)
{
    std::vector<std::size_t> order(users.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<Instant> cycle;
    if (dir == Direction::dl) {
        const int n_sub = std::max(1, static_cast<int>(std::floor(p.bandwidth_hz / p.dl_grant_hz + 1e-9)));
        const std::size_t per_instant = static_cast<std::size_t>(n_sub * p.dl_max_users);
        for (std::size_t start = 0; start < order.size(); start += per_instant) {
            Instant inst;
            const std::size_t end = std::min(order.size(), start + per_instant);
            for (std::size_t k = start; k < end; ++k) {
                const int sub = static_cast<int>((k - start) % static_cast<std::size_t>(n_sub));
                inst.push_back({users[order[k]], sub * p.dl_grant_hz, p.dl_grant_hz});
            }
            cycle.push_back(std::move(inst));
        }
        return cycle;
    }
    std::size_t k = 0;
    while (k < order.size()) {
        Instant inst;
        double used = 0.0;
        while (k < order.size() && static_cast<int>(inst.size()) < p.ul_max_users) {
            const double bw = ul_grant_hz[order[k]];
            if (used + bw > p.bandwidth_hz + 1e-6)
                break;
            inst.push_back({users[order[k]], used, bw});
            used += bw;
            ++k;
        }
        if (inst.empty())
            throw std::invalid_argument("schedule: grant larger than the band");
        cycle.push_back(std::move(inst));
    }
    return cycle;
}

// ---------------------------------------------------------------------------
// Transmission configuration and SINR

/// Scheduling outcome of one cell at one instant.
struct TxConfig {
    int cell = 0;
    std::vector<Grant> grants;
    BeamWeights weights;             // one column per grant
    std::vector<double> power_w;     // per grant: DL share of the cell power, UL user power
};

struct NoiseParams {
    double ue_noise_figure_db = 9.0;
    double bs_noise_figure_db = 7.0;
};

/// Per-grant linear SINR of every configuration, counting co-channel
/// interference from all cells of both operators on overlapping spectrum.
///
/// `links` must provide `CVec channel(int user, int cell) const`.
template <class Links>
std::vector<std::vector<double>> compute_sinr(Direction dir, std::span<const TxConfig> configs, const Links& links,
                                              const NoiseParams& noise)
{
    std::vector<std::vector<double>> sinr(configs.size());
    if (dir == Direction::dl) {
        for (std::size_t a = 0; a < configs.size(); ++a) {
            const TxConfig& own = configs[a];
            sinr[a].resize(own.grants.size());
            for (std::size_t g = 0; g < own.grants.size(); ++g) {
                const Grant& rx = own.grants[g];
                double desired = 0.0;
                double interference = 0.0;
                for (std::size_t b = 0; b < configs.size(); ++b) {
                    const TxConfig& other = configs[b];
                    bool any = false;
                    for (const Grant& tx : other.grants)
                        any = any || overlap_hz(tx, rx) > 0.0;
                    if (!any)
                        continue;
                    const CVec h = links.channel(rx.user, other.cell);
                    const CVec y = other.weights.w.adjoint() * h;
                    for (std::size_t j = 0; j < other.grants.size(); ++j) {
                        const double frac = overlap_hz(other.grants[j], rx) / other.grants[j].bw_hz;
                        if (frac <= 0.0)
                            continue;
                        const double pw = other.power_w[j] * std::norm(y(static_cast<Eigen::Index>(j)));
                        if (a == b && j == g)
                            desired = pw;
                        else
                            interference += frac * pw;
                    }
                }
                const double n0 = dbm2watt(noise_power_dbm(rx.bw_hz, noise.ue_noise_figure_db));
                sinr[a][g] = desired / (interference + n0);
            }
        }
        return sinr;
    }

    for (std::size_t b = 0; b < configs.size(); ++b) {
        const TxConfig& rx_cell = configs[b];
        const std::size_t k = rx_cell.grants.size();
        std::vector<double> desired(k, 0.0);
        std::vector<double> interference(k, 0.0);
        for (std::size_t a = 0; a < configs.size(); ++a) {
            const TxConfig& tx_cell = configs[a];
            for (std::size_t j = 0; j < tx_cell.grants.size(); ++j) {
                const Grant& tx = tx_cell.grants[j];
                bool any = false;
                for (const Grant& g : rx_cell.grants)
                    any = any || overlap_hz(tx, g) > 0.0;
                if (!any)
                    continue;
                const CVec h = links.channel(tx.user, rx_cell.cell);
                const CVec y = rx_cell.weights.w.adjoint() * h;
                for (std::size_t i = 0; i < k; ++i) {
                    const double pw = tx_cell.power_w[j] * std::norm(y(static_cast<Eigen::Index>(i)));
                    if (a == b && j == i) {
                        desired[i] = pw;
                        continue;
                    }
                    const double frac = overlap_hz(tx, rx_cell.grants[i]) / tx.bw_hz;
                    interference[i] += frac * pw;
                }
            }
        }
        sinr[b].resize(k);
        for (std::size_t i = 0; i < k; ++i) {
            const double wn = rx_cell.weights.w.col(static_cast<Eigen::Index>(i)).squaredNorm();
            const double n0 = dbm2watt(noise_power_dbm(rx_cell.grants[i].bw_hz, noise.bs_noise_figure_db)) * wn;
            sinr[b][i] = desired[i] / (interference[i] + n0);
        }
    }
    return sinr;
}

// ---------------------------------------------------------------------------
// Building per-cell configurations for one instant

namespace detail {

struct Candidate {
    double gain;
    int user;
    double weight;  // amplitude applied to the channel column
};

inline CMat strongest_channels(const DropState& d, int cell, std::vector<Candidate> cands, int max_channels)
{
    std::stable_sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
        return a.gain != b.gain ? a.gain > b.gain : a.user < b.user;
    });
    if (max_channels > 0 && static_cast<int>(cands.size()) > max_channels)
        cands.resize(static_cast<std::size_t>(max_channels));
    const BaseStation& bs = d.network().cells[static_cast<std::size_t>(cell)];
    CMat out(bs.array.ports(), static_cast<Eigen::Index>(cands.size()));
    for (std::size_t k = 0; k < cands.size(); ++k)
        out.col(static_cast<Eigen::Index>(k)) = cands[k].weight * d.channel(cands[k].user, cell);
    return out;
}

} // namespace detail

/// Fills precoders (DL) or combiners (UL) and powers for every cell active at
/// this instant. `grants[c]` lists the grants of cell c; `ul_power_w[u]` is the
/// uplink transmit power of user u.
inline std::vector<TxConfig> build_tx_configs(const DropState& d, Direction dir, Precoder precoder,
                                              const std::vector<std::vector<Grant>>& grants,
                                              const std::vector<double>& ul_power_w)
{
    const Scenario& s = d.scenario();
    const Network& net = d.network();
    std::vector<TxConfig> configs;
    for (int c = 0; c < static_cast<int>(grants.size()); ++c) {
        if (grants[static_cast<std::size_t>(c)].empty())
            continue;
        TxConfig cfg;
        cfg.cell = c;
        cfg.grants = grants[static_cast<std::size_t>(c)];
        configs.push_back(std::move(cfg));
    }

    const int ports = ArrayConfig{}.ports();
    for (TxConfig& cfg : configs) {
        const int c = cfg.cell;
        const std::size_t k = cfg.grants.size();
        cfg.weights.w = CMat::Zero(ports, static_cast<Eigen::Index>(k));
        cfg.power_w.assign(k, 0.0);

        if (dir == Direction::dl) {
            const double p_user = dbm2watt(net.cells[static_cast<std::size_t>(c)].power_dbm) / static_cast<double>(k);
            std::fill(cfg.power_w.begin(), cfg.power_w.end(), p_user);
            // one spatial multiplexing group per subband
            std::vector<double> starts;
            for (const Grant& g : cfg.grants)
                if (std::find(starts.begin(), starts.end(), g.f0_hz) == starts.end())
                    starts.push_back(g.f0_hz);
            for (double f0 : starts) {
                std::vector<std::size_t> idx;
                for (std::size_t j = 0; j < k; ++j)
                    if (cfg.grants[j].f0_hz == f0)
                        idx.push_back(j);
                CMat h(ports, static_cast<Eigen::Index>(idx.size()));
                for (std::size_t j = 0; j < idx.size(); ++j)
                    h.col(static_cast<Eigen::Index>(j)) = d.channel(cfg.grants[idx[j]].user, c);
                BeamWeights bw;
                if (precoder == Precoder::eda && s.dl_nulls > 0) {
                    std::vector<detail::Candidate> victims;
                    const Grant& ref = cfg.grants[idx.front()];
                    for (const TxConfig& other : configs) {
                        if (other.cell == c || !net.within_two_tiers(c, other.cell))
                            continue;
                        for (const Grant& g : other.grants)
                            if (overlap_hz(g, ref) > 0.0)
                                victims.push_back({d.large_scale_gain(g.user, c), g.user, 1.0});
                    }
                    bw = eda_precoder(h, detail::strongest_channels(d, c, std::move(victims), s.eda_max_channels),
                                      s.dl_nulls);
                } else {
                    bw = zf_precoder(h);
                }
                for (std::size_t j = 0; j < idx.size(); ++j)
                    cfg.weights.w.col(static_cast<Eigen::Index>(idx[j])) = bw.w.col(static_cast<Eigen::Index>(j));
                cfg.weights.regularized = cfg.weights.regularized || bw.regularized;
                cfg.weights.n_nulls = std::max(cfg.weights.n_nulls, bw.n_nulls);
            }
            continue;
        }

        CMat h(ports, static_cast<Eigen::Index>(k));
        for (std::size_t j = 0; j < k; ++j) {
            const int u = cfg.grants[j].user;
            h.col(static_cast<Eigen::Index>(j)) = d.channel(u, c);
            cfg.power_w[j] = ul_power_w[static_cast<std::size_t>(u)];
        }
        BeamWeights bw;
        if (precoder == Precoder::eda && s.ul_nulls > 0) {
            std::vector<detail::Candidate> interferers;
            for (const TxConfig& other : configs) {
                if (other.cell == c)
                    continue;
                for (const Grant& g : other.grants) {
                    bool overlaps = false;
                    for (const Grant& own : cfg.grants)
                        overlaps = overlaps || overlap_hz(g, own) > 0.0;
                    if (!overlaps)
                        continue;
                    const double p = ul_power_w[static_cast<std::size_t>(g.user)];
                    interferers.push_back({p * d.large_scale_gain(g.user, c), g.user, std::sqrt(p)});
                }
            }
            bw = eda_combiner(h, detail::strongest_channels(d, c, std::move(interferers), s.eda_max_channels),
                              s.ul_nulls);
        } else {
            bw = zf_precoder(h);
        }
        cfg.weights = std::move(bw);
    }
    return configs;
}

} // namespace ntnsim
