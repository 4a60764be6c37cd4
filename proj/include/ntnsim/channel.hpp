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
#include <boost/random/normal_distribution.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "antenna.hpp"
#include "geometry.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "units.hpp"

namespace ntnsim {

using CMat = Eigen::MatrixXcd;

/// Large-scale state of one BS-user link, plus the K-factor used for its
/// small-scale realisation.
struct LinkState {
    int tx_id = 0;
    int rx_id = 0;
    double d2d = 0.0;
    double d3d = 0.0;
    bool los = true;
    double pathloss_db = 0.0;
    double shadowing_db = 0.0;
    double entry_loss_db = 0.0;
    double k_factor_db = 0.0;
    double element_gain_db = 0.0;

    double total_loss_db() const { return pathloss_db + shadowing_db + entry_loss_db; }
};

enum class PathlossBranch { uma_los, uma_nlos, uma_av_los, uma_av_nlos, free_space };

inline constexpr double kGroundHeightLimit = 22.5;   // top of the terrestrial UMa range
inline constexpr double kAerialLosHeight = 100.0;    // LoS certain above this height
inline constexpr double kAerialModelCeiling = 300.0; // aerial UMa range ends here

/// LoS probability: terrestrial UMa for ground heights, the aerial UMa family
/// between 22.5 m and 100 m, and certainty above.
inline double los_probability(UserClass cls, double d2d, double h_ut)
{
    if (d2d < 0.0)
        throw std::domain_error("los_probability: negative distance");
    if (cls == UserClass::evtol || h_ut > kAerialLosHeight)
        return 1.0;
    if (h_ut <= kGroundHeightLimit) {
        if (d2d <= 18.0)
            return 1.0;
        const double c = h_ut <= 13.0 ? 0.0 : std::pow((h_ut - 13.0) / 10.0, 1.5);
        const double base = 18.0 / d2d + std::exp(-d2d / 63.0) * (1.0 - 18.0 / d2d);
        return std::min(1.0, base * (1.0 + c * 1.25 * std::pow(d2d / 100.0, 3) * std::exp(-d2d / 150.0)));
    }
    const double d1 = std::max(460.0 * std::log10(h_ut) - 700.0, 18.0);
    if (d2d <= d1)
        return 1.0;
    const double p1 = 4300.0 * std::log10(h_ut) - 3800.0;
    return d1 / d2d + std::exp(-d2d / p1) * (1.0 - d1 / d2d);
}

/// Deterministic model-branch selection for a link.
inline PathlossBranch select_branch(UserClass cls, bool los, double h_ut)
{
    if (cls == UserClass::evtol || h_ut > kAerialModelCeiling)
        return PathlossBranch::free_space;
    if (h_ut <= kGroundHeightLimit)
        return los ? PathlossBranch::uma_los : PathlossBranch::uma_nlos;
    return los ? PathlossBranch::uma_av_los : PathlossBranch::uma_av_nlos;
}

inline double free_space_pathloss(double d_m, double carrier_hz)
{
    return 32.45 + 20.0 * std::log10(carrier_hz / 1e6) + 20.0 * std::log10(d_m / 1e3);
}

namespace detail {

inline double uma_los(double d3d, double d2d, double h_bs, double h_ut, double fc_ghz)
{
    const double h_e = 1.0;
    const double d_bp = 4.0 * (h_bs - h_e) * std::max(h_ut - h_e, 0.1) * fc_ghz * 1e9 / kSpeedOfLight;
    if (d2d <= d_bp)
        return 28.0 + 22.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz);
    return 28.0 + 40.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz) -
           9.0 * std::log10(d_bp * d_bp + (h_bs - h_ut) * (h_bs - h_ut));
}

inline double uma_av_los(double d3d, double fc_ghz)
{
    return 28.0 + 22.0 * std::log10(d3d) + 20.0 * std::log10(fc_ghz);
}

} // namespace detail

inline double pathloss(PathlossBranch branch, double d3d, double d2d, double h_bs, double h_ut, double carrier_hz)
{
    if (!(d3d >= 1.0))
        throw std::domain_error("pathloss: 3D distance below 1 m");
    const double fc = carrier_hz / 1e9;
    switch (branch) {
    case PathlossBranch::uma_los:
        return detail::uma_los(d3d, d2d, h_bs, h_ut, fc);
    case PathlossBranch::uma_nlos: {
        const double nlos = 13.54 + 39.08 * std::log10(d3d) + 20.0 * std::log10(fc) - 0.6 * (h_ut - 1.5);
        return std::max(detail::uma_los(d3d, d2d, h_bs, h_ut, fc), nlos);
    }
    case PathlossBranch::uma_av_los:
        return detail::uma_av_los(d3d, fc);
    case PathlossBranch::uma_av_nlos: {
        const double nlos = -17.5 + (46.0 - 7.0 * std::log10(h_ut)) * std::log10(d3d) +
                            20.0 * std::log10(40.0 * std::numbers::pi * fc / 3.0);
        return std::max(detail::uma_av_los(d3d, fc), nlos);
    }
    case PathlossBranch::free_space:
        return free_space_pathloss(d3d, carrier_hz);
    }
    return 0.0;
}

inline double pathloss(UserClass cls, bool los, double d3d, double d2d, double h_bs, double h_ut, double carrier_hz)
{
    return pathloss(select_branch(cls, los, h_ut), d3d, d2d, h_bs, h_ut, carrier_hz);
}

/// Shadow-fading standard deviation (dB) of a model branch.
inline double shadowing_sigma(PathlossBranch branch, double h_ut)
{
    switch (branch) {
    case PathlossBranch::uma_los:
        return 4.0;
    case PathlossBranch::uma_nlos:
    case PathlossBranch::uma_av_nlos:
        return 6.0;
    case PathlossBranch::uma_av_los:
    case PathlossBranch::free_space:
        return 4.64 * std::exp(-0.0066 * h_ut);
    }
    return 0.0;
}

inline double shadowing_draw(PathlossBranch branch, double h_ut, RandomStream& rng)
{
    return rng.normal(0.0, shadowing_sigma(branch, h_ut));
}

/// Low-loss outdoor-to-indoor entry loss (dB) for an indoor depth in metres.
inline double entry_loss(double indoor_depth_m, double carrier_hz)
{
    const double f = carrier_hz / 1e9;
    const double glass = 2.0 + 0.2 * f;
    const double concrete = 5.0 + 4.0 * f;
    const double wall = 5.0 - 10.0 * std::log10(0.3 * std::pow(10.0, -glass / 10.0) +
                                                0.7 * std::pow(10.0, -concrete / 10.0));
    return wall + 0.5 * indoor_depth_m;
}

inline double entry_loss(const UserTerminal& u, double carrier_hz)
{
    return u.cls == UserClass::gue_indoor ? entry_loss(u.indoor_depth_m, carrier_hz) : 0.0;
}

// ---------------------------------------------------------------------------
// Satellite links (S-band, LoS)

enum class NtnEnvironment { dense_urban, urban, suburban_rural };

/// LoS shadow-fading sigma (dB) at S-band versus elevation, linearly
/// interpolated between the tabulated 10-degree points.
inline double ntn_shadowing_sigma(double elevation_deg, NtnEnvironment env)
{
    static constexpr std::array<double, 9> dense_urban = {3.5, 3.4, 2.9, 3.0, 3.1, 2.7, 2.5, 2.3, 1.2};
    static constexpr std::array<double, 9> urban = {4.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0, 4.0};
    static constexpr std::array<double, 9> suburban = {1.79, 1.14, 1.14, 0.92, 1.42, 1.56, 0.85, 0.72, 0.72};
    const auto& table = env == NtnEnvironment::dense_urban ? dense_urban
                        : env == NtnEnvironment::urban     ? urban
                                                           : suburban;
    const double e = std::clamp(elevation_deg, 10.0, 90.0);
    const double pos = (e - 10.0) / 10.0;
    const auto lo = static_cast<std::size_t>(std::min(std::floor(pos), 7.0));
    const double frac = pos - static_cast<double>(lo);
    return table[lo] * (1.0 - frac) + table[lo + 1] * frac;
}

/// Aerial terminals fly above the clutter and use the open-terrain table.
inline NtnEnvironment ntn_environment_for(const UserTerminal& u)
{
    return is_aerial(u.cls) ? NtnEnvironment::suburban_rural : NtnEnvironment::urban;
}

/// Deterministic part of the satellite link loss: free space plus atmosphere.
inline double ntn_path_loss(double distance_km, const NtnConfig& cfg)
{
    return free_space_pathloss(distance_km * 1e3, cfg.carrier_hz) + cfg.atmospheric_loss_db;
}

/// Total satellite-to-user large-scale loss including a shadowing draw.
inline double ntn_large_scale(const SatelliteGeometry& sat, const UserTerminal& user, const NtnConfig& cfg,
                              RandomStream& rng)
{
    if (!(sat.elevation_deg > 0.0 && sat.elevation_deg <= 90.0))
        throw std::domain_error("ntn_large_scale: elevation must lie in (0, 90]");
    const double d_km = (sat.satellite_position - user.position / 1e3).norm();
    const double sigma = ntn_shadowing_sigma(sat.elevation_deg, ntn_environment_for(user));
    return ntn_path_loss(d_km, cfg) + rng.normal(0.0, sigma);
}

// ---------------------------------------------------------------------------
// Small-scale channel synthesis

/// Rician channel H = sqrt(g) * ( sqrt(K/(K+1)) e^{j psi} a_rx a_tx^H
///                               + sqrt(1/(K+1)) (|a_rx| |a_tx|^T) .* W ),
/// W i.i.d. CN(0, 1). Element gains live in the magnitudes of a_rx and a_tx.
/// k_factor_lin may be +inf (pure LoS) or 0 (pure scattering).
inline CMat synthesize_channel(double gain_lin, double k_factor_lin, const CVec& a_rx, const CVec& a_tx,
                               RandomStream& rng)
{
    const Eigen::Index nr = a_rx.size();
    const Eigen::Index nt = a_tx.size();
    CMat h = CMat::Zero(nr, nt);
    if (gain_lin <= 0.0)
        return h;
    const bool pure_los = std::isinf(k_factor_lin);
    const double los_amp = pure_los ? 1.0 : std::sqrt(k_factor_lin / (k_factor_lin + 1.0));
    const double nlos_amp = pure_los ? 0.0 : std::sqrt(1.0 / (k_factor_lin + 1.0));
    const double psi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const cdouble rot = std::polar(los_amp, psi);
    boost::random::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    for (Eigen::Index j = 0; j < nt; ++j) {
        for (Eigen::Index i = 0; i < nr; ++i) {
            cdouble v = rot * a_rx(i) * std::conj(a_tx(j));
            if (nlos_amp > 0.0) {
                const double re = gauss(rng);
                const double im = gauss(rng);
                v += nlos_amp * std::abs(a_rx(i)) * std::abs(a_tx(j)) * cdouble(re, im);
            }
            h(i, j) = v;
        }
    }
    return std::sqrt(gain_lin) * h;
}

/// Single-antenna receiver special case; returns the conjugated row as a column
/// vector, i.e. h such that the received sample is h^H x.
inline CVec synthesize_user_channel(double gain_lin, double k_factor_lin, const CVec& a_tx, RandomStream& rng)
{
    const Eigen::Index nt = a_tx.size();
    CVec h(nt);
    if (gain_lin <= 0.0) {
        h.setZero();
        return h;
    }
    const bool pure_los = std::isinf(k_factor_lin);
    const double los_amp = pure_los ? 1.0 : std::sqrt(k_factor_lin / (k_factor_lin + 1.0));
    const double nlos_amp = pure_los ? 0.0 : std::sqrt(1.0 / (k_factor_lin + 1.0));
    const double psi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const cdouble rot = std::polar(los_amp, -psi);
    boost::random::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
    const double scale = std::sqrt(gain_lin);
    for (Eigen::Index j = 0; j < nt; ++j) {
        cdouble v = rot * a_tx(j);
        if (nlos_amp > 0.0) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            v += nlos_amp * std::abs(a_tx(j)) * cdouble(re, -im);
        }
        h(j) = scale * v;
    }
    return h;
}

} // namespace ntnsim
