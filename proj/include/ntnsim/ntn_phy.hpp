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

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "antenna.hpp"
#include "channel.hpp"
#include "geometry.hpp"
#include "rng.hpp"
#include "scenario.hpp"
#include "units.hpp"

namespace ntnsim {

inline constexpr int kNtnBeams = 7;

/// Seven beams of one satellite: a central beam pointing at nadir and a ring of
/// six at one half-power beamwidth from it. Vectors are in the local frame of
/// the service-area centre (km, z up).
struct BeamLattice {
    std::array<Vec3, kNtnBeams> boresight;      // unit vectors leaving the satellite
    std::array<Vec2, kNtnBeams> ground_center;  // km, ray-ground intersections
    std::array<int, kNtnBeams> color{};         // reuse partition
    Frf frf = Frf::frf3;
    Vec3 satellite = Vec3::Zero();

    /// Beams b and c use overlapping spectrum.
    bool co_channel(int b, int c) const
    {
        return frf == Frf::frf1 || color[static_cast<std::size_t>(b)] == color[static_cast<std::size_t>(c)];
    }
};

namespace detail {

/// First intersection of the ray p + t d (t > 0) with the sphere |x - c| = r.
inline Vec3 ray_sphere(const Vec3& p, const Vec3& d, const Vec3& c, double r)
{
    const Vec3 oc = p - c;
    const double b = oc.dot(d);
    const double disc = b * b - (oc.squaredNorm() - r * r);
    if (disc < 0.0)
        throw std::domain_error("beam boresight misses the Earth");
    return p + (-b - std::sqrt(disc)) * d;
}

} // namespace detail

inline BeamLattice build_beams(const SatelliteGeometry& sat, const NtnConfig& cfg)
{
    BeamLattice lat;
    lat.frf = cfg.frf;
    lat.satellite = sat.satellite_position;
    const Vec3 n = sat.nadir;
    // reference direction: from the sub-satellite point towards the service area
    const double az = deg2rad(cfg.satellite_azimuth_deg);
    Vec3 u = Vec3(-std::cos(az), -std::sin(az), 0.0);
    u = (u - n * n.dot(u)).normalized();
    const Vec3 v = n.cross(u);

    const double theta = deg2rad(cfg.beam_hpbw_deg);
    lat.boresight[0] = n;
    for (int k = 0; k < 6; ++k) {
        const double phi = deg2rad(cfg.lattice_rotation_deg + 60.0 * k);
        lat.boresight[static_cast<std::size_t>(k + 1)] =
            (std::cos(theta) * n + std::sin(theta) * (std::cos(phi) * u + std::sin(phi) * v)).normalized();
    }
    for (int b = 0; b < kNtnBeams; ++b) {
        const Vec3 g = detail::ray_sphere(sat.satellite_position, lat.boresight[static_cast<std::size_t>(b)],
                                          sat.earth_center, kEarthRadiusKm);
        lat.ground_center[static_cast<std::size_t>(b)] = g.head<2>();
    }
    lat.color[0] = 0;
    for (int k = 0; k < 6; ++k)
        lat.color[static_cast<std::size_t>(k + 1)] = 1 + k % 2;
    return lat;
}

/// Large-scale state of one user towards the satellite.
struct NtnLink {
    double loss_db = 0.0;  // path loss + atmosphere + shadowing
    std::array<double, kNtnBeams> gain_db{};
    int serving = 0;
};

/// Angle (deg) between beam b's boresight and the direction to a point (m).
inline double beam_offset_deg(const BeamLattice& lat, int b, const Vec3& position_m)
{
    const Vec3 d = (position_m / 1e3 - lat.satellite).normalized();
    const double c = std::clamp(d.dot(lat.boresight[static_cast<std::size_t>(b)]), -1.0, 1.0);
    return rad2deg(std::acos(c));
}

/// Beam gains and serving beam (maximum gain, lowest index on ties).
inline NtnLink ntn_link(const SatelliteGeometry& sat, const BeamLattice& lat, const AperturePattern& beam,
                        const UserTerminal& user, const NtnConfig& cfg, RandomStream& rng)
{
    NtnLink l;
    l.loss_db = ntn_large_scale(sat, user, cfg, rng);
    for (int b = 0; b < kNtnBeams; ++b) {
        l.gain_db[static_cast<std::size_t>(b)] = aperture_gain(beam, beam_offset_deg(lat, b, user.position));
        if (l.gain_db[static_cast<std::size_t>(b)] > l.gain_db[static_cast<std::size_t>(l.serving)])
            l.serving = b;
    }
    return l;
}

/// DL SINR (dB) of a user in its serving beam. All beams radiate the same EIRP
/// density, so the SINR is a ratio of densities and does not depend on the band.
inline double ntn_dl_sinr(const NtnLink& l, const BeamLattice& lat, const NtnConfig& cfg, double noise_figure_db)
{
    auto density_w = [&](int b) {
        return db2lin(cfg.eirp_density_dbw_per_mhz + l.gain_db[static_cast<std::size_t>(b)] - cfg.beam_peak_gain_dbi -
                      l.loss_db);
    };
    const double s = density_w(l.serving);
    double i = 0.0;
    for (int b = 0; b < kNtnBeams; ++b)
        if (b != l.serving && lat.co_channel(b, l.serving))
            i += density_w(b);
    const double n = db2lin(kThermalNoiseDbmPerHz + 60.0 + noise_figure_db - 30.0);  // W/MHz
    return lin2db(s / (i + n));
}

/// UL carrier-to-noise (dB) on one grant at full power; grants are orthogonal.
/// relative_gain_db is the serving beam's gain below its peak toward the user.
inline double ntn_ul_snr(double loss_db, const NtnConfig& cfg, double relative_gain_db = 0.0)
{
    const double eirp_dbw = cfg.ul_tx_power_dbm - 30.0;
    return eirp_dbw - loss_db + relative_gain_db + cfg.g_over_t_db - kBoltzmannDbW - 10.0 * std::log10(cfg.ul_grant_hz);
}

/// Resources of one offloaded user.
struct NtnShare {
    double bandwidth_hz = 0.0;
    double time_share = 0.0;
};

/// Round-robin sharing inside each beam. DL: single user on the whole beam band
/// for 1/n of the time. UL: floor(ul_bw / grant) simultaneous grants.
inline std::vector<NtnShare> ntn_schedule(std::span<const int> serving_beam, Direction dir, const NtnConfig& cfg)
{
    std::array<int, kNtnBeams> load{};
    for (int b : serving_beam)
        ++load.at(static_cast<std::size_t>(b));
    std::vector<NtnShare> out;
    out.reserve(serving_beam.size());
    const int slots = static_cast<int>(std::floor(cfg.ul_bw_hz / cfg.ul_grant_hz + 1e-9));
    for (int b : serving_beam) {
        const int n = load[static_cast<std::size_t>(b)];
        if (dir == Direction::dl)
            out.push_back({cfg.dl_bw_hz, 1.0 / n});
        else
            out.push_back({cfg.ul_grant_hz, std::min(1.0, static_cast<double>(slots) / n)});
    }
    return out;
}

inline constexpr double kOutageThresholdDb = -5.0;

/// Indices of users moved to the satellite: terrestrial SINR strictly below
/// the threshold, or everyone with offload_all.
inline std::vector<int> offload_rule(std::span<const double> tn_sinr_db, bool offload_all = false,
                                     double threshold_db = kOutageThresholdDb)
{
    std::vector<int> out;
    for (std::size_t k = 0; k < tn_sinr_db.size(); ++k)
        if (offload_all || tn_sinr_db[k] < threshold_db)
            out.push_back(static_cast<int>(k));
    return out;
}

} // namespace ntnsim
