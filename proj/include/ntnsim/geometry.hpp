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
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rng.hpp"
#include "scenario.hpp"
#include "units.hpp"
#include "units.hpp"

namespace ntnsim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

enum class Operator { terrestrial, aerial };

inline constexpr std::array<double, 3> kSectorAzimuthsDeg = {0.0, 120.0, 240.0};

struct Site {
    Vec2 position;
    double height = 25.0;
};

/// Hexagonal site layout plus the translations of its wrap-around torus.
///
/// Sites sit on the lattice spanned by isd*(1, 0) and isd*(1/2, sqrt(3)/2). Each
/// site hosts three cells whose boresights point at 0, 120 and 240 degrees;
/// every cell covers a hexagon of circumradius isd/3 with one vertex on the site.
struct Layout {
    double isd = 500.0;
    int rings = 0;
    std::vector<Site> sites;
    std::array<Vec2, 6> wrap_shifts;  // the six non-trivial torus images

    int n_cells() const { return static_cast<int>(sites.size()) * 3; }
    int site_of(int cell) const { return cell / 3; }
    double azimuth_of(int cell) const { return kSectorAzimuthsDeg[static_cast<std::size_t>(cell % 3)]; }
    Vec2 cell_center(int cell) const
    {
        const double r = isd / 3.0;
        const double az = deg2rad(azimuth_of(cell));
        return sites[static_cast<std::size_t>(site_of(cell))].position + r * Vec2(std::cos(az), std::sin(az));
    }
    double cell_area() const { return std::sqrt(3.0) / 6.0 * isd * isd; }
};

namespace detail {

inline Vec2 lattice_point(double isd, int i, int j)
{
    return isd * Vec2(i + 0.5 * j, std::sqrt(3.0) / 2.0 * j);
}

inline int hex_ring(int i, int j) { return std::max({std::abs(i), std::abs(j), std::abs(i + j)}); }

inline std::array<Vec2, 6> torus_shifts(double isd, int rings)
{
    const Vec2 t0 = lattice_point(isd, rings + 1, rings);
    std::array<Vec2, 6> out;
    for (int k = 0; k < 6; ++k) {
        const double a = deg2rad(60.0 * k);
        const Eigen::Rotation2Dd rot(a);
        out[static_cast<std::size_t>(k)] = rot * t0;
    }
    return out;
}

} // namespace detail

/// Hex layout with 1 + 3*rings*(rings+1) sites, ordered ring by ring.
inline Layout build_hex_layout(double isd, int rings, double bs_height = 25.0)
{
    if (!(isd > 0.0) || rings < 0)
        throw std::invalid_argument("build_hex_layout: isd must be positive and rings non-negative");
    struct Entry {
        int ring;
        double angle;
        Vec2 pos;
    };
    std::vector<Entry> entries;
    for (int i = -rings; i <= rings; ++i) {
        for (int j = -rings; j <= rings; ++j) {
            const int ring = detail::hex_ring(i, j);
            if (ring > rings)
                continue;
            Vec2 p = detail::lattice_point(isd, i, j);
            double ang = std::atan2(p.y(), p.x());
            if (ang < -1e-12)
                ang += 2.0 * std::numbers::pi;
            entries.push_back({ring, ring == 0 ? 0.0 : ang, p});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.ring != b.ring ? a.ring < b.ring : a.angle < b.angle;
    });
    Layout layout;
    layout.isd = isd;
    layout.rings = rings;
    layout.wrap_shifts = detail::torus_shifts(isd, rings);
    for (const auto& e : entries)
        layout.sites.push_back({e.pos, bs_height});
    return layout;
}

/// True when p lies in the fundamental region (Voronoi cell of the origin image)
/// of the wrap-around torus. Boundary ties go to the first three images.
inline bool in_wrap_region(const Vec2& p, const Layout& layout)
{
    const double self = p.squaredNorm();
    for (std::size_t k = 0; k < 6; ++k) {
        const double other = (p - layout.wrap_shifts[k]).squaredNorm();
        if (k < 3 ? other < self : other <= self)
            return false;
    }
    return true;
}

/// Maps a point into the fundamental wrap region.
inline Vec2 wrap_into_region(Vec2 p, const Layout& layout)
{
    for (int iter = 0; iter < 16 && !in_wrap_region(p, layout); ++iter) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < 6; ++k) {
            const double d = (p - layout.wrap_shifts[k]).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = k;
            }
        }
        p -= layout.wrap_shifts[best];
    }
    return p;
}

/// A second hex lattice with spacing isd, shifted by offset, restricted to the
/// wrap region of host and sharing its torus. Used for the aerial operator so
/// both operators live on the same wrapped service area.
inline Layout build_overlay_layout(double isd, const Vec2& offset, const Layout& host,
                                   double bs_height = 25.0)
{
    if (!(isd > 0.0))
        throw std::invalid_argument("build_overlay_layout: isd must be positive");
    const double region_radius = host.wrap_shifts[0].norm();
    const int span = static_cast<int>(std::ceil(2.0 * region_radius / isd)) + 2;
    struct Entry {
        double r;
        double angle;
        Vec2 pos;
    };
    std::vector<Entry> entries;
    for (int i = -span; i <= span; ++i) {
        for (int j = -span; j <= span; ++j) {
            Vec2 p = detail::lattice_point(isd, i, j) + offset;
            if (!in_wrap_region(p, host))
                continue;
            entries.push_back({p.norm(), std::atan2(p.y(), p.x()), p});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.r != b.r ? a.r < b.r : a.angle < b.angle;
    });
    Layout layout;
    layout.isd = isd;
    layout.rings = -1;
    layout.wrap_shifts = host.wrap_shifts;
    for (const auto& e : entries)
        layout.sites.push_back({e.pos, bs_height});
    return layout;
}

/// Image of `site` (among the 7 torus images) closest to `p`.
inline Vec2 nearest_image(const Vec2& p, const Vec2& site, const Layout& layout)
{
    Vec2 best = site;
    double best_d = (p - site).squaredNorm();
    for (const auto& t : layout.wrap_shifts) {
        const Vec2 img = site + t;
        const double d = (p - img).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = img;
        }
    }
    return best;
}

inline double wrap_distance(const Vec2& a, const Vec2& b, const Layout& layout)
{
    return (a - nearest_image(a, b, layout)).norm();
}

/// Hexagon of circumradius r centred on the origin with vertices at multiples of 60 deg.
inline bool in_hexagon(const Vec2& local, double r)
{
    const double ax = std::abs(local.x());
    const double ay = std::abs(local.y());
    const double s3 = std::sqrt(3.0);
    return ay <= s3 / 2.0 * r + 1e-9 && s3 * ax + ay <= s3 * r + 1e-9;
}

inline bool in_cell(const Vec2& p, const Layout& layout, int cell)
{
    return in_hexagon(p - layout.cell_center(cell), layout.isd / 3.0);
}

// ---------------------------------------------------------------------------
// Users

enum class UserClass { gue_outdoor, gue_indoor, uav, evtol };

inline bool is_ground(UserClass c) { return c == UserClass::gue_outdoor || c == UserClass::gue_indoor; }
inline bool is_aerial(UserClass c) { return c == UserClass::uav || c == UserClass::evtol; }

inline constexpr double kGueHeight = 1.5;
inline constexpr double kUavHeight = 150.0;
inline constexpr double kEvtolHeight = 1500.0;
inline constexpr double kFloorHeight = 3.0;
inline constexpr double kMinSiteDistance = 35.0;  // UMa minimum BS-UT 2D distance

inline double indoor_height(int floor) { return kFloorHeight * (floor - 1) + kGueHeight; }

struct UserTerminal {
    int id = 0;
    UserClass cls = UserClass::gue_outdoor;
    Vec3 position = Vec3::Zero();
    std::optional<int> floor;
    int building_floors = 0;
    double indoor_depth_m = 0.0;
    Operator serving_operator = Operator::terrestrial;
    int generating_cell = -1;
    double noise_figure_db = 9.0;
};

namespace detail {

inline Vec2 uniform_in_cell(const Layout& layout, int cell, RandomStream& rng, double min_site_distance)
{
    const double r = layout.isd / 3.0;
    const Vec2 c = layout.cell_center(cell);
    const Vec2 site = layout.sites[static_cast<std::size_t>(layout.site_of(cell))].position;
    for (;;) {
        Vec2 local(rng.uniform(-r, r), rng.uniform(-r, r));
        if (!in_hexagon(local, r))
            continue;
        Vec2 p = c + local;
        if ((p - site).norm() < min_site_distance)
            continue;
        return p;
    }
}

inline long count_for_density(double per_cell, int n_cells)
{
    return std::lround(per_cell * static_cast<double>(n_cells));
}

} // namespace detail

/// Aerial users over an arbitrary service area at a density given per
/// terrestrial cell of inter-site distance isd_m.
inline long evtol_count(double per_cell, double area_km2, double isd_m)
{
    const double cell_km2 = std::sqrt(3.0) / 6.0 * isd_m * isd_m / 1e6;
    return std::lround(per_cell * area_km2 / cell_km2);
}

/// Drops GUEs per terrestrial cell and the aerial classes uniformly over the
/// service area. The aerial classes keep a density fixed per terrestrial cell
/// whatever the aerial operator's spacing is.
inline std::vector<UserTerminal> drop_users(const Layout& layout_t, const Scenario& s, RandomStream& rng)
{
    std::vector<UserTerminal> users;
    const int n_cells = layout_t.n_cells();
    int next_id = 0;
    for (int cell = 0; cell < n_cells; ++cell) {
        for (int k = 0; k < s.gue_per_cell; ++k) {
            UserTerminal u;
            u.id = next_id++;
            u.generating_cell = cell;
            u.noise_figure_db = s.ue_noise_figure_db;
            const Vec2 xy = detail::uniform_in_cell(layout_t, cell, rng, kMinSiteDistance);
            if (rng.uniform() < s.indoor_fraction) {
                u.cls = UserClass::gue_indoor;
                u.building_floors = 4 + static_cast<int>(std::floor(rng.uniform(0.0, 5.0)));
                u.building_floors = std::min(u.building_floors, 8);
                int fl = 1 + static_cast<int>(std::floor(rng.uniform(0.0, u.building_floors)));
                u.floor = std::min(fl, u.building_floors);
                u.indoor_depth_m = rng.uniform(0.0, 25.0);
                u.position = Vec3(xy.x(), xy.y(), indoor_height(*u.floor));
            } else {
                u.cls = UserClass::gue_outdoor;
                u.position = Vec3(xy.x(), xy.y(), kGueHeight);
            }
            users.push_back(u);
        }
    }
    auto drop_aerial = [&](UserClass cls, double per_cell, double height, Operator op) {
        const long count = detail::count_for_density(per_cell, n_cells);
        for (long k = 0; k < count; ++k) {
            UserTerminal u;
            u.id = next_id++;
            u.cls = cls;
            u.serving_operator = op;
            u.noise_figure_db = s.ue_noise_figure_db;
            const int cell = std::min(n_cells - 1, static_cast<int>(std::floor(rng.uniform(0.0, n_cells))));
            u.generating_cell = cell;
            const Vec2 xy = detail::uniform_in_cell(layout_t, cell, rng, 0.0);
            u.position = Vec3(xy.x(), xy.y(), height);
            users.push_back(u);
        }
    };
    drop_aerial(UserClass::uav, s.uav_per_tn_cell, kUavHeight,
                s.isd_a ? Operator::aerial : Operator::terrestrial);
    drop_aerial(UserClass::evtol, s.evtol_per_tn_cell, kEvtolHeight, Operator::terrestrial);
    return users;
}

// ---------------------------------------------------------------------------
// Satellite viewing geometry

/// Slant range (km) from a ground point to a satellite at altitude orbit_km seen
/// under elevation elevation_deg.
inline double slant_range_km(double elevation_deg, double orbit_km)
{
    const double re = kEarthRadiusKm;
    const double s = std::sin(deg2rad(elevation_deg));
    if (elevation_deg == 90.0)
        return orbit_km;
    return std::sqrt(re * re * s * s + 2.0 * re * orbit_km + orbit_km * orbit_km) - re * s;
}

struct SatelliteGeometry {
    double elevation_deg = 90.0;
    double orbit_km = 600.0;
    double slant_range_km = 600.0;
    double azimuth_deg = 0.0;
    Vec3 satellite_position = Vec3::Zero();  // km, local frame at the service-area centre (z up)
    Vec3 earth_center = Vec3::Zero();        // km, same frame
    Vec3 nadir = Vec3::Zero();               // unit vector from the satellite to the Earth centre
    double off_nadir_deg = 0.0;              // angle at the satellite between nadir and the centre
};

inline SatelliteGeometry satellite_geometry(double elevation_deg, double orbit_km, double azimuth_deg = 0.0)
{
    if (!(elevation_deg > 0.0 && elevation_deg <= 90.0))
        throw std::domain_error("satellite_geometry: elevation must lie in (0, 90]");
    SatelliteGeometry g;
    g.elevation_deg = elevation_deg;
    g.orbit_km = orbit_km;
    g.azimuth_deg = azimuth_deg;
    g.slant_range_km = slant_range_km(elevation_deg, orbit_km);
    const double el = deg2rad(elevation_deg);
    const double az = deg2rad(azimuth_deg);
    const Vec3 dir(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
    g.satellite_position = elevation_deg == 90.0 ? Vec3(0.0, 0.0, orbit_km) : Vec3(g.slant_range_km * dir);
    g.earth_center = Vec3(0.0, 0.0, -kEarthRadiusKm);
    g.nadir = (g.earth_center - g.satellite_position).normalized();
    const Vec3 to_center = (-g.satellite_position).normalized();
    g.off_nadir_deg = rad2deg(std::acos(std::clamp(g.nadir.dot(to_center), -1.0, 1.0)));
    return g;
}

} // namespace ntnsim
