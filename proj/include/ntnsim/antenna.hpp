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
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <complex>
#include <numbers>

#include "units.hpp"

namespace ntnsim {

using Vec3 = Eigen::Vector3d;
using cdouble = std::complex<double>;
using CVec = Eigen::VectorXcd;

/// Parabolic element pattern of the macro BS panels.
struct ElementPattern {
    double hpbw_h_deg = 65.0;
    double hpbw_v_deg = 65.0;
    double max_gain_dbi = 8.0;
    double front_back_db = 30.0;
    double sla_v_db = 30.0;
};

inline double wrap_degrees(double deg)
{
    deg = std::fmod(deg + 180.0, 360.0);
    if (deg < 0.0)
        deg += 360.0;
    return deg - 180.0;
}

/// Gain (dBi) at local azimuth phi and zenith theta (boresight: phi=0, theta=90).
inline double element_gain(const ElementPattern& p, double azimuth_deg, double zenith_deg)
{
    const double phi = wrap_degrees(azimuth_deg);
    const double a_h = -std::min(12.0 * std::pow(phi / p.hpbw_h_deg, 2), p.front_back_db);
    const double a_v = -std::min(12.0 * std::pow((zenith_deg - 90.0) / p.hpbw_v_deg, 2), p.sla_v_db);
    return p.max_gain_dbi - std::min(-(a_h + a_v), p.front_back_db);
}

/// Uniform planar array of cross-polarised elements, mechanically tilted.
struct ArrayConfig {
    int n_rows = 8;
    int n_cols = 8;
    int polarizations = 2;
    double element_spacing = 0.5;  // wavelengths
    double azimuth_deg = 0.0;      // boresight azimuth in the global frame
    double mech_tilt_deg = 12.0;   // positive tilts the boresight below the horizon

    int elements() const { return n_rows * n_cols; }
    int ports() const { return elements() * polarizations; }
};

/// Global direction expressed in the panel frame (boresight along +x, +z up the panel).
inline Vec3 to_panel_frame(const Vec3& dir, double azimuth_deg, double tilt_deg)
{
    const double az = deg2rad(azimuth_deg);
    const double t = deg2rad(tilt_deg);
    const double x1 = std::cos(az) * dir.x() + std::sin(az) * dir.y();
    const double y1 = -std::sin(az) * dir.x() + std::cos(az) * dir.y();
    const double z1 = dir.z();
    return Vec3(x1 * std::cos(t) - z1 * std::sin(t), y1, x1 * std::sin(t) + z1 * std::cos(t));
}

/// Boresight of a panel in the global frame.
inline Vec3 boresight(double azimuth_deg, double tilt_deg)
{
    const double az = deg2rad(azimuth_deg);
    const double t = deg2rad(tilt_deg);
    return Vec3(std::cos(t) * std::cos(az), std::cos(t) * std::sin(az), -std::sin(t));
}

struct PanelAngles {
    double azimuth_deg;
    double zenith_deg;
};

inline PanelAngles panel_angles(const Vec3& local)
{
    const Vec3 u = local.normalized();
    return {rad2deg(std::atan2(u.y(), u.x())), rad2deg(std::acos(std::clamp(u.z(), -1.0, 1.0)))};
}

/// Element gain (dBi) toward a global direction.
inline double element_gain_toward(const ElementPattern& p, const ArrayConfig& a, const Vec3& dir)
{
    const PanelAngles ang = panel_angles(to_panel_frame(dir, a.azimuth_deg, a.mech_tilt_deg));
    return element_gain(p, ang.azimuth_deg, ang.zenith_deg);
}

/// Single-polarisation response: one entry per element, with the element
/// amplitude folded in, so that squaredNorm() is the sum of linear element gains.
inline CVec array_response(const ArrayConfig& a, const ElementPattern& p, const Vec3& dir)
{
    const Vec3 local = to_panel_frame(dir.normalized(), a.azimuth_deg, a.mech_tilt_deg);
    const PanelAngles ang = panel_angles(local);
    const double amp = std::sqrt(db2lin(element_gain(p, ang.azimuth_deg, ang.zenith_deg)));
    const double kd = 2.0 * std::numbers::pi * a.element_spacing;
    CVec col(a.n_cols);
    CVec row(a.n_rows);
    for (int n = 0; n < a.n_cols; ++n)
        col(n) = std::polar(1.0, kd * n * local.y());
    for (int m = 0; m < a.n_rows; ++m)
        row(m) = std::polar(amp, kd * m * local.z());
    CVec out(a.elements());
    for (int m = 0; m < a.n_rows; ++m)
        for (int n = 0; n < a.n_cols; ++n)
            out(m * a.n_cols + n) = row(m) * col(n);
    return out;
}

/// Response over all ports; the two polarisations are ideal orthogonal copies.
inline CVec port_response(const ArrayConfig& a, const ElementPattern& p, const Vec3& dir)
{
    const CVec single = array_response(a, p, dir);
    CVec out(a.ports());
    for (int k = 0; k < a.polarizations; ++k)
        out.segment(k * a.elements(), a.elements()) = single;
    return out;
}

// ---------------------------------------------------------------------------
// Satellite beam: uniformly illuminated circular aperture

inline constexpr double kBesselJ1FirstZero = 3.8317059702075125;

/// Normalised pattern 4 |J1(u)/u|^2, equal to 1 at u = 0.
inline double airy_pattern(double u)
{
    if (std::abs(u) < 1e-9)
        return 1.0;
    const double r = std::cyl_bessel_j(1.0, u) / u;
    return 4.0 * r * r;
}

/// The u at which the aperture pattern is 3 dB below its peak.
inline double airy_half_power_u()
{
    using boost::math::tools::bisect;
    using boost::math::tools::eps_tolerance;
    auto f = [](double u) { return airy_pattern(u) - 0.5; };
    auto r = bisect(f, 0.5, 3.0, eps_tolerance<double>(52));
    return 0.5 * (r.first + r.second);
}

/// Aperture radius (m) putting the -3 dB point at hpbw/2 off boresight.
inline double calibrate_aperture_radius(double hpbw_deg, double carrier_hz)
{
    const double k = 2.0 * std::numbers::pi / wavelength(carrier_hz);
    return airy_half_power_u() / (k * std::sin(deg2rad(hpbw_deg / 2.0)));
}

struct AperturePattern {
    double peak_gain_dbi = 30.0;
    double hpbw_deg = 4.41;
    double carrier_hz = 2e9;
    double radius_m = calibrate_aperture_radius(4.41, 2e9);

    static AperturePattern make(double peak_gain_dbi, double hpbw_deg, double carrier_hz)
    {
        return {peak_gain_dbi, hpbw_deg, carrier_hz, calibrate_aperture_radius(hpbw_deg, carrier_hz)};
    }

    double u(double offset_deg) const
    {
        const double k = 2.0 * std::numbers::pi / wavelength(carrier_hz);
        return k * radius_m * std::sin(deg2rad(offset_deg));
    }
};

/// Gain relative to the peak, linear.
inline double aperture_gain_relative(const AperturePattern& p, double offset_deg)
{
    return airy_pattern(p.u(offset_deg));
}

inline double aperture_gain(const AperturePattern& p, double offset_deg)
{
    return p.peak_gain_dbi + lin2db(aperture_gain_relative(p, offset_deg));
}

} // namespace ntnsim
