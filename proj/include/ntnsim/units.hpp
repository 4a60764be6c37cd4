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

#include <cmath>
#include <limits>
#include <numbers>

namespace ntnsim {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kEarthRadiusKm = 6371.0;
inline constexpr double kThermalNoiseDbmPerHz = -174.0;
inline constexpr double kBoltzmannDbW = -228.6;  // dBW/K/Hz

inline constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

inline double db2lin(double db) { return std::pow(10.0, db / 10.0); }

inline double lin2db(double lin)
{
    if (lin <= 0.0)
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(lin);
}

inline double dbm2watt(double dbm) { return db2lin(dbm - 30.0); }
inline double watt2dbm(double w) { return lin2db(w) + 30.0; }

// Thermal noise power over a bandwidth, including the receiver noise figure.
inline double noise_power_dbm(double bandwidth_hz, double noise_figure_db)
{
    return kThermalNoiseDbmPerHz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db;
}

inline double wavelength(double carrier_hz) { return kSpeedOfLight / carrier_hz; }

} // namespace ntnsim
