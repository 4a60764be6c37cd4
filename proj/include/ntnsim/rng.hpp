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

#include <cstdint>
#include <limits>
#include <random>

namespace ntnsim {

/// Purpose tags that separate the random substreams of one drop.
enum class StreamTag : std::uint64_t {
    user_drop = 1,
    los = 2,
    shadowing = 3,
    entry_loss = 4,
    small_scale = 5,
    schedule = 6,
    ntn_shadowing = 7,
    rate_study = 8,
    test = 99,
};

namespace detail {

inline constexpr std::uint64_t splitmix_step(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline constexpr std::uint64_t mix(std::uint64_t h, std::uint64_t v)
{
    std::uint64_t s = h ^ (v + 0x632be59bd9b4e019ULL + (h << 6) + (h >> 2));
    return splitmix_step(s);
}

} // namespace detail

/// Small counter-based engine. A stream is fully determined by its key, so any
/// substream can be recreated on demand without touching shared state.
class RandomStream {
  public:
    using result_type = std::uint64_t;

    explicit constexpr RandomStream(std::uint64_t key) : state_(key) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() { return detail::splitmix_step(state_); }

    double uniform(double lo = 0.0, double hi = 1.0)
    {
        return std::uniform_real_distribution<double>(lo, hi)(*this);
    }

    double normal(double mean = 0.0, double sigma = 1.0)
    {
        return std::normal_distribution<double>(mean, sigma)(*this);
    }

  private:
    std::uint64_t state_;
};

/// Derives the substream for (seed, drop, purpose, a, b).
inline RandomStream substream(std::uint64_t seed, std::uint64_t drop, StreamTag tag,
                              std::uint64_t a = 0, std::uint64_t b = 0)
{
    std::uint64_t h = detail::mix(0x6e746e73696d0001ULL, seed);
    h = detail::mix(h, drop);
    h = detail::mix(h, static_cast<std::uint64_t>(tag));
    h = detail::mix(h, a);
    h = detail::mix(h, b);
    return RandomStream(h);
}

} // namespace ntnsim
