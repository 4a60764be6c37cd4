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

#include <catch_amalgamated.hpp>

#include <ntnsim/simulation.hpp>

#include <atomic>
#include <cmath>
#include <set>

using namespace ntnsim;
using Catch::Matchers::ContainsSubstring;

namespace {

Scenario small_shared(std::uint64_t seed)
{
    Scenario s;
    s.isd_a = 1000.0;
    s.precoder = Precoder::eda;
    s.direction = Direction::ul;
    s.gue_per_cell = 3;
    s.seed = seed;
    return s;
}

std::vector<KpiRecord> of_drop(const std::vector<KpiRecord>& all, int drop)
{
    std::vector<KpiRecord> out;
    for (const auto& r : all)
        if (r.drop == drop)
            out.push_back(r);
    return out;
}

} // namespace

TEST_CASE("One drop of the baseline network", "[sim]")
{
    const Scenario s;
    const auto rec = run_scenario(s, {1, 1, "base"});
    std::size_t gue = 0;
    std::size_t uav = 0;
    for (const auto& r : rec) {
        CHECK(std::isfinite(r.sinr_db));
        CHECK(r.rate_mbps >= 0.0);
        CHECK(r.rate_mbps <= 50e6 * 7.8 / 1e6);
        CHECK(r.scenario_id == "base");
        CHECK_FALSE(r.isd_a.has_value());
        CHECK(r.direction == "UL");
        gue += r.user_class == "GUE_outdoor" || r.user_class == "GUE_indoor";
        uav += r.user_class == "UAV";
    }
    CHECK(gue == 855);
    CHECK(uav == 57);
    CHECK(rec.size() == 912);
}

TEST_CASE("Runs are reproducible", "[sim]")
{
    const auto a = run_scenario(small_shared(42), {1, 3, "x"});
    const auto b = run_scenario(small_shared(42), {1, 3, "x"});
    CHECK(to_csv(a) == to_csv(b));

    const auto threaded = run_scenario(small_shared(42), {3, 3, "x"});
    CHECK(to_csv(threaded) == to_csv(a));

    const auto other = run_scenario(small_shared(43), {1, 3, "x"});
    CHECK(to_csv(other) != to_csv(a));

    // a drop does not depend on how many drops run
    const auto two = run_scenario(small_shared(42), {1, 2, "x"});
    CHECK(of_drop(two, 1) == of_drop(a, 1));
    CHECK(of_drop(a, 0) != of_drop(a, 1));
}

TEST_CASE("Parallel driver", "[sim]")
{
    std::function<std::vector<int>(int)> square = [](int d) { return std::vector<int>{d, d * d}; };
    const auto serial = run_parallel<int>(7, 1, square);
    CHECK(serial == std::vector<int>{0, 0, 1, 1, 2, 4, 3, 9, 4, 16, 5, 25, 6, 36});
    CHECK(run_parallel<int>(7, 4, square) == serial);
    CHECK(run_parallel<int>(0, 4, square).empty());

    std::atomic<int> calls{0};
    std::function<std::vector<int>(int)> failing = [&](int d) -> std::vector<int> {
        ++calls;
        if (d == 2)
            throw NumericalError(d, "non-finite SINR for user 5");
        return {d};
    };
    CHECK_THROWS_WITH(run_parallel<int>(5, 1, failing), "drop 2: non-finite SINR for user 5");
    CHECK_THROWS_AS(run_parallel<int>(5, 2, failing), NumericalError);
}

TEST_CASE("Satellite offloading records", "[sim]")
{
    Scenario s;
    s.direction = Direction::dl;
    s.uav_per_tn_cell = 0.0;
    s.gue_per_cell = 5;
    s.evtol_per_tn_cell = 1.0;
    s.ntn = NtnConfig{};
    const auto rec = run_scenario(s, {1, 1, "ntn"});

    std::size_t evtol = 0;
    std::size_t outage = 0;
    std::size_t offloaded = 0;
    for (const auto& r : rec) {
        if (r.user_class == "eVTOL") {
            ++evtol;
            outage += r.sinr_db < -5.0;
        }
        if (r.user_class == "eVTOL_NTN") {
            ++offloaded;
            CHECK_FALSE(r.precoder.has_value());
            CHECK(r.direction == "DL");
            CHECK(r.elevation_deg == 90.0);
            CHECK(r.frf == "FRF3");
            CHECK(r.evtol_density == 1.0);
        }
    }
    CHECK(evtol == 57);
    CHECK(offloaded == outage);

    s.ntn->offload_all = true;
    const auto all = run_scenario(s, {1, 1, "ntn"});
    std::size_t moved = 0;
    for (const auto& r : all)
        moved += r.user_class == "eVTOL_NTN";
    CHECK(moved == 57);
}

TEST_CASE("Summaries", "[sim]")
{
    std::vector<KpiRecord> rec;
    for (int k = 0; k < 10; ++k) {
        KpiRecord r;
        r.scenario_id = k < 8 ? "a" : "b";
        r.user_class = k % 2 ? "GUE_indoor" : "GUE_outdoor";
        r.sinr_db = k - 6.0;
        r.rate_mbps = k;
        rec.push_back(r);
    }
    const SummaryRow g = summarize(rec, "a", "GUE");
    CHECK(g.n == 8);
    CHECK(g.median_sinr_db == -3.0);
    CHECK(g.p95_sinr_db == 1.0);
    CHECK(g.outage == 0.125);
    CHECK(summarize(rec, "a", "GUE_indoor").n == 4);
    CHECK(summarize(rec, "c", "GUE").n == 0);
}

TEST_CASE("Sweep enumeration", "[sim]")
{
    std::set<std::string> ids;
    int visited = 0;
    const auto res = sweep_example1({}, [&](const std::optional<double>& isd, Precoder p, Direction d) {
        ++visited;
        ids.insert(example1_id(isd, p, d));
        return false;
    });
    CHECK(visited == 16);
    CHECK(ids.size() == 16);
    CHECK(ids.count("ex1_isdA-none_ZF_UL") == 1);
    CHECK(ids.count("ex1_isdA-500_EDA_DL") == 1);
    CHECK(res.records.empty());

    const auto cfgs = example2_ntn_configs();
    REQUIRE(cfgs.size() == 4);
    std::set<std::string> ntn_ids;
    for (const auto& c : cfgs) {
        ntn_ids.insert(example2_ntn_id(c));
        Scenario s;
        s.ntn = c;
        CHECK_NOTHROW(validate(s));
    }
    CHECK(ntn_ids == std::set<std::string>{"ex2_ntn_el-90_FRF1", "ex2_ntn_el-90_FRF3", "ex2_ntn_el-87_FRF1",
                                           "ex2_ntn_el-87_FRF3"});
    CHECK(example2_id(0.5) == "ex2_tn_density-0.5");
    CHECK(example2_densities().size() == 4);
}

TEST_CASE("Rate study drop", "[sim]")
{
    const NtnConfig cfg;
    const auto a = rate_study_drop(cfg, 27, kRateStudyAreaKm2, 5, 0);
    REQUIRE(a.size() == 27);
    CHECK(rate_study_drop(cfg, 27, kRateStudyAreaKm2, 5, 0) == a);
    CHECK(rate_study_drop(cfg, 27, kRateStudyAreaKm2, 5, 1) != a);
    double total = 0.0;
    for (const auto& r : a) {
        CHECK(r.scenario_id == "ex2_rate_users-27");
        total += r.rate_mbps;
    }
    // one beam of 10 MHz at no more than 7.8 bit/s/Hz
    CHECK(total <= 78.0 * kNtnBeams);
    const auto one = rate_study_drop(cfg, 1, kRateStudyAreaKm2, 5, 0);
    CHECK(one[0].rate_mbps > a[0].rate_mbps);
}
