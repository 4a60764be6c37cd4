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

#include <ntnsim/kpi.hpp>
#include <ntnsim/rng.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ntnsim;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<KpiRecord> sample_records()
{
    std::vector<KpiRecord> out;
    KpiRecord tn;
    tn.scenario_id = "ex1_isdA-500_EDA_UL";
    tn.isd_a = 500.0;
    tn.precoder = "EDA";
    tn.direction = "UL";
    tn.user_class = "UAV";
    tn.drop = 3;
    tn.sinr_db = 12.3456789;
    tn.rate_mbps = 271.5;
    out.push_back(tn);

    KpiRecord ntn;
    ntn.scenario_id = "ex2_ntn_el-87_FRF3";
    ntn.direction = "DL";
    ntn.elevation_deg = 87.0;
    ntn.frf = "FRF3";
    ntn.evtol_density = 1.0;
    ntn.user_class = "eVTOL_NTN";
    ntn.drop = 0;
    ntn.sinr_db = -2.5;
    ntn.rate_mbps = 0.125;
    out.push_back(ntn);
    return out;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("Rate mapping", "[kpi]")
{
    CHECK_THAT(rate_map(0.0, 10e6, 1.0), WithinAbs(10.0, 1e-12));
    CHECK_THAT(rate_map(10.0, 50e6, 0.5), WithinRel(25.0 * std::log2(11.0), 1e-12));
    CHECK(rate_map(40.0, 100e6, 1.0) == 780.0);
    // the cap is reached where log2(1 + x) = 7.8
    const double knee = 10.0 * std::log10(std::pow(2.0, 7.8) - 1.0);
    CHECK_THAT(rate_map(knee, 1e6, 1.0), WithinAbs(7.8, 1e-9));
    CHECK(rate_map(knee + 5.0, 1e6, 1.0) == 7.8);
    CHECK(rate_map(-10.0, 1e6, 1.0) > 0.0);
    CHECK(rate_map(-10.0001, 1e6, 1.0) == 0.0);
    CHECK(rate_map(-std::numeric_limits<double>::infinity(), 1e6, 1.0) == 0.0);
    CHECK(rate_map(5.0, 0.0, 1.0) == 0.0);
    CHECK_THROWS_AS(rate_map(5.0, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(rate_map(5.0, 1e6, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(rate_map(5.0, 1e6, -0.1), std::invalid_argument);

    double prev = -1.0;
    for (double s = -10.0; s < 30.0; s += 0.25) {
        const double r = rate_map(s, 20e6, 1.0);
        CHECK(r >= prev);
        prev = r;
    }
}

TEST_CASE("Percentiles and outage", "[kpi]")
{
    const std::vector<double> v = {5, 1, 4, 2, 3};
    CHECK(percentile(v, 0.0) == 1.0);
    CHECK(percentile(v, 20.0) == 1.0);
    CHECK(percentile(v, 21.0) == 2.0);
    CHECK(median(v) == 3.0);
    CHECK(percentile(v, 95.0) == 5.0);
    CHECK(percentile(v, 100.0) == 5.0);
    CHECK(median({1.0, 2.0, 3.0, 4.0}) == 2.0);
    CHECK_THROWS_AS(percentile({}, 50.0), std::invalid_argument);
    CHECK_THROWS_AS(percentile(v, 101.0), std::invalid_argument);

    CHECK(outage_fraction({-6.0, -5.0, -4.0, 0.0}) == 0.25);
    CHECK(outage_fraction({-6.0, -5.0, -4.0, 0.0}, -3.0) == 0.75);
    CHECK_THROWS_AS(outage_fraction({}), std::invalid_argument);

    // a percentile is always a sample, and the empirical CDF at it reaches p
    RandomStream rng = substream(11, 0, StreamTag::test);
    std::vector<double> x(997);
    for (double& e : x)
        e = rng.normal(0.0, 5.0);
    for (double p : {1.0, 5.0, 50.0, 95.0, 99.0}) {
        const double q = percentile(x, p);
        CHECK(std::find(x.begin(), x.end(), q) != x.end());
        const auto below = std::count_if(x.begin(), x.end(), [&](double e) { return e <= q; });
        const auto strictly = std::count_if(x.begin(), x.end(), [&](double e) { return e < q; });
        CHECK(static_cast<double>(below) >= p / 100.0 * 997.0);
        CHECK(static_cast<double>(strictly) < p / 100.0 * 997.0);
    }
}

TEST_CASE("CSV layout", "[kpi]")
{
    CHECK(to_csv({}) == "scenario_id,isd_a,precoder,direction,elevation_deg,frf,evtol_density,user_class,drop,sinr_db,"
                        "rate_mbps\n");
    const std::string csv = to_csv(sample_records());
    std::istringstream in(csv);
    std::string header;
    std::string first;
    std::string second;
    std::getline(in, header);
    std::getline(in, first);
    std::getline(in, second);
    CHECK(first == "ex1_isdA-500_EDA_UL,500,EDA,UL,,,,UAV,3,12.3457,271.5");
    CHECK(second == "ex2_ntn_el-87_FRF3,,,DL,87,FRF3,1,eVTOL_NTN,0,-2.5,0.125");
}

TEST_CASE("CSV round trip", "[kpi]")
{
    auto records = sample_records();
    records[0].sinr_db = 12.3457;  // representable at six significant digits
    CHECK(parse_csv(to_csv(records)) == records);
    CHECK(parse_csv(to_csv({})).empty());
    CHECK_THROWS(parse_csv("wrong,header\n"));
    CHECK_THROWS_WITH(parse_csv(std::string(kCsvHeader) + "\na,b\n"), ContainsSubstring("line 2"));

    // summary statistics survive the export
    RandomStream rng = substream(12, 0, StreamTag::test);
    std::vector<KpiRecord> many;
    for (int k = 0; k < 500; ++k) {
        KpiRecord r;
        r.scenario_id = "s";
        r.user_class = "GUE_outdoor";
        r.drop = k / 50;
        r.sinr_db = std::round(rng.normal(5.0, 8.0) * 1000.0) / 1000.0;
        r.rate_mbps = rate_map(r.sinr_db, 10e6, 0.25);
        many.push_back(r);
    }
    const auto back = parse_csv(to_csv(many));
    auto sinr = [](const KpiRecord& r) { return r.sinr_db; };
    auto all = [](const KpiRecord&) { return true; };
    for (double p : {5.0, 50.0, 95.0})
        CHECK(percentile(collect(back, all, sinr), p) == percentile(collect(many, all, sinr), p));
}

TEST_CASE("JSON export", "[kpi]")
{
    const auto j = to_json(sample_records());
    REQUIRE(j.size() == 2);
    CHECK(j[0]["isd_a"] == 500.0);
    CHECK(j[0]["elevation_deg"].is_null());
    CHECK(j[0]["frf"].is_null());
    CHECK(j[0]["evtol_density"].is_null());
    CHECK(j[1]["isd_a"].is_null());
    CHECK(j[1]["precoder"].is_null());
    CHECK(j[1]["frf"] == "FRF3");
    CHECK(j[1]["drop"] == 0);
    CHECK(to_json({}).dump() == "[]");
}

TEST_CASE("Export to files", "[kpi]")
{
    const auto dir = std::filesystem::temp_directory_path() / "ntnsim_kpi_test";
    std::filesystem::create_directories(dir);
    const auto csv = dir / "records.csv";
    const auto json = dir / "records.json";
    export_records({}, ExportFormat::csv, csv.string());
    CHECK(slurp(csv) == std::string(kCsvHeader) + "\n");
    export_records(sample_records(), ExportFormat::json, json.string());
    CHECK(nlohmann::json::parse(slurp(json)) == to_json(sample_records()));
    std::filesystem::remove_all(dir);

    const std::string bad = (dir / "missing" / "records.csv").string();
    CHECK_THROWS_WITH(export_records({}, ExportFormat::csv, bad), ContainsSubstring(bad));
}
