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
//
// Command-line front end.
//
//   ntnsim simulate <config-file> [--seed N] [--drops N] [--out DIR] [--threads N]
//   ntnsim sweep example1|example2 [--seed N] [--drops N] [--out DIR] [--threads N]

#include <CLI11.hpp>

#include <ntnsim/ntnsim.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

namespace fs = std::filesystem;
using namespace ntnsim;

static void write_outputs(const std::vector<KpiRecord>& records, const std::vector<SummaryRow>& summary,
                          const fs::path& dir)
{
    fs::create_directories(dir);
    export_records(records, ExportFormat::csv, (dir / "records.csv").string());
    export_records(records, ExportFormat::json, (dir / "records.json").string());

    nlohmann::json js = nlohmann::json::array();
    for (const SummaryRow& r : summary) {
        js.push_back({{"scenario_id", r.scenario_id},
                      {"user_class", r.user_class},
                      {"n", r.n},
                      {"median_sinr_db", r.median_sinr_db},
                      {"p95_sinr_db", r.p95_sinr_db},
                      {"median_rate_mbps", r.median_rate_mbps},
                      {"p95_rate_mbps", r.p95_rate_mbps},
                      {"outage", r.outage}});
    }
    std::ofstream((dir / "summary.json").string()) << js.dump(1) << '\n';
}

static void print_summary(const std::vector<SummaryRow>& summary)
{
    std::printf("%-28s %-12s %7s %10s %10s %12s %12s %8s\n", "scenario", "class", "n", "sinr_p50", "sinr_p95",
                "rate_p50", "rate_p95", "outage");
    for (const SummaryRow& r : summary) {
        std::printf("%-28s %-12s %7zu %10.2f %10.2f %12.2f %12.2f %7.1f%%\n", r.scenario_id.c_str(),
                    r.user_class.c_str(), r.n, r.median_sinr_db, r.p95_sinr_db, r.median_rate_mbps, r.p95_rate_mbps,
                    100.0 * r.outage);
    }
}

int main(int argc, char** argv)
{
    CLI::App app{"System-level simulator for integrated terrestrial and non-terrestrial networks"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    std::optional<int> drops;
    std::string out_dir = "out";
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", seed, "Master seed");
        sub->add_option("--drops", drops, "Number of drops")->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    };

    std::string config_path;
    auto* sim = app.add_subcommand("simulate", "Run one scenario from a configuration file");
    sim->add_option("config", config_path, "Scenario file")->required()->check(CLI::ExistingFile);
    add_common(sim);

    std::string which;
    auto* sweep = app.add_subcommand("sweep", "Run a predefined sweep");
    sweep->add_option("example", which, "example1 or example2")
        ->required()
        ->check(CLI::IsMember({"example1", "example2"}));
    bool offload_all = false;
    sweep->add_flag("--offload-all", offload_all, "example2: offload every eVTOL, not only those in outage");
    add_common(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*sim) {
            Scenario s = load_scenario(config_path);
            if (seed)
                s.seed = *seed;
            if (drops)
                s.n_drops = *drops;
            validate(s);
            const std::string id = fs::path(config_path).stem().string();
            const auto records = run_scenario(s, {threads, s.n_drops, id});
            std::vector<SummaryRow> summary;
            for (const char* cls : {"GUE", "UAV", "eVTOL", kOffloadedLabel}) {
                SummaryRow r = summarize(records, id, cls);
                if (r.n > 0)
                    summary.push_back(r);
            }
            write_outputs(records, summary, out_dir);
            print_summary(summary);
        } else {
            SweepOptions opt;
            opt.seed = seed.value_or(1);
            opt.n_drops = drops.value_or(50);
            opt.threads = threads;
            const SweepResult res = which == "example1" ? sweep_example1(opt) : sweep_example2(opt, offload_all);
            write_outputs(res.records, res.summary, out_dir);
            print_summary(res.summary);
        }
    } catch (const ParseError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "invalid parameter " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
