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
// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.
//
//   acceptance [--drops N] [--threads N] [--seed N]

#include <CLI11.hpp>

#include <ntnsim/ntnsim.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace ntnsim;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream notes;

    void check(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            notes << " [failed: " << what << "]";
        }
    }
};

std::string num(double v, int prec = 3)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

CMat random_channels(Eigen::Index ports, Eigen::Index users, RandomStream& rng)
{
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    CMat h(ports, users);
    for (Eigen::Index j = 0; j < users; ++j)
        for (Eigen::Index i = 0; i < ports; ++i)
            h(i, j) = cdouble(g(rng), g(rng));
    return h;
}

double median_of(const std::vector<KpiRecord>& rec, const std::string& id, const std::string& cls)
{
    return summarize(rec, id, cls).median_sinr_db;
}

// ---------------------------------------------------------------------------

Verdict unit_values()
{
    Verdict v;
    const double fspl = free_space_pathloss(600e3, 2e9);
    const double noise = noise_power_dbm(50e6, 7.0);
    const double p_ul = ul_tx_power(PowerControlParams{}, 100.0, 50e6);
    const double g_el = element_gain(ElementPattern{}, 0.0, 90.0);
    const double g_ap = aperture_gain(AperturePattern{}, 2.205);
    const auto sites = build_hex_layout(500.0, 2).sites.size();
    v.check(std::abs(fspl - 154.03) <= 0.1, "FSPL");
    v.check(std::abs(noise + 90.0) <= 0.05, "noise floor");
    v.check(std::abs(p_ul - 1.40) <= 0.05, "UL power");
    v.check(std::abs(g_el - 8.0) <= 1e-9, "element gain");
    v.check(std::abs(g_ap - 27.0) <= 0.05, "aperture gain");
    v.check(sites == 19, "site count");
    v.notes << " fspl=" << num(fspl) << " noise=" << num(noise) << " p_ul=" << num(p_ul) << " g_el=" << num(g_el)
            << " g_ap=" << num(g_ap) << " sites=" << sites;
    return v;
}

Verdict linear_algebra()
{
    Verdict v;
    RandomStream rng = substream(2024, 0, StreamTag::test);

    double zf_worst = 0.0;
    double null_worst = 0.0;
    double supp_worst = std::numeric_limits<double>::infinity();
    bool identical = true;
    for (int trial = 0; trial < 20; ++trial) {
        const CMat served = random_channels(128, 8, rng);
        const CMat victims = random_channels(128, 48, rng);

        const BeamWeights zf = zf_precoder(served);
        const CMat g = served.adjoint() * zf.w;
        for (Eigen::Index i = 0; i < g.rows(); ++i)
            for (Eigen::Index j = 0; j < g.cols(); ++j)
                if (i != j)
                    zf_worst = std::max(zf_worst, std::abs(g(i, j)) / std::abs(g(j, j)));

        const BeamWeights eda = eda_precoder(served, victims, 16);
        const CMat e = dominant_eigenvectors(victims, 16);
        null_worst = std::max(null_worst, (e.adjoint() * eda.w).norm() / eda.w.norm());

        const BeamWeights eda0 = eda_precoder(served, victims, 0);
        identical = identical && eda0.w.cwiseEqual(zf.w).all();

        const CMat victim = random_channels(128, 1, rng);
        const double p_zf = (victim.adjoint() * zf.w).squaredNorm();
        const double p_eda = (victim.adjoint() * eda_precoder(served, victim, 1).w).squaredNorm();
        supp_worst = std::min(supp_worst, 10.0 * std::log10(p_zf / p_eda));
    }

    CVec a_rx(4), a_tx(8);
    for (Eigen::Index i = 0; i < a_rx.size(); ++i)
        a_rx(i) = std::polar(1.0, 0.3 * static_cast<double>(i));
    for (Eigen::Index i = 0; i < a_tx.size(); ++i)
        a_tx(i) = std::polar(1.0, -0.7 * static_cast<double>(i));
    double frob_worst = 0.0;
    const double gain = 2.5e-12;
    for (double k_db : {-std::numeric_limits<double>::infinity(), 0.0, 9.0, 15.0}) {
        const double k = std::isinf(k_db) ? 0.0 : std::pow(10.0, k_db / 10.0);
        double acc = 0.0;
        const int n = 10000;
        for (int i = 0; i < n; ++i)
            acc += synthesize_channel(gain, k, a_rx, a_tx, rng).squaredNorm();
        frob_worst = std::max(frob_worst, std::abs(acc / n / 32.0 / gain - 1.0));
    }

    v.check(zf_worst <= 1e-9, "ZF residual");
    v.check(null_worst <= 1e-9, "EDA null residual");
    v.check(identical, "EDA(0) == ZF");
    v.check(supp_worst >= 60.0, "rank-1 suppression");
    v.check(frob_worst <= 0.02, "Frobenius normalisation");
    v.notes << " zf_res=" << zf_worst << " null_res=" << null_worst << " eda0_eq_zf=" << identical
            << " suppression_dB=" << num(supp_worst, 1) << " frob_err=" << num(100.0 * frob_worst, 2) << "%";
    return v;
}

Verdict example1_trends(const SweepOptions& opt)
{
    Verdict v;
    const auto res = sweep_example1(opt, [](const std::optional<double>& isd, Precoder p, Direction d) {
        return d == Direction::ul && (isd.has_value() || p == Precoder::zf);
    });
    const auto& rec = res.records;
    for (Precoder p : {Precoder::zf, Precoder::eda}) {
        double prev = -std::numeric_limits<double>::infinity();
        v.notes << " UAV_med_" << to_string(p) << "=";
        for (double isd : {1500.0, 1000.0, 500.0}) {
            const double m = median_of(rec, example1_id(isd, p, Direction::ul), "UAV");
            v.check(m >= prev, "UAV trend " + to_string(p));
            prev = m;
            v.notes << num(m, 2) << (isd == 500.0 ? "" : "/");
        }
    }
    v.notes << " GUE_med(ZF/EDA)=";
    for (double isd : {1500.0, 1000.0, 500.0}) {
        const double zf = median_of(rec, example1_id(isd, Precoder::zf, Direction::ul), "GUE");
        const double eda = median_of(rec, example1_id(isd, Precoder::eda, Direction::ul), "GUE");
        v.check(eda >= zf, "GUE EDA >= ZF at " + num(isd, 0));
        v.notes << num(zf, 2) << "/" << num(eda, 2) << (isd == 500.0 ? "" : ",");
    }
    const double shared = summarize(rec, example1_id(500.0, Precoder::eda, Direction::ul), "UAV").p95_rate_mbps;
    const double alone = summarize(rec, example1_id(std::nullopt, Precoder::zf, Direction::ul), "UAV").p95_rate_mbps;
    const double ratio = shared / alone;
    v.check(ratio >= 2.5, "p95 UAV rate ratio");
    v.notes << " p95_UAV_rate=" << num(shared, 1) << "/" << num(alone, 1) << " ratio=" << num(ratio, 2);
    return v;
}

Verdict example2_outage(const SweepResult& res)
{
    Verdict v;
    std::map<double, double> out;
    for (double dens : example2_densities())
        out[dens] = summarize(res.records, example2_id(dens), "eVTOL").outage;
    v.check(out[1.0] >= 0.10 && out[1.0] <= 0.25, "outage at 1.0 in [10, 25]%");
    v.check(out[0.5] >= 0.02 && out[0.5] <= 0.18, "outage at 0.5 in [2, 18]%");
    v.check(out[0.2] >= 0.0 && out[0.2] <= 0.08, "outage at 0.2 in [0, 8]%");
    v.check(out[0.2] < out[0.5] && out[0.5] < out[1.0], "outage increasing in density");
    v.notes << " outage(0.1/0.2/0.5/1.0)=" << num(100 * out[0.1], 1) << "/" << num(100 * out[0.2], 1) << "/"
            << num(100 * out[0.5], 1) << "/" << num(100 * out[1.0], 1) << "%";
    for (const NtnConfig& c : example2_ntn_configs()) {
        const SummaryRow row = summarize(res.records, example2_ntn_id(c), kOffloadedLabel);
        v.check(row.n > 0, "offloaded users present for " + example2_ntn_id(c));
        v.check(row.outage == 0.0, "offloaded outage " + example2_ntn_id(c));
        v.notes << " " << example2_ntn_id(c) << ":n=" << row.n << ",out=" << num(100 * row.outage, 1) << "%";
    }
    return v;
}

Verdict example2_gaps(const SweepResult& res)
{
    Verdict v;
    auto med = [&](double el, Frf f) {
        NtnConfig c;
        c.elevation_deg = el;
        c.frf = f;
        return median_of(res.records, example2_ntn_id(c), kOffloadedLabel);
    };
    const double gap90 = med(90, Frf::frf3) - med(90, Frf::frf1);
    const double gap87 = med(87, Frf::frf3) - med(87, Frf::frf1);
    const double loss = med(90, Frf::frf1) - med(87, Frf::frf1);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& r : res.records) {
        if (r.user_class != kOffloadedLabel)
            continue;
        lo = std::min(lo, r.sinr_db);
        hi = std::max(hi, r.sinr_db);
    }
    v.check(gap90 >= 5.0 && gap90 <= 11.0, "FRF3-FRF1 gap at 90 deg in [5, 11] dB");
    v.check(gap87 > gap90, "gap at 87 deg larger");
    v.check(loss >= 6.0, "FRF1 loss 90->87 >= 6 dB");
    v.check(lo >= -6.0 && hi <= 18.0, "offloaded SINR in [-6, 18] dB");
    v.notes << " gap90=" << num(gap90, 2) << " gap87=" << num(gap87, 2) << " frf1_loss=" << num(loss, 2)
            << " range=[" << num(lo, 2) << ", " << num(hi, 2) << "]";
    return v;
}

Verdict example2_rates(const SweepResult& res)
{
    Verdict v;
    std::vector<double> med;
    v.notes << " median_rate(27/7/1)=";
    for (int n : rate_study_counts()) {
        med.push_back(summarize(res.records, rate_study_id(n), kOffloadedLabel).median_rate_mbps);
        v.notes << num(med.back(), 2) << (n == 1 ? " Mbps" : "/");
    }
    v.check(med[0] >= 1.5 && med[0] <= 6.0, "27-user median in [1.5, 6] Mbps");
    v.check(med[0] < med[1] && med[1] < med[2], "per-user rate increasing as users drop");
    return v;
}

Verdict reproducibility(const SweepOptions& opt, const SweepResult& ex2, int ex1_drops)
{
    Verdict v;
    SweepOptions par = opt;
    par.threads = opt.threads == 1 ? 2 : 1;
    const SweepResult ex2_again = sweep_example2(par);
    v.check(ex2_again.records == ex2.records, "Example II rerun");
    v.check(to_csv(ex2_again.records) == to_csv(ex2.records), "Example II CSV");

    SweepOptions small = opt;
    small.n_drops = ex1_drops;
    SweepOptions small_par = small;
    small_par.threads = par.threads;
    const SweepResult a = sweep_example1(small);
    const SweepResult b = sweep_example1(small_par);
    v.check(a.records == b.records, "Example I rerun");
    v.check(to_csv(a.records) == to_csv(b.records), "Example I CSV");
    v.notes << " ex2_records=" << ex2.records.size() << " (threads " << opt.threads << " vs " << par.threads
            << "), ex1_records=" << a.records.size() << " over " << ex1_drops << " drops (threads " << small.threads
            << " vs " << small_par.threads << ")";
    return v;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance checks"};
    SweepOptions opt;
    int ex1_repro_drops = 2;
    app.add_option("--drops", opt.n_drops, "Drops per configuration")->check(CLI::PositiveNumber);
    app.add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", opt.seed, "Random seed");
    app.add_option("--repro-drops", ex1_repro_drops, "Drops of the Example I rerun")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    int failures = 0;
    auto report = [&](int id, const char* name, const std::function<Verdict()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v.pass = false;
            v.notes << " [exception: " << e.what() << "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s criterion %d (%s):%s (%.0f s)\n", v.pass ? "PASS" : "FAIL", id, name, v.notes.str().c_str(),
                    secs);
        std::fflush(stdout);
        failures += v.pass ? 0 : 1;
    };

    report(1, "unit values", unit_values);
    report(2, "linear algebra", linear_algebra);
    report(3, "Example I trends", [&] { return example1_trends(opt); });

    SweepResult ex2;
    std::string ex2_error;
    try {
        ex2 = sweep_example2(opt);
    } catch (const std::exception& e) {
        ex2_error = e.what();
    }
    auto needs_ex2 = [&](Verdict (*fn)(const SweepResult&)) {
        return [&, fn] {
            if (!ex2_error.empty())
                throw std::runtime_error(ex2_error);
            return fn(ex2);
        };
    };
    report(4, "Example II outage", needs_ex2(example2_outage));
    report(5, "Example II SINR gaps", needs_ex2(example2_gaps));
    report(6, "Example II rates", needs_ex2(example2_rates));
    report(7, "reproducibility", [&] {
        if (!ex2_error.empty())
            throw std::runtime_error(ex2_error);
        return reproducibility(opt, ex2, ex1_repro_drops);
    });

    std::printf("%d of 7 criteria passed\n", 7 - failures);
    return failures == 0 ? 0 : 1;
}
