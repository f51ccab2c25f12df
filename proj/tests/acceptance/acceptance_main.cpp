// SPDX-License-Identifier: Apache-2.0
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

// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Optional arguments select criteria by
// name, e.g. `acceptance AC2 AC7`.

#include "zotfs/channel.hpp"
#include "zotfs/estimation.hpp"
#include "zotfs/harness.hpp"
#include "zotfs/oracle.hpp"
#include "zotfs/sync.hpp"
#include "zotfs/zak.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace zotfs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int hw_workers()
{
    return static_cast<int>(std::max(1u, std::min(8u, std::thread::hardware_concurrency())));
}

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

DDGrid random_grid(int M, int N, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    DDGrid x(M, N);
    for (auto& v : x.values())
        v = {g(rng), g(rng)};
    return x;
}

double rel_err(std::span<const cd> a, std::span<const cd> b)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return std::sqrt(num / den);
}

struct Peak {
    int k = 0;
    int l = 0;
};

Peak argmax_tap(const EffectiveChannelEstimate& h)
{
    Peak p;
    double best = -1.0;
    for (int k = -h.M() / 2; k < h.M() - h.M() / 2; ++k)
        for (int l = -h.N() / 2; l < h.N() - h.N() / 2; ++l)
            if (std::abs(h.tap(k, l)) > best) {
                best = std::abs(h.tap(k, l));
                p = {k, l};
            }
    return p;
}

// --- AC1 -------------------------------------------------------------------

Outcome ac1()
{
    std::mt19937_64 rng(101);
    const std::pair<int, int> sizes[] = {{2, 2}, {4, 8}, {8, 4}, {64, 64}};
    double worst_rt = 0.0;
    double worst_parseval = 0.0;
    double worst_naive = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto [M, N] = sizes[i % 4];
        const DDGrid x = random_grid(M, N, rng);
        const DTSignal s = idzt(x, 1.0);
        const DDGrid back = dzt(s, M, N);
        worst_rt = std::max(worst_rt, rel_err(back.values(), x.values()));
        double es = 0.0;
        for (const cd& v : s.samples)
            es += std::norm(v);
        worst_parseval = std::max(worst_parseval, std::abs(es - x.energy()) / x.energy());
        if (M <= 8 && N <= 8) {
            const CVec ns = oracle::naive_idzt(x);
            worst_naive = std::max(worst_naive, rel_err(s.samples, ns));
            worst_naive = std::max(worst_naive, rel_err(dzt(s, M, N).values(), oracle::naive_dzt(s.samples, M, N).values()));
        }
    }
    return {worst_rt < 1e-10 && worst_parseval < 1e-10 && worst_naive < 1e-12,
            "roundtrip " + fmt("%.1e", worst_rt) + " parseval " + fmt("%.1e", worst_parseval) + " naive "
                + fmt("%.1e", worst_naive)};
}

// --- AC2 -------------------------------------------------------------------

DDGrid chain(const PulseShaper& sh, const DDGrid& x, std::span<const PathSpec> paths)
{
    const FrameParams& p = sh.params();
    const AnalogSignal rx = apply_paths(sh.synthesize(idzt(x, p.B)), paths);
    return dzt(sh.sample_and_periodize(sh.matched_filter(rx)), p.M, p.N);
}

double io_prediction_error(const PulseShape& shape)
{
    const FrameParams p = FrameParams::from_doppler_period(8, 8, 30e3);
    const PulseShaper sh(p, shape, 4);
    const double db = p.delay_bin();
    const double nb = p.doppler_bin();
    const std::vector<std::vector<PathSpec>> scenarios{
        {{cd(1.0), 0.0, 0.0}},
        {{cd(1.0), db, 0.0}},
        {{cd(0.0, 1.0), 0.0, nb}},
        {{cd(0.8), 0.0, 0.0}, {cd(0.3, 0.4), 2 * db, -nb}},
        {{cd(0.6), db, nb}, {cd(-0.5), 0.0, 0.0}, {cd(0.2, 0.3), 2 * db, 2 * nb}},
    };
    const FrameLayout lay = build_layout(p, 0.0, db);
    std::mt19937_64 rng(202);
    double worst = 0.0;
    for (const auto& paths : scenarios) {
        DDGrid pilot(p.M, p.N);
        pilot(lay.k_p, lay.l_p) = 1.0;
        const auto h = estimate(chain(sh, pilot, paths), lay, SupportRegion::full(p.M), 1.0);
        for (int t = 0; t < 3; ++t) {
            const DDGrid x = random_grid(p.M, p.N, rng);
            worst = std::max(worst, rel_err(predict_io(x, h).values(), chain(sh, x, paths).values()));
        }
    }
    return worst;
}

Outcome ac2()
{
    const double e_sinc = io_prediction_error(PulseShape::sinc());
    const double e_rrc = io_prediction_error(PulseShape::rrc(0.5));
    return {e_sinc < 1e-3 && e_rrc < 5e-3,
            "sinc " + fmt("%.2e", e_sinc) + " (tol 1e-3), rrc " + fmt("%.2e", e_rrc) + " (tol 5e-3)"};
}

// --- AC3 -------------------------------------------------------------------

Outcome ac3()
{
    const FrameParams p = FrameParams::from_doppler_period(32, 32, 30e3);
    const PulseShaper sh(p, PulseShape::rrc(0.5), 4);
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        const AnalogSignal s = sh.synthesize(idzt(random_grid(p.M, p.N, rng), p.B));
        ChannelSpec spec;
        spec.tau_max = 4.0 / p.B;
        spec.nu_max = p.nu_p / 2;
        const int n = 1 + static_cast<int>(u(rng) * 4);
        for (int i = 0; i < n; ++i)
            spec.paths.push_back({std::polar(0.1 + u(rng), 2 * kPi * u(rng)), u(rng) * spec.tau_max,
                                  (2 * u(rng) - 1) * spec.nu_max});
        spec.impairments = {(2 * u(rng) - 1) * 2.0 / p.B, (2 * u(rng) - 1) * 5000.0, (2 * u(rng) - 1) * kPi * 0.999};
        Rng unused(0);
        const AnalogSignal a = apply_impairments(apply_paths(s, spec.paths), spec.impairments, 0.0, unused);
        const AnalogSignal b = apply_paths(s, fold_impairments(spec));
        double peak = 0.0;
        double diff = 0.0;
        for (std::int64_t i = std::min(a.start, b.start); i < std::max(a.end(), b.end()); ++i) {
            peak = std::max(peak, std::abs(a.at(i)));
            diff = std::max(diff, std::abs(a.at(i) - b.at(i)));
        }
        worst = std::max(worst, diff / peak);
    }
    return {worst < 1e-9, "max sample error / peak " + fmt("%.2e", worst)};
}

// --- AC4 -------------------------------------------------------------------

ExperimentConfig estimator_config()
{
    ExperimentConfig cfg = default_config();
    cfg.sync.enabled = false;
    cfg.cfo_correction = CfoCorrection::ChannelFolded;
    cfg.support = SupportKind::C2;
    return cfg;
}

Outcome ac4()
{
    std::mt19937_64 rng(404);
    int hits_clean = 0;
    int hits_noisy = 0;
    for (int t = 0; t < 100; ++t) {
        ExperimentConfig cfg = estimator_config();
        const int k = static_cast<int>(rng() % 3);
        const int l = static_cast<int>(rng() % 31) - 15;
        cfg.channel.paths = {{std::polar(1.0, 0.1 * t), k * cfg.frame.delay_bin(), l * cfg.frame.doppler_bin()}};
        const Transceiver trx(cfg);
        const Peak a = argmax_tap(trx.run(INFINITY, static_cast<std::uint64_t>(t)).channel);
        const Peak b = argmax_tap(trx.run(25.0, static_cast<std::uint64_t>(t)).channel);
        hits_clean += a.k == k && a.l == l;
        hits_noisy += b.k == k && b.l == l;
    }
    return {hits_clean == 100 && hits_noisy >= 99,
            "noiseless " + std::to_string(hits_clean) + "/100, 25 dB " + std::to_string(hits_noisy) + "/100"};
}

// --- AC5 -------------------------------------------------------------------

Outcome ac5()
{
    auto peak_for = [](const ImpairmentSpec& imp, SupportKind support) {
        ExperimentConfig cfg = estimator_config();
        cfg.support = support;
        cfg.channel.impairments = imp;
        const Transceiver trx(cfg);
        const TrialReport r = trx.run(INFINITY, 0);
        return std::pair{argmax_tap(r.channel), r.channel.support};
    };
    const FrameParams p = default_config().frame;
    const auto [p0, s0] = peak_for({}, SupportKind::C2);
    const auto [pc, sc] = peak_for({0.0, p.doppler_bin(), 0.0}, SupportKind::C2);
    const auto [pt, st] = peak_for({p.delay_bin(), 0.0, 0.0}, SupportKind::C2);
    // Two bins early: outside C1 but still inside C2.
    const auto [pe2, se2] = peak_for({-2 * p.delay_bin(), 0.0, 0.0}, SupportKind::C2);
    const auto [pe1, se1] = peak_for({-2 * p.delay_bin(), 0.0, 0.0}, SupportKind::C1);

    const bool base = p0.k == 0 && p0.l == 0;
    const bool cfo = pc.k == 0 && pc.l == 1 && sc.contains_delay(pc.k);
    const bool timing = pt.k == 1 && pt.l == 0 && st.contains_delay(pt.k);
    const bool early = pe2.k == -2 && pe2.l == 0 && se2.contains_delay(-2) && !se1.contains_delay(-2) && pe1.k != -2;
    std::ostringstream d;
    d << "baseline (" << p0.k << "," << p0.l << ") cfo (" << pc.k << "," << pc.l << ") dt (" << pt.k << ","
      << pt.l << ") early C2 (" << pe2.k << "," << pe2.l << ") C1 (" << pe1.k << "," << pe1.l << ")";
    return {base && cfo && timing && early, d.str()};
}

// --- AC6 -------------------------------------------------------------------

Outcome ac6()
{
    std::ostringstream d;
    bool ok = true;
    for (int order : {4, 16}) {
        ExperimentConfig cfg = default_config();
        cfg.sync.enabled = false;
        cfg.cfo_correction = CfoCorrection::ChannelFolded;
        cfg.modulation = order;
        const TrialReport r = run_trial(cfg, INFINITY, 0);
        ok = ok && r.bit_errors == 0 && r.bits > 0;
        d << order << "-QAM " << r.bit_errors << "/" << r.bits << " errors; ";
    }
    return {ok, d.str()};
}

// --- AC7 / AC8 -------------------------------------------------------------

// Two integer-bin paths, 3 dB apart, with a carrier offset to be removed by
// the time-domain correction.
ExperimentConfig operating_point(int order, const PulseShape& shape)
{
    ExperimentConfig cfg = default_config();
    const double db = cfg.frame.delay_bin();
    const double nb = cfg.frame.doppler_bin();
    cfg.channel.paths = {{cd(std::sqrt(2.0 / 3.0)), 0.0, 0.0}, {cd(0.0, std::sqrt(1.0 / 3.0)), db, nb}};
    cfg.channel.impairments = {0.0, 1000.0, 0.5};
    cfg.shape = shape;
    cfg.modulation = order;
    cfg.cfo_correction = CfoCorrection::TimeDomain;
    cfg.workers = hw_workers();
    return cfg;
}

Outcome ac7()
{
    std::ostringstream d;
    bool ok = true;
    for (auto [order, limit] : {std::pair{4, 1e-2}, std::pair{16, 5e-2}}) {
        ExperimentConfig cfg = operating_point(order, PulseShape::rrc(0.5));
        cfg.snr_db = {25.0};
        cfg.trials = 100;
        const BerPoint p = sweep(cfg).curve.points.at(0);
        ok = ok && p.ber < limit;
        d << order << "-QAM BER " << fmt("%.3e", p.ber) << " (< " << fmt("%g", limit) << "); ";
    }
    return {ok, d.str()};
}

Outcome ac8()
{
    std::ostringstream d;
    bool ok = true;
    for (int order : {4, 16}) {
        ExperimentConfig rc = operating_point(order, PulseShape::rrc(0.5));
        ExperimentConfig sc = operating_point(order, PulseShape::sinc());
        rc.snr_db = sc.snr_db = {10.0, 15.0, 20.0, 25.0};
        rc.trials = sc.trials = 50;
        const BerCurve r = sweep(rc).curve;
        const BerCurve s = sweep(sc).curve;
        d << order << "-QAM";
        for (std::size_t i = 0; i < r.points.size(); ++i) {
            const BerPoint& a = r.points[i];
            const BerPoint& b = s.points[i];
            // Ordering holds unless RRC is worse by more than the joint 95% interval.
            const bool point_ok = a.ber <= b.ber || a.ber - b.ber <= std::hypot(a.ci95, b.ci95);
            ok = ok && point_ok;
            d << " " << fmt("%g", a.snr_db) << "dB " << fmt("%.2e", a.ber) << "/" << fmt("%.2e", b.ber)
              << (point_ok ? "" : "!");
        }
        d << "; ";
    }
    return {ok, d.str() + "(rrc/sinc)"};
}

// --- AC9 -------------------------------------------------------------------

Outcome ac9()
{
    ExperimentConfig cfg = default_config();
    cfg.cfo_correction = CfoCorrection::ChannelFolded;
    const Transceiver trx(cfg);
    int within = 0;
    for (int t = 0; t < 200; ++t) {
        const TrialReport r = trx.run(0.0, static_cast<std::uint64_t>(t));
        within += !r.sync_failed && std::llabs(r.sync.start_index - trx.preamble_start()) <= 1;
    }

    ExperimentConfig kc = default_config();
    kc.channel.impairments.eps0 = 7500.0;
    const Transceiver ktrx(kc);
    double rel = 0.0;
    const int kay_trials = 50;
    for (int t = 0; t < kay_trials; ++t) {
        const TrialReport r = ktrx.run(20.0, static_cast<std::uint64_t>(t));
        rel += std::abs(r.sync.cfo_hat - 7500.0) / 7500.0;
    }
    rel /= kay_trials;

    const AnalogSignal tx = trx.transmit(DDGrid(cfg.frame.M, cfg.frame.N));
    const CVec ref = shaped_reference(trx.preamble(), trx.shaper());
    int false_locks = 0;
    for (std::uint64_t t = 0; t < 1000; ++t) {
        AnalogSignal noise{CVec(tx.size(), cd{}), tx.B, tx.Q, tx.start};
        Rng rng(derive_seed(909, t, 1));
        add_noise(noise, 1.0, rng);
        false_locks += detect_timing(noise, ref, 0.3).detected;
    }
    std::ostringstream d;
    d << "timing " << within << "/200 within +-1, Kay mean rel err " << fmt("%.2e", rel) << ", false locks "
      << false_locks << "/1000";
    return {within >= 198 && rel < 0.01 && false_locks == 0, d.str()};
}

// --- AC10 ------------------------------------------------------------------

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome ac10()
{
    ExperimentConfig cfg = default_config();
    cfg.frame = FrameParams::from_doppler_period(16, 16, 30e3);
    cfg.tau_max = 2.0 / cfg.frame.B;
    cfg.dt_margin = 1.0 / cfg.frame.B;
    cfg.channel.nu_max = cfg.frame.nu_p / 2;
    cfg.channel.tau_max = cfg.tau_max;
    cfg.channel.paths = {{cd(0.8), 0.0, 0.0}, {cd(0.3, 0.4), cfg.frame.delay_bin(), cfg.frame.doppler_bin()}};
    cfg.channel.impairments = {0.0, 700.0, 0.2};
    cfg.modulation = 16;
    cfg.snr_db = {5.0, 10.0, 15.0};
    cfg.trials = 12;
    cfg.seed = 2024;

    const fs::path root = fs::temp_directory_path() / "zotfs_ac10";
    fs::remove_all(root);
    std::vector<fs::path> dirs;
    for (int run = 0; run < 4; ++run) {
        const int workers = std::array{1, 1, 4, 8}[static_cast<std::size_t>(run)];
        const fs::path dir = root / ("run" + std::to_string(run));
        cfg.workers = workers;
        cfg.output.csv = (dir / "ber.csv").string();
        cfg.output.svg = (dir / "ber.svg").string();
        cfg.output.constellation_prefix = (dir / "const_").string();
        write_sweep_outputs(cfg, sweep(cfg));
        dirs.push_back(dir);
    }
    std::size_t compared = 0;
    bool same = true;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
        const std::string ref = slurp(entry.path());
        for (std::size_t i = 1; i < dirs.size(); ++i) {
            same = same && fs::exists(dirs[i] / entry.path().filename())
                && slurp(dirs[i] / entry.path().filename()) == ref;
            ++compared;
        }
    }
    return {same && compared == 3 * 5,
            std::to_string(compared) + " file comparisons across runs with 1, 1, 4, 8 workers"};
}

// --- support ordering --------------------------------------------------------

// A weak early path lands two bins before the sync lock point: outside C1,
// inside C2. The carrier offset is left in the effective channel.
Outcome support_ordering()
{
    ExperimentConfig cfg = default_config();
    const double db = cfg.frame.delay_bin();
    cfg.channel.paths = {{cd(0.6), 0.0, 0.0}, {cd(1.0), 2 * db, 0.0}};
    cfg.channel.impairments = {0.0, cfg.frame.doppler_bin() / 2, 0.0};
    cfg.cfo_correction = CfoCorrection::ChannelFolded;
    cfg.snr_db = {25.0};
    cfg.trials = 200;
    cfg.workers = hw_workers();
    cfg.support = SupportKind::C1;
    const BerPoint c1 = sweep(cfg).curve.points.at(0);
    cfg.support = SupportKind::C2;
    const BerPoint c2 = sweep(cfg).curve.points.at(0);
    return {c2.ber <= c1.ber, "C2 BER " + fmt("%.3e", c2.ber) + " vs C1 BER " + fmt("%.3e", c1.ber)};
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5}, {"AC6", ac6},
        {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}, {"SUPPORT", support_ordering},
    };
    const std::vector<std::string> only(argv + 1, argv + argc);
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end())
            continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%-8s %s  %s  [%.1f s]\n", name.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += !o.pass;
    }
    return failures == 0 ? 0 : 1;
}
