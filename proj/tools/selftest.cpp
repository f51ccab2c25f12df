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

#include "selftest.hpp"

#include "zotfs/channel.hpp"
#include "zotfs/estimation.hpp"
#include "zotfs/harness.hpp"
#include "zotfs/iq_file.hpp"
#include "zotfs/oracle.hpp"
#include "zotfs/sync.hpp"
#include "zotfs/zak.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

namespace zotfs::cli {

namespace {

DDGrid random_grid(int M, int N, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    DDGrid grid(M, N);
    for (auto& v : grid.values())
        v = {g(rng), g(rng)};
    return grid;
}

double rel_err(std::span<const cd> a, std::span<const cd> b)
{
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - b[i]);
        den += std::norm(b[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

// Each check returns the measured error; it passes when err <= tol.
struct Check {
    const char* name;
    double tol;
    std::function<double()> run;
};

std::vector<Check> checks()
{
    return {
        {"idzt matches direct sum (8x4)", 1e-12,
         [] {
             std::mt19937_64 rng(1);
             const DDGrid g = random_grid(8, 4, rng);
             return rel_err(idzt(g, 1.0).samples, oracle::naive_idzt(g));
         }},
        {"dzt matches direct sum (4x8)", 1e-12,
         [] {
             std::mt19937_64 rng(2);
             const DDGrid g = random_grid(4, 8, rng);
             const CVec s(g.values().begin(), g.values().end());
             return rel_err(dzt(DTSignal{s, 1.0}, 4, 8).values(), oracle::naive_dzt(s, 4, 8).values());
         }},
        {"dzt(idzt(x)) = x (64x64)", 1e-10,
         [] {
             std::mt19937_64 rng(3);
             const DDGrid g = random_grid(64, 64, rng);
             return rel_err(dzt(idzt(g, 1.0), 64, 64).values(), g.values());
         }},
        {"rrc_w1 closed form vs spectral integral", 1e-9,
         [] {
             double worst = 0.0;
             for (double x : {0.0, 0.25, 0.5, 1.0, 1.7, 3.3})
                 worst = std::max(worst, std::abs(rrc_w1(x, 1.0, 0.5) - oracle::rrc_w1_spectral(x, 1.0, 0.5)));
             return worst;
         }},
        {"twisted convolution vs brute force (8x8)", 1e-12,
         [] {
             std::mt19937_64 rng(4);
             const DDGrid s = random_grid(8, 8, rng);
             auto h = EffectiveChannelEstimate::zeros(8, 8, SupportRegion::custom(-2, 3));
             std::vector<oracle::Tap> taps;
             std::normal_distribution<double> g;
             for (int k = -2; k < 3; ++k)
                 for (int l = -4; l < 4; ++l) {
                     const cd v{g(rng), g(rng)};
                     h.set_tap(k, l, v);
                     taps.push_back({k, l, v});
                 }
             return rel_err(predict_io(s, h).values(), oracle::brute_twisted_convolution(s, taps).values());
         }},
        {"MMSE direct vs conjugate gradient (8x8)", 1e-6,
         [] {
             std::mt19937_64 rng(5);
             const DDGrid y = random_grid(8, 8, rng);
             auto h = EffectiveChannelEstimate::zeros(8, 8, SupportRegion::custom(0, 2));
             h.set_tap(0, 0, 1.0);
             h.set_tap(1, 1, cd(0.3, 0.2));
             const SparseIoOperator H(build_io_matrix(h));
             MmseOptions direct{MmseMethod::Direct};
             MmseOptions cg{MmseMethod::ConjugateGradient};
             return rel_err(mmse_equalize(y, H, 0.05, cg).values(), mmse_equalize(y, H, 0.05, direct).values());
         }},
        {"impairment folding (noiseless)", 1e-9,
         [] {
             const FrameParams p = FrameParams::from_doppler_period(16, 16, 30e3);
             const PulseShaper shaper(p, PulseShape::rrc(0.5), 4);
             std::mt19937_64 rng(6);
             const AnalogSignal s = shaper.synthesize(idzt(random_grid(16, 16, rng), p.B));
             ChannelSpec spec;
             spec.paths = {{cd(0.8, 0.1), 1.3 / p.B, 2100.0}, {cd(0.0, 0.4), 2.0 / p.B, -900.0}};
             spec.impairments = {0.37 / p.B, 1234.5, 0.6};
             Rng unused(0);
             const AnalogSignal a = apply_impairments(apply_paths(s, spec.paths), spec.impairments, 0.0, unused);
             const AnalogSignal b = apply_paths(s, fold_impairments(spec));
             double worst = 0.0;
             double peak = 0.0;
             for (std::int64_t n = std::min(a.start, b.start); n < std::max(a.end(), b.end()); ++n) {
                 worst = std::max(worst, std::abs(a.at(n) - b.at(n)));
                 peak = std::max(peak, std::abs(a.at(n)));
             }
             return worst / peak;
         }},
        {"ZC(256, 25) periodic sidelobes", 0.05,
         [] {
             const Preamble pre = make_preamble(256, 25);
             const auto r = oracle::periodic_autocorrelation(pre.samples);
             double side = 0.0;
             for (std::size_t m = 1; m < r.size(); ++m)
                 side = std::max(side, r[m]);
             return side / r[0];
         }},
        {"IQ file round trip", 1e-6,
         [] {
             CVec x{{0.5, -0.25}, {1e-3, 7.0}, {-2.0, 0.0}};
             const auto path = std::filesystem::temp_directory_path() / "zotfs_selftest.zoiq";
             write_iq(path, x, 7.68e6);
             const IqData d = read_iq(path);
             std::filesystem::remove(path);
             return d.sample_rate == 7.68e6 ? rel_err(d.samples, x) : 1.0;
         }},
        {"noiseless loopback bit errors (16x16, 16-QAM)", 0.0,
         [] {
             ExperimentConfig cfg = default_config();
             cfg.frame = FrameParams::from_doppler_period(16, 16, 30e3);
             cfg.tau_max = 1.0 / cfg.frame.B;
             cfg.dt_margin = 1.0 / cfg.frame.B;
             cfg.channel.tau_max = cfg.tau_max;
             cfg.channel.nu_max = cfg.frame.nu_p / 2;
             cfg.modulation = 16;
             cfg.sync.enabled = false;
             cfg.cfo_correction = CfoCorrection::ChannelFolded;
             return static_cast<double>(run_trial(cfg, INFINITY, 0).bit_errors);
         }},
    };
}

} // namespace

int run_selftest(std::ostream& out)
{
    int failures = 0;
    for (const Check& c : checks()) {
        double err = 0.0;
        bool pass = false;
        std::string note;
        try {
            err = c.run();
            pass = err <= c.tol;
        } catch (const std::exception& e) {
            note = std::string(" (") + e.what() + ")";
        }
        char line[256];
        std::snprintf(line, sizeof line, "[%s] %-48s err=%.3e tol=%.1e", pass ? "PASS" : "FAIL", c.name, err, c.tol);
        out << line << note << "\n";
        failures += pass ? 0 : 1;
    }
    out << (failures == 0 ? "selftest: all checks passed\n" : "selftest: " + std::to_string(failures) + " check(s) failed\n");
    return failures;
}

} // namespace zotfs::cli
