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

#include "zotfs/channel.hpp"
#include "zotfs/oracle.hpp"
#include "zotfs/waveform.hpp"
#include "zotfs/zak.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace zotfs;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const FrameParams kSmall = FrameParams::from_doppler_period(16, 16, 30e3);

DTSignal random_dt(const FrameParams& p, std::mt19937_64& rng)
{
    std::normal_distribution<double> g;
    DTSignal s{CVec(static_cast<std::size_t>(p.size())), p.B};
    for (auto& v : s.samples)
        v = {g(rng), g(rng)};
    return s;
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

} // namespace

TEST_CASE("rrc_w1 at the origin")
{
    for (double beta : {0.1, 0.5, 1.0}) {
        const double expect = 1.0 + beta * (4.0 / kPi - 1.0);
        CHECK_THAT(rrc_w1(0.0, 2.0, beta), WithinAbs(expect, 1e-15));
        // Just outside the guard band the generic formula must agree.
        CHECK_THAT(rrc_w1(1e-9 / 2.0, 2.0, beta), WithinAbs(expect, 1e-9));
        CHECK_THAT(rrc_w1(-1e-9 / 2.0, 2.0, beta), WithinAbs(expect, 1e-9));
    }
}

TEST_CASE("rrc_w1 around |Bt| = 1/(4 beta)")
{
    const double beta = 0.5;
    const double x = 1.0 / (4.0 * beta);
    const double at = rrc_w1(x, 1.0, beta);
    CHECK_THAT(at, WithinAbs(rrc_w1(x + 1e-6, 1.0, beta), 1e-5));
    CHECK_THAT(at, WithinAbs(rrc_w1(x - 1e-6, 1.0, beta), 1e-5));
    CHECK_THAT(rrc_w1(-x, 1.0, beta), WithinAbs(at, 1e-15));
    // Integer points of the beta = 0.5 pulse: Bt = 1 gives -1/(3 pi).
    CHECK_THAT(rrc_w1(1.0, 1.0, 0.5), WithinAbs(-1.0 / (3.0 * kPi), 1e-15));
}

TEST_CASE("rrc_w1 matches the spectral definition")
{
    const double beta = 0.5;
    const double B = 1.92e6;
    for (double x : {0.0, 0.1, 0.5, 1.0 / (2.0 * (1.0 - beta)), 0.75, 1.3, 2.0, 4.9, 11.0}) {
        const double t = x / B;
        CHECK_THAT(rrc_w1(t, B, beta), WithinAbs(oracle::rrc_w1_spectral(t, B, beta), 1e-10));
    }
}

TEST_CASE("rrc_w1 envelope decays like 1/t^2")
{
    double env10 = 0.0;
    double env40 = 0.0;
    for (double x = 9.5; x < 10.5; x += 0.01)
        env10 = std::max(env10, std::abs(rrc_w1(x, 1.0, 0.5)));
    for (double x = 39.5; x < 40.5; x += 0.01)
        env40 = std::max(env40, std::abs(rrc_w1(x, 1.0, 0.5)));
    CHECK(env40 < env10);
    CHECK(env40 < env10 / 12.0);
}

TEST_CASE("rrc_W2 pieces")
{
    const double T = kSmall.T;
    const double beta = 0.5;
    CHECK_THAT(rrc_W2(0.0, T, beta), WithinAbs(1.0 / std::sqrt(T), 1e-12));
    CHECK(rrc_W2((1.0 + beta) * T / 2.0, T, beta) == 0.0);
    CHECK(rrc_W2(T, T, beta) == 0.0);
    const double t1 = (1.0 - beta) * T / 2.0;
    const double expect = std::sqrt((1.0 / (2.0 * T)) * (1.0 + std::cos(kPi / (beta * T) * (T / 2.0 - t1))));
    CHECK_THAT(rrc_W2(T / 2.0, T, beta), WithinRel(expect, 1e-12));
    CHECK_THAT(rrc_W2(T / 2.0, T, beta), WithinRel(1.0 / std::sqrt(2.0 * T), 1e-12));
    CHECK_THAT(rrc_W2(-0.3 * T, T, beta), WithinAbs(rrc_W2(0.3 * T, T, beta), 1e-15));
}

TEST_CASE("T W2^2 periodized over T is a partition of unity")
{
    const double T = kSmall.T;
    for (double t = -T / 2.0; t < T / 2.0; t += T / 97.0) {
        const double s = T * (std::pow(rrc_W2(t, T, 0.5), 2) + std::pow(rrc_W2(t + T, T, 0.5), 2)
                              + std::pow(rrc_W2(t - T, T, 0.5), 2));
        CHECK_THAT(s, WithinAbs(1.0, 1e-12));
    }
    CHECK_THAT(T * (std::pow(rect_W2(T / 2.0, T), 2) + std::pow(rect_W2(-T / 2.0, T), 2)), WithinAbs(1.0, 1e-12));
}

TEST_CASE("sinc family")
{
    CHECK(sinc_w1(0.0, 1e6) == 1.0);
    CHECK_THAT(sinc_w1(3.0 / 1e6, 1e6), WithinAbs(0.0, 1e-15));
    CHECK_THAT(sinc_w1(0.5 / 1e6, 1e6), WithinAbs(2.0 / kPi, 1e-15));
    CHECK(rect_W2(0.6, 1.0) == 0.0);
    CHECK_THAT(rect_W2(0.2, 1.0), WithinAbs(1.0, 1e-15));
}

TEST_CASE("tail energy guard")
{
    CHECK_THROWS_AS(PulseShaper(kSmall, PulseShape::rrc(0.5, 16.0), 4), std::invalid_argument);
    const PulseShaper rrc(kSmall, PulseShape::rrc(0.5), 4);
    CHECK(rrc.tail_energy() < 1e-6);
    PulseShape hard = PulseShape::rrc(0.5);
    hard.w1_taper = 0.0;
    CHECK(PulseShaper(kSmall, hard, 4).tail_energy() < rrc.tail_energy());
    hard.w1_taper = 1.0;
    CHECK_THROWS_AS(PulseShaper(kSmall, hard, 4), std::invalid_argument);
    const PulseShaper sinc(kSmall, PulseShape::sinc(), 4);
    CHECK(sinc.tail_energy() < 1e-4);
    CHECK_THROWS_AS(PulseShaper(kSmall, PulseShape::sinc(64.0), 4), std::invalid_argument);
    CHECK_THROWS_AS(PulseShaper(kSmall, PulseShape::rrc(0.5), 1), std::invalid_argument);
}

TEST_CASE("synthesize a single impulse")
{
    const PulseShaper sh(kSmall, PulseShape::sinc(), 4);
    DTSignal s{CVec(static_cast<std::size_t>(kSmall.size())), kSmall.B};
    s.samples[0] = 1.0;
    const AnalogSignal a = sh.synthesize(s);
    const double scale = std::sqrt(kSmall.T) * rect_W2(0.0, kSmall.T);
    for (std::int64_t n = -40; n <= 40; ++n)
        CHECK_THAT(a.at(n).real(), WithinAbs(scale * sinc_w1(a.time_of(n), kSmall.B), 1e-12));
}

TEST_CASE("synthesize is linear and has the expected energy")
{
    std::mt19937_64 rng(41);
    const PulseShaper sh(kSmall, PulseShape::rrc(0.5), 4);
    const DTSignal a = random_dt(kSmall, rng);
    const DTSignal b = random_dt(kSmall, rng);
    DTSignal c = a;
    for (std::size_t i = 0; i < c.samples.size(); ++i)
        c.samples[i] += b.samples[i];
    const AnalogSignal sa = sh.synthesize(a);
    const AnalogSignal sb = sh.synthesize(b);
    const AnalogSignal sc = sh.synthesize(c);
    double worst = 0.0;
    for (std::size_t i = 0; i < sc.samples.size(); ++i)
        worst = std::max(worst, std::abs(sc.samples[i] - sa.samples[i] - sb.samples[i]));
    CHECK(worst < 1e-12);

    // Energy: sum |s(n)|^2 = Q sum_q T W2(q/B)^2 |s[q mod MN]|^2 up to pulse overlap
    // between neighbours, which averages out for random data.
    double e_analog = 0.0;
    for (const cd& v : sa.samples)
        e_analog += std::norm(v);
    double e_dt = 0.0;
    for (const cd& v : a.samples)
        e_dt += std::norm(v);
    CHECK_THAT(e_analog / (sh.Q() * e_dt), WithinAbs(1.0, 0.05));
}

TEST_CASE("matched filter basics")
{
    std::mt19937_64 rng(42);
    const PulseShaper sh(kSmall, PulseShape::rrc(0.5), 4);
    AnalogSignal zero;
    zero.B = kSmall.B;
    zero.Q = 4;
    zero.start = -500;
    zero.samples.assign(1000, cd{});
    for (const cd& v : sh.matched_filter(zero).samples)
        CHECK(v == cd{});

    // The convolution stage commutes with shifts.
    AnalogSignal r = sh.synthesize(random_dt(kSmall, rng));
    AnalogSignal shifted = r;
    shifted.start += 3;
    const AnalogSignal y0 = sh.matched_filter(r);
    const AnalogSignal y1 = sh.matched_filter(shifted);
    const std::int64_t lim = sh.window_half_extent() * 4 / 2;
    for (std::int64_t n = -lim; n < lim; n += 7) {
        // y0(n) = c W2(n) z(n) and y1(n + 3) = c W2(n + 3) z(n).
        const cd lhs = y1.at(n + 3) * sh.W2(y0.time_of(n));
        const cd rhs = y0.at(n) * sh.W2(y0.time_of(n + 3));
        CHECK(std::abs(lhs - rhs) < 1e-9 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("noiseless loopback recovers the DT signal")
{
    std::mt19937_64 rng(43);
    for (auto [shape, tol] : {std::pair{PulseShape::rrc(0.5), 1e-4}, std::pair{PulseShape::sinc(), 2e-3}}) {
        const PulseShaper sh(kSmall, shape, 4);
        const DTSignal s = random_dt(kSmall, rng);
        const DTSignal back = sh.sample_and_periodize(sh.matched_filter(sh.synthesize(s)));
        CHECK(rel_err(back.samples, s.samples) < tol);
    }
}

TEST_CASE("longer sinc spans reduce the loopback error")
{
    std::mt19937_64 rng(44);
    const DTSignal s = random_dt(kSmall, rng);
    double prev = INFINITY;
    for (double span : {512.0, 2048.0, 8192.0}) {
        PulseShape shape = PulseShape::sinc(span);
        shape.max_tail_energy = 1e-3;
        const PulseShaper sh(kSmall, shape, 4);
        const double err = rel_err(sh.sample_and_periodize(sh.matched_filter(sh.synthesize(s))).samples, s.samples);
        CHECK(err < prev);
        prev = err;
    }
}

TEST_CASE("sampling peak sits at zero timing offset")
{
    const PulseShaper sh(kSmall, PulseShape::rrc(0.5), 4);
    DTSignal s{CVec(static_cast<std::size_t>(kSmall.size())), kSmall.B};
    s.samples[0] = 1.0;
    const AnalogSignal tx = sh.synthesize(s);
    double best = -1.0;
    double best_offset = 99.0;
    for (double off = -0.4; off <= 0.4 + 1e-9; off += 0.05) {
        const AnalogSignal r = fractional_delay(tx, off * sh.Q());
        const double v = std::abs(sh.matched_filter(r).at(0));
        if (v > best) {
            best = v;
            best_offset = off;
        }
    }
    CHECK_THAT(best_offset, WithinAbs(0.0, 1e-9));
}

TEST_CASE("sample_and_periodize folds and checks coverage")
{
    const PulseShaper sh(kSmall, PulseShape::rrc(0.5), 4);
    const std::int64_t MN = kSmall.size();
    AnalogSignal y;
    y.B = kSmall.B;
    y.Q = 4;
    y.start = -MN * 4;
    y.samples.assign(static_cast<std::size_t>(2 * MN * 4), cd{});
    // Impulses at q = -3 and q = MN - 3 land on the same folded sample.
    y.samples[static_cast<std::size_t>(-3 * 4 - y.start)] = 1.0;
    y.samples[static_cast<std::size_t>((MN - 3) * 4 - y.start)] = cd(0.0, 2.0);
    // Off-grid samples are ignored.
    y.samples[static_cast<std::size_t>(5 * 4 + 1 - y.start)] = 9.0;
    const DTSignal d = sh.sample_and_periodize(y);
    CHECK(d.samples[static_cast<std::size_t>(MN - 3)] == cd(1.0, 2.0));
    double rest = 0.0;
    for (std::int64_t q = 0; q < MN; ++q)
        if (q != MN - 3)
            rest += std::abs(d.samples[static_cast<std::size_t>(q)]);
    CHECK(rest == 0.0);

    AnalogSignal inside = y;
    inside.samples.assign(inside.samples.size(), cd{});
    inside.samples[static_cast<std::size_t>(7 * 4 - y.start)] = 2.5;
    CHECK(sh.sample_and_periodize(inside).samples[7] == cd(2.5));

    AnalogSignal short_sig;
    short_sig.B = kSmall.B;
    short_sig.Q = 4;
    short_sig.start = 0;
    short_sig.samples.assign(10, cd{});
    CHECK_THROWS_AS(sh.sample_and_periodize(short_sig), std::invalid_argument);
}

TEST_CASE("accumulate grows the span")
{
    AnalogSignal a{CVec{1.0, 1.0}, 1.0, 4, 5};
    const AnalogSignal b{CVec{2.0}, 1.0, 4, 2};
    accumulate(a, b);
    CHECK(a.start == 2);
    CHECK(a.size() == 5);
    CHECK(a.at(2) == cd(2.0));
    CHECK(a.at(5) == cd(1.0));
    CHECK(a.at(3) == cd{});
}
