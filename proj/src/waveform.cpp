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

#include "zotfs/waveform.hpp"

#include "zotfs/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace zotfs {

std::string_view to_string(PulseFamily family)
{
    return family == PulseFamily::Rrc ? "rrc" : "sinc";
}

PulseShape PulseShape::rrc(double beta, double span)
{
    PulseShape s;
    s.family = PulseFamily::Rrc;
    s.beta = beta;
    s.w1_span = span;
    s.max_tail_energy = 1e-6;
    return s;
}

PulseShape PulseShape::sinc(double span)
{
    PulseShape s;
    s.family = PulseFamily::Sinc;
    s.beta = 0.0;
    s.w1_span = span;
    s.w1_taper = 0.0;
    s.max_tail_energy = 1e-4;
    return s;
}

void PulseShape::validate() const
{
    if (family == PulseFamily::Rrc && !(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("pulse.beta: must lie in (0, 1] for the rrc family");
    if (!(w1_span > 0.0) || !std::isfinite(w1_span))
        throw std::invalid_argument("pulse.w1_span: must be positive");
    if (!(w1_taper >= 0.0 && w1_taper < 1.0))
        throw std::invalid_argument("pulse.w1_taper: must lie in [0, 1)");
    if (!(max_tail_energy > 0.0))
        throw std::invalid_argument("pulse.max_tail_energy: must be positive");
}

double rrc_w1(double t, double B, double beta)
{
    constexpr double guard = 1e-8;
    const double x = B * t;
    if (std::abs(x) < guard)
        return 1.0 + beta * (4.0 / kPi - 1.0);
    const double xs = 1.0 / (4.0 * beta);
    if (std::abs(std::abs(x) - xs) < guard) {
        const double a = kPi / (4.0 * beta);
        return beta / std::sqrt(2.0) * ((1.0 + 2.0 / kPi) * std::sin(a) + (1.0 - 2.0 / kPi) * std::cos(a));
    }
    const double num = std::sin(kPi * x * (1.0 - beta)) + 4.0 * beta * x * std::cos(kPi * x * (1.0 + beta));
    const double den = kPi * x * (1.0 - 16.0 * beta * beta * x * x);
    return num / den;
}

double rrc_W2(double t, double T, double beta)
{
    const double a = std::abs(t);
    const double t1 = (1.0 - beta) * T / 2.0;
    const double t2 = (1.0 + beta) * T / 2.0;
    if (a <= t1)
        return 1.0 / std::sqrt(T);
    if (a >= t2 * (1.0 - 1e-12))
        return 0.0;
    const double c = std::cos(kPi / (beta * T) * (a - t1));
    return std::sqrt(std::max(0.0, (1.0 + c) / (2.0 * T)));
}

double sinc_w1(double t, double B)
{
    const double x = B * t;
    if (std::abs(x) < 1e-12)
        return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}

double rect_W2(double t, double T)
{
    const double a = std::abs(t);
    const double edge = T / 2.0;
    if (std::abs(a - edge) <= 1e-12 * T)
        return 1.0 / std::sqrt(2.0 * T);
    return a < edge ? 1.0 / std::sqrt(T) : 0.0;
}

void accumulate(AnalogSignal& a, const AnalogSignal& b)
{
    if (b.samples.empty())
        return;
    if (a.samples.empty()) {
        a = b;
        return;
    }
    if (a.Q != b.Q || a.B != b.B)
        throw std::invalid_argument("accumulate: signals use different sample grids");
    const std::int64_t start = std::min(a.start, b.start);
    const std::int64_t end = std::max(a.end(), b.end());
    if (start != a.start || end != a.end()) {
        CVec grown(static_cast<std::size_t>(end - start), cd{});
        std::copy(a.samples.begin(), a.samples.end(), grown.begin() + (a.start - start));
        a.samples = std::move(grown);
        a.start = start;
    }
    for (std::size_t i = 0; i < b.samples.size(); ++i)
        a.samples[static_cast<std::size_t>(b.start - a.start) + i] += b.samples[i];
}

namespace {

// 1 up to 1 - taper, then a C-infinity step down to 0 at x = 1. A hard cut
// leaks energy toward the Nyquist edge of the QB grid, where the channel's
// fractional-delay interpolator is no longer exact.
double edge_taper(double x, double taper)
{
    if (taper <= 0.0)
        return x <= 1.0 ? 1.0 : 0.0;
    const double u = (x - (1.0 - taper)) / taper;
    if (u <= 0.0)
        return 1.0;
    if (u >= 1.0)
        return 0.0;
    return 1.0 / (1.0 + std::exp(1.0 / (1.0 - u) - 1.0 / u));
}

} // namespace

PulseShaper::PulseShaper(const FrameParams& params, const PulseShape& shape, int Q)
    : params_(params), shape_(shape), Q_(Q)
{
    params_.validate();
    shape_.validate();
    if (Q < 2)
        throw std::invalid_argument("pulse.Q: oversampling factor must be >= 2");

    half_taps_ = static_cast<std::int64_t>(std::ceil(shape_.w1_span * Q - 1e-9));
    taps_.resize(static_cast<std::size_t>(2 * half_taps_ + 1));
    double sum_sq = 0.0;
    for (std::int64_t m = -half_taps_; m <= half_taps_; ++m) {
        const double x = static_cast<double>(std::abs(m)) / static_cast<double>(half_taps_);
        const double v = w1(static_cast<double>(m) / (Q * params_.B)) * edge_taper(x, shape_.w1_taper);
        taps_[static_cast<std::size_t>(m + half_taps_)] = v;
        sum_sq += v * v;
    }
    taps_c_.assign(taps_.begin(), taps_.end());

    // Both families have energy exactly 1/B; the sample sum approximates the
    // truncated integral times QB.
    tail_energy_ = std::max(0.0, 1.0 - sum_sq / Q);
    if (tail_energy_ > shape_.max_tail_energy) {
        std::ostringstream os;
        os << "pulse.w1_span: span " << shape_.w1_span << "/B leaves " << tail_energy_
           << " of the pulse energy in the truncated tails (limit " << shape_.max_tail_energy << ")";
        throw std::invalid_argument(os.str());
    }

    const double support = shape_.family == PulseFamily::Rrc ? (1.0 + shape_.beta) * params_.T / 2.0
                                                            : params_.T / 2.0;
    window_q_ = static_cast<std::int64_t>(std::floor(support * params_.B + 1e-9));
    while (window_q_ > 0 && W2(static_cast<double>(window_q_) / params_.B) == 0.0)
        --window_q_;
    window_n_ = static_cast<std::int64_t>(std::floor(support * Q * params_.B + 1e-9));
    while (window_n_ > 0 && W2(static_cast<double>(window_n_) / (Q * params_.B)) == 0.0)
        --window_n_;
}

double PulseShaper::w1(double t) const
{
    return shape_.family == PulseFamily::Rrc ? rrc_w1(t, params_.B, shape_.beta) : sinc_w1(t, params_.B);
}

double PulseShaper::W2(double t) const
{
    return shape_.family == PulseFamily::Rrc ? rrc_W2(t, params_.T, shape_.beta) : rect_W2(t, params_.T);
}

AnalogSignal PulseShaper::synthesize(const DTSignal& signal) const
{
    const std::int64_t MN = params_.size();
    if (static_cast<std::int64_t>(signal.samples.size()) != MN)
        throw std::invalid_argument("synthesize: DT signal must hold exactly M*N samples");

    const std::int64_t W = window_q_;
    CVec impulses(static_cast<std::size_t>(2 * W * Q_ + 1), cd{});
    const double sqrtT = std::sqrt(params_.T);
    for (std::int64_t q = -W; q <= W; ++q) {
        const double w = sqrtT * W2(static_cast<double>(q) / params_.B);
        impulses[static_cast<std::size_t>((q + W) * Q_)] = w * signal.samples[static_cast<std::size_t>(pos_mod(q, MN))];
    }

    AnalogSignal out;
    out.B = params_.B;
    out.Q = Q_;
    out.start = -W * Q_ - half_taps_;
    out.samples = dsp::convolve(impulses, taps_c_);
    return out;
}

AnalogSignal PulseShaper::shape_chips(std::span<const cd> chips, std::int64_t first_q) const
{
    AnalogSignal out;
    out.B = params_.B;
    out.Q = Q_;
    if (chips.empty())
        return out;
    CVec impulses(static_cast<std::size_t>((static_cast<std::int64_t>(chips.size()) - 1) * Q_ + 1), cd{});
    for (std::size_t c = 0; c < chips.size(); ++c)
        impulses[c * static_cast<std::size_t>(Q_)] = chips[c];
    out.start = first_q * Q_ - half_taps_;
    out.samples = dsp::convolve(impulses, taps_c_);
    return out;
}

AnalogSignal PulseShaper::matched_filter(const AnalogSignal& received) const
{
    if (received.Q != Q_ || received.B != params_.B)
        throw std::invalid_argument("matched_filter: signal sample grid differs from the pulse shaper's");
    const std::int64_t Wn = window_n_;
    const std::int64_t H = half_taps_;

    AnalogSignal out;
    out.B = params_.B;
    out.Q = Q_;
    out.start = -Wn;
    out.samples.assign(static_cast<std::size_t>(2 * Wn + 1), cd{});

    // Only inputs within [-Wn - H, Wn + H] reach the window.
    const std::int64_t in0 = std::max(received.start, -Wn - H);
    const std::int64_t in1 = std::min(received.end(), Wn + H + 1);
    if (in0 >= in1)
        return out;
    std::span<const cd> input(received.samples.data() + (in0 - received.start), static_cast<std::size_t>(in1 - in0));
    const CVec z = dsp::convolve(input, taps_c_);

    const double gain = std::sqrt(params_.T) / Q_;
    for (std::int64_t n = -Wn; n <= Wn; ++n) {
        const std::int64_t j = n - in0 + H;
        if (j < 0 || j >= static_cast<std::int64_t>(z.size()))
            continue;
        const double w = W2(static_cast<double>(n) / (Q_ * params_.B));
        out.samples[static_cast<std::size_t>(n + Wn)] = gain * w * z[static_cast<std::size_t>(j)];
    }
    return out;
}

DTSignal PulseShaper::sample_and_periodize(const AnalogSignal& filtered) const
{
    const std::int64_t MN = params_.size();
    const std::int64_t first = -(MN / 2) * Q_;
    const std::int64_t last = (MN - MN / 2 - 1) * Q_;
    if (filtered.Q != Q_ || filtered.start > first || filtered.end() <= last) {
        std::ostringstream os;
        os << "sample_and_periodize: coverage insufficient, need samples [" << first << ", " << last
           << "] but signal spans [" << filtered.start << ", " << filtered.end() - 1 << "]";
        throw std::invalid_argument(os.str());
    }
    DTSignal out;
    out.rate = params_.B;
    out.samples.assign(static_cast<std::size_t>(MN), cd{});
    const std::int64_t n0 = filtered.start + pos_mod(-filtered.start, Q_);
    for (std::int64_t n = n0; n < filtered.end(); n += Q_) {
        const std::int64_t q = n / Q_;
        out.samples[static_cast<std::size_t>(pos_mod(q, MN))] += filtered.samples[static_cast<std::size_t>(n - filtered.start)];
    }
    return out;
}

} // namespace zotfs
