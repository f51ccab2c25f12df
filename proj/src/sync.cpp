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

#include "zotfs/sync.hpp"

#include "zotfs/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace zotfs {

Preamble make_preamble(int length, int root)
{
    if (length < 1)
        throw std::invalid_argument("sync.preamble_length: must be positive");
    if (root < 1 || std::gcd(root, length) != 1)
        throw std::invalid_argument("sync.root: must be coprime to the preamble length");
    Preamble p;
    p.length = length;
    p.root = root;
    p.samples.resize(static_cast<std::size_t>(length));
    const std::int64_t L = length;
    for (std::int64_t n = 0; n < L; ++n) {
        // Reduce the exponent modulo 2L before converting to a phase.
        const std::int64_t e = L % 2 == 0 ? (root * n % (2 * L)) * n % (2 * L)
                                          : (root * n % (2 * L)) * (n + 1) % (2 * L);
        p.samples[static_cast<std::size_t>(n)] = expj(-kPi * static_cast<double>(e) / static_cast<double>(L));
    }
    return p;
}

SyncResult detect_timing(const AnalogSignal& rx, std::span<const cd> reference, double threshold, int segments)
{
    if (segments < 1)
        throw std::invalid_argument("detect_timing: segments must be positive");
    SyncResult res;
    const std::size_t R = reference.size();
    if (R == 0 || rx.size() < R)
        return res;
    const std::size_t G = std::min(static_cast<std::size_t>(segments), R);

    double ref_energy = 0.0;
    for (const cd& v : reference)
        ref_energy += std::norm(v);

    // Non-coherent sum of per-segment correlations. A carrier offset of one
    // ZC bin turns the sequence into a cyclic shift of itself, which a single
    // coherent correlation cannot tell from a timing offset.
    std::vector<double> metric(rx.size() - R + 1, 0.0);
    for (std::size_t g = 0; g < G; ++g) {
        const std::size_t a = g * R / G;
        const std::size_t b = (g + 1) * R / G;
        CVec h(b - a);
        for (std::size_t i = 0; i < b - a; ++i)
            h[i] = std::conj(reference[b - 1 - i]);
        const CVec c = dsp::convolve(rx.samples, h);
        for (std::size_t m = 0; m < metric.size(); ++m)
            metric[m] += std::abs(c[m + b - 1]);
    }

    std::vector<double> prefix(rx.size() + 1, 0.0);
    for (std::size_t i = 0; i < rx.size(); ++i)
        prefix[i + 1] = prefix[i] + std::norm(rx.samples[i]);

    // Windows holding only faint filter tails would divide FFT round-off by
    // a near-zero energy; they cannot contain the preamble anyway.
    const double min_energy = 1e-12 * prefix.back();
    double best = -1.0;
    std::size_t best_m = 0;
    for (std::size_t m = 0; m < metric.size(); ++m) {
        const double e = prefix[m + R] - prefix[m];
        if (e <= min_energy)
            continue;
        const double v = metric[m] / std::sqrt(e * ref_energy);
        if (v > best) {
            best = v;
            best_m = m;
        }
    }
    if (best < 0.0)
        return res;
    res.start_index = rx.start + static_cast<std::int64_t>(best_m);
    res.peak_metric = std::min(best, 1.0);
    res.detected = best >= threshold;
    return res;
}

SyncResult detect_timing(const AnalogSignal& rx, const Preamble& preamble, int Q, double threshold,
                         int segments)
{
    if (Q < 1)
        throw std::invalid_argument("detect_timing: Q must be positive");
    CVec ref(static_cast<std::size_t>((preamble.length - 1) * Q + 1), cd{});
    for (int n = 0; n < preamble.length; ++n)
        ref[static_cast<std::size_t>(n * Q)] = preamble.samples[static_cast<std::size_t>(n)];
    return detect_timing(rx, ref, threshold, segments);
}

CVec shaped_reference(const Preamble& preamble, const PulseShaper& shaper)
{
    const AnalogSignal shaped = shaper.shape_chips(preamble.samples, 0);
    const std::size_t n = static_cast<std::size_t>(preamble.length) * static_cast<std::size_t>(shaper.Q());
    CVec ref(n);
    for (std::size_t i = 0; i < n; ++i)
        ref[i] = shaped.at(static_cast<std::int64_t>(i));
    return ref;
}

double kay_cfo(std::span<const cd> x, double sample_rate)
{
    const std::size_t n_samples = x.size();
    if (n_samples < 2)
        throw std::invalid_argument("kay_cfo: need at least two samples");
    const double L = static_cast<double>(n_samples);
    double wsum = 0.0;
    double acc = 0.0;
    for (std::size_t n = 1; n < n_samples; ++n) {
        const double u = (static_cast<double>(n) - L / 2.0) / (L / 2.0);
        const double w = 1.5 * L / (L * L - 1.0) * (1.0 - u * u);
        wsum += w;
        acc += w * std::arg(x[n] * std::conj(x[n - 1]));
    }
    if (wsum <= 0.0) // L = 2: the single difference carries all the weight
        return sample_rate / (2.0 * kPi) * std::arg(x[1] * std::conj(x[0]));
    return sample_rate / (2.0 * kPi) * acc / wsum;
}

CVec despread_preamble(const AnalogSignal& rx, const Preamble& preamble, const PulseShaper& shaper,
                       std::int64_t start_index)
{
    const int Q = shaper.Q();
    const std::int64_t H = shaper.half_taps();
    const std::int64_t last = start_index + static_cast<std::int64_t>(preamble.length - 1) * Q;
    const std::int64_t in0 = std::max(rx.start, start_index - H);
    const std::int64_t in1 = std::min(rx.end(), last + H + 1);
    CVec tone(static_cast<std::size_t>(preamble.length), cd{});
    if (in0 >= in1)
        return tone;
    std::span<const cd> input(rx.samples.data() + (in0 - rx.start), static_cast<std::size_t>(in1 - in0));
    const auto taps = shaper.taps();
    const CVec h(taps.begin(), taps.end());
    const CVec z = dsp::convolve(input, h);
    for (int n = 0; n < preamble.length; ++n) {
        const std::int64_t j = start_index + static_cast<std::int64_t>(n) * Q - in0 + H;
        if (j >= 0 && j < static_cast<std::int64_t>(z.size()))
            tone[static_cast<std::size_t>(n)] = z[static_cast<std::size_t>(j)] * std::conj(preamble.samples[static_cast<std::size_t>(n)]);
    }
    return tone;
}

AnalogSignal correct(const AnalogSignal& rx, const SyncResult& sync)
{
    if (!rx.contains(sync.start_index))
        throw std::out_of_range("correct: start_index lies outside the received signal");
    AnalogSignal out;
    out.B = rx.B;
    out.Q = rx.Q;
    out.start = 0;
    const std::size_t off = static_cast<std::size_t>(sync.start_index - rx.start);
    out.samples.assign(rx.samples.begin() + static_cast<std::ptrdiff_t>(off), rx.samples.end());
    if (sync.cfo_hat != 0.0) {
        const double fs = rx.rate();
        for (std::size_t i = 0; i < out.samples.size(); ++i)
            out.samples[i] *= expj(-2.0 * kPi * sync.cfo_hat * static_cast<double>(i) / fs);
    }
    return out;
}

} // namespace zotfs
