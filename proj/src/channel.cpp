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

#include "zotfs/dsp.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace zotfs {

namespace {

std::uint64_t splitmix64(std::uint64_t& state)
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr double kKaiserBeta = 32.0;

// Taps h[k + 31], k in [-31, 32], so that y[n] = sum_k h x[n - m - k]
// approximates x(n - m - frac).
CVec interpolator(double frac)
{
    constexpr int half = kFractionalDelayTaps / 2;
    const double i0b = std::cyl_bessel_i(0.0, kKaiserBeta);
    CVec h(kFractionalDelayTaps);
    for (int k = -(half - 1); k <= half; ++k) {
        const double x = k - frac;
        const double r = x / half;
        const double win = std::abs(r) >= 1.0 ? 0.0 : std::cyl_bessel_i(0.0, kKaiserBeta * std::sqrt(1.0 - r * r)) / i0b;
        const double s = std::abs(x) < 1e-15 ? 1.0 : std::sin(kPi * x) / (kPi * x);
        h[static_cast<std::size_t>(k + half - 1)] = s * win;
    }
    return h;
}

} // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, std::uint64_t stream)
{
    std::uint64_t s = base;
    std::uint64_t a = splitmix64(s);
    s = a ^ index;
    std::uint64_t b = splitmix64(s);
    s = b ^ (stream * 0xD1B54A32D192ED03ULL);
    return splitmix64(s);
}

void ImpairmentSpec::validate() const
{
    if (!std::isfinite(dt) || !std::isfinite(eps0) || !std::isfinite(phi))
        throw std::invalid_argument("channel.impairments: values must be finite");
    if (phi < -kPi || phi >= kPi)
        throw std::invalid_argument("channel.impairments.phi: must lie in [-pi, pi)");
}

void ChannelSpec::validate() const
{
    if (paths.empty())
        throw std::invalid_argument("channel.paths: at least one path is required");
    if (!(noise_psd >= 0.0))
        throw std::invalid_argument("channel.noise_psd: must be >= 0");
    for (std::size_t i = 0; i < paths.size(); ++i) {
        const auto& p = paths[i];
        std::ostringstream where;
        where << "channel.paths[" << i << "]";
        if (!std::isfinite(p.gain.real()) || !std::isfinite(p.gain.imag()))
            throw std::invalid_argument(where.str() + ".gain: must be finite");
        if (!(p.delay >= 0.0) || p.delay > tau_max * (1.0 + 1e-12))
            throw std::invalid_argument(where.str() + ".delay: must lie in [0, tau_max]");
        if (!(std::abs(p.doppler) <= nu_max * (1.0 + 1e-12)))
            throw std::invalid_argument(where.str() + ".doppler: |doppler| must not exceed nu_max");
    }
    impairments.validate();
}

AnalogSignal fractional_delay(const AnalogSignal& s, double delay_samples)
{
    if (!std::isfinite(delay_samples))
        throw std::invalid_argument("fractional_delay: delay must be finite");
    if (std::abs(delay_samples) > 4.0 * static_cast<double>(s.size()) + 1e6)
        throw std::invalid_argument("apply_paths: delay exceeds signal extent");

    AnalogSignal out;
    out.B = s.B;
    out.Q = s.Q;
    const double rounded = std::round(delay_samples);
    if (std::abs(delay_samples - rounded) < 1e-9) {
        out.samples = s.samples;
        out.start = s.start + static_cast<std::int64_t>(rounded);
        return out;
    }
    const double m = std::floor(delay_samples);
    const CVec h = interpolator(delay_samples - m);
    out.samples = dsp::convolve(s.samples, h);
    out.start = s.start + static_cast<std::int64_t>(m) - (kFractionalDelayTaps / 2 - 1);
    return out;
}

AnalogSignal apply_paths(const AnalogSignal& s, std::span<const PathSpec> paths)
{
    AnalogSignal out;
    out.B = s.B;
    out.Q = s.Q;
    out.start = s.start;
    const double fs = s.rate();
    for (const auto& p : paths) {
        AnalogSignal d = fractional_delay(s, p.delay * fs);
        for (std::size_t i = 0; i < d.samples.size(); ++i) {
            const double t = d.time_of(d.start + static_cast<std::int64_t>(i));
            d.samples[i] *= p.gain * expj(2.0 * kPi * p.doppler * (t - p.delay));
        }
        accumulate(out, d);
    }
    return out;
}

void add_noise(AnalogSignal& r, double noise_psd, Rng& rng)
{
    if (noise_psd <= 0.0)
        return;
    std::normal_distribution<double> g(0.0, std::sqrt(noise_psd / 2.0));
    for (auto& v : r.samples) {
        const double re = g(rng);
        const double im = g(rng);
        v += cd(re, im);
    }
}

AnalogSignal apply_impairments(const AnalogSignal& r, const ImpairmentSpec& imp, double noise_psd, Rng& rng)
{
    AnalogSignal out = imp.dt == 0.0 ? r : fractional_delay(r, imp.dt * r.rate());
    if (imp.eps0 != 0.0 || imp.phi != 0.0) {
        for (std::size_t i = 0; i < out.samples.size(); ++i) {
            const double t = out.time_of(out.start + static_cast<std::int64_t>(i));
            out.samples[i] *= expj(2.0 * kPi * imp.eps0 * t + imp.phi);
        }
    }
    add_noise(out, noise_psd, rng);
    return out;
}

std::vector<PathSpec> fold_impairments(const ChannelSpec& spec)
{
    const auto& imp = spec.impairments;
    std::vector<PathSpec> out;
    out.reserve(spec.paths.size());
    for (const auto& p : spec.paths) {
        PathSpec f;
        f.gain = p.gain * expj(2.0 * kPi * imp.eps0 * (p.delay + imp.dt) + imp.phi);
        f.delay = p.delay + imp.dt;
        f.doppler = p.doppler + imp.eps0;
        out.push_back(f);
    }
    return out;
}

} // namespace zotfs
