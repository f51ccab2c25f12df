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

#pragma once

#include "zotfs/waveform.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace zotfs {

using Rng = std::mt19937_64;

/// Mixes (base, index, stream) into an independent 64-bit seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, std::uint64_t stream = 0);

struct PathSpec {
    cd gain{1.0, 0.0};
    double delay = 0.0;   // seconds
    double doppler = 0.0; // Hz
};

struct ImpairmentSpec {
    double dt = 0.0;   // timing offset, seconds
    double eps0 = 0.0; // carrier frequency offset, Hz
    double phi = 0.0;  // constant phase, radians in [-pi, pi)

    void validate() const;
};

struct ChannelSpec {
    std::vector<PathSpec> paths;
    ImpairmentSpec impairments;
    double noise_psd = 0.0; // complex noise variance per sample at rate QB
    double tau_max = 0.0;
    double nu_max = 0.0;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

/// Delay by an arbitrary (possibly fractional) number of samples at the
/// signal's rate. Integer delays are exact shifts; otherwise a 64-tap
/// Kaiser-windowed sinc interpolator is used.
AnalogSignal fractional_delay(const AnalogSignal& s, double delay_samples);

inline constexpr int kFractionalDelayTaps = 64;

/// r(t) = sum_i h_i s(t - tau_i) exp(j 2 pi nu_i (t - tau_i)), t absolute.
AnalogSignal apply_paths(const AnalogSignal& s, std::span<const PathSpec> paths);

/// r(t - dt) exp(j(2 pi eps0 t + phi)) plus complex Gaussian noise of
/// variance noise_psd per sample.
AnalogSignal apply_impairments(const AnalogSignal& r, const ImpairmentSpec& imp, double noise_psd, Rng& rng);

void add_noise(AnalogSignal& r, double noise_psd, Rng& rng);

/// Equivalent impairment-free path list.
std::vector<PathSpec> fold_impairments(const ChannelSpec& spec);

} // namespace zotfs
