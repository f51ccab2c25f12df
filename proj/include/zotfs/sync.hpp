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
#include <span>

namespace zotfs {

struct Preamble {
    int length = 256;
    int root = 25;
    CVec samples;
};

/// Zadoff-Chu sequence; exp(-j pi u n^2 / L) for even L, n(n+1) for odd L.
Preamble make_preamble(int length = 256, int root = 25);

struct SyncResult {
    std::int64_t start_index = 0; // absolute sample index at rate QB
    double cfo_hat = 0.0;         // Hz
    double peak_metric = 0.0;
    bool detected = false;
};

inline constexpr double kDefaultDetectionThreshold = 0.3;
inline constexpr int kDefaultSyncSegments = 8;

/// Normalized cross-correlation of rx against `reference` (reference[0] is
/// the preamble's first chip instant). The reference is cut into `segments`
/// contiguous pieces whose correlation magnitudes are summed; segments = 1 is
/// the plain coherent metric. start_index is the absolute index of the best
/// alignment; detected is false when the peak is below threshold.
SyncResult detect_timing(const AnalogSignal& rx, std::span<const cd> reference,
                         double threshold = kDefaultDetectionThreshold,
                         int segments = kDefaultSyncSegments);

/// Same, against the zero-stuffed Q-upsampled chips.
SyncResult detect_timing(const AnalogSignal& rx, const Preamble& preamble, int Q,
                         double threshold = kDefaultDetectionThreshold,
                         int segments = kDefaultSyncSegments);

/// w1-shaped preamble cropped to [0, L*Q) samples after the first chip.
CVec shaped_reference(const Preamble& preamble, const PulseShaper& shaper);

/// Kay's weighted phase-difference frequency estimate, in Hz.
double kay_cfo(std::span<const cd> x, double sample_rate);

/// Matched-filters the received preamble (w1 only), samples the chip instants
/// starting at start_index and strips the chip modulation. What is left is a
/// tone at the carrier offset, sampled at rate B.
CVec despread_preamble(const AnalogSignal& rx, const Preamble& preamble, const PulseShaper& shaper,
                       std::int64_t start_index);

/// Keeps samples from sync.start_index on (the result starts at index 0) and
/// removes the estimated offset, t measured from the retained first sample.
AnalogSignal correct(const AnalogSignal& rx, const SyncResult& sync);

} // namespace zotfs
