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

#include "zotfs/dd_frame.hpp"
#include "zotfs/zak.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace zotfs {

enum class PulseFamily { Rrc, Sinc };

std::string_view to_string(PulseFamily family);

/// Separable delay/Doppler filter pair: w1 acts along delay (a time-domain
/// pulse), W2 is the time window realizing the Doppler filter.
struct PulseShape {
    PulseFamily family = PulseFamily::Rrc;
    double beta = 0.5;              // roll-off; unused for Sinc
    double w1_span = 32.0;          // truncation half-width of w1, units of 1/B
    double w1_taper = 0.5;          // outer fraction of the span rolled off smoothly; 0 = hard cut
    double max_tail_energy = 1e-6;  // fraction of w1 energy lost to truncation and taper

    static PulseShape rrc(double beta, double span = 32.0);
    // A truncated sinc only loses ~1/(pi^2 span) of its energy, hence the long
    // default span and the looser tail bound. Its tail is cut hard: tapering
    // shortens the pulse and costs more loopback accuracy than it buys.
    static PulseShape sinc(double span = 2048.0);

    void validate() const;
};

/// Root-raised-cosine delay pulse, peak 1 + beta(4/pi - 1), energy 1/B.
double rrc_w1(double t, double B, double beta);

/// Root-raised-cosine time window of duration T (flat 1/sqrt(T) for |t| <= t1,
/// cosine taper to zero at t2 = (1+beta)T/2).
double rrc_W2(double t, double T, double beta);

double sinc_w1(double t, double B);

/// Rectangular 1/sqrt(T) window; 1/sqrt(2T) exactly at |t| = T/2 so that
/// T * W2^2 tiles the time axis under period-T shifts.
double rect_W2(double t, double T);

/// Oversampled emulation of a continuous-time signal. Sample i sits at
/// t = (start + i) / (Q B); t = 0 is the frame centre.
struct AnalogSignal {
    CVec samples;
    double B = 1.0;
    int Q = 4;
    std::int64_t start = 0;

    double rate() const { return Q * B; }
    double t0() const { return static_cast<double>(start) / rate(); }
    double time_of(std::int64_t index) const { return static_cast<double>(index) / rate(); }
    std::int64_t end() const { return start + static_cast<std::int64_t>(samples.size()); }
    std::size_t size() const { return samples.size(); }
    bool contains(std::int64_t index) const { return index >= start && index < end(); }
    cd at(std::int64_t index) const { return contains(index) ? samples[static_cast<std::size_t>(index - start)] : cd{}; }
};

/// Adds b into a, growing a's support as needed. Both must share B and Q.
void accumulate(AnalogSignal& a, const AnalogSignal& b);

/// Pulse shaping and matched filtering for one frame geometry.
///
/// The transmitter realizes s(t) = sqrt(T) w1(t) * [W2(t) sum_q s[q] delta(t - q/B)]
/// at rate QB. The receiver computes y(t) = sqrt(T) W2*(t) B [w1*(-t) * r](t);
/// the extra factor BT over the textbook matched filter makes the noiseless
/// identity-channel loopback unit gain in the DD domain.
class PulseShaper {
public:
    PulseShaper(const FrameParams& params, const PulseShape& shape, int Q = 4);

    const FrameParams& params() const { return params_; }
    const PulseShape& shape() const { return shape_; }
    int Q() const { return Q_; }

    double w1(double t) const;
    double W2(double t) const;

    /// w1 sampled at rate QB over [-span, span]; index 0 is t = -span.
    std::span<const double> taps() const { return taps_; }
    std::int64_t half_taps() const { return half_taps_; }

    /// Fraction of w1 energy lost to truncation and taper.
    double tail_energy() const { return tail_energy_; }

    /// Largest |q| with W2(q/B) != 0.
    std::int64_t window_half_extent() const { return window_q_; }

    AnalogSignal synthesize(const DTSignal& signal) const;

    /// Shapes unit-weight chips placed at q = first_q, first_q + 1, ... with w1
    /// only (no W2 window). Used for the synchronization preamble.
    AnalogSignal shape_chips(std::span<const cd> chips, std::int64_t first_q) const;

    AnalogSignal matched_filter(const AnalogSignal& received) const;

    /// Samples at t = q/B (every Q-th sample on the absolute grid) and folds
    /// onto one MN period.
    DTSignal sample_and_periodize(const AnalogSignal& filtered) const;

private:
    FrameParams params_;
    PulseShape shape_;
    int Q_;
    std::int64_t half_taps_;
    std::vector<double> taps_;
    CVec taps_c_;
    double tail_energy_;
    std::int64_t window_q_;
    std::int64_t window_n_;
};

} // namespace zotfs
