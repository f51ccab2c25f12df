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

// Slow, independent reference implementations. Used by the tests and by
// `zotfs selftest`; nothing in the library depends on them.

#include "zotfs/dd_frame.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace zotfs::oracle {

/// Direct double sum, s[k + nM] = N^{-1/2} sum_l x[k, l] exp(j 2 pi n l / N).
CVec naive_idzt(const DDGrid& grid);

/// Direct double sum, y[k, l] = N^{-1/2} sum_n y[k + nM] exp(-j 2 pi n l / N).
DDGrid naive_dzt(std::span<const cd> samples, int M, int N);

struct Tap {
    int k = 0;
    int l = 0;
    cd h{};
};

/// Twisted convolution written out term by term, with the quasi-periodic
/// extension evaluated from first principles.
DDGrid brute_twisted_convolution(const DDGrid& s, std::span<const Tap> taps);

/// MN x MN matrix of brute_twisted_convolution, one unit input at a time.
Eigen::MatrixXcd dense_io_matrix(int M, int N, std::span<const Tap> taps);

/// (H^H H + s I)^{-1} H^H y, the push-through form of the MMSE solution.
Eigen::VectorXcd mmse_push_through(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y, double noise_var);

/// RRC delay pulse from a numerical inverse Fourier transform of the
/// square-root raised-cosine spectrum (unit passband gain 1/B).
double rrc_w1_spectral(double t, double B, double beta);

struct CorrelationPeak {
    std::size_t index = 0;
    double metric = 0.0;
};

/// O(N L) normalized correlation search; magnitudes of `segments` contiguous
/// partial correlations are summed.
CorrelationPeak brute_correlation_peak(std::span<const cd> rx, std::span<const cd> ref, int segments = 1);

/// |R[m]| of the periodic autocorrelation, m = 0 .. L-1.
std::vector<double> periodic_autocorrelation(std::span<const cd> x);

} // namespace zotfs::oracle
