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

#include "zotfs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zotfs::oracle {

CVec naive_idzt(const DDGrid& grid)
{
    const int M = grid.M();
    const int N = grid.N();
    CVec s(static_cast<std::size_t>(M) * N);
    for (int k = 0; k < M; ++k) {
        for (int n = 0; n < N; ++n) {
            cd acc{};
            for (int l = 0; l < N; ++l)
                acc += grid(k, l) * std::polar(1.0, 2.0 * kPi * n * l / N);
            s[static_cast<std::size_t>(k + n * M)] = acc / std::sqrt(static_cast<double>(N));
        }
    }
    return s;
}

DDGrid naive_dzt(std::span<const cd> samples, int M, int N)
{
    if (samples.size() != static_cast<std::size_t>(M) * N)
        throw std::invalid_argument("naive_dzt: length must be M*N");
    DDGrid g(M, N, GridRole::Received);
    for (int k = 0; k < M; ++k) {
        for (int l = 0; l < N; ++l) {
            cd acc{};
            for (int n = 0; n < N; ++n)
                acc += samples[static_cast<std::size_t>(k + n * M)] * std::polar(1.0, -2.0 * kPi * n * l / N);
            g(k, l) = acc / std::sqrt(static_cast<double>(N));
        }
    }
    return g;
}

namespace {

cd quasi_periodic(const DDGrid& s, int k, int l)
{
    const int M = s.M();
    const int N = s.N();
    int n = 0;
    while (k < 0) {
        k += M;
        --n;
    }
    while (k >= M) {
        k -= M;
        ++n;
    }
    int lm = l % N;
    if (lm < 0)
        lm += N;
    return std::polar(1.0, 2.0 * kPi * n * l / N) * s(k, lm);
}

} // namespace

DDGrid brute_twisted_convolution(const DDGrid& s, std::span<const Tap> taps)
{
    const int M = s.M();
    const int N = s.N();
    const double MN = static_cast<double>(M) * N;
    DDGrid y(M, N, GridRole::Received);
    for (int k = 0; k < M; ++k)
        for (int l = 0; l < N; ++l)
            for (const Tap& t : taps)
                y(k, l) += t.h * quasi_periodic(s, k - t.k, l - t.l) * std::polar(1.0, 2.0 * kPi * (k - t.k) * t.l / MN);
    return y;
}

Eigen::MatrixXcd dense_io_matrix(int M, int N, std::span<const Tap> taps)
{
    const int n = M * N;
    Eigen::MatrixXcd H(n, n);
    DDGrid e(M, N);
    for (int j = 0; j < n; ++j) {
        e.values()[static_cast<std::size_t>(j)] = 1.0;
        const DDGrid col = brute_twisted_convolution(e, taps);
        for (int i = 0; i < n; ++i)
            H(i, j) = col.values()[static_cast<std::size_t>(i)];
        e.values()[static_cast<std::size_t>(j)] = 0.0;
    }
    return H;
}

Eigen::VectorXcd mmse_push_through(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y, double noise_var)
{
    Eigen::MatrixXcd G = H.adjoint() * H;
    G.diagonal().array() += noise_var;
    return G.partialPivLu().solve(H.adjoint() * y);
}

double rrc_w1_spectral(double t, double B, double beta)
{
    // w1(t) = (2/B) int_0^inf sqrt(RC(f)) cos(2 pi f t) df
    const long double f1 = (1.0L - beta) * B / 2.0L;
    const long double f2 = (1.0L + beta) * B / 2.0L;
    const long double pi = 3.141592653589793238462643383279502884L;
    long double flat;
    if (std::abs(t) * B < 1e-12)
        flat = f1;
    else
        flat = std::sin(2.0L * pi * f1 * t) / (2.0L * pi * t);
    // Composite Simpson on the cosine roll-off.
    const int n = 20000;
    const long double h = (f2 - f1) / n;
    long double acc = 0.0L;
    for (int i = 0; i <= n; ++i) {
        const long double f = f1 + h * i;
        const long double v = std::cos(pi * (f - f1) / (2.0L * beta * B)) * std::cos(2.0L * pi * f * t);
        const long double w = (i == 0 || i == n) ? 1.0L : (i % 2 ? 4.0L : 2.0L);
        acc += w * v;
    }
    const long double taper = acc * h / 3.0L;
    return static_cast<double>(2.0L / B * (flat + taper));
}

CorrelationPeak brute_correlation_peak(std::span<const cd> rx, std::span<const cd> ref, int segments)
{
    CorrelationPeak best;
    best.metric = -1.0;
    const std::size_t R = ref.size();
    const std::size_t G = std::min(static_cast<std::size_t>(segments), R);
    double eref = 0.0;
    for (const cd& v : ref)
        eref += std::norm(v);
    for (std::size_t m = 0; m + R <= rx.size(); ++m) {
        double sum = 0.0;
        double e = 0.0;
        for (std::size_t g = 0; g < G; ++g) {
            cd c{};
            for (std::size_t i = g * R / G; i < (g + 1) * R / G; ++i) {
                c += std::conj(ref[i]) * rx[m + i];
                e += std::norm(rx[m + i]);
            }
            sum += std::abs(c);
        }
        if (e <= 0.0)
            continue;
        const double metric = sum / std::sqrt(e * eref);
        if (metric > best.metric) {
            best.metric = metric;
            best.index = m;
        }
    }
    return best;
}

std::vector<double> periodic_autocorrelation(std::span<const cd> x)
{
    const std::size_t L = x.size();
    std::vector<double> r(L);
    for (std::size_t m = 0; m < L; ++m) {
        cd acc{};
        for (std::size_t n = 0; n < L; ++n)
            acc += x[(n + m) % L] * std::conj(x[n]);
        r[m] = std::abs(acc);
    }
    return r;
}

} // namespace zotfs::oracle
