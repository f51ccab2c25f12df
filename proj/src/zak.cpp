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

#include "zotfs/zak.hpp"

#include "zotfs/dsp.hpp"

#include <cmath>
#include <stdexcept>

namespace zotfs {

cd extend(const DDGrid& grid, std::int64_t k, std::int64_t l)
{
    const std::int64_t M = grid.M();
    const std::int64_t N = grid.N();
    const std::int64_t n = floor_div(k, M);
    const std::int64_t kb = k - n * M;
    const std::int64_t lb = pos_mod(l, N);
    const cd base = grid(static_cast<int>(kb), static_cast<int>(lb));
    if (n == 0)
        return base;
    // Only (n * lb) mod N matters for the phase.
    const std::int64_t turns = pos_mod(n * lb, N);
    return base * expj(2.0 * kPi * static_cast<double>(turns) / static_cast<double>(N));
}

DTSignal idzt(const DDGrid& grid, double rate)
{
    const int M = grid.M();
    const int N = grid.N();
    DTSignal out;
    out.rate = rate;
    out.samples.assign(static_cast<std::size_t>(M * N), cd{});
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    CVec row(static_cast<std::size_t>(N));
    for (int k = 0; k < M; ++k) {
        for (int l = 0; l < N; ++l)
            row[static_cast<std::size_t>(l)] = grid(k, l);
        dsp::fft_inplace(row, dsp::FftDirection::Backward);
        for (int n = 0; n < N; ++n)
            out.samples[static_cast<std::size_t>(k + n * M)] = row[static_cast<std::size_t>(n)] * scale;
    }
    return out;
}

DDGrid dzt(const DTSignal& signal, int M, int N, GridRole role)
{
    if (M <= 0 || N <= 0 || signal.samples.size() != static_cast<std::size_t>(M * N))
        throw std::invalid_argument("dzt: signal length must equal M*N");
    DDGrid grid(M, N, role);
    const double scale = 1.0 / std::sqrt(static_cast<double>(N));
    CVec row(static_cast<std::size_t>(N));
    for (int k = 0; k < M; ++k) {
        for (int n = 0; n < N; ++n)
            row[static_cast<std::size_t>(n)] = signal.samples[static_cast<std::size_t>(k + n * M)];
        dsp::fft_inplace(row, dsp::FftDirection::Forward);
        for (int l = 0; l < N; ++l)
            grid(k, l) = row[static_cast<std::size_t>(l)] * scale;
    }
    return grid;
}

} // namespace zotfs
