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

namespace zotfs {

/// One MN-sample period of a discrete-time signal, q = 0..MN-1.
struct DTSignal {
    CVec samples;
    double rate = 1.0; // samples per second (B)
};

/// Quasi-periodic extension of a base grid:
/// value(k + nM, l + mN) = e^{j2pi n l / N} base(k mod M, l mod N).
cd extend(const DDGrid& grid, std::int64_t k, std::int64_t l);

/// Inverse discrete Zak transform:
/// s[k + nM] = 1/sqrt(N) sum_l s_dd[k, l] e^{j2pi n l / N}.
DTSignal idzt(const DDGrid& grid, double rate);

/// Discrete Zak transform of one period of an MN-periodic sequence:
/// y_dd[k, l] = 1/sqrt(N) sum_n y[k + nM] e^{-j2pi n l / N}.
DDGrid dzt(const DTSignal& signal, int M, int N, GridRole role = GridRole::Received);

} // namespace zotfs
