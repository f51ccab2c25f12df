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

#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace zotfs {

using cd = std::complex<double>;
using CVec = std::vector<cd>;
using Bits = std::vector<std::uint8_t>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cd kJ{0.0, 1.0};

// Floor division and non-negative modulus for signed indices.
inline std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

inline std::int64_t pos_mod(std::int64_t a, std::int64_t b)
{
    std::int64_t r = a % b;
    return r < 0 ? r + b : r;
}

inline cd expj(double phase) { return {std::cos(phase), std::sin(phase)}; }

} // namespace zotfs
