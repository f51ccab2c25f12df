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

#include "zotfs/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace zotfs {

struct BerPoint {
    double snr_db = 0.0;
    double ber = 0.0;
    double ci95 = 0.0; // 1.96 * sqrt(ber (1 - ber) / bits)
    int trials = 0;
    std::uint64_t errors = 0;
    std::uint64_t bits = 0;
};

BerPoint make_ber_point(double snr_db, std::uint64_t errors, std::uint64_t bits, int trials);

struct BerCurve {
    std::string label;
    std::vector<BerPoint> points;
};

/// Header `snr_db,ber,ci95,trials,errors,bits`, one row per point.
std::string format_csv(const BerCurve& curve);

std::string render_ber_svg(std::span<const BerCurve> curves, const std::string& title);

std::string render_constellation_svg(std::span<const cd> symbols, std::span<const cd> reference,
                                     const std::string& title);

/// Writes the whole file or throws std::runtime_error naming the path.
void write_text_file(const std::filesystem::path& path, const std::string& text);

} // namespace zotfs
