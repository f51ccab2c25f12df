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
#include "zotfs/zak.hpp"

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

namespace zotfs {

// Layout (little endian): "ZOIQ" | u16 version | f64 sample rate | u64 count |
// 10 reserved zero bytes, then count interleaved f32 (I, Q) pairs.
inline constexpr std::size_t kIqHeaderSize = 32;
inline constexpr std::uint16_t kIqVersion = 1;

struct IqFormatError : std::runtime_error {
    enum class Kind { Io, BadMagic, BadVersion, Truncated, CountMismatch };
    IqFormatError(Kind kind, const std::string& message) : std::runtime_error(message), kind(kind) {}
    Kind kind;
};

struct IqData {
    double sample_rate = 0.0;
    CVec samples;
};

struct IqHeader {
    std::uint16_t version = kIqVersion;
    double sample_rate = 0.0;
    std::uint64_t count = 0;
};

void write_iq(const std::filesystem::path& path, std::span<const cd> samples, double sample_rate);
void write_iq(const std::filesystem::path& path, const AnalogSignal& signal);
void write_iq(const std::filesystem::path& path, const DTSignal& signal);

IqData read_iq(const std::filesystem::path& path);
IqHeader read_iq_header(const std::filesystem::path& path);

/// Parses a complete in-memory file image.
IqData parse_iq(std::span<const std::uint8_t> bytes);

} // namespace zotfs
