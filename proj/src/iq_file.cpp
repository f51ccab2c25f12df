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

#include "zotfs/iq_file.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

namespace zotfs {

static_assert(std::endian::native == std::endian::little, "IQ files are written on little-endian hosts only");

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, std::size_t offset, T value)
{
    std::memcpy(out.data() + offset, &value, sizeof(T));
}

template <typename T>
T get(std::span<const std::uint8_t> in, std::size_t offset)
{
    T value;
    std::memcpy(&value, in.data() + offset, sizeof(T));
    return value;
}

IqHeader parse_header(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kIqHeaderSize) {
        std::ostringstream os;
        os << "iq: truncated header, " << bytes.size() << " of " << kIqHeaderSize << " bytes present ("
           << kIqHeaderSize - bytes.size() << " missing)";
        throw IqFormatError(IqFormatError::Kind::Truncated, os.str());
    }
    if (std::memcmp(bytes.data(), "ZOIQ", 4) != 0)
        throw IqFormatError(IqFormatError::Kind::BadMagic, "iq: bad magic (expected \"ZOIQ\")");
    IqHeader h;
    h.version = get<std::uint16_t>(bytes, 4);
    if (h.version != kIqVersion)
        throw IqFormatError(IqFormatError::Kind::BadVersion,
                            "iq: unsupported version " + std::to_string(h.version));
    h.sample_rate = get<double>(bytes, 6);
    h.count = get<std::uint64_t>(bytes, 14);
    return h;
}

std::vector<std::uint8_t> slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IqFormatError(IqFormatError::Kind::Io, "iq: cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace

void write_iq(const std::filesystem::path& path, std::span<const cd> samples, double sample_rate)
{
    std::vector<std::uint8_t> bytes(kIqHeaderSize + samples.size() * 8, 0);
    std::memcpy(bytes.data(), "ZOIQ", 4);
    put<std::uint16_t>(bytes, 4, kIqVersion);
    put<double>(bytes, 6, sample_rate);
    put<std::uint64_t>(bytes, 14, samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        put<float>(bytes, kIqHeaderSize + 8 * i, static_cast<float>(samples[i].real()));
        put<float>(bytes, kIqHeaderSize + 8 * i + 4, static_cast<float>(samples[i].imag()));
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IqFormatError(IqFormatError::Kind::Io, "iq: cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw IqFormatError(IqFormatError::Kind::Io, "iq: write failed for " + path.string());
}

void write_iq(const std::filesystem::path& path, const AnalogSignal& signal)
{
    write_iq(path, signal.samples, signal.rate());
}

void write_iq(const std::filesystem::path& path, const DTSignal& signal)
{
    write_iq(path, signal.samples, signal.rate);
}

IqData parse_iq(std::span<const std::uint8_t> bytes)
{
    const IqHeader h = parse_header(bytes);
    const std::uint64_t body = bytes.size() - kIqHeaderSize;
    const std::uint64_t expected = h.count * 8;
    if (body < expected) {
        std::ostringstream os;
        os << "iq: truncated body, header declares " << h.count << " samples (" << expected << " bytes) but only "
           << body << " bytes follow (" << expected - body << " missing)";
        throw IqFormatError(IqFormatError::Kind::Truncated, os.str());
    }
    if (body != expected) {
        std::ostringstream os;
        os << "iq: sample count mismatch, header declares " << h.count << " samples but the body holds " << body
           << " bytes";
        throw IqFormatError(IqFormatError::Kind::CountMismatch, os.str());
    }
    IqData data;
    data.sample_rate = h.sample_rate;
    data.samples.resize(static_cast<std::size_t>(h.count));
    for (std::size_t i = 0; i < data.samples.size(); ++i)
        data.samples[i] = {get<float>(bytes, kIqHeaderSize + 8 * i), get<float>(bytes, kIqHeaderSize + 8 * i + 4)};
    return data;
}

IqData read_iq(const std::filesystem::path& path)
{
    const auto bytes = slurp(path);
    return parse_iq(bytes);
}

IqHeader read_iq_header(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IqFormatError(IqFormatError::Kind::Io, "iq: cannot open " + path.string());
    std::vector<std::uint8_t> head(kIqHeaderSize);
    in.read(reinterpret_cast<char*>(head.data()), static_cast<std::streamsize>(head.size()));
    head.resize(static_cast<std::size_t>(in.gcount()));
    return parse_header(head);
}

} // namespace zotfs
