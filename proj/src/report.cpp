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

#include "zotfs/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace zotfs {

namespace {

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string snr_text(double snr)
{
    if (std::isinf(snr))
        return snr > 0 ? "inf" : "-inf";
    return fmt("%g", snr);
}

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

} // namespace

BerPoint make_ber_point(double snr_db, std::uint64_t errors, std::uint64_t bits, int trials)
{
    if (errors > bits)
        throw std::invalid_argument("ber: more errors than bits");
    BerPoint p;
    p.snr_db = snr_db;
    p.errors = errors;
    p.bits = bits;
    p.trials = trials;
    if (bits > 0) {
        p.ber = static_cast<double>(errors) / static_cast<double>(bits);
        p.ci95 = 1.96 * std::sqrt(p.ber * (1.0 - p.ber) / static_cast<double>(bits));
    }
    return p;
}

std::string format_csv(const BerCurve& curve)
{
    std::string out = "snr_db,ber,ci95,trials,errors,bits\n";
    for (const auto& p : curve.points) {
        out += snr_text(p.snr_db) + "," + fmt("%.6e", p.ber) + "," + fmt("%.6e", p.ci95) + ","
            + std::to_string(p.trials) + "," + std::to_string(p.errors) + "," + std::to_string(p.bits) + "\n";
    }
    return out;
}

std::string render_ber_svg(std::span<const BerCurve> curves, const std::string& title)
{
    const double W = 640, H = 440, left = 70, right = 20, top = 40, bottom = 60;
    const double pw = W - left - right, ph = H - top - bottom;

    double xmin = INFINITY, xmax = -INFINITY, ymin_ber = 1.0;
    for (const auto& c : curves) {
        for (const auto& p : c.points) {
            if (!std::isfinite(p.snr_db))
                continue;
            xmin = std::min(xmin, p.snr_db);
            xmax = std::max(xmax, p.snr_db);
            if (p.ber > 0.0)
                ymin_ber = std::min(ymin_ber, std::max(p.ber - p.ci95, p.ber / 10.0));
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = 0;
        xmax = 1;
    }
    if (xmax - xmin < 1e-9) {
        xmin -= 1;
        xmax += 1;
    }
    const int dec_lo = std::max(-9, static_cast<int>(std::floor(std::log10(ymin_ber))) - (ymin_ber >= 1.0 ? 1 : 0));
    const double ylo = dec_lo, yhi = 0.0;

    auto X = [&](double x) { return left + (x - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double ber) {
        const double v = ber > 0.0 ? std::clamp(std::log10(ber), ylo, yhi) : ylo;
        return top + (yhi - v) / (yhi - ylo) * ph;
    };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"440\" viewBox=\"0 0 640 440\">\n";
    s += "<rect width=\"640\" height=\"440\" fill=\"white\"/>\n";
    s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" + escape(title) + "</text>\n";
    for (int d = dec_lo; d <= 0; ++d) {
        const double y = Y(std::pow(10.0, d));
        s += "<line x1=\"" + fmt("%.2f", left) + "\" y1=\"" + fmt("%.2f", y) + "\" x2=\"" + fmt("%.2f", left + pw)
            + "\" y2=\"" + fmt("%.2f", y) + "\" stroke=\"#dddddd\"/>\n";
        s += "<text x=\"" + fmt("%.2f", left - 6) + "\" y=\"" + fmt("%.2f", y + 4)
            + "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" + std::to_string(d) + "</text>\n";
    }
    for (const auto& c : curves) {
        for (const auto& p : c.points) {
            if (!std::isfinite(p.snr_db))
                continue;
            const double x = X(p.snr_db);
            s += "<text x=\"" + fmt("%.2f", x) + "\" y=\"" + fmt("%.2f", top + ph + 18)
                + "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + snr_text(p.snr_db) + "</text>\n";
        }
        break;
    }
    s += "<rect x=\"" + fmt("%.2f", left) + "\" y=\"" + fmt("%.2f", top) + "\" width=\"" + fmt("%.2f", pw)
        + "\" height=\"" + fmt("%.2f", ph) + "\" fill=\"none\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt("%.2f", left + pw / 2) + "\" y=\"" + fmt("%.2f", H - 18)
        + "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">SNR (dB)</text>\n";
    s += "<text x=\"18\" y=\"" + fmt("%.2f", top + ph / 2) + "\" transform=\"rotate(-90 18 " + fmt("%.2f", top + ph / 2)
        + ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">BER</text>\n";

    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        const auto& c = curves[ci];
        const std::string color = kPalette[ci % std::size(kPalette)];
        std::string pts;
        for (const auto& p : c.points) {
            if (!std::isfinite(p.snr_db))
                continue;
            pts += fmt("%.2f", X(p.snr_db)) + "," + fmt("%.2f", Y(p.ber)) + " ";
        }
        s += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
        for (const auto& p : c.points) {
            if (!std::isfinite(p.snr_db))
                continue;
            const double x = X(p.snr_db);
            if (p.ber > 0.0 && p.ci95 > 0.0) {
                s += "<line x1=\"" + fmt("%.2f", x) + "\" y1=\"" + fmt("%.2f", Y(p.ber + p.ci95)) + "\" x2=\""
                    + fmt("%.2f", x) + "\" y2=\"" + fmt("%.2f", Y(p.ber - p.ci95)) + "\" stroke=\"" + color + "\"/>\n";
            }
            s += "<circle cx=\"" + fmt("%.2f", x) + "\" cy=\"" + fmt("%.2f", Y(p.ber)) + "\" r=\"3.5\" fill=\""
                + (p.ber > 0.0 ? color : std::string("white")) + "\" stroke=\"" + color + "\"/>\n";
        }
        const double ly = top + 16 + 18.0 * static_cast<double>(ci);
        s += "<line x1=\"" + fmt("%.2f", left + pw - 150) + "\" y1=\"" + fmt("%.2f", ly) + "\" x2=\""
            + fmt("%.2f", left + pw - 125) + "\" y2=\"" + fmt("%.2f", ly) + "\" stroke=\"" + color
            + "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + fmt("%.2f", left + pw - 118) + "\" y=\"" + fmt("%.2f", ly + 4)
            + "\" font-family=\"sans-serif\" font-size=\"12\">" + escape(c.label) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

std::string render_constellation_svg(std::span<const cd> symbols, std::span<const cd> reference,
                                     const std::string& title)
{
    const double size = 440, margin = 40, plot = size - 2 * margin;
    double r = 0.0;
    for (const cd& p : reference)
        r = std::max(r, std::max(std::abs(p.real()), std::abs(p.imag())));
    r = r > 0.0 ? 1.5 * r : 1.5;
    auto X = [&](double v) { return margin + (std::clamp(v, -r, r) + r) / (2 * r) * plot; };
    auto Y = [&](double v) { return margin + (r - std::clamp(v, -r, r)) / (2 * r) * plot; };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"440\" height=\"440\" viewBox=\"0 0 440 440\">\n";
    s += "<rect width=\"440\" height=\"440\" fill=\"white\"/>\n";
    s += "<text x=\"220\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" + escape(title) + "</text>\n";
    s += "<rect x=\"40\" y=\"40\" width=\"360\" height=\"360\" fill=\"none\" stroke=\"black\"/>\n";
    s += "<line x1=\"220\" y1=\"40\" x2=\"220\" y2=\"400\" stroke=\"#cccccc\"/>\n";
    s += "<line x1=\"40\" y1=\"220\" x2=\"400\" y2=\"220\" stroke=\"#cccccc\"/>\n";
    for (const cd& z : symbols) {
        s += "<circle cx=\"" + fmt("%.2f", X(z.real())) + "\" cy=\"" + fmt("%.2f", Y(z.imag()))
            + "\" r=\"1.3\" fill=\"#1f77b4\" fill-opacity=\"0.5\"/>\n";
    }
    for (const cd& z : reference) {
        const double x = X(z.real()), y = Y(z.imag());
        s += "<path d=\"M" + fmt("%.2f", x - 4) + " " + fmt("%.2f", y - 4) + "L" + fmt("%.2f", x + 4) + " "
            + fmt("%.2f", y + 4) + "M" + fmt("%.2f", x - 4) + " " + fmt("%.2f", y + 4) + "L" + fmt("%.2f", x + 4) + " "
            + fmt("%.2f", y - 4) + "\" stroke=\"#d62728\" stroke-width=\"1.5\"/>\n";
    }
    s += "</svg>\n";
    return s;
}

void write_text_file(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec)
            throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out)
        throw std::runtime_error("write failed for " + path.string());
}

} // namespace zotfs
