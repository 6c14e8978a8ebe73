// Copyright 2026 The matbake Authors
// SPDX-License-Identifier: Apache-2.0

/// @file metrics.hpp
/// PSNR and SSIM, plus key=value / JSON report writers.

#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "matbake/error.hpp"
#include "matbake/geometry.hpp"
#include "matbake/image.hpp"

namespace matbake {

struct MseResult {
    double mse = 0.0;
    std::size_t pixel_count = 0;
};

/// Mean squared error over masked pixels and all channels. An empty @p mask
/// image means every pixel.
inline MseResult masked_mse(const ImageF& a, const ImageF& b, const Mask& mask = {}) {
    if (!a.same_shape(b)) throw Error("metrics: image dimensions differ");
    const bool use_mask = mask.pixel_count() > 0;
    if (use_mask && (mask.width() != a.width() || mask.height() != a.height()))
        throw Error("metrics: mask dimensions differ from the images");
    MseResult r;
    double acc = 0.0;
    for (int y = 0; y < a.height(); ++y)
        for (int x = 0; x < a.width(); ++x) {
            if (use_mask && !mask(x, y)) continue;
            ++r.pixel_count;
            for (int c = 0; c < a.channels(); ++c) {
                const double d = static_cast<double>(a(x, y, c)) - b(x, y, c);
                acc += d * d;
            }
        }
    if (r.pixel_count == 0) throw Error("metrics: mask selects no pixels");
    r.mse = acc / (static_cast<double>(r.pixel_count) * a.channels());
    return r;
}

inline double psnr_from_mse(double mse, double max_value) {
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(max_value * max_value / mse);
}

/// PSNR in dB; +infinity when the masked pixels are identical.
inline double psnr(const ImageF& a, const ImageF& b, const Mask& mask = {}, double max_value = 1.0) {
    if (!(max_value > 0.0)) throw Error("psnr: max_value must be > 0");
    return psnr_from_mse(masked_mse(a, b, mask).mse, max_value);
}

struct SsimOptions {
    int window = 8;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

/// Mean SSIM over all window x window placements (stride 1) using uniform
/// weights and population statistics; multi-channel images average the
/// per-channel scores.
inline double ssim(const ImageF& a, const ImageF& b, const SsimOptions& opt = {}) {
    if (!a.same_shape(b)) throw Error("ssim: image dimensions differ");
    const int win = opt.window;
    if (win < 1) throw Error("ssim: window must be >= 1");
    if (a.width() < win || a.height() < win) throw Error("ssim: image smaller than the window");
    const int w = a.width(), h = a.height();
    const double c1 = (opt.k1 * opt.dynamic_range) * (opt.k1 * opt.dynamic_range);
    const double c2 = (opt.k2 * opt.dynamic_range) * (opt.k2 * opt.dynamic_range);
    const double n = static_cast<double>(win) * win;
    const std::size_t stride = static_cast<std::size_t>(w) + 1;
    double total = 0.0;
    for (int c = 0; c < a.channels(); ++c) {
        // Summed-area tables of a, b, a^2, b^2, ab.
        std::vector<double> sa((stride) * (h + 1)), sb(sa.size()), saa(sa.size()), sbb(sa.size()), sab(sa.size());
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double va = a(x, y, c), vb = b(x, y, c);
                const std::size_t i = (y + 1) * stride + (x + 1);
                const std::size_t up = y * stride + (x + 1), left = (y + 1) * stride + x, diag = y * stride + x;
                sa[i] = va + sa[up] + sa[left] - sa[diag];
                sb[i] = vb + sb[up] + sb[left] - sb[diag];
                saa[i] = va * va + saa[up] + saa[left] - saa[diag];
                sbb[i] = vb * vb + sbb[up] + sbb[left] - sbb[diag];
                sab[i] = va * vb + sab[up] + sab[left] - sab[diag];
            }
        const auto box = [&](const std::vector<double>& s, int x0, int y0) {
            const std::size_t x1 = static_cast<std::size_t>(x0 + win), y1 = static_cast<std::size_t>(y0 + win);
            return s[y1 * stride + x1] - s[static_cast<std::size_t>(y0) * stride + x1] -
                   s[y1 * stride + static_cast<std::size_t>(x0)] +
                   s[static_cast<std::size_t>(y0) * stride + static_cast<std::size_t>(x0)];
        };
        double acc = 0.0;
        for (int y = 0; y + win <= h; ++y)
            for (int x = 0; x + win <= w; ++x) {
                const double ma = box(sa, x, y) / n, mb = box(sb, x, y) / n;
                const double va = box(saa, x, y) / n - ma * ma;
                const double vb = box(sbb, x, y) / n - mb * mb;
                const double cov = box(sab, x, y) / n - ma * mb;
                acc += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            }
        total += acc / (static_cast<double>(w - win + 1) * (h - win + 1));
    }
    return total / a.channels();
}

struct MetricReport {
    std::string name;
    double psnr = 0.0;
    double ssim = 0.0;
    double mse = 0.0;
    double max_value = 1.0;
    std::size_t pixel_count = 0;
    std::string mask = "all";
};

/// Fills PSNR/MSE over the mask and SSIM over the full frame.
inline MetricReport evaluate(std::string name, const ImageF& a, const ImageF& b, const Mask& mask = {},
                             std::string mask_description = "all", double max_value = 1.0) {
    MetricReport r;
    r.name = std::move(name);
    const MseResult m = masked_mse(a, b, mask);
    r.mse = m.mse;
    r.pixel_count = m.pixel_count;
    r.max_value = max_value;
    r.psnr = psnr_from_mse(m.mse, max_value);
    r.ssim = (a.width() >= 8 && a.height() >= 8) ? ssim(a, b) : std::numeric_limits<double>::quiet_NaN();
    r.mask = std::move(mask_description);
    return r;
}

namespace detail {

inline std::string metric_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    return format_double(v);
}

/// JSON has no infinity; non-finite values are written as strings.
inline nlohmann::json metric_json(double v) {
    if (std::isfinite(v)) return v;
    return metric_number(v);
}

}  // namespace detail

inline std::string format_report_text(const std::vector<MetricReport>& reports) {
    std::ostringstream os;
    for (const auto& r : reports) {
        const std::string p = r.name.empty() ? "" : r.name + ".";
        os << p << "psnr=" << detail::metric_number(r.psnr) << '\n'
           << p << "ssim=" << detail::metric_number(r.ssim) << '\n'
           << p << "mse=" << detail::metric_number(r.mse) << '\n'
           << p << "max_value=" << detail::metric_number(r.max_value) << '\n'
           << p << "pixel_count=" << r.pixel_count << '\n'
           << p << "mask=" << r.mask << '\n';
    }
    return os.str();
}

inline nlohmann::json report_json(const std::vector<MetricReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : reports)
        arr.push_back({{"name", r.name},
                       {"psnr", detail::metric_json(r.psnr)},
                       {"ssim", detail::metric_json(r.ssim)},
                       {"mse", detail::metric_json(r.mse)},
                       {"max_value", detail::metric_json(r.max_value)},
                       {"pixel_count", r.pixel_count},
                       {"mask", r.mask}});
    return {{"format", "matbake-metrics"}, {"version", 1}, {"metrics", arr}};
}

inline void write_report(const std::string& stem, const std::vector<MetricReport>& reports) {
    std::ofstream txt(stem + ".txt", std::ios::binary);
    std::ofstream js(stem + ".json", std::ios::binary);
    if (!txt || !js) throw IoError(stem + ": cannot write report");
    txt << format_report_text(reports);
    js << report_json(reports).dump(2) << '\n';
    if (!txt || !js) throw IoError(stem + ": write failed");
}

}  // namespace matbake
