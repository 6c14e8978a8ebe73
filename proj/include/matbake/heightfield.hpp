// Copyright 2026 The matbake Authors
// SPDX-License-Identifier: Apache-2.0

/// @file heightfield.hpp
/// Height map <-> tangent-space normal map conversion and HRM channel packing.
///
/// Slopes use clamped central differences scaled by the map resolution, so a
/// height h(u, v) = u with amplitude a yields the normal normalize(-a, 0, 1).
/// Tangent +Y points towards increasing v, i.e. up in the image.

#pragma once

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

#include <fftw3.h>

#include "matbake/error.hpp"
#include "matbake/image.hpp"
#include "matbake/material.hpp"
#include "matbake/vec.hpp"

namespace matbake {

struct HeightMap {
    ImageF height;  // 1 channel, [0,1]
    /// World units spanned by one full height unit.
    double amplitude = 1.0;

    int width() const { return height.width(); }
    int rows() const { return height.height(); }
};

/// Unit tangent-space normals, stored decoded (z > 0).
struct TangentNormalMap {
    ImageF normal;  // 3 channels

    Vec3 at(int x, int y) const { return {normal(x, y, 0), normal(x, y, 1), normal(x, y, 2)}; }
};

inline float encode_normal_component(double n) { return static_cast<float>(n * 0.5 + 0.5); }
inline double decode_normal_component(double e) { return e * 2.0 - 1.0; }

/// [0,1]^3 encoding n * 0.5 + 0.5.
inline ImageF encode_normals(const TangentNormalMap& n) {
    ImageF out(n.normal.width(), n.normal.height(), 3);
    for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] = encode_normal_component(n.normal.data()[i]);
    return out;
}

/// Inverse of encode_normals; re-normalizes to absorb quantization.
inline TangentNormalMap decode_normals(const ImageF& encoded) {
    if (encoded.channels() != 3) throw Error("decode_normals: expected a 3-channel image");
    TangentNormalMap n{ImageF(encoded.width(), encoded.height(), 3)};
    for (int y = 0; y < encoded.height(); ++y)
        for (int x = 0; x < encoded.width(); ++x) {
            const Vec3 v = normalize({decode_normal_component(encoded(x, y, 0)), decode_normal_component(encoded(x, y, 1)),
                                      decode_normal_component(encoded(x, y, 2))});
            n.normal(x, y, 0) = static_cast<float>(v.x);
            n.normal(x, y, 1) = static_cast<float>(v.y);
            n.normal(x, y, 2) = static_cast<float>(v.z);
        }
    return n;
}

inline TangentNormalMap height_to_normal(const HeightMap& h) {
    const int w = h.width();
    const int rows = h.rows();
    if (w < 2 || rows < 2) throw Error("height_to_normal: resolution must be >= 2");
    if (!(h.amplitude > 0.0)) throw Error("height_to_normal: amplitude must be > 0");
    TangentNormalMap out{ImageF(w, rows, 3)};
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < w; ++x) {
            const double hxp = h.height(std::min(x + 1, w - 1), y);
            const double hxm = h.height(std::max(x - 1, 0), y);
            const double hyp = h.height(x, std::min(y + 1, rows - 1));
            const double hym = h.height(x, std::max(y - 1, 0));
            const double dhdu = 0.5 * (hxp - hxm) * w;
            const double dhdv = -0.5 * (hyp - hym) * rows;  // rows grow downwards, v upwards
            const Vec3 n = normalize({-h.amplitude * dhdu, -h.amplitude * dhdv, 1.0});
            out.normal(x, y, 0) = static_cast<float>(n.x);
            out.normal(x, y, 1) = static_cast<float>(n.y);
            out.normal(x, y, 2) = static_cast<float>(n.z);
        }
    return out;
}

struct HeightReconstruction {
    HeightMap height;
    /// RMS of (slope of the result - input slope), in world units per texel.
    double residual_rms = 0.0;
    /// residual_rms relative to the RMS input slope; 0 for an integrable field.
    double relative_residual = 0.0;
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// Executes one 2D real-to-real transform on a rows x cols row-major buffer.
inline std::vector<double> r2r_2d(const std::vector<double>& in, int rows, int cols, fftw_r2r_kind row_kind,
                                  fftw_r2r_kind col_kind) {
    std::vector<double> src(in);
    std::vector<double> dst(in.size());
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_r2r_2d(rows, cols, src.data(), dst.data(), row_kind, col_kind, FFTW_ESTIMATE);
    }
    if (!plan) throw Error("fftw: failed to create plan");
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return dst;
}

}  // namespace detail

/// Integrates normals into heights by least squares. The slope operator is the
/// clamped central difference used by height_to_normal, which diagonalizes in
/// a cosine basis (heights) and a sine basis (slopes); every mode is solved
/// independently. Heights carry a zero-mean gauge and are rescaled to [0,1],
/// with the recovered world-space extent stored as the amplitude.
inline HeightReconstruction normal_to_height(const TangentNormalMap& nmap) {
    const int w = nmap.normal.width();
    const int rows = nmap.normal.height();
    if (w < 2 || rows < 2) throw Error("normal_to_height: resolution must be >= 2");
    const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(rows);
    // Per-texel slopes of the world-space height H = amplitude * h.
    std::vector<double> gx(count), gy(count);
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < w; ++x) {
            const Vec3 n = nmap.at(x, y);
            if (!(n.z > 1e-3)) throw Error("normal_to_height: normal z component must exceed 1e-3");
            const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
            gx[i] = (-n.x / n.z) / w;
            gy[i] = (n.y / n.z) / rows;
        }

    // gx: cosine along rows (y), sine along columns (x). gy: the reverse.
    const auto cx = detail::r2r_2d(gx, rows, w, FFTW_REDFT10, FFTW_RODFT10);
    const auto cy = detail::r2r_2d(gy, rows, w, FFTW_RODFT10, FFTW_REDFT10);

    const auto norm_cos = [](int k, int n) { return k == 0 ? static_cast<double>(n) : 0.5 * n; };
    const auto norm_sin = [](int k, int n) { return k == n ? static_cast<double>(n) : 0.5 * n; };
    std::vector<double> coeff(count, 0.0);
    for (int ky = 0; ky < rows; ++ky)
        for (int kx = 0; kx < w; ++kx) {
            if (kx == 0 && ky == 0) continue;
            const double sx = std::sin(kPi * kx / w);
            const double sy = std::sin(kPi * ky / rows);
            double gxk = 0.0, gyk = 0.0;
            if (kx > 0)
                gxk = cx[static_cast<std::size_t>(ky) * static_cast<std::size_t>(w) + static_cast<std::size_t>(kx - 1)] /
                      (4.0 * norm_sin(kx, w) * norm_cos(ky, rows));
            if (ky > 0)
                gyk = cy[static_cast<std::size_t>(ky - 1) * static_cast<std::size_t>(w) + static_cast<std::size_t>(kx)] /
                      (4.0 * norm_cos(kx, w) * norm_sin(ky, rows));
            const double alpha = norm_sin(kx, w) * norm_cos(ky, rows);
            const double beta = norm_cos(kx, w) * norm_sin(ky, rows);
            const double den = alpha * sx * sx + beta * sy * sy;
            if (!(den > 0.0)) continue;
            const double c = -(alpha * sx * gxk + beta * sy * gyk) / den;
            const double scale = (kx > 0 ? 2.0 : 1.0) * (ky > 0 ? 2.0 : 1.0);
            coeff[static_cast<std::size_t>(ky) * static_cast<std::size_t>(w) + static_cast<std::size_t>(kx)] = c / scale;
        }
    const auto hw = detail::r2r_2d(coeff, rows, w, FFTW_REDFT01, FFTW_REDFT01);

    HeightReconstruction out;
    // Residual of the recovered slopes.
    double res2 = 0.0, g2 = 0.0;
    const auto at = [&](int x, int y) {
        return hw[static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)];
    };
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x);
            const double dx = 0.5 * (at(std::min(x + 1, w - 1), y) - at(std::max(x - 1, 0), y));
            const double dy = 0.5 * (at(x, std::min(y + 1, rows - 1)) - at(x, std::max(y - 1, 0)));
            res2 += (dx - gx[i]) * (dx - gx[i]) + (dy - gy[i]) * (dy - gy[i]);
            g2 += gx[i] * gx[i] + gy[i] * gy[i];
        }
    out.residual_rms = std::sqrt(res2 / static_cast<double>(count));
    out.relative_residual = g2 > 0.0 ? std::sqrt(res2 / g2) : 0.0;

    const auto [lo_it, hi_it] = std::minmax_element(hw.begin(), hw.end());
    const double lo = *lo_it;
    const double span = *hi_it - lo;
    out.height.height = ImageF(w, rows, 1);
    if (span > 1e-12) {
        out.height.amplitude = span;
        for (std::size_t i = 0; i < count; ++i) out.height.height.data()[i] = clamp01((hw[i] - lo) / span);
    } else {
        out.height.amplitude = 1.0;
        std::fill(out.height.height.data().begin(), out.height.height.data().end(), 0.5f);
    }
    return out;
}

/// Raw world-space heights (zero mean) before [0,1] rescaling.
inline std::vector<double> world_heights(const HeightMap& h) {
    std::vector<double> out(h.height.data().size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = h.height.data()[i] * h.amplitude;
    return out;
}

/// Packs height, roughness, metallicity (in that channel order) into one image.
inline ImageF pack_hrm(const ImageF& h, const ImageF& r, const ImageF& m) {
    if (!h.same_shape(r) || !h.same_shape(m) || h.channels() != 1)
        throw Error("pack_hrm: height, roughness and metallicity must be single-channel maps of equal size");
    ImageF out(h.width(), h.height(), 3);
    for (std::size_t i = 0; i < h.data().size(); ++i) {
        out.data()[3 * i + 0] = h.data()[i];
        out.data()[3 * i + 1] = r.data()[i];
        out.data()[3 * i + 2] = m.data()[i];
    }
    return out;
}

struct Hrm {
    ImageF height;
    ImageF roughness;
    ImageF metallic;
};

inline Hrm unpack_hrm(const ImageF& packed) {
    if (packed.channels() != 3) throw Error("unpack_hrm: expected a 3-channel image");
    Hrm out{ImageF(packed.width(), packed.height(), 1), ImageF(packed.width(), packed.height(), 1),
            ImageF(packed.width(), packed.height(), 1)};
    for (std::size_t i = 0; i < out.height.data().size(); ++i) {
        out.height.data()[i] = packed.data()[3 * i + 0];
        out.roughness.data()[i] = packed.data()[3 * i + 1];
        out.metallic.data()[i] = packed.data()[3 * i + 2];
    }
    return out;
}

}  // namespace matbake
