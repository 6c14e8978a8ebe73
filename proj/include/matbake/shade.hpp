// Copyright 2026 The matbake Authors
// SPDX-License-Identifier: Apache-2.0

/// @file shade.hpp
/// Image-based relighting of material views: split-sum shading against a
/// prefiltered latitude-longitude probe, and a Monte Carlo reference that
/// integrates the same BRDF against the raw probe.
///
/// BRDF: Lambertian diffuse (1 - metallic) * base / pi plus Cook-Torrance
/// specular D * G * F / (4 n.l n.v) with GGX D (alpha = roughness^2),
/// Smith-Schlick G (k = alpha / 2) and Schlick F, F0 = mix(0.04, base, metallic).
///
/// Lat-long layout: u = 0.5 + atan2(d.x, -d.z) / 2pi, v = acos(d.y) / pi, with
/// row 0 at +Y (zenith).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "matbake/error.hpp"
#include "matbake/geometry.hpp"
#include "matbake/image.hpp"
#include "matbake/io.hpp"
#include "matbake/parallel.hpp"
#include "matbake/raster.hpp"
#include "matbake/vec.hpp"

namespace matbake {

struct EnvironmentProbe {
    ImageF radiance;  // 3 channels, width = 2 * height

    void validate() const {
        if (radiance.channels() != 3) throw Error("probe: expected 3 channels");
        if (radiance.height() < 1 || radiance.width() != 2 * radiance.height())
            throw Error("probe: lat-long image must be twice as wide as high");
        for (float v : radiance.data())
            if (!(v >= 0.0f) || !std::isfinite(v)) throw Error("probe: radiance must be finite and non-negative");
    }
};

inline EnvironmentProbe load_probe(const std::string& path) {
    EnvironmentProbe p{read_hdr(path)};
    try {
        p.validate();
    } catch (const Error& e) {
        throw IoError(path + ": " + e.what());
    }
    return p;
}

// ---------------------------------------------------------------------------
// Directions and lookups

inline Vec2 direction_to_latlong(const Vec3& d) {
    const double phi = std::atan2(d.x, -d.z);
    const double theta = std::acos(std::clamp(d.y, -1.0, 1.0));
    return {0.5 + phi / (2.0 * kPi), theta / kPi};
}

inline Vec3 latlong_to_direction(double u, double v) {
    const double phi = (u - 0.5) * 2.0 * kPi;
    const double theta = v * kPi;
    const double st = std::sin(theta);
    return {st * std::sin(phi), std::cos(theta), -st * std::cos(phi)};
}

/// Bilinear lat-long lookup, wrapping horizontally and clamping at the poles.
inline Vec3 sample_latlong(const ImageF& img, const Vec3& dir) {
    const Vec2 uv = direction_to_latlong(dir);
    const int w = img.width();
    const int h = img.height();
    const double fx = uv.x * w - 0.5;
    const double fy = std::clamp(uv.y * h - 0.5, 0.0, static_cast<double>(h - 1));
    const double x0f = std::floor(fx);
    const double y0f = std::floor(fy);
    const double ax = fx - x0f;
    const double ay = fy - y0f;
    const int x0 = ((static_cast<int>(x0f) % w) + w) % w;
    const int x1 = (x0 + 1) % w;
    const int y0 = static_cast<int>(y0f);
    const int y1 = std::min(y0 + 1, h - 1);
    Vec3 out;
    for (int c = 0; c < 3; ++c) {
        const double top = (1.0 - ax) * img(x0, y0, c) + ax * img(x1, y0, c);
        const double bot = (1.0 - ax) * img(x0, y1, c) + ax * img(x1, y1, c);
        const double v = (1.0 - ay) * top + ay * bot;
        if (c == 0) out.x = v;
        else if (c == 1) out.y = v;
        else out.z = v;
    }
    return out;
}

/// 2x2 box reduction; odd sizes are clamped at the border.
inline ImageF downsample_half(const ImageF& img) {
    const int w = std::max(1, img.width() / 2);
    const int h = std::max(1, img.height() / 2);
    ImageF out(w, h, img.channels());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < img.channels(); ++c) {
                const int xa = std::min(2 * x, img.width() - 1), xb = std::min(2 * x + 1, img.width() - 1);
                const int ya = std::min(2 * y, img.height() - 1), yb = std::min(2 * y + 1, img.height() - 1);
                out(x, y, c) = static_cast<float>(
                    (static_cast<double>(img(xa, ya, c)) + img(xb, ya, c) + img(xa, yb, c) + img(xb, yb, c)) * 0.25);
            }
    return out;
}

// ---------------------------------------------------------------------------
// BRDF terms

inline constexpr double kMinAlpha = 1e-3;

inline double roughness_to_alpha(double roughness) {
    return std::max(roughness * roughness, kMinAlpha);
}

inline double ggx_d(double n_dot_h, double alpha) {
    const double a2 = alpha * alpha;
    const double f = n_dot_h * n_dot_h * (a2 - 1.0) + 1.0;
    return a2 / (kPi * f * f);
}

inline double smith_g1(double n_dot_x, double k) { return n_dot_x / (n_dot_x * (1.0 - k) + k); }

inline double smith_g(double n_dot_v, double n_dot_l, double alpha) {
    const double k = 0.5 * alpha;
    return smith_g1(n_dot_v, k) * smith_g1(n_dot_l, k);
}

inline double schlick_weight(double v_dot_h) {
    const double m = std::clamp(1.0 - v_dot_h, 0.0, 1.0);
    const double m2 = m * m;
    return m2 * m2 * m;
}

/// Orthonormal basis with @p n as the third axis.
inline void tangent_frame(const Vec3& n, Vec3& t, Vec3& b) {
    const Vec3 a = std::abs(n.x) > 0.9 ? Vec3{0, 1, 0} : Vec3{1, 0, 0};
    t = normalize(cross(a, n));
    b = cross(n, t);
}

/// GGX half-vector sample around @p n, distributed as D(h) * (n.h).
inline Vec3 sample_ggx_half(double u1, double u2, double alpha, const Vec3& n) {
    const double phi = 2.0 * kPi * u1;
    const double a2 = alpha * alpha;
    const double cos_t = std::sqrt((1.0 - u2) / (1.0 + (a2 - 1.0) * u2));
    const double sin_t = std::sqrt(std::max(0.0, 1.0 - cos_t * cos_t));
    Vec3 t, b;
    tangent_frame(n, t, b);
    return normalize(t * (sin_t * std::cos(phi)) + b * (sin_t * std::sin(phi)) + n * cos_t);
}

inline Vec2 hammersley(std::uint32_t i, std::uint32_t n) {
    std::uint32_t bits = i;
    bits = (bits << 16u) | (bits >> 16u);
    bits = ((bits & 0x55555555u) << 1u) | ((bits & 0xAAAAAAAAu) >> 1u);
    bits = ((bits & 0x33333333u) << 2u) | ((bits & 0xCCCCCCCCu) >> 2u);
    bits = ((bits & 0x0F0F0F0Fu) << 4u) | ((bits & 0xF0F0F0F0u) >> 4u);
    bits = ((bits & 0x00FF00FFu) << 8u) | ((bits & 0xFF00FF00u) >> 8u);
    return {(i + 0.5) / n, static_cast<double>(bits) * 2.3283064365386963e-10};
}

// ---------------------------------------------------------------------------
// Prefiltering

/// Scale/bias pair of the split-sum BRDF term as a function of (n.v, roughness).
struct BrdfLut {
    int size = 0;
    std::vector<std::array<double, 2>> values;  // [roughness index * size + n.v index]

    static double nv_at(int i, int size) { return std::max(static_cast<double>(i) / (size - 1), 1e-3); }
    static double roughness_at(int j, int size) { return static_cast<double>(j) / (size - 1); }

    std::array<double, 2> lookup(double n_dot_v, double roughness) const {
        const double fx = std::clamp(n_dot_v, 0.0, 1.0) * (size - 1);
        const double fy = std::clamp(roughness, 0.0, 1.0) * (size - 1);
        const int x0 = std::min(static_cast<int>(fx), size - 2);
        const int y0 = std::min(static_cast<int>(fy), size - 2);
        const double ax = fx - x0, ay = fy - y0;
        std::array<double, 2> out{};
        for (int c = 0; c < 2; ++c) {
            const auto at = [&](int x, int y) {
                return values[static_cast<std::size_t>(y * size + x)][static_cast<std::size_t>(c)];
            };
            out[static_cast<std::size_t>(c)] = (1 - ay) * ((1 - ax) * at(x0, y0) + ax * at(x0 + 1, y0)) +
                                               ay * ((1 - ax) * at(x0, y0 + 1) + ax * at(x0 + 1, y0 + 1));
        }
        return out;
    }
};

/// Split-sum second term: integral of the specular BRDF times n.l with F0 = 1
/// split into F0 scale and bias.
inline std::array<double, 2> integrate_brdf(double n_dot_v, double roughness, std::uint32_t samples) {
    const double alpha = roughness_to_alpha(roughness);
    const Vec3 n{0, 0, 1};
    const Vec3 v{std::sqrt(std::max(0.0, 1.0 - n_dot_v * n_dot_v)), 0.0, n_dot_v};
    double a = 0.0, b = 0.0;
    for (std::uint32_t i = 0; i < samples; ++i) {
        const Vec2 xi = hammersley(i, samples);
        const Vec3 h = sample_ggx_half(xi.x, xi.y, alpha, n);
        const Vec3 l = h * (2.0 * dot(v, h)) - v;
        const double nl = l.z, nh = h.z, vh = dot(v, h);
        if (nl <= 0.0 || vh <= 0.0) continue;
        const double g_vis = smith_g(n_dot_v, nl, alpha) * vh / (nh * n_dot_v);
        const double fc = schlick_weight(vh);
        a += (1.0 - fc) * g_vis;
        b += fc * g_vis;
    }
    return {a / samples, b / samples};
}

inline BrdfLut build_brdf_lut(int size = 32, std::uint32_t samples = 1024, const Exec& exec = {}) {
    BrdfLut lut;
    lut.size = size;
    lut.values.resize(static_cast<std::size_t>(size * size));
    parallel_for(static_cast<std::size_t>(size), exec, [&](std::size_t j) {
        for (int i = 0; i < size; ++i)
            lut.values[j * static_cast<std::size_t>(size) + static_cast<std::size_t>(i)] =
                integrate_brdf(BrdfLut::nv_at(i, size), BrdfLut::roughness_at(static_cast<int>(j), size), samples);
    });
    return lut;
}

struct PrefilterOptions {
    int levels = 6;
    std::uint32_t samples_per_texel = 512;
    /// Height of the diffuse irradiance map.
    int irradiance_height = 32;
    int lut_size = 32;
    std::uint32_t lut_samples = 1024;
};

struct PrefilteredProbe {
    /// Specular level l is filtered at roughness l / (levels - 1).
    std::vector<ImageF> specular;
    ImageF irradiance;
    BrdfLut lut;

    int levels() const { return static_cast<int>(specular.size()); }

    Vec3 specular_at(const Vec3& dir, double roughness) const {
        const double f = std::clamp(roughness, 0.0, 1.0) * (levels() - 1);
        const int l0 = std::min(static_cast<int>(f), levels() - 1);
        const int l1 = std::min(l0 + 1, levels() - 1);
        const double t = f - l0;
        const Vec3 a = sample_latlong(specular[static_cast<std::size_t>(l0)], dir);
        if (t == 0.0 || l0 == l1) return a;
        return lerp(a, sample_latlong(specular[static_cast<std::size_t>(l1)], dir), t);
    }
    Vec3 irradiance_at(const Vec3& n) const { return sample_latlong(irradiance, n); }
};

namespace detail {

inline std::vector<ImageF> build_pyramid(const ImageF& base) {
    std::vector<ImageF> chain{base};
    while (chain.back().height() > 1) chain.push_back(downsample_half(chain.back()));
    return chain;
}

inline Vec3 sample_pyramid(const std::vector<ImageF>& chain, const Vec3& dir, double lod) {
    lod = std::clamp(lod, 0.0, static_cast<double>(chain.size() - 1));
    const int l0 = static_cast<int>(lod);
    const int l1 = std::min(l0 + 1, static_cast<int>(chain.size()) - 1);
    const double t = lod - l0;
    const Vec3 a = sample_latlong(chain[static_cast<std::size_t>(l0)], dir);
    if (t == 0.0) return a;
    return lerp(a, sample_latlong(chain[static_cast<std::size_t>(l1)], dir), t);
}

}  // namespace detail

/// GGX-filtered lat-long image (normal = view = reflection assumption), with
/// sample footprints matched to a source mip level to suppress aliasing.
inline ImageF prefilter_specular(const EnvironmentProbe& probe, double roughness, int out_height,
                                 std::uint32_t samples, const Exec& exec = {}) {
    const std::vector<ImageF> chain = detail::build_pyramid(probe.radiance);
    const int h = out_height;
    const int w = 2 * h;
    ImageF out(w, h, 3);
    const double alpha = roughness_to_alpha(roughness);
    const double src_texels = static_cast<double>(probe.radiance.width()) * probe.radiance.height();
    parallel_for(static_cast<std::size_t>(h), exec, [&](std::size_t row) {
        const int y = static_cast<int>(row);
        for (int x = 0; x < w; ++x) {
            const Vec3 n = latlong_to_direction((x + 0.5) / w, (y + 0.5) / h);
            Vec3 acc;
            double wsum = 0.0;
            for (std::uint32_t i = 0; i < samples; ++i) {
                const Vec2 xi = hammersley(i, samples);
                const Vec3 hv = sample_ggx_half(xi.x, xi.y, alpha, n);
                const double nh = dot(n, hv);
                const Vec3 l = hv * (2.0 * nh) - n;
                const double nl = dot(n, l);
                if (nl <= 0.0) continue;
                // Solid angle of the sample vs. of an average source texel.
                const double pdf = ggx_d(nh, alpha) * 0.25;
                const double omega_s = 1.0 / (samples * pdf + 1e-30);
                const double omega_p = 4.0 * kPi / src_texels;
                const double lod = 0.5 * std::log2(omega_s / omega_p) + 1.0;
                acc += detail::sample_pyramid(chain, l, lod) * nl;
                wsum += nl;
            }
            const Vec3 v = wsum > 0.0 ? acc / wsum : sample_latlong(probe.radiance, n);
            out(x, y, 0) = static_cast<float>(v.x);
            out(x, y, 1) = static_cast<float>(v.y);
            out(x, y, 2) = static_cast<float>(v.z);
        }
    });
    return out;
}

/// Cosine-weighted hemisphere average of the probe radiance for each normal,
/// i.e. irradiance / pi, by direct quadrature over a reduced copy of the probe.
inline ImageF diffuse_irradiance(const EnvironmentProbe& probe, int out_height, const Exec& exec = {}) {
    ImageF src = probe.radiance;
    while (src.height() > 2 * out_height && src.height() > 1) src = downsample_half(src);
    const int sw = src.width(), sh = src.height();
    std::vector<Vec3> dirs(static_cast<std::size_t>(sw) * static_cast<std::size_t>(sh));
    std::vector<double> solid(dirs.size());
    for (int y = 0; y < sh; ++y)
        for (int x = 0; x < sw; ++x) {
            const double v = (y + 0.5) / sh;
            const std::size_t i = static_cast<std::size_t>(y) * static_cast<std::size_t>(sw) + static_cast<std::size_t>(x);
            dirs[i] = latlong_to_direction((x + 0.5) / sw, v);
            solid[i] = std::sin(v * kPi) * (2.0 * kPi / sw) * (kPi / sh);
        }
    const int h = out_height, w = 2 * out_height;
    ImageF out(w, h, 3);
    parallel_for(static_cast<std::size_t>(h), exec, [&](std::size_t row) {
        const int y = static_cast<int>(row);
        for (int x = 0; x < w; ++x) {
            const Vec3 n = latlong_to_direction((x + 0.5) / w, (y + 0.5) / h);
            Vec3 acc;
            double wsum = 0.0;
            for (int sy = 0; sy < sh; ++sy)
                for (int sx = 0; sx < sw; ++sx) {
                    const std::size_t i = static_cast<std::size_t>(sy) * static_cast<std::size_t>(sw) + static_cast<std::size_t>(sx);
                    const double c = dot(n, dirs[i]);
                    if (c <= 0.0) continue;
                    const double wt = c * solid[i];
                    acc += Vec3{src(sx, sy, 0), src(sx, sy, 1), src(sx, sy, 2)} * wt;
                    wsum += wt;
                }
            const Vec3 v = wsum > 0.0 ? acc / wsum : Vec3{};
            out(x, y, 0) = static_cast<float>(v.x);
            out(x, y, 1) = static_cast<float>(v.y);
            out(x, y, 2) = static_cast<float>(v.z);
        }
    });
    return out;
}

inline PrefilteredProbe prefilter(const EnvironmentProbe& probe, const PrefilterOptions& opt = {},
                                  const Exec& exec = {}) {
    probe.validate();
    if (opt.levels < 2) throw Error("prefilter: levels must be >= 2");
    PrefilteredProbe out;
    const int base_h = probe.radiance.height();
    out.specular.push_back(probe.radiance);  // roughness 0: the mirror lobe is the probe itself
    for (int l = 1; l < opt.levels; ++l) {
        const double roughness = static_cast<double>(l) / (opt.levels - 1);
        const int h = std::max(std::min(16, base_h), base_h >> l);
        out.specular.push_back(prefilter_specular(probe, roughness, h, opt.samples_per_texel, exec));
    }
    out.irradiance = diffuse_irradiance(probe, std::min(opt.irradiance_height, base_h), exec);
    out.lut = build_brdf_lut(opt.lut_size, opt.lut_samples, exec);
    return out;
}

// ---------------------------------------------------------------------------
// Shading

struct SurfaceSample {
    Vec3 base;
    double roughness = 1.0;
    double metallic = 0.0;
};

inline SurfaceSample surface_at(const IntrinsicViews& v, int x, int y) {
    return {{v.base_color(x, y, 0), v.base_color(x, y, 1), v.base_color(x, y, 2)}, v.roughness(x, y), v.metallic(x, y)};
}

inline Vec3 f0_of(const SurfaceSample& s) { return lerp(Vec3{0.04, 0.04, 0.04}, s.base, s.metallic); }

/// Linear radiance image; uncovered pixels are black.
inline ImageF shade_splitsum(const IntrinsicViews& views, const PrefilteredProbe& probe, const Camera& camera,
                             const Exec& exec = {}) {
    const GBuffer& gb = views.gbuffer;
    ImageF out(gb.width, gb.height, 3);
    parallel_for(static_cast<std::size_t>(gb.height), exec, [&](std::size_t row) {
        const int y = static_cast<int>(row);
        for (int x = 0; x < gb.width; ++x) {
            if (!gb.mask(x, y)) continue;
            const Vec3 n = gb.normal_at(x, y);
            const Vec3 v = normalize(camera.position - gb.position_at(x, y));
            const SurfaceSample s = surface_at(views, x, y);
            const double nv = std::clamp(dot(n, v), 1e-4, 1.0);
            const Vec3 r = reflect(-v, n);
            const Vec3 diffuse = mul(s.base, probe.irradiance_at(n)) * (1.0 - s.metallic);
            const auto ab = probe.lut.lookup(nv, s.roughness);
            const Vec3 f0 = f0_of(s);
            const Vec3 spec = mul(probe.specular_at(r, s.roughness), f0 * ab[0] + Vec3{ab[1], ab[1], ab[1]});
            const Vec3 c = diffuse + spec;
            out(x, y, 0) = static_cast<float>(c.x);
            out(x, y, 1) = static_cast<float>(c.y);
            out(x, y, 2) = static_cast<float>(c.z);
        }
    });
    return out;
}

namespace detail {

/// Piecewise-constant lat-long light distribution proportional to luminance * sin(theta).
class LatLongDistribution {
public:
    explicit LatLongDistribution(const ImageF& img) : w_(img.width()), h_(img.height()) {
        cond_.resize(static_cast<std::size_t>(w_) * static_cast<std::size_t>(h_));
        row_sum_.resize(static_cast<std::size_t>(h_));
        marginal_.resize(static_cast<std::size_t>(h_));
        for (int y = 0; y < h_; ++y) {
            const double st = std::sin((y + 0.5) / h_ * kPi);
            double acc = 0.0;
            for (int x = 0; x < w_; ++x) {
                const double lum = 0.2126 * img(x, y, 0) + 0.7152 * img(x, y, 1) + 0.0722 * img(x, y, 2);
                acc += lum * st;
                cond_[idx(x, y)] = acc;
            }
            row_sum_[static_cast<std::size_t>(y)] = acc;
            total_ += acc;
            marginal_[static_cast<std::size_t>(y)] = total_;
        }
    }

    bool empty() const { return !(total_ > 0.0); }

    /// Samples a direction; returns its solid-angle pdf.
    Vec3 sample(double u1, double u2, double u3, double u4, double& pdf) const {
        const auto row_it = std::upper_bound(marginal_.begin(), marginal_.end(), u1 * total_);
        const int y = std::min(static_cast<int>(row_it - marginal_.begin()), h_ - 1);
        const auto row_begin = cond_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(y) * static_cast<std::size_t>(w_));
        const auto col_it = std::upper_bound(row_begin, row_begin + w_, u2 * row_sum_[static_cast<std::size_t>(y)]);
        const int x = std::min(static_cast<int>(col_it - row_begin), w_ - 1);
        const Vec3 d = latlong_to_direction((x + u3) / w_, (y + u4) / h_);
        pdf = pdf_of(d);
        return d;
    }

    double pdf_of(const Vec3& d) const {
        if (empty()) return 0.0;
        const Vec2 uv = direction_to_latlong(d);
        const int x = std::clamp(static_cast<int>(uv.x * w_), 0, w_ - 1);
        const int y = std::clamp(static_cast<int>(uv.y * h_), 0, h_ - 1);
        const double prev = x > 0 ? cond_[idx(x - 1, y)] : 0.0;
        const double p_pixel = (cond_[idx(x, y)] - prev) / total_;
        const double st = std::sin(uv.y * kPi);
        if (!(st > 0.0)) return 0.0;
        return p_pixel * w_ * h_ / (2.0 * kPi * kPi * st);
    }

private:
    std::size_t idx(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(w_) + static_cast<std::size_t>(x);
    }
    int w_, h_;
    std::vector<double> cond_;  // running row sums
    std::vector<double> row_sum_;
    std::vector<double> marginal_;
    double total_ = 0.0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

}  // namespace detail

struct McOptions {
    std::uint32_t samples = 1024;
    std::uint64_t seed = 1;
};

/// Evaluates BRDF * n.l for light direction @p l.
inline Vec3 brdf_cos(const SurfaceSample& s, const Vec3& n, const Vec3& v, const Vec3& l) {
    const double nl = dot(n, l);
    const double nv = std::max(dot(n, v), 1e-4);
    if (nl <= 0.0) return {};
    const Vec3 h = normalize(v + l);
    const double alpha = roughness_to_alpha(s.roughness);
    const double d = ggx_d(std::max(dot(n, h), 0.0), alpha);
    const double g = smith_g(nv, nl, alpha);
    const double fc = schlick_weight(dot(v, h));
    const Vec3 f0 = f0_of(s);
    const Vec3 f = f0 * (1.0 - fc) + Vec3{fc, fc, fc};
    const Vec3 spec = f * (d * g / (4.0 * nl * nv));
    const Vec3 diff = s.base * ((1.0 - s.metallic) / kPi);
    return (spec + diff) * nl;
}

/// Monte Carlo estimate of the reflected radiance with multiple importance
/// sampling of the probe and of the BRDF (balance heuristic). Per-pixel random
/// streams are derived from the seed and the pixel index.
inline ImageF shade_reference_mc(const IntrinsicViews& views, const EnvironmentProbe& probe, const Camera& camera,
                                 const McOptions& opt, const Exec& exec = {}) {
    if (opt.samples < 1) throw Error("shade_reference_mc: samples must be >= 1");
    const GBuffer& gb = views.gbuffer;
    ImageF out(gb.width, gb.height, 3);
    const detail::LatLongDistribution light(probe.radiance);
    const std::uint32_t n_light = light.empty() ? 0u : opt.samples / 2;
    const std::uint32_t n_brdf = opt.samples - n_light;
    parallel_for(static_cast<std::size_t>(gb.height), exec, [&](std::size_t row) {
        const int y = static_cast<int>(row);
        for (int x = 0; x < gb.width; ++x) {
            if (!gb.mask(x, y)) continue;
            const std::uint64_t pix = static_cast<std::uint64_t>(y) * static_cast<std::uint64_t>(gb.width) +
                                      static_cast<std::uint64_t>(x);
            std::mt19937_64 rng(detail::splitmix64(opt.seed ^ detail::splitmix64(pix)));
            std::uniform_real_distribution<double> uni(0.0, 1.0);
            const Vec3 n = gb.normal_at(x, y);
            const Vec3 v = normalize(camera.position - gb.position_at(x, y));
            const SurfaceSample s = surface_at(views, x, y);
            const double alpha = roughness_to_alpha(s.roughness);
            // Lobe selection for BRDF sampling.
            const Vec3 f0 = f0_of(s);
            const double spec_w = (f0.x + f0.y + f0.z) / 3.0 + 0.05;
            const double diff_w = (1.0 - s.metallic) * (s.base.x + s.base.y + s.base.z) / 3.0;
            const double p_spec = std::clamp(spec_w / (spec_w + diff_w), 0.1, 1.0);
            const auto brdf_pdf = [&](const Vec3& l) {
                const double nl = dot(n, l);
                if (nl <= 0.0) return 0.0;
                const Vec3 h = normalize(v + l);
                const double vh = dot(v, h);
                const double ps = vh > 0.0 ? ggx_d(std::max(dot(n, h), 0.0), alpha) * std::max(dot(n, h), 0.0) / (4.0 * vh) : 0.0;
                return p_spec * ps + (1.0 - p_spec) * nl / kPi;
            };
            Vec3 acc;
            for (std::uint32_t i = 0; i < n_light; ++i) {
                double pl = 0.0;
                const Vec3 l = light.sample(uni(rng), uni(rng), uni(rng), uni(rng), pl);
                if (!(pl > 0.0)) continue;
                const Vec3 f = brdf_cos(s, n, v, l);
                if (f == Vec3{}) continue;
                const double pb = brdf_pdf(l);
                const double w = n_light * pl / (n_light * pl + n_brdf * pb);
                acc += mul(f, sample_latlong(probe.radiance, l)) * (w / (pl * n_light));
            }
            Vec3 t, b;
            tangent_frame(n, t, b);
            for (std::uint32_t i = 0; i < n_brdf; ++i) {
                const double u0 = uni(rng), u1 = uni(rng), u2 = uni(rng);
                Vec3 l;
                if (u0 < p_spec) {
                    const Vec3 h = sample_ggx_half(u1, u2, alpha, n);
                    l = h * (2.0 * dot(v, h)) - v;
                } else {
                    const double r = std::sqrt(u1), phi = 2.0 * kPi * u2;
                    l = t * (r * std::cos(phi)) + b * (r * std::sin(phi)) + n * std::sqrt(std::max(0.0, 1.0 - u1));
                }
                const double pb = brdf_pdf(l);
                if (!(pb > 0.0)) continue;
                const Vec3 f = brdf_cos(s, n, v, l);
                if (f == Vec3{}) continue;
                const double pl = n_light > 0 ? light.pdf_of(l) : 0.0;
                const double w = n_brdf * pb / (n_brdf * pb + n_light * pl);
                acc += mul(f, sample_latlong(probe.radiance, l)) * (w / (pb * n_brdf));
            }
            out(x, y, 0) = static_cast<float>(acc.x);
            out(x, y, 1) = static_cast<float>(acc.y);
            out(x, y, 2) = static_cast<float>(acc.z);
        }
    });
    return out;
}

// ---------------------------------------------------------------------------
// Display

/// Filmic curve x / (1 + x) applied after exposure scaling (before sRGB).
inline double tonemap_curve(double x, double exposure) {
    const double e = std::max(0.0, x * exposure);
    if (std::isinf(e)) return 1.0;
    return e / (1.0 + e);
}

/// Name of the display transform recorded in output metadata.
inline constexpr const char* kTonemapName = "reinhard-x/(1+x)+srgb (AgX substitute)";

/// Display image in [0,1]: exposure, x / (1 + x), sRGB encoding.
inline ImageF tonemap(const ImageF& linear, double exposure) {
    if (!(exposure > 0.0)) throw Error("tonemap: exposure must be > 0");
    ImageF out(linear.width(), linear.height(), linear.channels());
    for (std::size_t i = 0; i < out.data().size(); ++i)
        out.data()[i] = static_cast<float>(std::clamp(srgb_encode(tonemap_curve(linear.data()[i], exposure)), 0.0, 1.0));
    return out;
}

}  // namespace matbake
