// Copyright 2026 The matbake Authors
// SPDX-License-Identifier: Apache-2.0

/// @file bake.hpp
/// Projection of multi-view intrinsic images into texture space.
///
/// Every covered view pixel is splatted to the nearest texel of the atlas with
/// weight 1 / max(|d(u,v)/dx|, |d(u,v)/dy|), derivatives measured in texels per
/// pixel. Texels are then normalized by their accumulated weight and texels that
/// received nothing are filled by fast-marching inpainting.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <tuple>
#include <vector>

#include "matbake/error.hpp"
#include "matbake/geometry.hpp"
#include "matbake/image.hpp"
#include "matbake/material.hpp"
#include "matbake/parallel.hpp"
#include "matbake/raster.hpp"

namespace matbake {

struct SplatOptions {
    int atlas_resolution = 2048;
    /// Supersampling factor applied to the views before splatting.
    int upscale = 4;
    double epsilon = 1e-8;
    double max_weight = 1e4;
    /// A view pixel is used for an upscaled sample only when its depth is within
    /// this relative tolerance of the guide depth.
    double depth_tolerance = 0.05;
};

/// Splat weight for one pixel. Derivatives are UV per pixel; they are converted
/// to texel units with @p atlas_resolution. Non-finite input yields 0.
inline double splat_weight(Vec2 duv_dx, Vec2 duv_dy, int atlas_resolution, double epsilon = 1e-8,
                           double max_weight = 1e4) {
    if (!is_finite(duv_dx) || !is_finite(duv_dy)) return 0.0;
    const double r = atlas_resolution;
    const double mx = std::hypot(duv_dx.x * r, duv_dx.y * r);
    const double my = std::hypot(duv_dy.x * r, duv_dy.y * r);
    return std::min(1.0 / (std::max(mx, my) + epsilon), max_weight);
}

/// Weighted per-texel accumulator.
///
/// Sums are kept relative to the first value splatted into each texel:
/// sum_c = ref_c * w_sum + dev_c. A texel that only ever receives one value
/// therefore normalizes to that value exactly.
class AccumAtlas {
public:
    AccumAtlas() = default;
    explicit AccumAtlas(int resolution)
        : resolution_(resolution), w_sum_(texels(), 0.0), ref_(texels() * kMaterialChannels, 0.0),
          dev_(texels() * kMaterialChannels, 0.0) {
        if (resolution < 1) throw Error("AccumAtlas: resolution must be >= 1");
    }

    int resolution() const { return resolution_; }
    std::size_t texels() const {
        return static_cast<std::size_t>(resolution_) * static_cast<std::size_t>(resolution_);
    }
    std::size_t texel_index(int tx, int ty) const {
        return static_cast<std::size_t>(ty) * static_cast<std::size_t>(resolution_) + static_cast<std::size_t>(tx);
    }

    void add(std::size_t texel, double w, const std::array<float, kMaterialChannels>& values) {
        if (!(w > 0.0)) return;
        double* ref = &ref_[texel * kMaterialChannels];
        double* dev = &dev_[texel * kMaterialChannels];
        if (w_sum_[texel] == 0.0)
            for (int c = 0; c < kMaterialChannels; ++c) ref[c] = values[static_cast<std::size_t>(c)];
        for (int c = 0; c < kMaterialChannels; ++c) dev[c] += w * (values[static_cast<std::size_t>(c)] - ref[c]);
        w_sum_[texel] += w;
    }

    double weight(std::size_t texel) const { return w_sum_[texel]; }
    /// Weighted sum of channel @p c at @p texel.
    double channel_sum(std::size_t texel, int c) const {
        return ref_[texel * kMaterialChannels + static_cast<std::size_t>(c)] * w_sum_[texel] +
               dev_[texel * kMaterialChannels + static_cast<std::size_t>(c)];
    }
    /// Weighted mean of channel @p c, or 0 where no weight was received.
    double mean(std::size_t texel, int c) const {
        if (!(w_sum_[texel] > 0.0)) return 0.0;
        return ref_[texel * kMaterialChannels + static_cast<std::size_t>(c)] +
               dev_[texel * kMaterialChannels + static_cast<std::size_t>(c)] / w_sum_[texel];
    }

private:
    int resolution_ = 0;
    std::vector<double> w_sum_;
    std::vector<double> ref_;
    std::vector<double> dev_;
};

struct SplatStats {
    std::uint64_t splatted = 0;
    /// Covered pixels whose UV fell outside [0,1]^2.
    std::uint64_t dropped_out_of_range = 0;
    /// Upscaled samples with no depth-consistent view pixel to interpolate from.
    std::uint64_t dropped_unsampled = 0;
    /// Covered pixels whose weight was zero (non-finite derivatives).
    std::uint64_t zero_weight = 0;

    SplatStats& operator+=(const SplatStats& o) {
        splatted += o.splatted;
        dropped_out_of_range += o.dropped_out_of_range;
        dropped_unsampled += o.dropped_unsampled;
        zero_weight += o.zero_weight;
        return *this;
    }
};

namespace detail {

struct Contribution {
    std::uint32_t texel;
    double weight;
    std::array<float, kMaterialChannels> values;
};

struct BandResult {
    std::vector<Contribution> contributions;
    SplatStats stats;
};

/// Depth-aware bilinear lookup of all material channels at continuous view
/// pixel coordinates. Returns false when no usable view pixel is nearby.
inline bool sample_view(const IntrinsicViews& views, double px, double py, double guide_depth, double tol,
                        std::array<float, kMaterialChannels>& out) {
    const GBuffer& gb = views.gbuffer;
    const double fx = px - 0.5;
    const double fy = py - 0.5;
    const int x0 = static_cast<int>(std::floor(fx));
    const int y0 = static_cast<int>(std::floor(fy));
    const double ax = fx - x0;
    const double ay = fy - y0;
    std::array<double, kMaterialChannels> acc{};
    double wsum = 0.0;
    int first = -1;
    std::array<double, kMaterialChannels> ref{};
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) {
            const int x = x0 + i;
            const int y = y0 + j;
            if (x < 0 || y < 0 || x >= gb.width || y >= gb.height) continue;
            if (!gb.mask(x, y)) continue;
            if (std::abs(gb.depth(x, y) - guide_depth) > tol * guide_depth) continue;
            const double w = (i ? ax : 1.0 - ax) * (j ? ay : 1.0 - ay);
            if (!(w > 0.0)) continue;
            if (first < 0) {
                first = 1;
                for (int c = 0; c < kMaterialChannels; ++c) ref[static_cast<std::size_t>(c)] = views.channel(x, y, c);
            }
            for (int c = 0; c < kMaterialChannels; ++c)
                acc[static_cast<std::size_t>(c)] += w * (views.channel(x, y, c) - ref[static_cast<std::size_t>(c)]);
            wsum += w;
        }
    if (!(wsum > 0.0)) return false;
    for (int c = 0; c < kMaterialChannels; ++c)
        out[static_cast<std::size_t>(c)] =
            static_cast<float>(ref[static_cast<std::size_t>(c)] + acc[static_cast<std::size_t>(c)] / wsum);
    return true;
}

/// Contributions of one guide band. @p guide row 0 is upscaled image row @p row_begin.
inline BandResult splat_band(const IntrinsicViews& views, const GBuffer& guide, int row_begin, int upscale,
                             const SplatOptions& opt) {
    BandResult res;
    const int r = opt.atlas_resolution;
    const double inv_k = 1.0 / upscale;
    for (int ly = 0; ly < guide.height; ++ly)
        for (int x = 0; x < guide.width; ++x) {
            if (!guide.mask(x, ly)) continue;
            int tx = 0, ty = 0;
            if (!texel_of(guide.uv_at(x, ly), r, tx, ty)) {
                ++res.stats.dropped_out_of_range;
                continue;
            }
            const double w = splat_weight(guide.duv_dx(x, ly), guide.duv_dy(x, ly), r, opt.epsilon, opt.max_weight);
            if (!(w > 0.0)) {
                ++res.stats.zero_weight;
                continue;
            }
            Contribution c{};
            c.texel = static_cast<std::uint32_t>(static_cast<std::size_t>(ty) * static_cast<std::size_t>(r) +
                                                 static_cast<std::size_t>(tx));
            c.weight = w;
            const int y = row_begin + ly;
            if (upscale == 1) {
                const int vx = x;
                const int vy = y;
                if (!views.gbuffer.mask(vx, vy)) {
                    ++res.stats.dropped_unsampled;
                    continue;
                }
                for (int ch = 0; ch < kMaterialChannels; ++ch)
                    c.values[static_cast<std::size_t>(ch)] = views.channel(vx, vy, ch);
            } else if (!sample_view(views, (x + 0.5) * inv_k, (y + 0.5) * inv_k, guide.depth(x, ly),
                                    opt.depth_tolerance, c.values)) {
                ++res.stats.dropped_unsampled;
                continue;
            }
            ++res.stats.splatted;
            res.contributions.push_back(c);
        }
    return res;
}

inline void check_views(const IntrinsicViews& views) {
    const GBuffer& gb = views.gbuffer;
    const auto ok = [&](const ImageF& img, int ch) {
        return img.width() == gb.width && img.height() == gb.height && img.channels() == ch;
    };
    if (!ok(views.base_color, 3) || !ok(views.roughness, 1) || !ok(views.metallic, 1) || !ok(views.height, 1))
        throw Error("splat: intrinsic images do not match their G-buffer dimensions");
}

/// Runs band tasks in parallel and merges their contributions in band order.
template <typename BandFn>
SplatStats run_bands(int band_count, AccumAtlas& atlas, const Exec& exec, BandFn&& band_fn) {
    SplatStats total;
    const int batch = std::max(1, exec.resolved()) * 2;
    for (int start = 0; start < band_count; start += batch) {
        const int n = std::min(batch, band_count - start);
        std::vector<BandResult> results(static_cast<std::size_t>(n));
        parallel_for(static_cast<std::size_t>(n), exec,
                     [&](std::size_t i) { results[i] = band_fn(start + static_cast<int>(i)); });
        for (const auto& r : results) {
            for (const auto& c : r.contributions) atlas.add(c.texel, c.weight, c.values);
            total += r.stats;
        }
    }
    return total;
}

}  // namespace detail

inline constexpr int kSplatBandRows = 32;

/// Splats a view using its own G-buffer as the texture-coordinate guide (no upscaling).
inline SplatStats splat_gbuffer(const IntrinsicViews& views, AccumAtlas& atlas, const SplatOptions& opt,
                                const Exec& exec = {}) {
    detail::check_views(views);
    if (opt.atlas_resolution != atlas.resolution()) throw Error("splat: atlas resolution mismatch");
    const GBuffer& gb = views.gbuffer;
    const int bands = (gb.height + kSplatBandRows - 1) / kSplatBandRows;
    return detail::run_bands(bands, atlas, exec, [&](int b) {
        const int y0 = b * kSplatBandRows;
        const int y1 = std::min(gb.height, y0 + kSplatBandRows);
        GBuffer band(gb.width, y1 - y0);
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < gb.width; ++x) {
                band.mask(x, y - y0) = gb.mask(x, y);
                band.depth(x, y - y0) = gb.depth(x, y);
                for (int c = 0; c < 2; ++c) band.uv(x, y - y0, c) = gb.uv(x, y, c);
                for (int c = 0; c < 4; ++c) band.duv(x, y - y0, c) = gb.duv(x, y, c);
            }
        return detail::splat_band(views, band, y0, 1, opt);
    });
}

/// Splats a view at @p opt.upscale times its resolution. The texture-coordinate
/// guide is re-rasterized from @p mesh at the upscaled resolution; view values
/// are interpolated bilinearly from depth-consistent view pixels.
inline SplatStats splat_view(const Mesh& mesh, const IntrinsicViews& views, AccumAtlas& atlas,
                             const SplatOptions& opt, const Exec& exec = {}) {
    detail::check_views(views);
    if (opt.upscale < 1) throw Error("splat: upscale must be >= 1");
    if (opt.atlas_resolution != atlas.resolution()) throw Error("splat: atlas resolution mismatch");
    const Camera guide_cam = views.camera.scaled(opt.upscale);
    if (views.camera.width != views.gbuffer.width || views.camera.height != views.gbuffer.height)
        throw Error("splat: view camera does not match G-buffer dimensions");
    const RasterScene scene(mesh, guide_cam);
    const int bands = (guide_cam.height + kSplatBandRows - 1) / kSplatBandRows;
    return detail::run_bands(bands, atlas, exec, [&](int b) {
        const int y0 = b * kSplatBandRows;
        const int y1 = std::min(guide_cam.height, y0 + kSplatBandRows);
        GBuffer band(guide_cam.width, y1 - y0);
        scene.rasterize_rows(y0, y1, band);
        return detail::splat_band(views, band, y0, opt.upscale, opt);
    });
}

/// Per-texel weighted mean clamped to [0,1]; coverage marks texels with weight.
inline MaterialSet normalize(const AccumAtlas& atlas) {
    const int res = atlas.resolution();
    MaterialSet m(res);
    for (int ty = 0; ty < res; ++ty)
        for (int tx = 0; tx < res; ++tx) {
            const std::size_t t = atlas.texel_index(tx, ty);
            if (!(atlas.weight(t) > 0.0)) continue;
            for (int c = 0; c < kMaterialChannels; ++c) m.set_channel(tx, ty, c, clamp01(atlas.mean(t, c)));
            m.coverage(tx, ty) = 1;
            m.filled(tx, ty) = 1;
        }
    return m;
}

/// Fast-marching inpainting of texels without a value. Texels are filled in
/// order of increasing distance from the known region; each takes a weighted
/// average of known texels within @p radius, weighted by direction relative to
/// the marching front, inverse squared distance and level-set proximity.
/// Known texels are never modified.
inline MaterialSet inpaint_uncovered(const MaterialSet& in, int radius, Diagnostics* diag = nullptr) {
    if (radius < 1) throw Error("inpaint: radius must be >= 1");
    MaterialSet out = in;
    const int res = in.resolution;
    if (res == 0) return out;
    const std::size_t known_count = count_set(in.filled);
    if (known_count == 0) {
        if (diag) diag->warn("inpaint: atlas has no covered texels; left unchanged");
        return out;
    }
    if (known_count == static_cast<std::size_t>(res) * static_cast<std::size_t>(res)) return out;

    enum : std::uint8_t { kKnown = 0, kBand = 1, kInside = 2 };
    constexpr double kFar = 1e6;
    const auto idx = [res](int x, int y) {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(res) + static_cast<std::size_t>(x);
    };
    std::vector<std::uint8_t> flag(static_cast<std::size_t>(res) * static_cast<std::size_t>(res), kInside);
    std::vector<double> dist(flag.size(), kFar);
    using Node = std::pair<double, std::size_t>;
    std::priority_queue<Node, std::vector<Node>, std::greater<Node>> heap;
    constexpr std::array<int, 4> dx4{1, -1, 0, 0};
    constexpr std::array<int, 4> dy4{0, 0, 1, -1};

    for (int y = 0; y < res; ++y)
        for (int x = 0; x < res; ++x)
            if (in.filled(x, y)) {
                flag[idx(x, y)] = kKnown;
                dist[idx(x, y)] = 0.0;
            }
    for (int y = 0; y < res; ++y)
        for (int x = 0; x < res; ++x) {
            if (flag[idx(x, y)] != kKnown) continue;
            for (int k = 0; k < 4; ++k) {
                const int nx = x + dx4[static_cast<std::size_t>(k)];
                const int ny = y + dy4[static_cast<std::size_t>(k)];
                if (nx < 0 || ny < 0 || nx >= res || ny >= res) continue;
                if (flag[idx(nx, ny)] == kInside) {
                    flag[idx(x, y)] = kBand;
                    heap.emplace(0.0, idx(x, y));
                    break;
                }
            }
        }

    const auto solve = [&](int x1, int y1, int x2, int y2) {
        const bool in1 = x1 >= 0 && y1 >= 0 && x1 < res && y1 < res;
        const bool in2 = x2 >= 0 && y2 >= 0 && x2 < res && y2 < res;
        const double a11 = in1 ? dist[idx(x1, y1)] : kFar;
        const double a22 = in2 ? dist[idx(x2, y2)] : kFar;
        const bool k1 = in1 && flag[idx(x1, y1)] != kInside;
        const bool k2 = in2 && flag[idx(x2, y2)] != kInside;
        const double m12 = std::min(a11, a22);
        if (k1 && k2) {
            if (std::abs(a11 - a22) >= 1.0) return 1.0 + m12;
            return 0.5 * (a11 + a22 + std::sqrt(2.0 - (a11 - a22) * (a11 - a22)));
        }
        if (k1) return 1.0 + a11;
        if (k2) return 1.0 + a22;
        return 1.0 + m12;
    };

    const auto grad_t = [&](int x, int y) {
        const auto known = [&](int qx, int qy) {
            return qx >= 0 && qy >= 0 && qx < res && qy < res && flag[idx(qx, qy)] != kInside;
        };
        const double t = dist[idx(x, y)];
        Vec2 g;
        const bool xp = known(x + 1, y), xm = known(x - 1, y);
        if (xp && xm) g.x = 0.5 * (dist[idx(x + 1, y)] - dist[idx(x - 1, y)]);
        else if (xp) g.x = dist[idx(x + 1, y)] - t;
        else if (xm) g.x = t - dist[idx(x - 1, y)];
        const bool yp = known(x, y + 1), ym = known(x, y - 1);
        if (yp && ym) g.y = 0.5 * (dist[idx(x, y + 1)] - dist[idx(x, y - 1)]);
        else if (yp) g.y = dist[idx(x, y + 1)] - t;
        else if (ym) g.y = t - dist[idx(x, y - 1)];
        return g;
    };

    const auto fill = [&](int x, int y) {
        const Vec2 g = grad_t(x, y);
        const double glen = length(g);
        const double tp = dist[idx(x, y)];
        std::array<double, kMaterialChannels> ref{};
        std::array<double, kMaterialChannels> acc{};
        double wsum = 0.0;
        bool have_ref = false;
        for (int qy = std::max(0, y - radius); qy <= std::min(res - 1, y + radius); ++qy)
            for (int qx = std::max(0, x - radius); qx <= std::min(res - 1, x + radius); ++qx) {
                if (flag[idx(qx, qy)] == kInside) continue;
                const Vec2 r{static_cast<double>(x - qx), static_cast<double>(y - qy)};
                const double r2 = dot(r, r);
                if (r2 == 0.0 || r2 > static_cast<double>(radius) * radius) continue;
                const double rl = std::sqrt(r2);
                const double dir = glen > 0.0 ? std::max(std::abs(dot(r, g)) / (rl * glen), 1e-6) : 1.0;
                const double dst = 1.0 / r2;
                const double lev = 1.0 / (1.0 + std::abs(dist[idx(qx, qy)] - tp));
                const double w = dir * dst * lev;
                if (!have_ref) {
                    for (int c = 0; c < kMaterialChannels; ++c) ref[static_cast<std::size_t>(c)] = out.channel(qx, qy, c);
                    have_ref = true;
                }
                for (int c = 0; c < kMaterialChannels; ++c)
                    acc[static_cast<std::size_t>(c)] += w * (out.channel(qx, qy, c) - ref[static_cast<std::size_t>(c)]);
                wsum += w;
            }
        if (!(wsum > 0.0)) return;
        for (int c = 0; c < kMaterialChannels; ++c)
            out.set_channel(x, y, c, clamp01(ref[static_cast<std::size_t>(c)] + acc[static_cast<std::size_t>(c)] / wsum));
        out.filled(x, y) = 1;
    };

    while (!heap.empty()) {
        const auto [t, i] = heap.top();
        heap.pop();
        if (flag[i] == kKnown) continue;
        flag[i] = kKnown;
        const int x = static_cast<int>(i % static_cast<std::size_t>(res));
        const int y = static_cast<int>(i / static_cast<std::size_t>(res));
        for (int k = 0; k < 4; ++k) {
            const int nx = x + dx4[static_cast<std::size_t>(k)];
            const int ny = y + dy4[static_cast<std::size_t>(k)];
            if (nx < 0 || ny < 0 || nx >= res || ny >= res) continue;
            const std::size_t ni = idx(nx, ny);
            if (flag[ni] != kInside) continue;
            dist[ni] = std::min({solve(nx - 1, ny, nx, ny - 1), solve(nx + 1, ny, nx, ny - 1),
                                 solve(nx - 1, ny, nx, ny + 1), solve(nx + 1, ny, nx, ny + 1)});
            fill(nx, ny);
            flag[ni] = kBand;
            heap.emplace(dist[ni], ni);
        }
    }
    return out;
}

struct BakeConfig {
    int atlas_resolution = 2048;
    int upscale = 4;
    int inpaint_radius = 3;
    double epsilon = 1e-8;
    double max_weight = 1e4;
};

struct BakeResult {
    MaterialSet materials;
    SplatStats stats;
    Diagnostics diagnostics;
};

namespace detail {

inline std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t h = 1469598103934665603ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

/// Total order on views independent of their position in the input list.
inline bool view_less(const IntrinsicViews& a, const IntrinsicViews& b) {
    const auto key = [](const IntrinsicViews& v) {
        std::array<double, 15> k{};
        k[0] = v.camera.position.x;
        k[1] = v.camera.position.y;
        k[2] = v.camera.position.z;
        for (std::size_t i = 0; i < 9; ++i) k[3 + i] = v.camera.world_from_camera.m[i];
        k[12] = v.camera.fov_y;
        k[13] = v.camera.width;
        k[14] = v.camera.height;
        return k;
    };
    const auto ka = key(a);
    const auto kb = key(b);
    if (ka != kb) return ka < kb;
    const auto hash = [](const IntrinsicViews& v) {
        std::uint64_t h = fnv1a(v.base_color.data().data(), v.base_color.data().size() * sizeof(float));
        h = fnv1a(v.roughness.data().data(), v.roughness.data().size() * sizeof(float), h);
        h = fnv1a(v.metallic.data().data(), v.metallic.data().size() * sizeof(float), h);
        return fnv1a(v.height.data().data(), v.height.data().size() * sizeof(float), h);
    };
    return hash(a) < hash(b);
}

}  // namespace detail

/// Full bake: splat every view, normalize, inpaint. The result does not depend
/// on the order of @p views or on the worker count.
inline BakeResult bake(const Mesh& mesh, const std::vector<IntrinsicViews>& views, const BakeConfig& cfg,
                       const Exec& exec = {}) {
    BakeResult result;
    SplatOptions opt;
    opt.atlas_resolution = cfg.atlas_resolution;
    opt.upscale = cfg.upscale;
    opt.epsilon = cfg.epsilon;
    opt.max_weight = cfg.max_weight;
    AccumAtlas atlas(cfg.atlas_resolution);

    std::vector<const IntrinsicViews*> order;
    order.reserve(views.size());
    for (const auto& v : views) order.push_back(&v);
    std::stable_sort(order.begin(), order.end(),
                     [](const IntrinsicViews* a, const IntrinsicViews* b) { return detail::view_less(*a, *b); });
    if (views.empty()) result.diagnostics.warn("bake: no views supplied; atlas is empty");
    for (const auto* v : order) result.stats += splat_view(mesh, *v, atlas, opt, exec);
    if (result.stats.dropped_out_of_range > 0)
        result.diagnostics.warn("bake: " + std::to_string(result.stats.dropped_out_of_range) +
                                " pixels had UVs outside [0,1] and were dropped");
    result.materials = inpaint_uncovered(normalize(atlas), cfg.inpaint_radius, &result.diagnostics);
    return result;
}

/// Overload pairing views with an explicit camera list; cameras override the
/// ones stored in the views and must match them in count and resolution.
inline BakeResult bake(const Mesh& mesh, const std::vector<Camera>& cameras, std::vector<IntrinsicViews> views,
                       const BakeConfig& cfg, const Exec& exec = {}) {
    if (cameras.size() != views.size()) throw Error("bake: expected one set of views per camera");
    for (std::size_t i = 0; i < views.size(); ++i) {
        if (cameras[i].width != views[i].gbuffer.width || cameras[i].height != views[i].gbuffer.height)
            throw Error("bake: view " + std::to_string(i) + " does not match its camera resolution");
        views[i].camera = cameras[i];
    }
    return bake(mesh, views, cfg, exec);
}

}  // namespace matbake
