// Copyright 2026 The matbake Authors
// SPDX-License-Identifier: Apache-2.0

/// @file raster.hpp
/// Software rasterizer for conditioning G-buffers and oracle intrinsic views.
///
/// Each pixel center is intersected with the triangle plane in camera space, which
/// yields perspective-correct barycentrics directly. UV screen derivatives are
/// the exact derivatives of that rational mapping, evaluated per pixel.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "matbake/geometry.hpp"
#include "matbake/image.hpp"
#include "matbake/material.hpp"
#include "matbake/parallel.hpp"

namespace matbake {

struct GBuffer {
    int width = 0;
    int height = 0;
    ImageF normal;    // world-space unit normal
    ImageF position;  // world-space position
    ImageF uv;        // (u, v)
    ImageF duv;       // (du/dx, dv/dx, du/dy, dv/dy)
    ImageF depth;     // planar camera depth
    Mask mask;
    Image<std::int32_t> prim;  // triangle index, -1 for background

    GBuffer() = default;
    GBuffer(int w, int h)
        : width(w), height(h), normal(w, h, 3), position(w, h, 3), uv(w, h, 2), duv(w, h, 4), depth(w, h, 1),
          mask(w, h, 1), prim(w, h, 1, -1) {}

    Vec2 uv_at(int x, int y) const { return {uv(x, y, 0), uv(x, y, 1)}; }
    Vec2 duv_dx(int x, int y) const { return {duv(x, y, 0), duv(x, y, 1)}; }
    Vec2 duv_dy(int x, int y) const { return {duv(x, y, 2), duv(x, y, 3)}; }
    Vec3 normal_at(int x, int y) const { return {normal(x, y, 0), normal(x, y, 1), normal(x, y, 2)}; }
    Vec3 position_at(int x, int y) const { return {position(x, y, 0), position(x, y, 1), position(x, y, 2)}; }

    bool operator==(const GBuffer&) const = default;
};

/// Per-view material intrinsics paired with the G-buffer they were rendered with.
struct IntrinsicViews {
    Camera camera;
    GBuffer gbuffer;
    ImageF base_color;  // 3 channels
    ImageF roughness;
    ImageF metallic;
    ImageF height;

    /// Channel @p c (see Channel) of pixel (x, y).
    float channel(int x, int y, int c) const {
        if (c < 3) return base_color(x, y, c);
        if (c == 3) return roughness(x, y);
        if (c == 4) return metallic(x, y);
        return height(x, y);
    }
};

struct RasterOptions {
    /// Near clipping distance in world units.
    double near_plane = 1e-6;
    bool cull_backfaces = false;
};

namespace detail {

struct RasterTriangle {
    // Camera space.
    Vec3 p0;
    Vec3 n;    // unnormalized plane normal e1 x e2
    Vec3 m1;   // e2 x n
    Vec3 m2;   // n x e1
    double k = 0.0;    // p0 . n
    double c1 = 0.0;   // p0 . m1
    double c2 = 0.0;   // p0 . m2
    double nn = 0.0;   // |n|^2
    // Attributes.
    Vec2 uv0, duv1, duv2;
    std::array<Vec3, 3> world;
    std::array<Vec3, 3> normal;
    // Inclusive pixel bounds.
    int x0 = 0, x1 = -1, y0 = 0, y1 = -1;
};

}  // namespace detail

/// Triangles transformed into a camera's frame, ready for scanline bands.
class RasterScene {
public:
    RasterScene(const Mesh& mesh, const Camera& camera, const RasterOptions& opt = {})
        : camera_(camera), opt_(opt) {
        const Mat3 cam_from_world = camera.world_from_camera.transposed();
        const double f = camera.focal();
        tris_.reserve(mesh.triangles.size());
        index_.reserve(mesh.triangles.size());
        for (std::size_t ti = 0; ti < mesh.triangles.size(); ++ti) {
            const auto& t = mesh.triangles[ti];
            const Vertex& a = mesh.vertices[t[0]];
            const Vertex& b = mesh.vertices[t[1]];
            const Vertex& c = mesh.vertices[t[2]];
            detail::RasterTriangle rt;
            std::array<Vec3, 3> pc{cam_from_world * (a.position - camera.position),
                                   cam_from_world * (b.position - camera.position),
                                   cam_from_world * (c.position - camera.position)};
            rt.p0 = pc[0];
            const Vec3 e1 = pc[1] - pc[0];
            const Vec3 e2 = pc[2] - pc[0];
            rt.n = cross(e1, e2);
            rt.nn = dot(rt.n, rt.n);
            if (!(rt.nn > 0.0)) continue;
            rt.k = dot(rt.p0, rt.n);
            if (opt.cull_backfaces && rt.k >= 0.0) continue;
            rt.m1 = cross(e2, rt.n);
            rt.m2 = cross(rt.n, e1);
            rt.c1 = dot(rt.p0, rt.m1);
            rt.c2 = dot(rt.p0, rt.m2);
            rt.uv0 = a.uv;
            rt.duv1 = b.uv - a.uv;
            rt.duv2 = c.uv - a.uv;
            rt.world = {a.position, b.position, c.position};
            rt.normal = {a.normal, b.normal, c.normal};

            // Clip against the near plane to bound the screen footprint.
            std::vector<Vec3> poly;
            for (int i = 0; i < 3; ++i) {
                const Vec3& cur = pc[static_cast<std::size_t>(i)];
                const Vec3& nxt = pc[static_cast<std::size_t>((i + 1) % 3)];
                const bool cin = -cur.z >= opt.near_plane;
                const bool nin = -nxt.z >= opt.near_plane;
                if (cin) poly.push_back(cur);
                if (cin != nin) {
                    const double s = (-opt.near_plane - cur.z) / (nxt.z - cur.z);
                    poly.push_back(lerp(cur, nxt, s));
                }
            }
            if (poly.empty()) continue;
            double minx = std::numeric_limits<double>::max(), maxx = std::numeric_limits<double>::lowest();
            double miny = minx, maxy = maxx;
            for (const auto& p : poly) {
                const double d = -p.z;
                const double px = 0.5 * camera.width + f * p.x / d;
                const double py = 0.5 * camera.height - f * p.y / d;
                minx = std::min(minx, px);
                maxx = std::max(maxx, px);
                miny = std::min(miny, py);
                maxy = std::max(maxy, py);
            }
            const auto clamp_px = [](double v, int hi) {
                return static_cast<int>(std::clamp(v, -1.0, static_cast<double>(hi) + 1.0));
            };
            rt.x0 = std::max(0, clamp_px(std::floor(minx - 0.5), camera.width));
            rt.x1 = std::min(camera.width - 1, clamp_px(std::ceil(maxx - 0.5), camera.width));
            rt.y0 = std::max(0, clamp_px(std::floor(miny - 0.5), camera.height));
            rt.y1 = std::min(camera.height - 1, clamp_px(std::ceil(maxy - 0.5), camera.height));
            if (rt.x0 > rt.x1 || rt.y0 > rt.y1) continue;
            tris_.push_back(rt);
            index_.push_back(static_cast<std::int32_t>(ti));
        }
    }

    const Camera& camera() const { return camera_; }

    /// Rasterizes image rows [row_begin, row_end) into @p out, whose row 0
    /// corresponds to image row @p row_begin. @p out must be pre-sized to
    /// (camera width, row_end - row_begin) and freshly constructed.
    void rasterize_rows(int row_begin, int row_end, GBuffer& out) const {
        const double f = camera_.focal();
        const Vec3 rx{1.0 / f, 0.0, 0.0};
        const Vec3 ry{0.0, -1.0 / f, 0.0};
        const int w = camera_.width;
        std::vector<double> zbuf(static_cast<std::size_t>(w) * static_cast<std::size_t>(row_end - row_begin),
                                 std::numeric_limits<double>::infinity());
        constexpr double kInsideTol = -1e-10;
        for (std::size_t i = 0; i < tris_.size(); ++i) {
            const auto& t = tris_[i];
            const int ya = std::max(t.y0, row_begin);
            const int yb = std::min(t.y1, row_end - 1);
            for (int y = ya; y <= yb; ++y)
                for (int x = t.x0; x <= t.x1; ++x) {
                    const Vec3 r = camera_.camera_ray({x + 0.5, y + 0.5});
                    const double q = dot(r, t.n);
                    if (q == 0.0) continue;
                    const double depth = t.k / q;
                    if (!(depth > opt_.near_plane)) continue;
                    const double s1 = dot(r, t.m1);
                    const double s2 = dot(r, t.m2);
                    const double b1 = (depth * s1 - t.c1) / t.nn;
                    const double b2 = (depth * s2 - t.c2) / t.nn;
                    const double b0 = 1.0 - b1 - b2;
                    if (b0 < kInsideTol || b1 < kInsideTol || b2 < kInsideTol) continue;
                    const int ly = y - row_begin;
                    double& z = zbuf[static_cast<std::size_t>(ly) * static_cast<std::size_t>(w) + static_cast<std::size_t>(x)];
                    if (!(depth < z)) continue;
                    z = depth;

                    const double qx = dot(rx, t.n);
                    const double qy = dot(ry, t.n);
                    const double scale = t.k / t.nn;
                    const double db1dx = scale * (dot(rx, t.m1) * q - s1 * qx) / (q * q);
                    const double db2dx = scale * (dot(rx, t.m2) * q - s2 * qx) / (q * q);
                    const double db1dy = scale * (dot(ry, t.m1) * q - s1 * qy) / (q * q);
                    const double db2dy = scale * (dot(ry, t.m2) * q - s2 * qy) / (q * q);
                    const Vec2 uv = t.uv0 + t.duv1 * b1 + t.duv2 * b2;
                    const Vec2 dx = t.duv1 * db1dx + t.duv2 * db2dx;
                    const Vec2 dy = t.duv1 * db1dy + t.duv2 * db2dy;
                    const Vec3 wp = t.world[0] * b0 + t.world[1] * b1 + t.world[2] * b2;
                    const Vec3 nrm = normalize(t.normal[0] * b0 + t.normal[1] * b1 + t.normal[2] * b2);

                    out.mask(x, ly) = 1;
                    out.prim(x, ly) = index_[i];
                    out.depth(x, ly) = static_cast<float>(depth);
                    out.uv(x, ly, 0) = static_cast<float>(uv.x);
                    out.uv(x, ly, 1) = static_cast<float>(uv.y);
                    out.duv(x, ly, 0) = static_cast<float>(dx.x);
                    out.duv(x, ly, 1) = static_cast<float>(dx.y);
                    out.duv(x, ly, 2) = static_cast<float>(dy.x);
                    out.duv(x, ly, 3) = static_cast<float>(dy.y);
                    out.position(x, ly, 0) = static_cast<float>(wp.x);
                    out.position(x, ly, 1) = static_cast<float>(wp.y);
                    out.position(x, ly, 2) = static_cast<float>(wp.z);
                    out.normal(x, ly, 0) = static_cast<float>(nrm.x);
                    out.normal(x, ly, 1) = static_cast<float>(nrm.y);
                    out.normal(x, ly, 2) = static_cast<float>(nrm.z);
                }
        }
    }

private:
    Camera camera_;
    RasterOptions opt_;
    std::vector<detail::RasterTriangle> tris_;
    std::vector<std::int32_t> index_;
};

inline constexpr int kRasterBandRows = 16;

/// Z-buffered rasterization of @p mesh seen from @p camera. Background pixels
/// have mask 0 and an all-zero payload.
inline GBuffer rasterize(const Mesh& mesh, const Camera& camera, const Exec& exec = {},
                         const RasterOptions& opt = {}) {
    camera.validate();
    const RasterScene scene(mesh, camera, opt);
    GBuffer out(camera.width, camera.height);
    const int bands = (camera.height + kRasterBandRows - 1) / kRasterBandRows;
    parallel_for(static_cast<std::size_t>(bands), exec, [&](std::size_t b) {
        const int y0 = static_cast<int>(b) * kRasterBandRows;
        const int y1 = std::min(camera.height, y0 + kRasterBandRows);
        GBuffer band(camera.width, y1 - y0);
        scene.rasterize_rows(y0, y1, band);
        for (int y = y0; y < y1; ++y)
            for (int x = 0; x < camera.width; ++x) {
                const int ly = y - y0;
                out.mask(x, y) = band.mask(x, ly);
                out.prim(x, y) = band.prim(x, ly);
                out.depth(x, y) = band.depth(x, ly);
                for (int c = 0; c < 2; ++c) out.uv(x, y, c) = band.uv(x, ly, c);
                for (int c = 0; c < 4; ++c) out.duv(x, y, c) = band.duv(x, ly, c);
                for (int c = 0; c < 3; ++c) {
                    out.position(x, y, c) = band.position(x, ly, c);
                    out.normal(x, y, c) = band.normal(x, ly, c);
                }
            }
    });
    return out;
}

struct PositionImage {
    ImageF position;  // 3 channels
    Mask mask;
};

/// Unprojects a planar depth image through the pinhole model. Pixels with
/// non-positive or non-finite depth are masked out and left zero.
inline PositionImage world_position_from_depth(const ImageF& depth, const Camera& camera) {
    if (depth.width() != camera.width || depth.height() != camera.height || depth.channels() != 1)
        throw Error("world_position_from_depth: depth image does not match camera resolution");
    PositionImage out{ImageF(camera.width, camera.height, 3), Mask(camera.width, camera.height, 1)};
    for (int y = 0; y < camera.height; ++y)
        for (int x = 0; x < camera.width; ++x) {
            const double d = depth(x, y);
            if (!(d > 0.0) || !std::isfinite(d)) continue;
            const Vec3 p = unproject(camera, {x + 0.5, y + 0.5}, d);
            out.position(x, y, 0) = static_cast<float>(p.x);
            out.position(x, y, 1) = static_cast<float>(p.y);
            out.position(x, y, 2) = static_cast<float>(p.z);
            out.mask(x, y) = 1;
        }
    return out;
}

/// Samples every material atlas bilinearly at the G-buffer UVs.
inline IntrinsicViews sample_intrinsics(const GBuffer& gb, const Camera& camera, const MaterialSet& materials,
                                        const Exec& exec = {}) {
    IntrinsicViews v;
    v.camera = camera;
    v.base_color = ImageF(gb.width, gb.height, 3);
    v.roughness = ImageF(gb.width, gb.height, 1);
    v.metallic = ImageF(gb.width, gb.height, 1);
    v.height = ImageF(gb.width, gb.height, 1);
    parallel_for(static_cast<std::size_t>(gb.height), exec, [&](std::size_t row) {
        const int y = static_cast<int>(row);
        std::array<double, 3> s{};
        for (int x = 0; x < gb.width; ++x) {
            if (!gb.mask(x, y)) continue;
            const Vec2 uv = gb.uv_at(x, y);
            sample_atlas(materials.base_color, uv, s);
            for (int c = 0; c < 3; ++c) v.base_color(x, y, c) = clamp01(s[static_cast<std::size_t>(c)]);
            sample_atlas(materials.roughness, uv, s);
            v.roughness(x, y) = clamp01(s[0]);
            sample_atlas(materials.metallic, uv, s);
            v.metallic(x, y) = clamp01(s[0]);
            sample_atlas(materials.height, uv, s);
            v.height(x, y) = clamp01(s[0]);
        }
    });
    v.gbuffer = gb;
    return v;
}

/// Oracle intrinsic views: rasterize, then look up the known material atlases.
inline IntrinsicViews render_intrinsics(const Mesh& mesh, const Camera& camera, const MaterialSet& materials,
                                        const Exec& exec = {}) {
    return sample_intrinsics(rasterize(mesh, camera, exec), camera, materials, exec);
}

}  // namespace matbake
