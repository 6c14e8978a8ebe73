// Copyright 2026 The matbake Authors
// SPDX-License-Identifier: Apache-2.0

/// @file fixtures.hpp
/// Procedural meshes, materials and light probes for tests, demos and
/// round-trip evaluation.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "matbake/error.hpp"
#include "matbake/geometry.hpp"
#include "matbake/image.hpp"
#include "matbake/material.hpp"
#include "matbake/shade.hpp"
#include "matbake/vec.hpp"

namespace matbake {

/// Unit sphere with an equal-area cylindrical UV layout: u = azimuth / 2pi
/// (azimuth from +Z towards +X), v = (1 + y) / 2. Rings are uniform in y, so
/// every texel covers the same surface area. The seam column is duplicated.
inline Mesh make_sphere(int segments = 64, int rings = 32) {
    if (segments < 4 || segments % 4 != 0) throw Error("make_sphere: segments must be a positive multiple of 4");
    if (rings < 2 || rings % 2 != 0) throw Error("make_sphere: rings must be a positive even number");
    Mesh m;
    const auto add = [&](Vec3 p, Vec2 uv) {
        m.vertices.push_back({p, normalize(p), uv});
        return static_cast<std::uint32_t>(m.vertices.size() - 1);
    };
    // Ring r = 1..rings-1 at y = -1 + 2r / rings; poles handled as fans.
    std::vector<std::vector<std::uint32_t>> ring_ids;
    for (int r = 1; r < rings; ++r) {
        const double y = -1.0 + 2.0 * r / rings;
        const double rad = std::sqrt(std::max(0.0, 1.0 - y * y));
        std::vector<std::uint32_t> ids;
        for (int s = 0; s <= segments; ++s) {
            const double u = static_cast<double>(s) / segments;
            const double az = 2.0 * kPi * u;
            const Vec3 p = s == segments ? Vec3{0.0, y, rad} : Vec3{rad * std::sin(az), y, rad * std::cos(az)};
            ids.push_back(add(p, {u, 0.5 * (1.0 + y)}));
        }
        ring_ids.push_back(std::move(ids));
    }
    for (std::size_t r = 0; r + 1 < ring_ids.size(); ++r)
        for (int s = 0; s < segments; ++s) {
            const auto a = ring_ids[r][static_cast<std::size_t>(s)], b = ring_ids[r][static_cast<std::size_t>(s + 1)];
            const auto c = ring_ids[r + 1][static_cast<std::size_t>(s)], d = ring_ids[r + 1][static_cast<std::size_t>(s + 1)];
            m.triangles.push_back({a, b, d});
            m.triangles.push_back({a, d, c});
        }
    for (int s = 0; s < segments; ++s) {
        const double u = (s + 0.5) / segments;
        const auto south = add({0, -1, 0}, {u, 0.0});
        m.triangles.push_back({south, ring_ids.front()[static_cast<std::size_t>(s + 1)],
                               ring_ids.front()[static_cast<std::size_t>(s)]});
        const auto north = add({0, 1, 0}, {u, 1.0});
        m.triangles.push_back({north, ring_ids.back()[static_cast<std::size_t>(s)],
                               ring_ids.back()[static_cast<std::size_t>(s + 1)]});
    }
    return m;
}

/// Axis-aligned cube of side 1 centered at the origin. Each face is its own
/// chart in a 3x2 grid of atlas cells, inset by @p gutter (in UV units).
inline Mesh make_cube(int subdivisions = 4, double gutter = 1.0 / 64.0) {
    if (subdivisions < 1) throw Error("make_cube: subdivisions must be >= 1");
    struct Face {
        Vec3 n, t, b;
    };
    const std::array<Face, 6> faces{{{{1, 0, 0}, {0, 0, -1}, {0, 1, 0}},
                                     {{-1, 0, 0}, {0, 0, 1}, {0, 1, 0}},
                                     {{0, 1, 0}, {1, 0, 0}, {0, 0, -1}},
                                     {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}},
                                     {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}},
                                     {{0, 0, -1}, {-1, 0, 0}, {0, 1, 0}}}};
    Mesh m;
    const int n = subdivisions;
    for (int f = 0; f < 6; ++f) {
        const Face& face = faces[static_cast<std::size_t>(f)];
        const double cell_u = (f % 3) / 3.0, cell_v = (f / 3) / 2.0;
        const double span_u = 1.0 / 3.0 - 2.0 * gutter, span_v = 0.5 - 2.0 * gutter;
        const auto base = static_cast<std::uint32_t>(m.vertices.size());
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                const double s = static_cast<double>(i) / n, t = static_cast<double>(j) / n;
                const Vec3 p = face.n * 0.5 + face.t * (s - 0.5) + face.b * (t - 0.5);
                m.vertices.push_back({p, face.n, {cell_u + gutter + s * span_u, cell_v + gutter + t * span_v}});
            }
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const auto a = base + static_cast<std::uint32_t>(j * (n + 1) + i);
                const auto b = a + 1, c = a + static_cast<std::uint32_t>(n + 1), d = c + 1;
                m.triangles.push_back({a, b, d});
                m.triangles.push_back({a, d, c});
            }
    }
    return m;
}

/// Square [-1,1]^2 in the z = 0 plane facing +Z, UV spanning the whole atlas.
inline Mesh make_quad() {
    Mesh m;
    const Vec3 n{0, 0, 1};
    m.vertices = {{{-1, -1, 0}, n, {0, 0}}, {{1, -1, 0}, n, {1, 0}}, {{1, 1, 0}, n, {1, 1}}, {{-1, 1, 0}, n, {0, 1}}};
    m.triangles = {{0, 1, 2}, {0, 2, 3}};
    return m;
}

inline Mesh make_fixture_mesh(const std::string& name) {
    if (name == "sphere") return make_sphere();
    if (name == "cube") return make_cube();
    if (name == "quad") return make_quad();
    throw UsageError("unknown fixture '" + name + "' (expected sphere, cube or quad)");
}

/// Smooth ground-truth material. Frequencies in u are integers so the maps are
/// periodic across the sphere seam.
inline MaterialSet make_test_materials(int resolution) {
    MaterialSet m = MaterialSet::constant(resolution, {0.5f, 0.5f, 0.5f}, 0.5f, 0.5f, 0.5f);
    for (int y = 0; y < resolution; ++y)
        for (int x = 0; x < resolution; ++x) {
            const Vec2 uv = texel_center(x, y, resolution);
            const double a = 2.0 * kPi * uv.x, b = kPi * uv.y;
            m.base_color(x, y, 0) = clamp01(0.55 + 0.30 * std::sin(a) * std::cos(b));
            m.base_color(x, y, 1) = clamp01(0.45 + 0.25 * std::cos(2.0 * a + 0.3));
            m.base_color(x, y, 2) = clamp01(0.40 + 0.25 * std::sin(2.0 * b + 0.7));
            m.roughness(x, y) = clamp01(0.5 + 0.3 * std::cos(a) * std::sin(b));
            m.metallic(x, y) = clamp01(0.5 + 0.35 * std::sin(a + 1.1) * std::cos(2.0 * b));
            m.height(x, y) = clamp01(0.5 + 0.2 * std::sin(3.0 * a) * std::sin(b));
        }
    return m;
}

// ---------------------------------------------------------------------------
// Probes

inline EnvironmentProbe constant_probe(int height, Vec3 radiance) {
    EnvironmentProbe p{ImageF(2 * height, height, 3)};
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < 2 * height; ++x) {
            p.radiance(x, y, 0) = static_cast<float>(radiance.x);
            p.radiance(x, y, 1) = static_cast<float>(radiance.y);
            p.radiance(x, y, 2) = static_cast<float>(radiance.z);
        }
    return p;
}

namespace detail {

template <typename Fn>
EnvironmentProbe probe_from(int height, Fn radiance_of) {
    EnvironmentProbe p{ImageF(2 * height, height, 3)};
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < 2 * height; ++x) {
            const Vec3 d = latlong_to_direction((x + 0.5) / (2 * height), (y + 0.5) / height);
            const Vec3 c = radiance_of(d);
            p.radiance(x, y, 0) = static_cast<float>(c.x);
            p.radiance(x, y, 1) = static_cast<float>(c.y);
            p.radiance(x, y, 2) = static_cast<float>(c.z);
        }
    return p;
}

}  // namespace detail

/// Blue sky gradient over a brown ground with a soft sun.
inline EnvironmentProbe sky_probe(int height = 128, Vec3 sun_dir = normalize(Vec3{0.5, 0.6, 0.4})) {
    return detail::probe_from(height, [&](const Vec3& d) {
        Vec3 c;
        if (d.y >= 0.0) {
            const double t = std::pow(d.y, 0.5);
            c = lerp(Vec3{0.9, 0.9, 0.85}, Vec3{0.25, 0.45, 0.9}, t);
        } else {
            c = lerp(Vec3{0.35, 0.3, 0.25}, Vec3{0.15, 0.12, 0.1}, std::min(1.0, -d.y * 3.0));
        }
        const double s = std::max(0.0, dot(d, sun_dir));
        c += Vec3{12.0, 11.0, 9.0} * std::pow(s, 300.0);
        return c;
    });
}

/// Dim room with a warm key light and a cool fill light.
inline EnvironmentProbe studio_probe(int height = 128) {
    const Vec3 key = normalize(Vec3{-0.6, 0.5, 0.6});
    const Vec3 fill = normalize(Vec3{0.8, 0.1, -0.3});
    return detail::probe_from(height, [&](const Vec3& d) {
        Vec3 c = Vec3{0.08, 0.08, 0.09} + Vec3{0.1, 0.1, 0.1} * (0.5 + 0.5 * d.y);
        const double k = dot(d, key), f = dot(d, fill);
        if (k > 0.95) c += Vec3{6.0, 5.0, 4.0} * ((k - 0.95) / 0.05);
        if (f > 0.9) c += Vec3{1.0, 1.4, 2.0} * ((f - 0.9) / 0.1);
        return c;
    });
}

/// Horizontal-band probe with a colored horizon; cheap third lighting condition.
inline EnvironmentProbe sunset_probe(int height = 128) {
    return detail::probe_from(height, [](const Vec3& d) {
        const double h = std::exp(-8.0 * d.y * d.y);
        Vec3 c = Vec3{0.1, 0.12, 0.25} * std::max(0.0, d.y) + Vec3{2.0, 0.9, 0.4} * h;
        if (d.y < 0.0) c = c * 0.3;
        return c;
    });
}

/// Overcast dome: smooth zenith-to-horizon falloff.
inline EnvironmentProbe overcast_probe(int height = 128) {
    return detail::probe_from(height, [](const Vec3& d) {
        const double t = 0.5 + 0.5 * d.y;
        return Vec3{0.3, 0.3, 0.32} + Vec3{0.9, 0.9, 0.95} * (t * t);
    });
}

/// Probe rotated about +Y: the result seen along rotation_y(-k * pi / 2) * d
/// equals the input seen along d, for k = @p quarter_turns. Exact because it
/// is a whole-column shift.
inline EnvironmentProbe rotate_probe_quarter(const EnvironmentProbe& p, int quarter_turns) {
    const int w = p.radiance.width(), h = p.radiance.height();
    if (w % 4 != 0) throw Error("rotate_probe_quarter: width must be divisible by 4");
    const int shift = ((quarter_turns % 4) + 4) % 4 * (w / 4);
    EnvironmentProbe out{ImageF(w, h, 3)};
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) out.radiance((x + shift) % w, y, c) = p.radiance(x, y, c);
    return out;
}

}  // namespace matbake
