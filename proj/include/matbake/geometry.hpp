// Copyright 2026 The matbake Authors
// SPDX-License-Identifier: Apache-2.0

/// @file geometry.hpp
/// Mesh and camera domain model.
///
/// Conventions: right-handed world, Y up. Cameras look down their local -Z axis
/// with +X right and +Y up; image origin is the top-left corner and pixel
/// (i, j) has its center at (i + 0.5, j + 0.5). Depth is the distance along the
/// optical axis (planar z-depth), positive in front of the camera.

#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "matbake/error.hpp"
#include "matbake/image.hpp"
#include "matbake/vec.hpp"

namespace matbake {

struct Vertex {
    Vec3 position;
    Vec3 normal;
    Vec2 uv;
};

struct Mesh {
    std::vector<Vertex> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;

    struct Bounds {
        Vec3 lo;
        Vec3 hi;
        Vec3 center() const { return (lo + hi) * 0.5; }
        double diagonal() const { return length(hi - lo); }
    };

    Bounds bounds() const {
        Bounds b{{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
                  std::numeric_limits<double>::max()},
                 {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
                  std::numeric_limits<double>::lowest()}};
        for (const auto& v : vertices) {
            b.lo = {std::min(b.lo.x, v.position.x), std::min(b.lo.y, v.position.y),
                    std::min(b.lo.z, v.position.z)};
            b.hi = {std::max(b.hi.x, v.position.x), std::max(b.hi.y, v.position.y),
                    std::max(b.hi.z, v.position.z)};
        }
        if (vertices.empty()) b = {};
        return b;
    }

    /// Throws Error when an invariant is violated.
    void validate() const {
        for (const auto& t : triangles)
            for (auto i : t)
                if (i >= vertices.size()) throw Error("mesh: triangle index out of range");
        for (const auto& v : vertices) {
            if (std::abs(length(v.normal) - 1.0) > 1e-4) throw Error("mesh: vertex normal not unit length");
            if (!is_finite(v.uv)) throw Error("mesh: non-finite UV");
            if (!is_finite(v.position)) throw Error("mesh: non-finite position");
        }
    }
};

inline double uv_area(const Mesh& mesh, const std::array<std::uint32_t, 3>& t) {
    const Vec2 a = mesh.vertices[t[0]].uv;
    const Vec2 b = mesh.vertices[t[1]].uv;
    const Vec2 c = mesh.vertices[t[2]].uv;
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

// ---------------------------------------------------------------------------
// Mesh text format

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

inline double parse_double(std::string_view tok, std::size_t line) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (!tok.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ParseError("line " + std::to_string(line) + ": bad number '" + std::string(tok) + "'");
    return v;
}

inline long parse_long(std::string_view tok, std::size_t line) {
    long v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError("line " + std::to_string(line) + ": bad index '" + std::string(tok) + "'");
    return v;
}

/// Resolves a 1-based (or negative, relative) index into a 0-based one.
inline std::int64_t resolve_index(long raw, std::size_t count, std::size_t line, const char* what) {
    std::int64_t idx = raw > 0 ? raw - 1 : static_cast<std::int64_t>(count) + raw;
    if (raw == 0 || idx < 0 || idx >= static_cast<std::int64_t>(count))
        throw ParseError("line " + std::to_string(line) + ": " + what + " index " + std::to_string(raw) +
                         " out of range");
    return idx;
}

inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace detail

/// Parses the text mesh format: `v x y z`, `vn x y z`, `vt u v`, and polygonal
/// `f p/t[/n] ...` records. Other record types are ignored. Polygons with more
/// than three corners are fan-triangulated. Missing normals are replaced with
/// area-weighted averages of the incident face normals.
inline Mesh parse_mesh(std::string_view text) {
    std::vector<Vec3> positions;
    std::vector<Vec3> normals;
    std::vector<Vec2> uvs;
    struct Corner {
        std::int64_t p;
        std::int64_t t;
        std::int64_t n;  // -1 when absent
    };
    std::vector<std::array<Corner, 3>> faces;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;
        line = detail::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto tok = detail::split_ws(line);
        const std::string_view kind = tok[0];
        if (kind == "v" || kind == "vn") {
            if (tok.size() < 4) throw ParseError("line " + std::to_string(line_no) + ": expected 3 coordinates");
            const Vec3 v{detail::parse_double(tok[1], line_no), detail::parse_double(tok[2], line_no),
                         detail::parse_double(tok[3], line_no)};
            (kind == "v" ? positions : normals).push_back(v);
        } else if (kind == "vt") {
            if (tok.size() < 3) throw ParseError("line " + std::to_string(line_no) + ": expected 2 texture coordinates");
            uvs.push_back({detail::parse_double(tok[1], line_no), detail::parse_double(tok[2], line_no)});
        } else if (kind == "f") {
            if (tok.size() < 4) throw ParseError("line " + std::to_string(line_no) + ": face needs at least 3 corners");
            std::vector<Corner> poly;
            for (std::size_t k = 1; k < tok.size(); ++k) {
                std::array<std::string_view, 3> parts{};
                std::size_t nparts = 0;
                std::string_view rest = tok[k];
                while (nparts < 3) {
                    const std::size_t slash = rest.find('/');
                    parts[nparts++] = rest.substr(0, slash);
                    if (slash == std::string_view::npos) break;
                    rest.remove_prefix(slash + 1);
                }
                if (nparts < 2 || parts[1].empty())
                    throw ParseError("line " + std::to_string(line_no) +
                                     ": face corner without texture coordinate (UVs are required)");
                Corner c{};
                c.p = detail::resolve_index(detail::parse_long(parts[0], line_no), positions.size(), line_no, "position");
                c.t = detail::resolve_index(detail::parse_long(parts[1], line_no), uvs.size(), line_no, "texcoord");
                c.n = (nparts == 3 && !parts[2].empty())
                          ? detail::resolve_index(detail::parse_long(parts[2], line_no), normals.size(), line_no, "normal")
                          : -1;
                poly.push_back(c);
            }
            for (std::size_t k = 1; k + 1 < poly.size(); ++k) faces.push_back({poly[0], poly[k], poly[k + 1]});
        }
    }

    // Area-weighted normals per position index for corners that carry none.
    std::vector<Vec3> computed(positions.size());
    bool need_computed = false;
    for (const auto& f : faces) {
        const Vec3 fn = cross(positions[f[1].p] - positions[f[0].p], positions[f[2].p] - positions[f[0].p]);
        for (const auto& c : f) {
            computed[c.p] += fn;  // |fn| = 2 * area
            need_computed = need_computed || c.n < 0;
        }
    }
    if (need_computed)
        for (auto& n : computed) n = normalize(n);

    Mesh mesh;
    std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, std::uint32_t> dedup;
    for (const auto& f : faces) {
        std::array<std::uint32_t, 3> tri{};
        for (int k = 0; k < 3; ++k) {
            const Corner& c = f[static_cast<std::size_t>(k)];
            const auto key = std::make_tuple(c.p, c.t, c.n);
            auto it = dedup.find(key);
            if (it == dedup.end()) {
                Vertex v;
                v.position = positions[static_cast<std::size_t>(c.p)];
                v.uv = uvs[static_cast<std::size_t>(c.t)];
                if (c.n >= 0) {
                    const Vec3 n = normals[static_cast<std::size_t>(c.n)];
                    if (!(length(n) > 0.0)) throw ParseError("zero-length normal record");
                    v.normal = normalize(n);
                } else {
                    v.normal = computed[static_cast<std::size_t>(c.p)];
                    if (!(length(v.normal) > 0.0)) v.normal = {0, 0, 1};
                }
                if (!is_finite(v.uv)) throw ParseError("non-finite texture coordinate");
                it = dedup.emplace(key, static_cast<std::uint32_t>(mesh.vertices.size())).first;
                mesh.vertices.push_back(v);
            }
            tri[static_cast<std::size_t>(k)] = it->second;
        }
        mesh.triangles.push_back(tri);
    }
    return mesh;
}

inline Mesh load_mesh(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open mesh file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_mesh(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

/// Writes the mesh in the text format with shortest round-trip number formatting.
inline std::string format_mesh(const Mesh& mesh) {
    std::string out = "# matbake mesh\n";
    using detail::format_double;
    for (const auto& v : mesh.vertices)
        out += "v " + format_double(v.position.x) + " " + format_double(v.position.y) + " " +
               format_double(v.position.z) + "\n";
    for (const auto& v : mesh.vertices)
        out += "vt " + format_double(v.uv.x) + " " + format_double(v.uv.y) + "\n";
    for (const auto& v : mesh.vertices)
        out += "vn " + format_double(v.normal.x) + " " + format_double(v.normal.y) + " " +
               format_double(v.normal.z) + "\n";
    for (const auto& t : mesh.triangles) {
        out += "f";
        for (auto i : t) {
            const std::string s = std::to_string(i + 1);
            out += " " + s + "/" + s + "/" + s;
        }
        out += "\n";
    }
    return out;
}

inline void save_mesh(const std::string& path, const Mesh& mesh) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write mesh file: " + path);
    out << format_mesh(mesh);
    if (!out) throw IoError("failed writing mesh file: " + path);
}

// ---------------------------------------------------------------------------
// UV atlas validation

struct ChartBox {
    Vec2 lo;
    Vec2 hi;
    std::size_t triangle_count = 0;
};

struct ChartReport {
    std::int64_t overlap_texel_count = 0;
    double covered_fraction = 0.0;
    std::vector<ChartBox> charts;
    /// Triangles whose UV area is at or below the degeneracy epsilon.
    std::size_t degenerate_uv_triangles = 0;
    /// Texels whose center lies inside at least one UV triangle.
    Mask covered;
    /// Chart id per triangle.
    std::vector<std::uint32_t> triangle_chart;
};

/// Groups triangles into charts: two triangles share a chart when they share a
/// corner with identical position and UV.
inline std::vector<std::uint32_t> compute_charts(const Mesh& mesh, std::size_t& chart_count) {
    std::vector<std::uint32_t> parent(mesh.triangles.size());
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    using Key = std::array<double, 5>;
    std::map<Key, std::uint32_t> first_owner;
    for (std::uint32_t t = 0; t < mesh.triangles.size(); ++t)
        for (auto vi : mesh.triangles[t]) {
            const Vertex& v = mesh.vertices[vi];
            const Key key{v.position.x, v.position.y, v.position.z, v.uv.x, v.uv.y};
            auto [it, inserted] = first_owner.emplace(key, t);
            if (!inserted) {
                const auto a = find(it->second);
                const auto b = find(t);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
        }
    std::vector<std::uint32_t> label(mesh.triangles.size());
    std::map<std::uint32_t, std::uint32_t> dense;
    for (std::uint32_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto root = find(t);
        auto [it, _] = dense.emplace(root, static_cast<std::uint32_t>(dense.size()));
        label[t] = it->second;
    }
    chart_count = dense.size();
    return label;
}

/// Rasterizes every triangle in UV space at texel centers and reports texels
/// claimed by triangles of two different charts. Texels on a shared boundary are
/// not overlaps: a texel must lie strictly inside both triangles.
inline ChartReport validate_atlas(const Mesh& mesh, int atlas_resolution, double degenerate_epsilon = 1e-12) {
    if (atlas_resolution < 1) throw Error("validate_atlas: atlas_resolution must be >= 1");
    ChartReport report;
    std::size_t chart_count = 0;
    report.triangle_chart = compute_charts(mesh, chart_count);
    report.charts.assign(chart_count, ChartBox{{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()},
                                               {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()},
                                               0});
    const int res = atlas_resolution;
    report.covered = Mask(res, res, 1, 0);
    constexpr std::int32_t kUnowned = -1;
    constexpr std::int32_t kOverlap = -2;
    std::vector<std::int32_t> owner(static_cast<std::size_t>(res) * static_cast<std::size_t>(res), kUnowned);
    const double eps = 1e-12;

    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        const auto chart = static_cast<std::int32_t>(report.triangle_chart[t]);
        ChartBox& box = report.charts[static_cast<std::size_t>(chart)];
        ++box.triangle_count;
        // Texel-space corners (x right, y down).
        std::array<Vec2, 3> p;
        for (int k = 0; k < 3; ++k) {
            const Vec2 uv = mesh.vertices[tri[static_cast<std::size_t>(k)]].uv;
            box.lo = {std::min(box.lo.x, uv.x), std::min(box.lo.y, uv.y)};
            box.hi = {std::max(box.hi.x, uv.x), std::max(box.hi.y, uv.y)};
            p[static_cast<std::size_t>(k)] = {uv.x * res, (1.0 - uv.y) * res};
        }
        const double area2 = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
        if (std::abs(uv_area(mesh, tri)) <= degenerate_epsilon) {
            ++report.degenerate_uv_triangles;
            continue;
        }
        const int x0 = std::max(0, static_cast<int>(std::floor(std::min({p[0].x, p[1].x, p[2].x}) - 0.5)));
        const int x1 = std::min(res - 1, static_cast<int>(std::ceil(std::max({p[0].x, p[1].x, p[2].x}) - 0.5)));
        const int y0 = std::max(0, static_cast<int>(std::floor(std::min({p[0].y, p[1].y, p[2].y}) - 0.5)));
        const int y1 = std::min(res - 1, static_cast<int>(std::ceil(std::max({p[0].y, p[1].y, p[2].y}) - 0.5)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                const Vec2 c{x + 0.5, y + 0.5};
                std::array<double, 3> b;
                for (int k = 0; k < 3; ++k) {
                    const Vec2 a = p[static_cast<std::size_t>((k + 1) % 3)];
                    const Vec2 bb = p[static_cast<std::size_t>((k + 2) % 3)];
                    b[static_cast<std::size_t>(k)] =
                        ((bb.x - a.x) * (c.y - a.y) - (c.x - a.x) * (bb.y - a.y)) / area2;
                }
                const double bmin = std::min({b[0], b[1], b[2]});
                if (bmin < -eps) continue;
                report.covered(x, y) = 1;
                if (bmin <= eps) continue;
                auto& o = owner[static_cast<std::size_t>(y) * static_cast<std::size_t>(res) + static_cast<std::size_t>(x)];
                if (o == kUnowned) {
                    o = chart;
                } else if (o != chart && o != kOverlap) {
                    o = kOverlap;
                    ++report.overlap_texel_count;
                }
            }
    }
    report.covered_fraction = static_cast<double>(count_set(report.covered)) /
                              (static_cast<double>(res) * static_cast<double>(res));
    return report;
}

// ---------------------------------------------------------------------------
// Cameras

struct Projection {
    Vec2 pixel;
    double depth = 0.0;
    bool in_front() const { return depth > 0.0; }
};

struct Camera {
    Mat3 world_from_camera;
    Vec3 position;
    double fov_y = kPi / 3.0;
    int width = 1;
    int height = 1;

    void validate() const {
        if (world_from_camera.orthonormality_error() > 1e-6) throw Error("camera: rotation is not orthonormal");
        if (!(fov_y > 0.0 && fov_y < kPi)) throw Error("camera: fov must lie in (0, pi)");
        if (width < 1 || height < 1) throw Error("camera: resolution must be >= 1");
    }

    /// Focal length in pixels.
    double focal() const { return 0.5 * height / std::tan(0.5 * fov_y); }
    Vec3 forward() const { return -world_from_camera.column(2); }

    /// Camera-space direction through continuous pixel coordinate, with z = -1.
    Vec3 camera_ray(Vec2 pixel) const {
        const double f = focal();
        return {(pixel.x - 0.5 * width) / f, -(pixel.y - 0.5 * height) / f, -1.0};
    }

    Vec3 to_camera(const Vec3& world) const { return world_from_camera.transposed() * (world - position); }

    /// Camera with the same pose and field of view and a resolution scaled by @p k.
    Camera scaled(int k) const {
        Camera c = *this;
        c.width = width * k;
        c.height = height * k;
        return c;
    }
};

inline Projection project(const Camera& cam, const Vec3& world_point) {
    const Vec3 pc = cam.to_camera(world_point);
    const double depth = -pc.z;
    const double f = cam.focal();
    return {{0.5 * cam.width + f * pc.x / depth, 0.5 * cam.height - f * pc.y / depth}, depth};
}

inline Vec3 unproject(const Camera& cam, Vec2 pixel, double depth) {
    return cam.position + cam.world_from_camera * (cam.camera_ray(pixel) * depth);
}

/// Camera at @p eye looking at @p target with world +Y as the up hint.
inline Camera look_at(const Vec3& eye, const Vec3& target, double fov_y, int width, int height) {
    const Vec3 fwd = normalize(target - eye);
    Vec3 up_hint{0, 1, 0};
    if (length(cross(fwd, up_hint)) < 1e-9) up_hint = {0, 0, -1};
    const Vec3 right = normalize(cross(fwd, up_hint));
    const Vec3 up = cross(right, fwd);
    Camera c;
    c.world_from_camera = Mat3::from_columns(right, up, -fwd);
    c.position = eye;
    c.fov_y = fov_y;
    c.width = width;
    c.height = height;
    return c;
}

/// Position of orbit view @p index: azimuth 2*pi*index/count measured from +Z
/// towards +X, elevation measured from the XZ plane towards +Y.
inline Vec3 orbit_position(const Vec3& center, std::int64_t index, int count, double radius, double elevation) {
    const auto n = static_cast<std::int64_t>(count);
    const std::int64_t i = ((index % n) + n) % n;
    const double az = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(count);
    return center + Vec3{std::cos(elevation) * std::sin(az), std::sin(elevation), std::cos(elevation) * std::cos(az)} * radius;
}

inline std::vector<Camera> orbit_cameras(int count, double radius, double elevation, double fov_y, int width,
                                         int height, const Vec3& center) {
    if (count < 1) throw Error("orbit_cameras: count must be >= 1");
    if (!(radius > 0.0)) throw Error("orbit_cameras: radius must be > 0");
    std::vector<Camera> cams;
    cams.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        cams.push_back(look_at(orbit_position(center, i, count, radius, elevation), center, fov_y, width, height));
    return cams;
}

struct OrbitParams {
    int count = 16;
    /// Non-positive selects 2.5 x bounding-box diagonal.
    double radius = 0.0;
    double elevation = 15.0 * kPi / 180.0;
    /// Non-positive selects a field of view that frames the bounding sphere.
    double fov_y = 0.0;
    int width = 512;
    int height = 512;
};

/// Orbit around the mesh bounding-box center with defaults filled in from the mesh extent.
inline std::vector<Camera> orbit_cameras(const Mesh& mesh, const OrbitParams& p) {
    const auto b = mesh.bounds();
    const double diag = std::max(b.diagonal(), 1e-9);
    const double radius = p.radius > 0.0 ? p.radius : 2.5 * diag;
    double fov = p.fov_y;
    if (!(fov > 0.0)) fov = 2.0 * std::asin(std::min(0.5 * diag / radius, 0.95)) * 1.15;
    return orbit_cameras(p.count, radius, p.elevation, fov, p.width, p.height, b.center());
}

// ---------------------------------------------------------------------------
// Camera set files (JSON)

inline nlohmann::json camera_to_json(const Camera& c) {
    nlohmann::json j;
    j["position"] = {c.position.x, c.position.y, c.position.z};
    j["world_from_camera"] = c.world_from_camera.m;
    j["fov_y"] = c.fov_y;
    j["width"] = c.width;
    j["height"] = c.height;
    return j;
}

inline Camera camera_from_json(const nlohmann::json& j) {
    Camera c;
    try {
        const auto p = j.at("position").get<std::array<double, 3>>();
        c.position = {p[0], p[1], p[2]};
        c.world_from_camera.m = j.at("world_from_camera").get<std::array<double, 9>>();
        c.fov_y = j.at("fov_y").get<double>();
        c.width = j.at("width").get<int>();
        c.height = j.at("height").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("camera record: ") + e.what());
    }
    c.validate();
    return c;
}

inline std::string format_cameras(const std::vector<Camera>& cams) {
    nlohmann::json j;
    j["format"] = "matbake-cameras";
    j["version"] = 1;
    j["cameras"] = nlohmann::json::array();
    for (const auto& c : cams) j["cameras"].push_back(camera_to_json(c));
    return j.dump(2) + "\n";
}

inline std::vector<Camera> parse_cameras(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("camera file: ") + e.what());
    }
    if (!j.contains("cameras") || !j["cameras"].is_array()) throw ParseError("camera file: missing 'cameras' array");
    std::vector<Camera> cams;
    for (const auto& c : j["cameras"]) cams.push_back(camera_from_json(c));
    return cams;
}

inline std::vector<Camera> load_cameras(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open camera file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_cameras(ss.str());
}

inline void save_cameras(const std::string& path, const std::vector<Camera>& cams) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write camera file: " + path);
    out << format_cameras(cams);
}

}  // namespace matbake
