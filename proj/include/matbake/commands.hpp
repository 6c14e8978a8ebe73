// Copyright 2026 The matbake Authors
// SPDX-License-Identifier: Apache-2.0

/// @file commands.hpp
/// Batch commands behind the matbake CLI. Every command writes a manifest.json
/// into its output directory that records the full configuration; worker
/// count is deliberately left out so outputs are byte-identical across runs
/// with different thread counts.

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "matbake/bake.hpp"
#include "matbake/error.hpp"
#include "matbake/fixtures.hpp"
#include "matbake/geometry.hpp"
#include "matbake/heightfield.hpp"
#include "matbake/io.hpp"
#include "matbake/material.hpp"
#include "matbake/metrics.hpp"
#include "matbake/parallel.hpp"
#include "matbake/raster.hpp"
#include "matbake/shade.hpp"

namespace matbake {

namespace fs = std::filesystem;

struct OrbitSpec {
    int count = 16;
    /// 0 selects a radius that frames the mesh.
    double radius = 0.0;
    double elevation_deg = 15.0;
};

struct RunConfig {
    std::string subcommand;
    std::string mesh_path;
    std::string cameras_path;
    std::optional<OrbitSpec> orbit;
    int width = 512;
    int height = 512;
    std::string views_dir;
    /// Material directory: bake output for relight, ground truth for roundtrip
    /// and render-views.
    std::string materials_dir;
    int atlas = 2048;
    int upscale = 4;
    int inpaint_radius = 3;
    /// Store base_color.png sRGB-encoded instead of linear.
    bool base_color_srgb = false;
    std::vector<std::string> probes;
    std::string out_dir;
    std::uint64_t seed = 1;
    int threads = 1;

    // relight
    double exposure = 1.0;
    int prefilter_levels = 6;
    int prefilter_samples = 512;
    int reference_spp = 0;

    // convert
    std::string direction;
    std::string input;
    double amplitude = 1.0;

    // fixture
    std::string fixture;
    int fixture_resolution = 256;

    Exec exec() const { return Exec{threads}; }
};

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline void require_file(const std::string& path, const char* what) {
    if (path.empty()) throw UsageError(std::string("missing required option: ") + what);
    if (!fs::is_regular_file(path)) throw IoError(std::string(what) + " not found: " + path);
}

inline void require_dir(const std::string& path, const char* what) {
    if (path.empty()) throw UsageError(std::string("missing required option: ") + what);
    if (!fs::is_directory(path)) throw IoError(std::string(what) + " directory not found: " + path);
}

inline void require_range(double v, double lo, double hi, const char* what) {
    if (!(v >= lo && v <= hi))
        throw UsageError(std::string(what) + " must be in [" + format_double(lo) + ", " + format_double(hi) + "]");
}

inline Transfer base_transfer(const RunConfig& c) { return c.base_color_srgb ? Transfer::SRGB : Transfer::Linear; }

inline bool needs_cameras(const std::string& cmd) {
    return cmd == "gbuffer" || cmd == "bake" || cmd == "relight" || cmd == "roundtrip" || cmd == "render-views";
}

}  // namespace detail

/// Checks paths and numeric ranges; throws UsageError or IoError.
inline void validate(const RunConfig& c) {
    using namespace detail;
    require_range(c.threads, 0, 1024, "--threads");
    require_range(c.atlas, 4, 16384, "--atlas");
    require_range(c.upscale, 1, 16, "--upscale");
    require_range(c.inpaint_radius, 1, 256, "--inpaint-radius");
    require_range(c.width, 1, 16384, "view width");
    require_range(c.height, 1, 16384, "view height");
    if (c.out_dir.empty()) throw UsageError("missing required option: --out");
    if (needs_cameras(c.subcommand)) {
        require_file(c.mesh_path, "--mesh");
        if (!c.cameras_path.empty() && c.orbit) throw UsageError("--cameras and --orbit are mutually exclusive");
        if (!c.cameras_path.empty()) require_file(c.cameras_path, "--cameras");
        if (c.orbit) {
            require_range(c.orbit->count, 1, 4096, "--orbit count");
            require_range(c.orbit->radius, 0, 1e9, "--orbit radius");
            require_range(c.orbit->elevation_deg, -89.9, 89.9, "--orbit elevation");
        }
    }
    if (c.subcommand == "bake") require_dir(c.views_dir, "--views");
    if (c.subcommand == "relight" || c.subcommand == "roundtrip" || c.subcommand == "render-views") {
        if (c.subcommand != "roundtrip" || !c.materials_dir.empty()) require_dir(c.materials_dir, "--materials");
    }
    if (c.subcommand == "relight") {
        if (c.probes.empty()) throw UsageError("relight: at least one --probe is required");
        for (const auto& p : c.probes) require_file(p, "--probe");
        require_range(c.exposure, 1e-9, 1e9, "--exposure");
        require_range(c.prefilter_levels, 2, 16, "--levels");
        require_range(c.prefilter_samples, 1, 1 << 20, "--samples");
        require_range(c.reference_spp, 0, 1 << 20, "--reference-spp");
    }
    if (c.subcommand == "convert") {
        if (c.direction != "height-to-normal" && c.direction != "normal-to-height")
            throw UsageError("--direction must be height-to-normal or normal-to-height");
        require_file(c.input, "--input");
        require_range(c.amplitude, 1e-12, 1e12, "--amplitude");
    }
    if (c.subcommand == "fixture") {
        if (c.fixture != "sphere" && c.fixture != "cube" && c.fixture != "quad")
            throw UsageError("--fixture must be sphere, cube or quad");
        require_range(c.fixture_resolution, 4, 16384, "--resolution");
    }
}

// ---------------------------------------------------------------------------
// Shared helpers

namespace detail {

inline std::string view_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "view_%03zu", i);
    return buf;
}

inline std::vector<Camera> resolve_cameras(const RunConfig& c, const Mesh& mesh, int default_count) {
    if (!c.cameras_path.empty()) return load_cameras(c.cameras_path);
    OrbitSpec o = c.orbit.value_or(OrbitSpec{default_count, 0.0, 15.0});
    OrbitParams p;
    p.count = o.count;
    p.radius = o.radius;
    p.elevation = o.elevation_deg * kPi / 180.0;
    p.width = c.width;
    p.height = c.height;
    return orbit_cameras(mesh, p);
}

inline nlohmann::json camera_config_json(const RunConfig& c, int default_count) {
    nlohmann::json j;
    if (!c.cameras_path.empty()) {
        j["cameras"] = c.cameras_path;
    } else {
        const OrbitSpec o = c.orbit.value_or(OrbitSpec{default_count, 0.0, 15.0});
        j["orbit"] = {{"count", o.count}, {"radius", o.radius}, {"elevation_deg", o.elevation_deg}};
    }
    j["width"] = c.width;
    j["height"] = c.height;
    return j;
}

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path.string());
    f << text;
    if (!f) throw IoError("write failed: " + path.string());
}

inline void write_manifest(const fs::path& dir, nlohmann::json j) {
    write_text(dir / "manifest.json", j.dump(2) + "\n");
}

inline ImageF gray_from_mask(const Mask& m) {
    ImageF out(m.width(), m.height(), 1);
    for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] = m.data()[i] ? 1.0f : 0.0f;
    return out;
}

inline Mask mask_from_gray(const ImageF& g) {
    Mask out(g.width(), g.height(), 1);
    for (std::size_t i = 0; i < out.data().size(); ++i) out.data()[i] = g.data()[i * static_cast<std::size_t>(g.channels())] >= 0.5f;
    return out;
}

inline ImageF channel_of(const ImageF& img, int c) {
    ImageF out(img.width(), img.height(), 1);
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) out(x, y) = img(x, y, c);
    return out;
}

inline ImageF to_gray(const ImageF& img, const std::string& what) {
    if (img.channels() == 1) return img;
    if (img.channels() >= 3) return channel_of(img, 0);
    throw IoError(what + ": unsupported channel count");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Material directories

/// Height amplitude used for the derived normal map of a baked material.
inline constexpr double kDerivedNormalAmplitude = 0.05;

/// Writes base_color.png (8-bit, linear unless @p base_transfer is sRGB),
/// roughness/metallic/height.png (16-bit linear), coverage.png, filled.png and
/// the derived normal.png. Returns the file names written.
inline std::vector<std::string> save_materials(const fs::path& dir, const MaterialSet& m,
                                               Transfer base_transfer = Transfer::Linear,
                                               double normal_amplitude = kDerivedNormalAmplitude) {
    fs::create_directories(dir);
    write_png((dir / "base_color.png").string(), {m.base_color, BitDepth::U8, base_transfer});
    write_png((dir / "roughness.png").string(), {m.roughness, BitDepth::U16, Transfer::Linear});
    write_png((dir / "metallic.png").string(), {m.metallic, BitDepth::U16, Transfer::Linear});
    write_png((dir / "height.png").string(), {m.height, BitDepth::U16, Transfer::Linear});
    write_png((dir / "coverage.png").string(), {detail::gray_from_mask(m.coverage), BitDepth::U8, Transfer::Linear});
    write_png((dir / "filled.png").string(), {detail::gray_from_mask(m.filled), BitDepth::U8, Transfer::Linear});
    const TangentNormalMap n = height_to_normal({m.height, normal_amplitude});
    write_png((dir / "normal.png").string(), {encode_normals(n), BitDepth::U16, Transfer::Linear});
    return {"base_color.png", "roughness.png", "metallic.png", "height.png", "coverage.png", "filled.png", "normal.png"};
}

/// Reads a material directory. coverage.png and filled.png are optional and
/// default to fully set.
inline MaterialSet load_materials(const fs::path& dir) {
    const auto need = [&](const char* name) {
        const fs::path p = dir / name;
        if (!fs::is_regular_file(p)) throw IoError("material directory " + dir.string() + " lacks " + name);
        return read_png(p.string()).image;
    };
    ImageF base = need("base_color.png");
    if (base.channels() < 3) throw IoError("base_color.png must be RGB");
    if (base.channels() > 3) {
        ImageF rgb(base.width(), base.height(), 3);
        for (int y = 0; y < base.height(); ++y)
            for (int x = 0; x < base.width(); ++x)
                for (int c = 0; c < 3; ++c) rgb(x, y, c) = base(x, y, c);
        base = rgb;
    }
    const int res = base.width();
    if (base.height() != res) throw IoError("material atlases must be square");
    MaterialSet m(res);
    m.base_color = base;
    m.roughness = detail::to_gray(need("roughness.png"), "roughness.png");
    m.metallic = detail::to_gray(need("metallic.png"), "metallic.png");
    m.height = detail::to_gray(need("height.png"), "height.png");
    for (const ImageF* img : {&m.roughness, &m.metallic, &m.height})
        if (img->width() != res || img->height() != res) throw IoError("material atlases differ in size in " + dir.string());
    const auto opt_mask = [&](const char* name, Mask& out) {
        const fs::path p = dir / name;
        if (!fs::is_regular_file(p)) {
            std::fill(out.data().begin(), out.data().end(), std::uint8_t{1});
            return;
        }
        out = detail::mask_from_gray(read_png(p.string()).image);
        if (out.width() != res || out.height() != res) throw IoError(std::string(name) + " differs in size");
    };
    opt_mask("coverage.png", m.coverage);
    opt_mask("filled.png", m.filled);
    return m;
}

// ---------------------------------------------------------------------------
// View image directories

/// Writes view_NNN_{base_color,roughness,metallic,height}.png at 16 bits.
inline std::vector<std::string> save_view_images(const fs::path& dir, std::size_t index, const IntrinsicViews& v) {
    const std::string stem = detail::view_name(index);
    write_png((dir / (stem + "_base_color.png")).string(), {v.base_color, BitDepth::U16, Transfer::SRGB});
    write_png((dir / (stem + "_roughness.png")).string(), {v.roughness, BitDepth::U16, Transfer::Linear});
    write_png((dir / (stem + "_metallic.png")).string(), {v.metallic, BitDepth::U16, Transfer::Linear});
    write_png((dir / (stem + "_height.png")).string(), {v.height, BitDepth::U16, Transfer::Linear});
    return {stem + "_base_color.png", stem + "_roughness.png", stem + "_metallic.png", stem + "_height.png"};
}

/// Loads the material images of one view. Roughness, metallicity and height
/// may instead come from a packed view_NNN_hrm.png. A missing channel is an
/// error that names it.
inline IntrinsicViews load_view_images(const fs::path& dir, std::size_t index, const Camera& cam) {
    const std::string stem = detail::view_name(index);
    const auto path = [&](const std::string& ch) { return dir / (stem + "_" + ch + ".png"); };
    const auto check_dims = [&](const ImageF& img, const std::string& ch) {
        if (img.width() != cam.width || img.height() != cam.height)
            throw Error("view " + std::to_string(index) + " " + ch + " is " + std::to_string(img.width()) + "x" +
                        std::to_string(img.height()) + " but its camera is " + std::to_string(cam.width) + "x" +
                        std::to_string(cam.height));
    };
    IntrinsicViews v;
    v.camera = cam;
    if (!fs::is_regular_file(path("base_color")))
        throw IoError("view " + std::to_string(index) + ": missing base_color channel (" + path("base_color").string() + ")");
    ImageF base = read_png(path("base_color").string()).image;
    check_dims(base, "base_color");
    if (base.channels() < 3) throw IoError("view " + std::to_string(index) + ": base_color must be RGB");
    v.base_color = ImageF(cam.width, cam.height, 3);
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x)
            for (int c = 0; c < 3; ++c) v.base_color(x, y, c) = base(x, y, c);

    const bool have_hrm = fs::is_regular_file(path("hrm"));
    std::optional<Hrm> hrm;
    if (have_hrm) {
        ImageF packed = read_png(path("hrm").string()).image;
        check_dims(packed, "hrm");
        if (packed.channels() < 3) throw IoError("view " + std::to_string(index) + ": hrm image must have 3 channels");
        if (packed.channels() > 3) {
            ImageF rgb(packed.width(), packed.height(), 3);
            for (int y = 0; y < packed.height(); ++y)
                for (int x = 0; x < packed.width(); ++x)
                    for (int c = 0; c < 3; ++c) rgb(x, y, c) = packed(x, y, c);
            packed = rgb;
        }
        hrm = unpack_hrm(packed);
    }
    const auto load_gray = [&](const std::string& ch, const ImageF* from_hrm) {
        if (fs::is_regular_file(path(ch))) {
            ImageF g = detail::to_gray(read_png(path(ch).string()).image, ch);
            check_dims(g, ch);
            return g;
        }
        if (from_hrm) return *from_hrm;
        throw IoError("view " + std::to_string(index) + ": missing " + ch + " channel (expected " + path(ch).string() +
                      " or " + path("hrm").string() + ")");
    };
    v.roughness = load_gray("roughness", hrm ? &hrm->roughness : nullptr);
    v.metallic = load_gray("metallic", hrm ? &hrm->metallic : nullptr);
    v.height = load_gray("height", hrm ? &hrm->height : nullptr);
    return v;
}

// ---------------------------------------------------------------------------
// Commands

/// Renders normal, world position, depth and UV (+ derivatives) buffers.
inline void cmd_gbuffer(const RunConfig& c) {
    validate(c);
    const Mesh mesh = load_mesh(c.mesh_path);
    const std::vector<Camera> cams = detail::resolve_cameras(c, mesh, 16);
    const fs::path out(c.out_dir);
    fs::create_directories(out);
    save_cameras((out / "cameras.json").string(), cams);
    nlohmann::json views = nlohmann::json::array();
    for (std::size_t i = 0; i < cams.size(); ++i) {
        const GBuffer gb = rasterize(mesh, cams[i], c.exec());
        const std::string stem = detail::view_name(i);
        ImageF normal(gb.width, gb.height, 3);
        ImageF uv(gb.width, gb.height, 6);
        for (int y = 0; y < gb.height; ++y)
            for (int x = 0; x < gb.width; ++x) {
                for (int ch = 0; ch < 3; ++ch)
                    normal(x, y, ch) = gb.mask(x, y) ? encode_normal_component(gb.normal(x, y, ch)) : 0.0f;
                uv(x, y, 0) = gb.uv(x, y, 0);
                uv(x, y, 1) = gb.uv(x, y, 1);
                for (int ch = 0; ch < 4; ++ch) uv(x, y, 2 + ch) = gb.duv(x, y, ch);
            }
        write_png((out / (stem + "_normal.png")).string(), {normal, BitDepth::U16, Transfer::Linear});
        write_float_raw((out / (stem + "_position.mbraw")).string(), {gb.position, BitDepth::F32, Transfer::Linear, "position"});
        write_float_raw((out / (stem + "_depth.mbraw")).string(), {gb.depth, BitDepth::F32, Transfer::Linear, "depth"});
        write_float_raw((out / (stem + "_uv.mbraw")).string(),
                        {uv, BitDepth::F32, Transfer::Linear, "uv+dudx,dvdx,dudy,dvdy"});
        views.push_back({{"index", i},
                         {"files",
                          {stem + "_normal.png", stem + "_position.mbraw", stem + "_depth.mbraw", stem + "_uv.mbraw"}},
                         {"covered_pixels", count_set(gb.mask)}});
    }
    detail::write_manifest(out, {{"command", "gbuffer"},
                                 {"mesh", c.mesh_path},
                                 {"camera_config", detail::camera_config_json(c, 16)},
                                 {"cameras_file", "cameras.json"},
                                 {"views", views}});
}

/// Renders oracle intrinsic views of a material set (input for cmd_bake).
inline void cmd_render_views(const RunConfig& c) {
    validate(c);
    const Mesh mesh = load_mesh(c.mesh_path);
    const MaterialSet mat = load_materials(c.materials_dir);
    const std::vector<Camera> cams = detail::resolve_cameras(c, mesh, 16);
    const fs::path out(c.out_dir);
    fs::create_directories(out);
    save_cameras((out / "cameras.json").string(), cams);
    nlohmann::json files = nlohmann::json::array();
    for (std::size_t i = 0; i < cams.size(); ++i)
        for (const auto& f : save_view_images(out, i, render_intrinsics(mesh, cams[i], mat, c.exec()))) files.push_back(f);
    detail::write_manifest(out, {{"command", "render-views"},
                                 {"mesh", c.mesh_path},
                                 {"materials", c.materials_dir},
                                 {"camera_config", detail::camera_config_json(c, 16)},
                                 {"cameras_file", "cameras.json"},
                                 {"files", files}});
}

inline BakeConfig bake_config_of(const RunConfig& c) {
    BakeConfig b;
    b.atlas_resolution = c.atlas;
    b.upscale = c.upscale;
    b.inpaint_radius = c.inpaint_radius;
    return b;
}

inline nlohmann::json bake_summary(const BakeResult& r) {
    const std::size_t texels = static_cast<std::size_t>(r.materials.resolution) * static_cast<std::size_t>(r.materials.resolution);
    return {{"covered_texels", count_set(r.materials.coverage)},
            {"filled_texels", count_set(r.materials.filled)},
            {"coverage_fraction", static_cast<double>(count_set(r.materials.coverage)) / static_cast<double>(texels)},
            {"splatted", r.stats.splatted},
            {"dropped_out_of_range", r.stats.dropped_out_of_range},
            {"dropped_unsampled", r.stats.dropped_unsampled},
            {"zero_weight", r.stats.zero_weight},
            {"warnings", r.diagnostics.warnings}};
}

/// Projects per-view material images into texture space.
inline BakeResult cmd_bake(const RunConfig& c) {
    validate(c);
    const Mesh mesh = load_mesh(c.mesh_path);
    const std::vector<Camera> cams = detail::resolve_cameras(c, mesh, 16);
    std::vector<IntrinsicViews> views;
    views.reserve(cams.size());
    for (std::size_t i = 0; i < cams.size(); ++i) {
        IntrinsicViews v = load_view_images(c.views_dir, i, cams[i]);
        v.gbuffer = rasterize(mesh, cams[i], c.exec());
        views.push_back(std::move(v));
    }
    BakeResult r = bake(mesh, cams, std::move(views), bake_config_of(c), c.exec());
    const fs::path out(c.out_dir);
    const auto files = save_materials(out, r.materials, detail::base_transfer(c));
    save_cameras((out / "cameras.json").string(), cams);
    detail::write_manifest(out, {{"command", "bake"},
                                 {"mesh", c.mesh_path},
                                 {"views", c.views_dir},
                                 {"camera_config", detail::camera_config_json(c, 16)},
                                 {"cameras_file", "cameras.json"},
                                 {"atlas", c.atlas},
                                 {"upscale", c.upscale},
                                 {"upsampling", "bilinear"},
                                 {"inpaint_radius", c.inpaint_radius},
                                 {"normal_amplitude", kDerivedNormalAmplitude},
                                 {"base_color_transfer", c.base_color_srgb ? "srgb" : "linear"},
                                 {"files", files},
                                 {"result", bake_summary(r)}});
    return r;
}

/// Relights a baked material under each probe from each view.
inline void cmd_relight(const RunConfig& c) {
    validate(c);
    const Mesh mesh = load_mesh(c.mesh_path);
    const MaterialSet mat = load_materials(c.materials_dir);
    const std::vector<Camera> cams = detail::resolve_cameras(c, mesh, 4);
    const fs::path out(c.out_dir);
    fs::create_directories(out);
    save_cameras((out / "cameras.json").string(), cams);
    PrefilterOptions po;
    po.levels = c.prefilter_levels;
    po.samples_per_texel = static_cast<std::uint32_t>(c.prefilter_samples);
    std::vector<EnvironmentProbe> probes;
    std::vector<PrefilteredProbe> filtered;
    for (const auto& p : c.probes) {
        probes.push_back(load_probe(p));
        filtered.push_back(prefilter(probes.back(), po, c.exec()));
    }
    nlohmann::json renders = nlohmann::json::array();
    for (std::size_t v = 0; v < cams.size(); ++v) {
        const IntrinsicViews iv = render_intrinsics(mesh, cams[v], mat, c.exec());
        for (std::size_t p = 0; p < probes.size(); ++p) {
            char name[64];
            std::snprintf(name, sizeof name, "relight_v%03zu_p%03zu", v, p);
            const ImageF lin = shade_splitsum(iv, filtered[p], cams[v], c.exec());
            write_png((out / (std::string(name) + ".png")).string(),
                      {tonemap(lin, c.exposure), BitDepth::U8, Transfer::Linear});
            write_float_raw((out / (std::string(name) + "_linear.mbraw")).string(),
                            {lin, BitDepth::F32, Transfer::Linear, "radiance"});
            nlohmann::json entry{{"view", v},
                                 {"probe", p},
                                 {"image", std::string(name) + ".png"},
                                 {"linear", std::string(name) + "_linear.mbraw"}};
            if (c.reference_spp > 0) {
                McOptions mc;
                mc.samples = static_cast<std::uint32_t>(c.reference_spp);
                mc.seed = c.seed;
                const ImageF ref = shade_reference_mc(iv, probes[p], cams[v], mc, c.exec());
                write_float_raw((out / (std::string(name) + "_reference.mbraw")).string(),
                                {ref, BitDepth::F32, Transfer::Linear, "radiance"});
                entry["reference"] = std::string(name) + "_reference.mbraw";
            }
            renders.push_back(entry);
        }
    }
    detail::write_manifest(out, {{"command", "relight"},
                                 {"mesh", c.mesh_path},
                                 {"materials", c.materials_dir},
                                 {"probes", c.probes},
                                 {"camera_config", detail::camera_config_json(c, 4)},
                                 {"cameras_file", "cameras.json"},
                                 {"view_count", cams.size()},
                                 {"probe_count", probes.size()},
                                 {"exposure", c.exposure},
                                 {"tonemap", kTonemapName},
                                 {"prefilter", {{"levels", po.levels}, {"samples_per_texel", po.samples_per_texel}}},
                                 {"reference_spp", c.reference_spp},
                                 {"seed", c.seed},
                                 {"renders", renders}});
}

struct RoundtripResult {
    BakeResult bake;
    std::vector<MetricReport> reports;
};

/// Oracle round trip in memory: render views of @p truth, bake them, compare
/// every channel on covered texels.
inline RoundtripResult run_roundtrip(const Mesh& mesh, const std::vector<Camera>& cams, const MaterialSet& truth,
                                     const BakeConfig& cfg, const Exec& exec = {}) {
    if (truth.resolution != cfg.atlas_resolution)
        throw Error("roundtrip: ground-truth resolution " + std::to_string(truth.resolution) +
                    " differs from the atlas resolution " + std::to_string(cfg.atlas_resolution));
    std::vector<IntrinsicViews> views;
    for (const auto& cam : cams) views.push_back(render_intrinsics(mesh, cam, truth, exec));
    RoundtripResult r;
    r.bake = bake(mesh, views, cfg, exec);
    if (count_set(r.bake.materials.coverage) == 0) throw Error("roundtrip: bake covered no texels");
    const auto add = [&](const char* name, const ImageF& a, const ImageF& b) {
        r.reports.push_back(evaluate(name, a, b, r.bake.materials.coverage, "covered texels"));
    };
    add("base_color", r.bake.materials.base_color, truth.base_color);
    add("roughness", r.bake.materials.roughness, truth.roughness);
    add("metallic", r.bake.materials.metallic, truth.metallic);
    add("height", r.bake.materials.height, truth.height);
    return r;
}

inline RoundtripResult cmd_roundtrip(const RunConfig& c) {
    validate(c);
    const Mesh mesh = load_mesh(c.mesh_path);
    const std::vector<Camera> cams = detail::resolve_cameras(c, mesh, 16);
    const MaterialSet truth = c.materials_dir.empty() ? make_test_materials(c.atlas) : load_materials(c.materials_dir);
    BakeConfig cfg = bake_config_of(c);
    if (truth.resolution != cfg.atlas_resolution)
        throw UsageError("--atlas " + std::to_string(c.atlas) + " does not match the ground-truth resolution " +
                         std::to_string(truth.resolution));
    RoundtripResult r = run_roundtrip(mesh, cams, truth, cfg, c.exec());
    const fs::path out(c.out_dir);
    const auto files = save_materials(out / "baked", r.bake.materials, detail::base_transfer(c));
    write_report((out / "report").string(), r.reports);
    detail::write_manifest(out, {{"command", "roundtrip"},
                                 {"mesh", c.mesh_path},
                                 {"materials", c.materials_dir.empty() ? "builtin:test" : c.materials_dir},
                                 {"camera_config", detail::camera_config_json(c, 16)},
                                 {"view_count", cams.size()},
                                 {"atlas", c.atlas},
                                 {"upscale", c.upscale},
                                 {"upsampling", "bilinear"},
                                 {"inpaint_radius", c.inpaint_radius},
                                 {"base_color_transfer", c.base_color_srgb ? "srgb" : "linear"},
                                 {"baked_files", files},
                                 {"report", {"report.txt", "report.json"}},
                                 {"result", bake_summary(r.bake)}});
    return r;
}

/// Height map <-> tangent-space normal map.
inline void cmd_convert(const RunConfig& c) {
    validate(c);
    const fs::path out(c.out_dir);
    fs::create_directories(out);
    nlohmann::json m{{"command", "convert"}, {"direction", c.direction}, {"input", c.input}};
    if (c.direction == "height-to-normal") {
        const ImageF h = detail::to_gray(read_png(c.input).image, c.input);
        const TangentNormalMap n = height_to_normal({h, c.amplitude});
        write_png((out / "normal.png").string(), {encode_normals(n), BitDepth::U16, Transfer::Linear});
        m["amplitude"] = c.amplitude;
        m["files"] = {"normal.png"};
    } else {
        const ImageBuffer in = read_png(c.input);
        if (in.image.channels() < 3) throw IoError(c.input + ": normal map must be RGB");
        ImageF rgb(in.image.width(), in.image.height(), 3);
        for (int y = 0; y < rgb.height(); ++y)
            for (int x = 0; x < rgb.width(); ++x)
                for (int ch = 0; ch < 3; ++ch) rgb(x, y, ch) = in.image(x, y, ch);
        const HeightReconstruction r = normal_to_height(decode_normals(rgb));
        write_png((out / "height.png").string(), {r.height.height, BitDepth::U16, Transfer::Linear});
        m["amplitude"] = r.height.amplitude;
        m["residual_rms"] = r.residual_rms;
        m["relative_residual"] = r.relative_residual;
        m["files"] = {"height.png"};
    }
    detail::write_manifest(out, m);
}

/// Writes a fixture mesh, its ground-truth materials and procedural probes.
inline void cmd_fixture(const RunConfig& c) {
    validate(c);
    const fs::path out(c.out_dir);
    fs::create_directories(out);
    save_mesh((out / (c.fixture + ".obj")).string(), make_fixture_mesh(c.fixture));
    save_materials(out / "materials", make_test_materials(c.fixture_resolution), detail::base_transfer(c));
    write_hdr((out / "probe_sky.hdr").string(), sky_probe(128).radiance);
    write_hdr((out / "probe_studio.hdr").string(), studio_probe(128).radiance);
    write_hdr((out / "probe_sunset.hdr").string(), sunset_probe(128).radiance);
    write_hdr((out / "probe_overcast.hdr").string(), overcast_probe(128).radiance);
    detail::write_manifest(out, {{"command", "fixture"},
                                 {"fixture", c.fixture},
                                 {"resolution", c.fixture_resolution},
                                 {"mesh", c.fixture + ".obj"},
                                 {"materials", "materials"},
                                 {"base_color_transfer", c.base_color_srgb ? "srgb" : "linear"},
                                 {"probes", {"probe_sky.hdr", "probe_studio.hdr", "probe_sunset.hdr", "probe_overcast.hdr"}}});
}

/// Dispatches on RunConfig::subcommand.
inline void run(const RunConfig& c) {
    if (c.subcommand == "gbuffer") return cmd_gbuffer(c);
    if (c.subcommand == "render-views") return cmd_render_views(c);
    if (c.subcommand == "bake") return static_cast<void>(cmd_bake(c));
    if (c.subcommand == "relight") return cmd_relight(c);
    if (c.subcommand == "roundtrip") return static_cast<void>(cmd_roundtrip(c));
    if (c.subcommand == "convert") return cmd_convert(c);
    if (c.subcommand == "fixture") return cmd_fixture(c);
    throw UsageError("unknown subcommand '" + c.subcommand + "'");
}

}  // namespace matbake
