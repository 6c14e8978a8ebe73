// Copyright 2026 The matbake Authors
// SPDX-License-Identifier: Apache-2.0

// matbake command-line front end.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "matbake/commands.hpp"

namespace {

matbake::OrbitSpec parse_orbit(const std::string& text) {
    std::vector<double> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string tok = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        parts.push_back(matbake::detail::parse_double(tok, 0));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    if (parts.size() != 3) throw matbake::UsageError("--orbit expects N,R,ELEV");
    if (parts[0] < 1 || parts[0] != static_cast<int>(parts[0])) throw matbake::UsageError("--orbit N must be a positive integer");
    return {static_cast<int>(parts[0]), parts[1], parts[2]};
}

void parse_size(const std::string& text, int& w, int& h) {
    const std::size_t x = text.find('x');
    if (x == std::string::npos) throw matbake::UsageError("--size expects WxH");
    w = static_cast<int>(matbake::detail::parse_long(text.substr(0, x), 0));
    h = static_cast<int>(matbake::detail::parse_long(text.substr(x + 1), 0));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"matbake: multi-view PBR material baking toolkit"};
    app.require_subcommand(1);
    matbake::RunConfig cfg;
    std::string orbit_text, size_text;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.out_dir, "Output directory")->required();
        sub->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
    };
    const auto add_cameras = [&](CLI::App* sub) {
        sub->add_option("--mesh", cfg.mesh_path, "OBJ mesh with UVs")->required();
        auto* cams = sub->add_option("--cameras", cfg.cameras_path, "Camera JSON file");
        auto* orbit = sub->add_option("--orbit", orbit_text, "Orbit cameras N,R,ELEV (R = 0: auto, ELEV in degrees)");
        cams->excludes(orbit);
        sub->add_option("--size", size_text, "Orbit view size WxH (default 512x512)");
    };

    auto* gbuffer = app.add_subcommand("gbuffer", "Render normal/position/depth/UV buffers per view");
    add_common(gbuffer);
    add_cameras(gbuffer);

    auto* render = app.add_subcommand("render-views", "Render material views of a material directory");
    add_common(render);
    add_cameras(render);
    render->add_option("--materials", cfg.materials_dir, "Material directory")->required();

    auto* bake = app.add_subcommand("bake", "Bake per-view material images into UV atlases");
    add_common(bake);
    add_cameras(bake);
    bake->add_option("--views", cfg.views_dir, "Directory with view_NNN_<channel>.png images")->required();
    bake->add_option("--atlas", cfg.atlas, "Atlas resolution");
    bake->add_option("--upscale", cfg.upscale, "Guide upscale factor");
    bake->add_option("--inpaint-radius", cfg.inpaint_radius, "Inpainting radius in texels");
    bake->add_flag("--srgb-base-color", cfg.base_color_srgb, "Store base_color.png sRGB-encoded (default linear)");

    auto* relight = app.add_subcommand("relight", "Relight a baked material under HDR probes");
    add_common(relight);
    add_cameras(relight);
    relight->add_option("--materials", cfg.materials_dir, "Baked material directory")->required();
    relight->add_option("--probe", cfg.probes, "Radiance HDR probe (repeatable)");
    relight->add_option("--exposure", cfg.exposure, "Exposure multiplier");
    relight->add_option("--levels", cfg.prefilter_levels, "Specular prefilter levels");
    relight->add_option("--samples", cfg.prefilter_samples, "Prefilter samples per texel");
    relight->add_option("--reference-spp", cfg.reference_spp, "Also write Monte Carlo references at this sample count");
    relight->add_option("--seed", cfg.seed, "Seed for Monte Carlo references");

    auto* roundtrip = app.add_subcommand("roundtrip", "Render, bake and score against ground truth");
    add_common(roundtrip);
    add_cameras(roundtrip);
    roundtrip->add_option("--materials", cfg.materials_dir, "Ground-truth material directory (default: built-in)");
    roundtrip->add_option("--atlas", cfg.atlas, "Atlas resolution");
    roundtrip->add_option("--upscale", cfg.upscale, "Guide upscale factor");
    roundtrip->add_option("--inpaint-radius", cfg.inpaint_radius, "Inpainting radius in texels");
    roundtrip->add_flag("--srgb-base-color", cfg.base_color_srgb, "Store base_color.png sRGB-encoded (default linear)");

    auto* convert = app.add_subcommand("convert", "Convert between height and normal maps");
    add_common(convert);
    convert->add_option("--direction", cfg.direction, "height-to-normal | normal-to-height")->required();
    convert->add_option("--input", cfg.input, "Input PNG")->required();
    convert->add_option("--amplitude", cfg.amplitude, "Height amplitude for height-to-normal");

    auto* fixture = app.add_subcommand("fixture", "Write a fixture mesh, materials and probes");
    add_common(fixture);
    fixture->add_option("--fixture", cfg.fixture, "sphere | cube | quad")->required();
    fixture->add_option("--resolution", cfg.fixture_resolution, "Material resolution");
    fixture->add_flag("--srgb-base-color", cfg.base_color_srgb, "Store base_color.png sRGB-encoded (default linear)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        cfg.subcommand = app.get_subcommands().front()->get_name();
        if (!orbit_text.empty()) cfg.orbit = parse_orbit(orbit_text);
        if (!size_text.empty()) parse_size(size_text, cfg.width, cfg.height);
        matbake::run(cfg);
    } catch (const matbake::UsageError& e) {
        std::fprintf(stderr, "matbake: usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "matbake: error: %s\n", e.what());
        return 1;
    }
    return 0;
}
