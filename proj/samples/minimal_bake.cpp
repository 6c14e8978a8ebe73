// Copyright 2026 The matbake Authors
// SPDX-License-Identifier: Apache-2.0

// Renders oracle views of the sphere fixture, bakes them back into a 128^2
// atlas and prints per-channel PSNR against the ground truth.

#include <cstdio>

#include "matbake/matbake.hpp"

int main() {
    using namespace matbake;
    const Mesh mesh = make_sphere();
    OrbitParams orbit;
    orbit.count = 8;
    orbit.elevation = 0.0;
    orbit.width = orbit.height = 256;
    const auto cameras = orbit_cameras(mesh, orbit);

    BakeConfig cfg;
    cfg.atlas_resolution = 128;
    cfg.upscale = 2;
    const RoundtripResult r = run_roundtrip(mesh, cameras, make_test_materials(cfg.atlas_resolution), cfg, Exec{0});
    for (const auto& m : r.reports) std::printf("%-10s psnr=%.2f dB ssim=%.4f\n", m.name.c_str(), m.psnr, m.ssim);
    for (const auto& w : r.bake.diagnostics.warnings) std::printf("warning: %s\n", w.c_str());
    return 0;
}
