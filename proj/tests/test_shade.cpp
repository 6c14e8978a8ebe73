// Copyright 2026 The matbake Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <gtest/gtest.h>

#include "matbake/fixtures.hpp"
#include "matbake/metrics.hpp"
#include "matbake/shade.hpp"

namespace mb = matbake;

namespace {

mb::PrefilterOptions small_options() {
    mb::PrefilterOptions o;
    o.levels = 4;
    o.samples_per_texel = 128;
    o.irradiance_height = 16;
    o.lut_size = 16;
    o.lut_samples = 256;
    return o;
}

mb::IntrinsicViews sphere_view(int n, const mb::MaterialSet& m, double dist = 3.0) {
    return mb::render_intrinsics(mb::make_sphere(), mb::look_at({0, 0.3, dist}, {0, 0, 0}, 0.9, n, n), m);
}

mb::MaterialSet uniform(double base, double rough, double metal) {
    const float b = static_cast<float>(base);
    return mb::MaterialSet::constant(8, {b, b, b}, static_cast<float>(rough), static_cast<float>(metal), 0.5f);
}

mb::PrefilteredProbe without_specular(mb::PrefilteredProbe p) {
    for (auto& level : p.specular) std::fill(level.data().begin(), level.data().end(), 0.0f);
    return p;
}

// Split-sum second term by brute-force quadrature over the light hemisphere,
// with the GGX / Smith-Schlick / Schlick model written out here.
std::array<double, 2> quadrature_brdf(double nv, double roughness, int steps) {
    const double a = std::max(roughness * roughness, 1e-3), a2 = a * a, k = a / 2;
    const double vx = std::sqrt(1 - nv * nv), vz = nv;
    double s = 0, b = 0;
    for (int i = 0; i < steps; ++i)
        for (int j = 0; j < steps; ++j) {
            const double mu = (i + 0.5) / steps, phi = 2 * mb::kPi * (j + 0.5) / steps;
            const double st = std::sqrt(1 - mu * mu);
            const double lx = st * std::cos(phi), ly = st * std::sin(phi), lz = mu;
            double hx = vx + lx, hy = ly, hz = vz + lz;
            const double hl = std::sqrt(hx * hx + hy * hy + hz * hz);
            hx /= hl, hy /= hl, hz /= hl;
            const double vh = vx * hx + vz * hz;
            const double f = hz * hz * (a2 - 1) + 1;
            const double d = a2 / (mb::kPi * f * f);
            const double g = nv / (nv * (1 - k) + k) * mu / (mu * (1 - k) + k);
            const double fc = std::pow(1 - vh, 5);
            const double common = d * g / (4 * mu * nv) * mu * (1.0 / steps) * (2 * mb::kPi / steps);
            s += (1 - fc) * common;
            b += fc * common;
        }
    return {s, b};
}

}  // namespace

TEST(Prefilter, ConstantProbeStaysConstant) {
    const mb::Vec3 c{0.3, 0.6, 0.9};
    const auto p = mb::prefilter(mb::constant_probe(32, c), small_options());
    ASSERT_EQ(p.levels(), 4);
    for (const auto& level : p.specular)
        for (int y = 0; y < level.height(); ++y)
            for (int x = 0; x < level.width(); ++x)
                for (int ch = 0; ch < 3; ++ch) ASSERT_NEAR(level(x, y, ch), ch == 0 ? c.x : ch == 1 ? c.y : c.z, 1e-3);
    for (int y = 0; y < p.irradiance.height(); ++y)
        for (int x = 0; x < p.irradiance.width(); ++x) ASSERT_NEAR(p.irradiance(x, y, 1), c.y, 1e-3);
}

TEST(Prefilter, LevelZeroIsSourceAndLowRoughnessReproducesIt) {
    const auto probe = mb::sunset_probe(32);
    const auto p = mb::prefilter(probe, small_options());
    EXPECT_TRUE(p.specular[0] == probe.radiance);
    const mb::ImageF filtered = mb::prefilter_specular(probe, 0.0, 32, 128);
    const auto [lo, hi] = std::minmax_element(probe.radiance.data().begin(), probe.radiance.data().end());
    EXPECT_GE(mb::psnr(filtered, probe.radiance, {}, *hi - *lo), 35.0);
    // Rougher levels are blurrier: lower peak.
    double prev = *hi;
    for (int l = 1; l < p.levels(); ++l) {
        const double peak = *std::max_element(p.specular[static_cast<std::size_t>(l)].data().begin(),
                                              p.specular[static_cast<std::size_t>(l)].data().end());
        EXPECT_LE(peak, prev + 1e-6);
        prev = peak;
    }
}

TEST(Prefilter, RejectsSingleLevel) {
    mb::PrefilterOptions o = small_options();
    o.levels = 1;
    EXPECT_THROW(mb::prefilter(mb::constant_probe(8, {1, 1, 1}), o), mb::Error);
}

TEST(BrdfLut, SmoothLimitAndRange) {
    const auto ab = mb::integrate_brdf(1.0, 0.0, 1024);
    EXPECT_NEAR(ab[0], 1.0, 0.02);
    EXPECT_NEAR(ab[1], 0.0, 0.02);
    const auto lut = mb::build_brdf_lut(32, 1024);
    for (const auto& v : lut.values) {
        EXPECT_GE(v[0], 0.0);
        EXPECT_GE(v[1], 0.0);
        EXPECT_LE(v[0], 1.0);
        EXPECT_LE(v[1], 1.0);
    }
    const auto at = lut.lookup(1.0, 0.0);
    EXPECT_NEAR(at[0], 1.0, 0.02);
    EXPECT_NEAR(at[1], 0.0, 0.02);
}

TEST(BrdfLut, MatchesQuadratureOracle) {
    for (double nv : {0.2, 0.5, 0.9})
        for (double r : {0.4, 0.7, 1.0}) {
            const auto q = quadrature_brdf(nv, r, 600);
            const auto s = mb::integrate_brdf(nv, r, 4096);
            EXPECT_NEAR(s[0], q[0], 0.01) << nv << " " << r;
            EXPECT_NEAR(s[1], q[1], 0.01) << nv << " " << r;
        }
}

TEST(ShadeSplitSum, WhiteLambertUnderUnitProbe) {
    const auto pp = without_specular(mb::prefilter(mb::constant_probe(16, {1, 1, 1}), small_options()));
    const auto v = sphere_view(48, uniform(1.0, 1.0, 0.0));
    const mb::ImageF img = mb::shade_splitsum(v, pp, v.camera);
    int n = 0;
    for (int y = 0; y < 48; ++y)
        for (int x = 0; x < 48; ++x) {
            if (!v.gbuffer.mask(x, y)) {
                for (int c = 0; c < 3; ++c) ASSERT_EQ(img(x, y, c), 0.0f);
                continue;
            }
            ++n;
            for (int c = 0; c < 3; ++c) EXPECT_NEAR(img(x, y, c), 1.0, 0.02);
        }
    EXPECT_GT(n, 300);
}

TEST(ShadeSplitSum, MetallicHasNoDiffuse) {
    const auto pp = without_specular(mb::prefilter(mb::sky_probe(16), small_options()));
    const auto v = sphere_view(32, uniform(0.7, 0.3, 1.0));
    const mb::ImageF img = mb::shade_splitsum(v, pp, v.camera);
    for (float x : img.data()) ASSERT_EQ(x, 0.0f);
}

TEST(ShadeSplitSum, MirrorPlateReflectsProbe) {
    const auto probe = mb::sunset_probe(32);
    const auto pp = mb::prefilter(probe, small_options());
    const mb::Camera cam = mb::look_at({0.3, -1.2, 2.0}, {0, 0, 0}, 0.8, 40, 40);
    const auto v = mb::render_intrinsics(mb::make_quad(), cam, uniform(1.0, 0.0, 1.0));
    const mb::ImageF img = mb::shade_splitsum(v, pp, cam);
    int n = 0;
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 40; ++x) {
            if (!v.gbuffer.mask(x, y)) continue;
            const mb::Vec3 p = v.gbuffer.position_at(x, y);
            const mb::Vec3 d = mb::normalize(p - cam.position);
            const mb::Vec3 r{d.x, d.y, -d.z};  // plate normal is +z
            const mb::Vec3 expect = mb::sample_latlong(probe.radiance, r);
            EXPECT_NEAR(img(x, y, 0), expect.x, 0.02 * expect.x + 1e-6);
            EXPECT_NEAR(img(x, y, 2), expect.z, 0.02 * expect.z + 1e-6);
            ++n;
        }
    EXPECT_GT(n, 400);
}

TEST(ShadeSplitSum, LinearInProbeRadiance) {
    auto probe = mb::studio_probe(16);
    auto twice = probe;
    for (auto& x : twice.radiance.data()) x *= 2.0f;
    const auto v = sphere_view(24, mb::make_test_materials(32));
    const mb::ImageF a = mb::shade_splitsum(v, mb::prefilter(probe, small_options()), v.camera);
    const mb::ImageF b = mb::shade_splitsum(v, mb::prefilter(twice, small_options()), v.camera);
    for (std::size_t i = 0; i < a.data().size(); ++i) ASSERT_EQ(b.data()[i], 2.0f * a.data()[i]);
}

TEST(ShadeSplitSum, RotatingProbeAndSceneTogether) {
    const auto probe = mb::studio_probe(32);
    const mb::MaterialSet mat = mb::make_test_materials(64);
    const mb::Vec3 eye{0.4, 0.8, 3.0};
    const mb::IntrinsicViews v0 =
        mb::render_intrinsics(mb::make_sphere(), mb::look_at(eye, {0, 0, 0}, 0.9, 48, 48), mat);
    const mb::ImageF ref = mb::shade_splitsum(v0, mb::prefilter(probe, small_options()), v0.camera);
    const double peak = *std::max_element(ref.data().begin(), ref.data().end());
    for (int k : {1, 2, 3}) {
        const mb::Mat3 rot = mb::rotation_y(-k * mb::kPi / 2);
        mb::Mesh m = mb::make_sphere();
        for (auto& vert : m.vertices) {
            vert.position = rot * vert.position;
            vert.normal = rot * vert.normal;
        }
        const mb::IntrinsicViews vk = mb::render_intrinsics(m, mb::look_at(rot * eye, {0, 0, 0}, 0.9, 48, 48), mat);
        const mb::ImageF img =
            mb::shade_splitsum(vk, mb::prefilter(mb::rotate_probe_quarter(probe, k), small_options()), vk.camera);
        EXPECT_GE(mb::psnr(img, ref, v0.gbuffer.mask, peak), 35.0) << k;
    }
}

TEST(ShadeReference, MatchesSplitSumOnConstantProbe) {
    const auto probe = mb::constant_probe(16, {1, 1, 1});
    const auto v = sphere_view(32, uniform(1.0, 1.0, 0.0));
    const mb::ImageF split = mb::shade_splitsum(v, mb::prefilter(probe, small_options()), v.camera);
    mb::McOptions mc;
    mc.samples = 1024;
    const mb::ImageF ref = mb::shade_reference_mc(v, probe, v.camera, mc);
    double err = 0.0;
    int n = 0;
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            if (!v.gbuffer.mask(x, y)) continue;
            for (int c = 0; c < 3; ++c) err += std::abs(split(x, y, c) - ref(x, y, c)) / ref(x, y, c);
            n += 3;
        }
    EXPECT_LT(err / n, 0.02);
}

TEST(ShadeReference, VarianceFallsAsOneOverSamples) {
    const auto probe = mb::sky_probe(32);
    const mb::Camera cam = mb::look_at({0, -0.5, 3}, {0, 0, 0}, 0.3, 4, 4);
    const auto v = mb::render_intrinsics(mb::make_quad(), cam, uniform(0.8, 0.5, 0.5));
    const auto variance = [&](std::uint32_t spp) {
        const int seeds = 48;
        std::vector<double> sum(16, 0.0), sq(16, 0.0);
        for (int s = 0; s < seeds; ++s) {
            mb::McOptions o;
            o.samples = spp;
            o.seed = static_cast<std::uint64_t>(1000 + s);
            const mb::ImageF img = mb::shade_reference_mc(v, probe, cam, o);
            for (int i = 0; i < 16; ++i) {
                const double g = img(i % 4, i / 4, 1);
                sum[static_cast<std::size_t>(i)] += g;
                sq[static_cast<std::size_t>(i)] += g * g;
            }
        }
        double var = 0.0;
        for (int i = 0; i < 16; ++i) {
            const double m = sum[static_cast<std::size_t>(i)] / seeds;
            var += (sq[static_cast<std::size_t>(i)] / seeds - m * m) * seeds / (seeds - 1);
        }
        return var / 16;
    };
    const double v16 = variance(16), v256 = variance(256);
    ASSERT_GT(v256, 0.0);
    EXPECT_GT(v16 / v256, 8.0);
    EXPECT_LT(v16 / v256, 32.0);
}

TEST(ShadeReference, BlackProbeGivesBlack) {
    const auto v = sphere_view(16, mb::make_test_materials(16));
    mb::McOptions o;
    o.samples = 64;
    const mb::ImageF img = mb::shade_reference_mc(v, mb::constant_probe(8, {0, 0, 0}), v.camera, o);
    for (float x : img.data()) ASSERT_EQ(x, 0.0f);
    o.samples = 0;
    EXPECT_THROW(mb::shade_reference_mc(v, mb::constant_probe(8, {0, 0, 0}), v.camera, o), mb::Error);
}

TEST(ShadeReference, DeterministicForSeed) {
    const auto v = sphere_view(16, mb::make_test_materials(16));
    mb::McOptions o;
    o.samples = 32;
    const auto probe = mb::sky_probe(16);
    const mb::ImageF a = mb::shade_reference_mc(v, probe, v.camera, o, mb::Exec{1});
    EXPECT_TRUE(a == mb::shade_reference_mc(v, probe, v.camera, o, mb::Exec{4}));
    o.seed = 2;
    EXPECT_FALSE(a == mb::shade_reference_mc(v, probe, v.camera, o));
}

TEST(Tonemap, Curve) {
    EXPECT_EQ(mb::tonemap_curve(0.0, 1.0), 0.0);
    EXPECT_EQ(mb::tonemap_curve(1.0, 1.0), 0.5);
    EXPECT_EQ(mb::tonemap_curve(1.0, 3.0), 0.75);
    EXPECT_NEAR(mb::tonemap_curve(1e9, 1.0), 1.0, 1e-8);
    EXPECT_EQ(mb::tonemap_curve(INFINITY, 1.0), 1.0);
    mb::ImageF img(3, 1, 1);
    img(0, 0) = 0.0f;
    img(1, 0) = 1.0f;
    img(2, 0) = 1e30f;
    const mb::ImageF t = mb::tonemap(img, 1.0);
    EXPECT_EQ(t(0, 0), 0.0f);
    EXPECT_NEAR(t(1, 0), 1.055 * std::pow(0.5, 1 / 2.4) - 0.055, 1e-6);
    EXPECT_NEAR(t(2, 0), 1.0f, 1e-6);
    EXPECT_THROW(mb::tonemap(img, 0.0), mb::Error);
}

TEST(LatLong, DirectionRoundTrip) {
    for (double u = 0.05; u < 1; u += 0.1)
        for (double v = 0.05; v < 1; v += 0.1) {
            const mb::Vec2 back = mb::direction_to_latlong(mb::latlong_to_direction(u, v));
            EXPECT_NEAR(back.x, u, 1e-12);
            EXPECT_NEAR(back.y, v, 1e-12);
        }
    // Up is the top row; -Z is the center column.
    EXPECT_NEAR(mb::direction_to_latlong({0, 1, 0}).y, 0.0, 1e-12);
    EXPECT_NEAR(mb::direction_to_latlong({0, 0, -1}).x, 0.5, 1e-12);
}
