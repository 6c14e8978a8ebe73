// Copyright 2026 The matbake Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "matbake/error.hpp"
#include "matbake/image.hpp"

namespace matbake {

/// Material channel identifiers in the order used by accumulation buffers.
enum class Channel : int { BaseR = 0, BaseG, BaseB, Roughness, Metallic, Height };
inline constexpr int kMaterialChannels = 6;

/// Texture-space PBR material: base color (linear RGB), roughness, metallicity
/// and height atlases, all in [0,1].
struct MaterialSet {
    int resolution = 0;
    ImageF base_color;  // 3 channels
    ImageF roughness;   // 1 channel
    ImageF metallic;    // 1 channel
    ImageF height;      // 1 channel
    /// Texels that received splat weight (before inpainting).
    Mask coverage;
    /// Texels holding a value after inpainting (superset of coverage).
    Mask filled;

    MaterialSet() = default;
    explicit MaterialSet(int res)
        : resolution(res), base_color(res, res, 3), roughness(res, res, 1), metallic(res, res, 1),
          height(res, res, 1), coverage(res, res, 1), filled(res, res, 1) {}

    float channel(int x, int y, int c) const {
        if (c < 3) return base_color(x, y, c);
        if (c == 3) return roughness(x, y);
        if (c == 4) return metallic(x, y);
        return height(x, y);
    }
    void set_channel(int x, int y, int c, float v) {
        if (c < 3) base_color(x, y, c) = v;
        else if (c == 3) roughness(x, y) = v;
        else if (c == 4) metallic(x, y) = v;
        else height(x, y) = v;
    }

    /// Constant material with every texel covered.
    static MaterialSet constant(int res, std::array<float, 3> base, float rough, float metal, float h) {
        MaterialSet m(res);
        for (int y = 0; y < res; ++y)
            for (int x = 0; x < res; ++x) {
                for (int c = 0; c < 3; ++c) m.base_color(x, y, c) = base[static_cast<std::size_t>(c)];
                m.roughness(x, y) = rough;
                m.metallic(x, y) = metal;
                m.height(x, y) = h;
                m.coverage(x, y) = 1;
                m.filled(x, y) = 1;
            }
        return m;
    }

    void validate() const {
        if (resolution < 1) throw Error("material set: resolution must be >= 1");
        const auto check = [&](const ImageF& img, int ch, const char* name) {
            if (img.width() != resolution || img.height() != resolution || img.channels() != ch)
                throw Error(std::string("material set: ") + name + " has wrong dimensions");
            for (float v : img.data())
                if (!(v >= 0.0f && v <= 1.0f)) throw Error(std::string("material set: ") + name + " outside [0,1]");
        };
        check(base_color, 3, "base_color");
        check(roughness, 1, "roughness");
        check(metallic, 1, "metallic");
        check(height, 1, "height");
    }
};

inline float clamp01(double v) {
    return static_cast<float>(v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v));
}

}  // namespace matbake
