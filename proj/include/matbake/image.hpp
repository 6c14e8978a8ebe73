// Copyright 2026 The matbake Authors
// SPDX-License-Identifier: Apache-2.0

/// @file image.hpp
/// Interleaved multi-channel image container and the atlas addressing rules.
///
/// Atlas convention: texel (i, j) covers u in [i/R, (i+1)/R) and v in
/// [1-(j+1)/R, 1-j/R), i.e. row 0 is the top of the texture (v = 1), matching
/// what image files and authoring tools expect.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "matbake/error.hpp"
#include "matbake/vec.hpp"

namespace matbake {

template <typename T>
class Image {
public:
    Image() = default;
    Image(int width, int height, int channels, T fill = T{})
        : width_(width), height_(height), channels_(channels),
          data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                    static_cast<std::size_t>(channels),
                fill) {
        if (width < 0 || height < 0 || channels < 1) throw Error("Image: invalid dimensions");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int channels() const { return channels_; }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }
    bool empty() const { return data_.empty(); }

    std::size_t index(int x, int y, int c = 0) const {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                static_cast<std::size_t>(x)) *
                   static_cast<std::size_t>(channels_) +
               static_cast<std::size_t>(c);
    }

    T& operator()(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
    const T& operator()(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

    std::span<T> pixel(int x, int y) {
        return {data_.data() + index(x, y), static_cast<std::size_t>(channels_)};
    }
    std::span<const T> pixel(int x, int y) const {
        return {data_.data() + index(x, y), static_cast<std::size_t>(channels_)};
    }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

    bool same_shape(const Image& o) const {
        return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
    }

    bool operator==(const Image&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<T> data_;
};

using ImageF = Image<float>;
using Mask = Image<std::uint8_t>;

/// Texel containing @p uv on an atlas of @p resolution texels per side, or false
/// when uv lies outside [0,1]^2. u = 1 and v = 0 fold into the last texel.
inline bool texel_of(Vec2 uv, int resolution, int& tx, int& ty) {
    if (!(uv.x >= 0.0 && uv.x <= 1.0 && uv.y >= 0.0 && uv.y <= 1.0)) return false;
    const double r = resolution;
    tx = std::min(static_cast<int>(std::floor(uv.x * r)), resolution - 1);
    ty = std::min(static_cast<int>(std::floor((1.0 - uv.y) * r)), resolution - 1);
    return true;
}

/// UV of the center of texel (tx, ty).
inline Vec2 texel_center(int tx, int ty, int resolution) {
    const double r = resolution;
    return {(tx + 0.5) / r, 1.0 - (ty + 0.5) / r};
}

/// Bilinear lookup with clamp-to-edge addressing at continuous pixel
/// coordinates (pixel centers at half-integers). Accumulates in double.
template <typename T>
void sample_bilinear(const Image<T>& img, double px, double py, std::span<double> out) {
    const double fx = px - 0.5;
    const double fy = py - 0.5;
    const double x0f = std::floor(fx);
    const double y0f = std::floor(fy);
    const double ax = fx - x0f;
    const double ay = fy - y0f;
    auto clampi = [](double v, int hi) {
        return v < 0.0 ? 0 : (v > hi ? hi : static_cast<int>(v));
    };
    const int x0 = clampi(x0f, img.width() - 1);
    const int x1 = clampi(x0f + 1.0, img.width() - 1);
    const int y0 = clampi(y0f, img.height() - 1);
    const int y1 = clampi(y0f + 1.0, img.height() - 1);
    for (int c = 0; c < img.channels(); ++c) {
        const double top = (1.0 - ax) * img(x0, y0, c) + ax * img(x1, y0, c);
        const double bot = (1.0 - ax) * img(x0, y1, c) + ax * img(x1, y1, c);
        out[static_cast<std::size_t>(c)] = (1.0 - ay) * top + ay * bot;
    }
}

/// Bilinear lookup of an atlas at texture coordinate @p uv.
template <typename T>
void sample_atlas(const Image<T>& atlas, Vec2 uv, std::span<double> out) {
    sample_bilinear(atlas, uv.x * atlas.width(), (1.0 - uv.y) * atlas.height(), out);
}

inline std::size_t count_set(const Mask& m) {
    std::size_t n = 0;
    for (auto v : m.data()) n += v != 0 ? 1 : 0;
    return n;
}

}  // namespace matbake
