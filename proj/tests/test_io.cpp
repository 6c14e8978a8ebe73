// Copyright 2026 The matbake Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>

#include <gtest/gtest.h>

#include "matbake/io.hpp"
#include "matbake/shade.hpp"

namespace mb = matbake;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    fs::path dir = fs::temp_directory_path() / "matbake_test_io" / (std::string(info->test_suite_name()) + "." + info->name());
    fs::create_directories(dir);
    return dir / name;
}

void write_bytes(const fs::path& p, const std::vector<unsigned char>& b) {
    std::ofstream f(p, std::ios::binary);
    f.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
}

std::vector<unsigned char> read_bytes(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::vector<unsigned char> hdr_header(int w, int h) {
    const std::string s = "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " + std::to_string(h) + " +X " + std::to_string(w) + "\n";
    return {s.begin(), s.end()};
}

// Reference RGBE rule written independently: mantissa times 2^(exponent - 136).
float ref_rgbe(unsigned char m, unsigned char e) {
    if (e == 0) return 0.0f;
    double v = m;
    for (int i = 0; i < 136 - e; ++i) v /= 2.0;
    for (int i = 0; i < e - 136; ++i) v *= 2.0;
    return static_cast<float>(v);
}

}  // namespace

TEST(Png, SixteenBitGradientRoundTrips) {
    mb::ImageBuffer b;
    b.depth = mb::BitDepth::U16;
    for (int ch : {1, 3}) {
        b.image = mb::ImageF(256, 3, ch);
        for (int y = 0; y < 3; ++y)
            for (int x = 0; x < 256; ++x)
                for (int c = 0; c < ch; ++c) b.image(x, y, c) = static_cast<float>((x * 257 + y * 91 + c * 13) % 65536) / 65535.0f;
        const fs::path p = scratch("g" + std::to_string(ch) + ".png");
        mb::write_png(p.string(), b);
        const mb::ImageBuffer r = mb::read_png(p.string());
        EXPECT_EQ(r.depth, mb::BitDepth::U16);
        EXPECT_EQ(r.transfer, mb::Transfer::Linear);
        ASSERT_TRUE(r.image.same_shape(b.image));
        for (std::size_t i = 0; i < r.image.data().size(); ++i)
            ASSERT_EQ(mb::quantize(r.image.data()[i], mb::BitDepth::U16, mb::Transfer::Linear),
                      mb::quantize(b.image.data()[i], mb::BitDepth::U16, mb::Transfer::Linear));
        // Re-encoding the decoded buffer reproduces the file byte for byte.
        EXPECT_EQ(mb::encode_png(r), read_bytes(p));
    }
}

TEST(Png, EightBitRgbRoundTrip) {
    mb::ImageBuffer b;
    b.image = mb::ImageF(17, 9, 3);
    for (std::size_t i = 0; i < b.image.data().size(); ++i) b.image.data()[i] = static_cast<float>(i % 256) / 255.0f;
    const mb::ImageBuffer r = mb::decode_png(mb::encode_png(b));
    EXPECT_TRUE(r.image == b.image);
}

TEST(Png, SrgbHalfStores188) {
    // 1.055 * 0.5^(1/2.4) - 0.055 = 0.7354 -> 187.5 -> 188
    const double enc = 1.055 * std::pow(0.5, 1.0 / 2.4) - 0.055;
    ASSERT_EQ(std::lround(enc * 255.0), 188);
    mb::ImageBuffer b;
    b.image = mb::ImageF(2, 2, 3, 0.5f);
    b.transfer = mb::Transfer::SRGB;
    const fs::path p = scratch("half.png");
    mb::write_png(p.string(), b);
    const mb::Transfer raw = mb::Transfer::Linear;
    const mb::ImageBuffer stored = mb::read_png(p.string(), &raw);
    EXPECT_EQ(stored.image(1, 1, 0), 188.0f / 255.0f);
    const mb::ImageBuffer tagged = mb::read_png(p.string());
    EXPECT_EQ(tagged.transfer, mb::Transfer::SRGB);
    EXPECT_NEAR(tagged.image(0, 0, 2), std::pow((188.0 / 255.0 + 0.055) / 1.055, 2.4), 1e-6);
}

TEST(Png, CorruptChunkIsAnError) {
    mb::ImageBuffer b;
    b.image = mb::ImageF(8, 8, 1, 0.25f);
    auto bytes = mb::encode_png(b);
    const char tag[] = "IDAT";
    const auto it = std::search(bytes.begin(), bytes.end(), tag, tag + 4);
    ASSERT_NE(it, bytes.end());
    *(it + 6) ^= 0x5a;  // inside the compressed payload; CRC no longer matches
    const fs::path p = scratch("bad.png");
    write_bytes(p, bytes);
    EXPECT_THROW(mb::read_png(p.string()), mb::IoError);
    write_bytes(p, {bytes.begin(), bytes.begin() + 30});
    EXPECT_THROW(mb::read_png(p.string()), mb::IoError);
    EXPECT_THROW(mb::read_png(scratch("missing.png").string()), mb::IoError);
}

TEST(Png, Deterministic) {
    mb::ImageBuffer b;
    b.image = mb::ImageF(31, 7, 4, 0.3f);
    EXPECT_EQ(mb::encode_png(b), mb::encode_png(b));
}

TEST(Hdr, ReferenceTexelDecodesToOne) {
    EXPECT_EQ(ref_rgbe(128, 129), 1.0f);
    const auto f = mb::rgbe_to_float({128, 128, 128, 129});
    for (float v : f) EXPECT_EQ(v, 1.0f);
    auto bytes = hdr_header(2, 1);
    for (unsigned char v : {128, 128, 128, 129, 64, 32, 255, 140}) bytes.push_back(v);
    const mb::ImageF img = mb::decode_hdr(bytes);
    EXPECT_EQ(img(0, 0, 1), 1.0f);
    EXPECT_EQ(img(1, 0, 0), ref_rgbe(64, 140));
    EXPECT_EQ(img(1, 0, 1), ref_rgbe(32, 140));
    EXPECT_EQ(img(1, 0, 2), ref_rgbe(255, 140));
}

TEST(Hdr, HandBuiltRleScanline) {
    const int w = 10;
    auto bytes = hdr_header(w, 1);
    for (unsigned char v : {2, 2, 0, w}) bytes.push_back(v);
    // R: run of 10 x 100. G: literal 0..9. B: run 4 x 7, literal 6 x 9. E: run 10 x 130.
    bytes.insert(bytes.end(), {128 + 10, 100});
    bytes.push_back(10);
    for (unsigned char i = 0; i < 10; ++i) bytes.push_back(i);
    bytes.insert(bytes.end(), {128 + 4, 7, 6, 9, 9, 9, 9, 9, 9});
    bytes.insert(bytes.end(), {128 + 10, 130});
    const mb::ImageF img = mb::decode_hdr(bytes);
    for (int x = 0; x < w; ++x) {
        EXPECT_EQ(img(x, 0, 0), ref_rgbe(100, 130));
        EXPECT_EQ(img(x, 0, 1), ref_rgbe(static_cast<unsigned char>(x), 130));
        EXPECT_EQ(img(x, 0, 2), ref_rgbe(x < 4 ? 7 : 9, 130));
    }
}

TEST(Hdr, RoundTripMatchesRgbeQuantization) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> d(0.0, 1.0);
    for (int w : {5, 64}) {
        mb::ImageF img(w, 6, 3);
        for (std::size_t i = 0; i < img.data().size(); ++i)
            img.data()[i] = i % 7 < 3 ? 2.5f : static_cast<float>(std::exp(8 * d(rng) - 4));
        const fs::path p = scratch("r" + std::to_string(w) + ".hdr");
        mb::write_hdr(p.string(), img);
        const mb::ImageF back = mb::read_hdr(p.string());
        ASSERT_TRUE(back.same_shape(img));
        for (int y = 0; y < 6; ++y)
            for (int x = 0; x < w; ++x) {
                const auto q = mb::float_to_rgbe(img(x, y, 0), img(x, y, 1), img(x, y, 2));
                for (int c = 0; c < 3; ++c) {
                    EXPECT_EQ(back(x, y, c), ref_rgbe(q[static_cast<std::size_t>(c)], q[3]));
                    // Shared exponent: error bounded by one mantissa step of the brightest channel.
                    const double m = std::max({img(x, y, 0), img(x, y, 1), img(x, y, 2)});
                    EXPECT_LE(std::abs(back(x, y, c) - img(x, y, c)), m / 128.0 + 1e-12);
                }
            }
    }
}

TEST(Hdr, MalformedInputsAreErrors) {
    mb::ImageF img(16, 4, 3, 0.7f);
    const auto good = mb::encode_hdr(img);
    const auto bad = [](std::vector<unsigned char> b) { EXPECT_THROW(mb::decode_hdr(b), mb::IoError); };
    bad({good.begin(), good.end() - 5});
    bad({good.begin(), good.begin() + 20});
    auto sig = good;
    sig[0] = 'X';
    bad(sig);
    const std::string fmt = "#?RADIANCE\nFORMAT=32-bit_rle_xyze\n\n-Y 1 +X 1\n\1\2\3\4";
    bad({fmt.begin(), fmt.end()});
    const std::string orient = "#?RADIANCE\n\n+Y 1 +X 1\n\1\2\3\4";
    bad({orient.begin(), orient.end()});
    const fs::path p = scratch("trunc.hdr");
    write_bytes(p, {good.begin(), good.end() - 1});
    EXPECT_THROW(mb::load_probe(p.string()), mb::IoError);
}

TEST(Hdr, ConstantWhiteProbeFile) {
    auto bytes = hdr_header(16, 8);
    for (int i = 0; i < 16 * 8; ++i) bytes.insert(bytes.end(), {128, 128, 128, 129});
    const fs::path p = scratch("white.hdr");
    write_bytes(p, bytes);
    const mb::EnvironmentProbe probe = mb::load_probe(p.string());
    for (float v : probe.radiance.data()) EXPECT_EQ(v, 1.0f);
}

TEST(FloatRaw, RandomRoundTripBitExact) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<float> d(-1e6f, 1e6f);
    mb::ImageBuffer b;
    b.image = mb::ImageF(13, 11, 3);
    b.semantics = "position";
    for (auto& v : b.image.data()) v = d(rng);
    b.image.data()[5] = -0.0f;
    b.image.data()[6] = std::numeric_limits<float>::denorm_min();
    const fs::path p = scratch("r.mbraw");
    mb::write_float_raw(p.string(), b);
    const mb::ImageBuffer r = mb::read_float_raw(p.string());
    EXPECT_EQ(r.semantics, "position");
    EXPECT_EQ(r.depth, mb::BitDepth::F32);
    ASSERT_TRUE(r.image.same_shape(b.image));
    EXPECT_EQ(std::memcmp(r.image.data().data(), b.image.data().data(), b.image.data().size() * 4), 0);
    EXPECT_EQ(mb::encode_float_raw(r), read_bytes(p));
}

TEST(FloatRaw, PayloadIsLittleEndianAfterHeader) {
    mb::ImageBuffer b;
    b.image = mb::ImageF(1, 1, 1, 1.0f);  // 0x3f800000
    const auto bytes = mb::encode_float_raw(b);
    const std::string header(bytes.begin(), bytes.end() - 4);
    EXPECT_EQ(header, "MBRAW 1\nwidth 1\nheight 1\nchannels 1\nsemantics data\nendian little\nend\n");
    EXPECT_EQ(bytes[bytes.size() - 4], 0x00);
    EXPECT_EQ(bytes[bytes.size() - 1], 0x3f);
}

TEST(FloatRaw, DimensionMismatchIsAnError) {
    mb::ImageBuffer b;
    b.image = mb::ImageF(4, 4, 2, 0.5f);
    auto bytes = mb::encode_float_raw(b);
    const fs::path p = scratch("d.mbraw");
    std::string s(bytes.begin(), bytes.end());
    s.replace(s.find("width 4"), 7, "width 5");
    write_bytes(p, {s.begin(), s.end()});
    EXPECT_THROW(mb::read_float_raw(p.string()), mb::IoError);
    write_bytes(p, {bytes.begin(), bytes.end() - 3});
    EXPECT_THROW(mb::read_float_raw(p.string()), mb::IoError);
    std::string k(bytes.begin(), bytes.end());
    k.replace(k.find("channels"), 8, "chanells");
    write_bytes(p, {k.begin(), k.end()});
    EXPECT_THROW(mb::read_float_raw(p.string()), mb::IoError);
}

TEST(FloatRaw, NanPayloadPreservedAndFlagged) {
    mb::ImageBuffer b;
    b.image = mb::ImageF(3, 1, 1, 0.0f);
    const std::uint32_t pattern = 0x7fc12345u;
    std::memcpy(&b.image.data()[1], &pattern, 4);
    b.image.data()[2] = -std::numeric_limits<float>::infinity();
    const fs::path p = scratch("nan.mbraw");
    mb::write_float_raw(p.string(), b);
    const mb::ImageBuffer r = mb::read_float_raw(p.string());
    std::uint32_t got = 0;
    std::memcpy(&got, &r.image.data()[1], 4);
    EXPECT_EQ(got, pattern);
    EXPECT_EQ(mb::count_nonfinite(r.image), 2u);
    mb::RawReadOptions strict;
    strict.require_finite = true;
    EXPECT_THROW(mb::read_float_raw(p.string(), strict), mb::IoError);
}
