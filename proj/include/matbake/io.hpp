// Copyright 2026 The matbake Authors
// SPDX-License-Identifier: Apache-2.0

/// @file io.hpp
/// Readers and writers for PNG, Radiance HDR (RGBE) and the float-raw format.
///
/// Float-raw layout: an ASCII header of `key value` lines
///
///     MBRAW 1
///     width <W>
///     height <H>
///     channels <C>
///     semantics <word>
///     endian little
///     end
///
/// followed immediately by W*H*C little-endian IEEE-754 float32 values in
/// row-major, channel-interleaved order.

#pragma once

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "matbake/error.hpp"
#include "matbake/image.hpp"

namespace matbake {

enum class BitDepth { U8 = 8, U16 = 16, F32 = 32 };
enum class Transfer { Linear, SRGB };

/// Image samples in linear units together with the on-disk encoding to use.
struct ImageBuffer {
    ImageF image;
    BitDepth depth = BitDepth::U8;
    Transfer transfer = Transfer::Linear;
    /// Free-form tag stored in float-raw headers (e.g. "position", "depth").
    std::string semantics = "data";
};

inline double srgb_encode(double linear) {
    if (linear <= 0.0) return 0.0;
    if (linear >= 1.0) return 1.0;
    return linear <= 0.0031308 ? 12.92 * linear : 1.055 * std::pow(linear, 1.0 / 2.4) - 0.055;
}

inline double srgb_decode(double encoded) {
    if (encoded <= 0.0) return 0.0;
    if (encoded >= 1.0) return 1.0;
    return encoded <= 0.04045 ? encoded / 12.92 : std::pow((encoded + 0.055) / 1.055, 2.4);
}

/// Integer code for a linear sample at the given bit depth and transfer.
inline std::uint32_t quantize(double linear, BitDepth depth, Transfer transfer) {
    const double v = transfer == Transfer::SRGB ? srgb_encode(linear) : std::clamp(linear, 0.0, 1.0);
    const double maxv = depth == BitDepth::U16 ? 65535.0 : 255.0;
    return static_cast<std::uint32_t>(std::lround(v * maxv));
}

// ---------------------------------------------------------------------------
// PNG

namespace detail {

struct PngWriteState {
    std::vector<unsigned char>* out;
};

inline void png_write_to_vector(png_structp png, png_bytep data, png_size_t len) {
    auto* st = static_cast<PngWriteState*>(png_get_io_ptr(png));
    st->out->insert(st->out->end(), data, data + len);
}
inline void png_flush_noop(png_structp) {}

[[noreturn]] inline void png_error_throw(png_structp png, png_const_charp msg) {
    auto* err = static_cast<std::string*>(png_get_error_ptr(png));
    if (err) *err = msg;
    png_longjmp(png, 1);
}
inline void png_warning_ignore(png_structp, png_const_charp) {}

struct PngReadState {
    const std::vector<unsigned char>* in;
    std::size_t pos = 0;
};

inline void png_read_from_vector(png_structp png, png_bytep data, png_size_t len) {
    auto* st = static_cast<PngReadState*>(png_get_io_ptr(png));
    if (st->pos + len > st->in->size()) png_error(png, "unexpected end of PNG data");
    std::memcpy(data, st->in->data() + st->pos, len);
    st->pos += len;
}

inline std::vector<unsigned char> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing file: " + path);
}

}  // namespace detail

/// Encodes an 8- or 16-bit grayscale/gray+alpha/RGB/RGBA PNG. sRGB-tagged
/// buffers are encoded with the sRGB curve and carry an sRGB chunk.
inline std::vector<unsigned char> encode_png(const ImageBuffer& buf) {
    const ImageF& img = buf.image;
    if (buf.depth == BitDepth::F32) throw IoError("encode_png: float buffers cannot be stored as PNG");
    if (img.channels() < 1 || img.channels() > 4) throw IoError("encode_png: unsupported channel count");
    if (img.width() < 1 || img.height() < 1) throw IoError("encode_png: empty image");
    static constexpr std::array<int, 5> kColorType{0, PNG_COLOR_TYPE_GRAY, PNG_COLOR_TYPE_GRAY_ALPHA,
                                                   PNG_COLOR_TYPE_RGB, PNG_COLOR_TYPE_RGBA};
    const int bits = buf.depth == BitDepth::U16 ? 16 : 8;
    const int bytes_per_sample = bits / 8;
    const std::size_t row_bytes = static_cast<std::size_t>(img.width()) * static_cast<std::size_t>(img.channels()) *
                                  static_cast<std::size_t>(bytes_per_sample);
    std::vector<unsigned char> pixels(row_bytes * static_cast<std::size_t>(img.height()));
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < img.channels(); ++c) {
                // Alpha is never transfer-encoded.
                const bool alpha = (img.channels() == 2 && c == 1) || (img.channels() == 4 && c == 3);
                const std::uint32_t q = quantize(img(x, y, c), buf.depth, alpha ? Transfer::Linear : buf.transfer);
                unsigned char* p = pixels.data() + static_cast<std::size_t>(y) * row_bytes +
                                   (static_cast<std::size_t>(x) * static_cast<std::size_t>(img.channels()) +
                                    static_cast<std::size_t>(c)) *
                                       static_cast<std::size_t>(bytes_per_sample);
                if (bits == 16) {
                    p[0] = static_cast<unsigned char>(q >> 8);
                    p[1] = static_cast<unsigned char>(q & 0xff);
                } else {
                    p[0] = static_cast<unsigned char>(q);
                }
            }

    std::vector<unsigned char> out;
    std::string err;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, detail::png_error_throw,
                                              detail::png_warning_ignore);
    if (!png) throw IoError("encode_png: out of memory");
    png_infop info = png_create_info_struct(png);
    std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
    detail::PngWriteState st{&out};
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("encode_png: " + err);
    }
    png_set_write_fn(png, &st, detail::png_write_to_vector, detail::png_flush_noop);
    png_set_compression_level(png, 6);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()), bits,
                 kColorType[static_cast<std::size_t>(img.channels())], PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    if (buf.transfer == Transfer::SRGB) png_set_sRGB(png, info, PNG_sRGB_INTENT_PERCEPTUAL);
    for (int y = 0; y < img.height(); ++y)
        rows[static_cast<std::size_t>(y)] = pixels.data() + static_cast<std::size_t>(y) * row_bytes;
    png_set_rows(png, info, rows.data());
    png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

/// Decodes a PNG into linear samples. Palette images are expanded; sub-byte
/// depths are widened to 8 bits. Images with an sRGB chunk are decoded through
/// the sRGB curve unless @p transfer_override says otherwise.
inline ImageBuffer decode_png(const std::vector<unsigned char>& bytes, const Transfer* transfer_override = nullptr) {
    if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw IoError("decode_png: not a PNG file");
    std::string err;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, detail::png_error_throw,
                                             detail::png_warning_ignore);
    if (!png) throw IoError("decode_png: out of memory");
    png_infop info = png_create_info_struct(png);
    detail::PngReadState st{&bytes, 0};
    ImageBuffer out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("decode_png: " + (err.empty() ? std::string("corrupt data") : err));
    }
    png_set_read_fn(png, &st, detail::png_read_from_vector);
    png_read_png(png, info, PNG_TRANSFORM_EXPAND | PNG_TRANSFORM_PACKING, nullptr);
    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    const int bits = png_get_bit_depth(png, info);
    const int channels = png_get_channels(png, info);
    int intent = 0;
    const bool srgb = png_get_sRGB(png, info, &intent) != 0;
    png_bytepp rows = png_get_rows(png, info);
    out.depth = bits == 16 ? BitDepth::U16 : BitDepth::U8;
    out.transfer = transfer_override ? *transfer_override : (srgb ? Transfer::SRGB : Transfer::Linear);
    out.image = ImageF(w, h, channels);
    const double maxv = bits == 16 ? 65535.0 : 255.0;
    for (int y = 0; y < h; ++y) {
        const png_bytep row = rows[y];
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < channels; ++c) {
                const std::size_t i = static_cast<std::size_t>(x) * static_cast<std::size_t>(channels) + static_cast<std::size_t>(c);
                const unsigned v = bits == 16 ? (static_cast<unsigned>(row[2 * i]) << 8) | row[2 * i + 1] : row[i];
                const bool alpha = (channels == 2 && c == 1) || (channels == 4 && c == 3);
                const double e = v / maxv;
                out.image(x, y, c) = static_cast<float>(
                    out.transfer == Transfer::SRGB && !alpha ? srgb_decode(e) : e);
            }
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

inline void write_png(const std::string& path, const ImageBuffer& buf) {
    detail::write_file(path, encode_png(buf));
}

inline ImageBuffer read_png(const std::string& path, const Transfer* transfer_override = nullptr) {
    try {
        return decode_png(detail::read_file(path), transfer_override);
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Radiance HDR (RGBE)

/// RGBE byte quadruple to linear RGB: mantissa * 2^(exponent - 136).
inline std::array<float, 3> rgbe_to_float(const std::array<unsigned char, 4>& rgbe) {
    if (rgbe[3] == 0) return {0.0f, 0.0f, 0.0f};
    const int e = static_cast<int>(rgbe[3]) - 136;
    return {static_cast<float>(std::ldexp(static_cast<double>(rgbe[0]), e)),
            static_cast<float>(std::ldexp(static_cast<double>(rgbe[1]), e)),
            static_cast<float>(std::ldexp(static_cast<double>(rgbe[2]), e))};
}

inline std::array<unsigned char, 4> float_to_rgbe(double r, double g, double b) {
    const double m = std::max({r, g, b});
    if (!(m >= 1e-32)) return {0, 0, 0, 0};
    int e = 0;
    const double f = std::frexp(m, &e);  // m = f * 2^e, f in [0.5, 1)
    const double scale = f * 256.0 / m;
    const auto q = [&](double v) {
        return static_cast<unsigned char>(std::min(255.0, std::max(0.0, std::floor(v * scale))));
    };
    return {q(r), q(g), q(b), static_cast<unsigned char>(e + 128)};
}

/// Decodes a Radiance HDR file (flat, old-style RLE and new-style RLE scanlines).
/// Only the standard `-Y H +X W` orientation is accepted.
inline ImageF decode_hdr(const std::vector<unsigned char>& bytes) {
    std::size_t pos = 0;
    const auto read_line = [&]() -> std::string {
        std::string line;
        while (pos < bytes.size() && bytes[pos] != '\n') line.push_back(static_cast<char>(bytes[pos++]));
        if (pos >= bytes.size()) throw IoError("hdr: truncated header");
        ++pos;
        return line;
    };
    const std::string magic = read_line();
    if (magic.rfind("#?", 0) != 0) throw IoError("hdr: missing #? signature");
    bool format_ok = true;
    for (;;) {
        const std::string line = read_line();
        if (line.empty()) break;
        if (line.rfind("FORMAT=", 0) == 0) format_ok = line == "FORMAT=32-bit_rle_rgbe";
    }
    if (!format_ok) throw IoError("hdr: unsupported pixel format (only 32-bit_rle_rgbe)");
    const std::string res = read_line();
    int h = 0, w = 0;
    char ybuf[3] = {}, xbuf[3] = {};
    if (std::sscanf(res.c_str(), "%2s %d %2s %d", ybuf, &h, xbuf, &w) != 4 || std::string(ybuf) != "-Y" ||
        std::string(xbuf) != "+X" || w <= 0 || h <= 0)
        throw IoError("hdr: unsupported resolution line '" + res + "'");

    ImageF img(w, h, 3);
    std::vector<std::array<unsigned char, 4>> scan(static_cast<std::size_t>(w));
    const auto need = [&](std::size_t n) {
        if (pos + n > bytes.size()) throw IoError("hdr: truncated pixel data");
    };
    for (int y = 0; y < h; ++y) {
        need(4);
        const bool new_rle = w >= 8 && w < 32768 && bytes[pos] == 2 && bytes[pos + 1] == 2 && (bytes[pos + 2] & 0x80) == 0;
        if (new_rle) {
            const int len = (bytes[pos + 2] << 8) | bytes[pos + 3];
            if (len != w) throw IoError("hdr: scanline width mismatch");
            pos += 4;
            for (int c = 0; c < 4; ++c) {
                int x = 0;
                while (x < w) {
                    need(1);
                    int count = bytes[pos++];
                    if (count > 128) {
                        count -= 128;
                        need(1);
                        const unsigned char v = bytes[pos++];
                        if (count == 0 || x + count > w) throw IoError("hdr: bad run length");
                        for (int i = 0; i < count; ++i) scan[static_cast<std::size_t>(x++)][static_cast<std::size_t>(c)] = v;
                    } else {
                        if (count == 0 || x + count > w) throw IoError("hdr: bad literal length");
                        need(static_cast<std::size_t>(count));
                        for (int i = 0; i < count; ++i)
                            scan[static_cast<std::size_t>(x++)][static_cast<std::size_t>(c)] = bytes[pos++];
                    }
                }
            }
        } else {
            // Flat pixels, possibly with old-style (1,1,1,n) repeat records.
            int x = 0;
            int shift = 0;
            while (x < w) {
                need(4);
                std::array<unsigned char, 4> px{bytes[pos], bytes[pos + 1], bytes[pos + 2], bytes[pos + 3]};
                pos += 4;
                if (px[0] == 1 && px[1] == 1 && px[2] == 1) {
                    if (x == 0) throw IoError("hdr: repeat record at scanline start");
                    const int count = static_cast<int>(px[3]) << shift;
                    if (x + count > w) throw IoError("hdr: bad repeat length");
                    const auto prev = scan[static_cast<std::size_t>(x - 1)];
                    for (int i = 0; i < count; ++i) scan[static_cast<std::size_t>(x++)] = prev;
                    shift += 8;
                } else {
                    scan[static_cast<std::size_t>(x++)] = px;
                    shift = 0;
                }
            }
        }
        for (int x = 0; x < w; ++x) {
            const auto f = rgbe_to_float(scan[static_cast<std::size_t>(x)]);
            for (int c = 0; c < 3; ++c) img(x, y, c) = f[static_cast<std::size_t>(c)];
        }
    }
    return img;
}

/// Encodes linear RGB as Radiance HDR with new-style RLE scanlines.
inline std::vector<unsigned char> encode_hdr(const ImageF& img) {
    if (img.channels() != 3) throw IoError("encode_hdr: expected 3 channels");
    std::string header = "#?RADIANCE\nFORMAT=32-bit_rle_rgbe\n\n-Y " + std::to_string(img.height()) + " +X " +
                         std::to_string(img.width()) + "\n";
    std::vector<unsigned char> out(header.begin(), header.end());
    const int w = img.width();
    std::vector<std::array<unsigned char, 4>> scan(static_cast<std::size_t>(w));
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < w; ++x) scan[static_cast<std::size_t>(x)] = float_to_rgbe(img(x, y, 0), img(x, y, 1), img(x, y, 2));
        if (w < 8 || w >= 32768) {
            for (const auto& px : scan) out.insert(out.end(), px.begin(), px.end());
            continue;
        }
        out.push_back(2);
        out.push_back(2);
        out.push_back(static_cast<unsigned char>(w >> 8));
        out.push_back(static_cast<unsigned char>(w & 0xff));
        for (int c = 0; c < 4; ++c) {
            int x = 0;
            while (x < w) {
                // Run of identical bytes?
                int run = 1;
                while (x + run < w && run < 127 &&
                       scan[static_cast<std::size_t>(x + run)][static_cast<std::size_t>(c)] ==
                           scan[static_cast<std::size_t>(x)][static_cast<std::size_t>(c)])
                    ++run;
                if (run >= 3) {
                    out.push_back(static_cast<unsigned char>(128 + run));
                    out.push_back(scan[static_cast<std::size_t>(x)][static_cast<std::size_t>(c)]);
                    x += run;
                    continue;
                }
                // Literal span up to the next run of 3.
                int lit = 0;
                while (x + lit < w && lit < 128) {
                    const int i = x + lit;
                    if (i + 2 < w && scan[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] ==
                                         scan[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(c)] &&
                        scan[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] ==
                            scan[static_cast<std::size_t>(i + 2)][static_cast<std::size_t>(c)])
                        break;
                    ++lit;
                }
                out.push_back(static_cast<unsigned char>(lit));
                for (int i = 0; i < lit; ++i) out.push_back(scan[static_cast<std::size_t>(x + i)][static_cast<std::size_t>(c)]);
                x += lit;
            }
        }
    }
    return out;
}

inline ImageF read_hdr(const std::string& path) {
    try {
        return decode_hdr(detail::read_file(path));
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
}

inline void write_hdr(const std::string& path, const ImageF& img) { detail::write_file(path, encode_hdr(img)); }

// ---------------------------------------------------------------------------
// Float raw

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

inline std::vector<unsigned char> encode_float_raw(const ImageBuffer& buf) {
    const ImageF& img = buf.image;
    if (buf.semantics.empty() || buf.semantics.find_first_of(" \t\n") != std::string::npos)
        throw IoError("float raw: semantics must be a single word");
    std::string header = "MBRAW 1\nwidth " + std::to_string(img.width()) + "\nheight " + std::to_string(img.height()) +
                         "\nchannels " + std::to_string(img.channels()) + "\nsemantics " + buf.semantics +
                         "\nendian little\nend\n";
    std::vector<unsigned char> out(header.begin(), header.end());
    const std::size_t base = out.size();
    out.resize(base + img.data().size() * 4);
    for (std::size_t i = 0; i < img.data().size(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(img.data()[i]);
        for (int b = 0; b < 4; ++b) out[base + 4 * i + static_cast<std::size_t>(b)] = static_cast<unsigned char>(bits >> (8 * b));
    }
    return out;
}

inline ImageBuffer decode_float_raw(const std::vector<unsigned char>& bytes) {
    std::size_t pos = 0;
    const auto read_line = [&]() {
        std::string line;
        while (pos < bytes.size() && bytes[pos] != '\n') line.push_back(static_cast<char>(bytes[pos++]));
        if (pos >= bytes.size()) throw IoError("float raw: truncated header");
        ++pos;
        return line;
    };
    if (read_line() != "MBRAW 1") throw IoError("float raw: bad signature");
    long w = -1, h = -1, c = -1;
    std::string semantics = "data", endian;
    for (;;) {
        const std::string line = read_line();
        if (line == "end") break;
        std::istringstream ls(line);
        ls.imbue(std::locale::classic());
        std::string key;
        ls >> key;
        if (key == "width") ls >> w;
        else if (key == "height") ls >> h;
        else if (key == "channels") ls >> c;
        else if (key == "semantics") ls >> semantics;
        else if (key == "endian") ls >> endian;
        else throw IoError("float raw: unknown header key '" + key + "'");
        if (ls.fail()) throw IoError("float raw: malformed header line '" + line + "'");
    }
    if (w < 0 || h < 0 || c < 1 || c > 64) throw IoError("float raw: missing or invalid dimensions");
    if (endian != "little") throw IoError("float raw: unsupported endianness '" + endian + "'");
    const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * static_cast<std::size_t>(c);
    if (bytes.size() - pos != n * 4)
        throw IoError("float raw: payload size " + std::to_string(bytes.size() - pos) + " does not match header (" +
                      std::to_string(n * 4) + " bytes expected)");
    ImageBuffer out;
    out.depth = BitDepth::F32;
    out.semantics = semantics;
    out.image = ImageF(static_cast<int>(w), static_cast<int>(h), static_cast<int>(c));
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[pos + 4 * i + static_cast<std::size_t>(b)]) << (8 * b);
        out.image.data()[i] = std::bit_cast<float>(bits);
    }
    return out;
}

/// Number of NaN or infinite samples.
inline std::size_t count_nonfinite(const ImageF& img) {
    return static_cast<std::size_t>(
        std::count_if(img.data().begin(), img.data().end(), [](float v) { return !std::isfinite(v); }));
}

struct RawReadOptions {
    /// Reject payloads containing NaN or infinity.
    bool require_finite = false;
};

inline void write_float_raw(const std::string& path, const ImageBuffer& buf) {
    detail::write_file(path, encode_float_raw(buf));
}

inline ImageBuffer read_float_raw(const std::string& path, const RawReadOptions& opt = {}) {
    ImageBuffer out;
    try {
        out = decode_float_raw(detail::read_file(path));
    } catch (const IoError& e) {
        throw IoError(path + ": " + e.what());
    }
    if (opt.require_finite) {
        const std::size_t bad = count_nonfinite(out.image);
        if (bad > 0) throw IoError(path + ": " + std::to_string(bad) + " non-finite samples");
    }
    return out;
}

}  // namespace matbake
