// Copyright 2026 The coig Authors
// SPDX-License-Identifier: Apache-2.0

#include "coig/raster.hpp"

#include <algorithm>
#include <array>
#include <map>

#include <zlib.h>

#include "coig/error.hpp"

namespace coig::raster {

namespace {

struct Rgb {
    std::uint8_t r, g, b;
};

const std::map<std::string, Rgb, std::less<>> kPalette{
    {"red", {220, 40, 40}},     {"blue", {40, 80, 220}},     {"green", {40, 170, 70}},  {"yellow", {240, 210, 40}},
    {"orange", {245, 140, 30}}, {"purple", {130, 60, 170}},  {"pink", {240, 140, 180}}, {"brown", {130, 80, 40}},
    {"black", {20, 20, 20}},    {"white", {250, 250, 250}},  {"cyan", {40, 200, 220}},  {"magenta", {210, 40, 180}},
    {"teal", {30, 130, 130}},   {"gold", {210, 170, 50}},    {"silver", {190, 190, 200}}, {"beige", {225, 210, 170}},
    {"maroon", {120, 20, 40}},  {"navy", {20, 30, 110}},     {"gray", {160, 160, 160}}};

constexpr Rgb kUnknown{90, 120, 150};

// 3x5 glyphs, rows top to bottom.
const std::map<char, std::string_view> kGlyphs{
    {'a', "010101111101101"}, {'b', "110101110101110"}, {'c', "011100100100011"}, {'d', "110101101101110"},
    {'e', "111100110100111"}, {'f', "111100110100100"}, {'g', "011100101101011"}, {'h', "101101111101101"},
    {'i', "111010010010111"}, {'j', "001001001101010"}, {'k', "101101110101101"}, {'l', "100100100100111"},
    {'m', "101111111101101"}, {'n', "110101101101101"}, {'o', "010101101101010"}, {'p', "110101110100100"},
    {'q', "010101101110011"}, {'r', "110101110101101"}, {'s', "011100010001110"}, {'t', "111010010010010"},
    {'u', "101101101101111"}, {'v', "101101101101010"}, {'w', "101101111111101"}, {'x', "101101010101101"},
    {'y', "101101010010010"}, {'z', "111001010100111"}, {'0', "111101101101111"}, {'1', "010110010010111"},
    {'2', "110001010100111"}, {'3', "110001010001110"}, {'4', "101101111001001"}, {'5', "111100110001110"},
    {'6', "011100111101111"}, {'7', "111001010010010"}, {'8', "111101111101111"}, {'9', "111101111001110"}};

class Canvas {
public:
    Canvas(int w, int h, Rgb fill) : w_(w), h_(h), px_(static_cast<std::size_t>(w * h * 3)) {
        rect(0, 0, w, h, fill);
    }

    void set(int x, int y, Rgb c) {
        if (x < 0 || y < 0 || x >= w_ || y >= h_) return;
        const auto i = static_cast<std::size_t>((y * w_ + x) * 3);
        px_[i] = c.r;
        px_[i + 1] = c.g;
        px_[i + 2] = c.b;
    }

    void rect(int x0, int y0, int x1, int y1, Rgb c) {
        for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) set(x, y, c);
        }
    }

    void ellipse(int x0, int y0, int x1, int y1, Rgb c) {
        const double cx = (x0 + x1) / 2.0, cy = (y0 + y1) / 2.0;
        const double rx = (x1 - x0) / 2.0, ry = (y1 - y0) / 2.0;
        for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) {
                const double dx = (x + 0.5 - cx) / rx, dy = (y + 0.5 - cy) / ry;
                if (dx * dx + dy * dy <= 1.0) set(x, y, c);
            }
        }
    }

    void outline(int x0, int y0, int x1, int y1, Rgb c) {
        rect(x0, y0, x1, y0 + 1, c);
        rect(x0, y1 - 1, x1, y1, c);
        rect(x0, y0, x0 + 1, y1, c);
        rect(x1 - 1, y0, x1, y1, c);
    }

    void label(int x, int y, std::string_view s, Rgb c) {
        constexpr int scale = 2;
        for (char ch : s) {
            const auto it = kGlyphs.find(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
            if (it != kGlyphs.end()) {
                for (int row = 0; row < 5; ++row) {
                    for (int col = 0; col < 3; ++col) {
                        if (it->second[static_cast<std::size_t>(row * 3 + col)] == '1') {
                            rect(x + col * scale, y + row * scale, x + (col + 1) * scale, y + (row + 1) * scale, c);
                        }
                    }
                }
            }
            x += 4 * scale;
        }
    }

    const Bytes& pixels() const { return px_; }

private:
    int w_, h_;
    Bytes px_;
};

Rgb color_of(const std::optional<std::string>& name) {
    if (!name) return kUnknown;
    const auto it = kPalette.find(text::lower(*name));
    return it == kPalette.end() ? kUnknown : it->second;
}

Rgb ink_for(Rgb c) { return (c.r * 3 + c.g * 6 + c.b) / 10 > 140 ? Rgb{0, 0, 0} : Rgb{255, 255, 255}; }

Rgb tint_of(const std::string& background) {
    const auto h = sha256_hex(background);
    auto byte = [&](std::size_t i) { return static_cast<std::uint8_t>(200 + std::stoi(h.substr(i, 2), nullptr, 16) % 50); };
    return {byte(0), byte(2), byte(4)};
}

void put_u32(Bytes& out, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void chunk(Bytes& out, const char* type, const Bytes& data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    const auto start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data.begin(), data.end());
    const auto crc = ::crc32(0, out.data() + start, static_cast<uInt>(out.size() - start));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

Bytes encode_png(int width, int height, std::span<const std::uint8_t> rgb) {
    if (width <= 0 || height <= 0 || rgb.size() != static_cast<std::size_t>(width) * height * 3) {
        throw Error(Errc::precondition_violated, "pixel buffer does not match dimensions");
    }
    Bytes raw;
    raw.reserve(static_cast<std::size_t>(height) * (width * 3 + 1));
    for (int y = 0; y < height; ++y) {
        raw.push_back(0);
        const auto row = rgb.subspan(static_cast<std::size_t>(y) * width * 3, static_cast<std::size_t>(width) * 3);
        raw.insert(raw.end(), row.begin(), row.end());
    }
    uLongf len = compressBound(static_cast<uLong>(raw.size()));
    Bytes idat(len);
    if (compress2(idat.data(), &len, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK) {
        throw Error(Errc::io_error, "deflate failed");
    }
    idat.resize(len);

    Bytes out{0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    Bytes ihdr;
    put_u32(ihdr, static_cast<std::uint32_t>(width));
    put_u32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.insert(ihdr.end(), {8, 2, 0, 0, 0});
    chunk(out, "IHDR", ihdr);
    chunk(out, "IDAT", idat);
    chunk(out, "IEND", {});
    return out;
}

ImageArtifact render(const SceneDocument& scene, int width, int height) {
    Canvas c(width, height, scene.background ? tint_of(*scene.background) : Rgb{255, 255, 255});
    if (scene.background) c.label(4, height - 14, *scene.background, {90, 90, 90});

    const int bw = width * 3 / 8, bh = height * 3 / 8;
    std::map<Position, int> stacked;
    for (const auto& e : scene.entities) {
        int x = (width - bw) / 2, y = (height - bh) / 2;
        switch (e.position) {
            case Position::left: x = width / 16; break;
            case Position::right: x = width - bw - width / 16; break;
            case Position::top: y = height / 16; break;
            case Position::bottom: y = height - bh - height / 16; break;
            case Position::center: break;
        }
        const int shift = 10 * stacked[e.position]++;
        x += shift;
        y += shift;
        const Rgb fill = e.placeholder ? kPalette.at("gray") : color_of(e.color);
        const bool round = e.shape && (e.shape->find("round") != std::string::npos ||
                                       e.shape->find("circ") != std::string::npos ||
                                       e.shape->find("oval") != std::string::npos ||
                                       e.shape->find("spher") != std::string::npos);
        if (round) c.ellipse(x, y, x + bw, y + bh, fill);
        else c.rect(x, y, x + bw, y + bh, fill);
        if (e.texture && !e.placeholder) {
            const Rgb ink = ink_for(fill);
            for (int sy = y + 4; sy < y + bh; sy += 8) c.rect(x + 2, sy, x + bw - 2, sy + 1, ink);
        }
        c.outline(x, y, x + bw, y + bh, e.locked ? Rgb{0, 0, 0} : Rgb{120, 120, 120});
        c.label(x + 4, y + 4, e.id, ink_for(fill));
        c.label(x + 4, y + 18, e.cls, ink_for(fill));
    }
    return ImageArtifact::from_png(encode_png(width, height, c.pixels()), width, height);
}

ImageArtifact blank(int width, int height) {
    Canvas c(width, height, {255, 255, 255});
    return ImageArtifact::from_png(encode_png(width, height, c.pixels()), width, height);
}

}  // namespace coig::raster
