#ifndef CHAOKEY_IMAGE_HPP
#define CHAOKEY_IMAGE_HPP

#include <array>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <png.h>

#include "chaokey/errors.hpp"

namespace chaokey {

/// 8-bit RGB image stored as three row-major channel planes (R, G, B).
struct RgbImage {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::array<std::vector<std::uint8_t>, 3> ch;

    RgbImage() = default;
    RgbImage(std::uint32_t w, std::uint32_t h) : width(w), height(h) {
        for (auto& c : ch) c.assign(static_cast<std::size_t>(w) * h, 0);
    }

    std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }
    bool empty() const { return pixels() == 0; }

    std::uint8_t& at(int channel, std::uint32_t x, std::uint32_t y) {
        return ch[channel][static_cast<std::size_t>(y) * width + x];
    }
    std::uint8_t at(int channel, std::uint32_t x, std::uint32_t y) const {
        return ch[channel][static_cast<std::size_t>(y) * width + x];
    }

    bool operator==(const RgbImage& other) const = default;
};

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    FilePtr f(std::fopen(path.string().c_str(), mode));
    if (!f) throw IoError("cannot open " + path.string());
    return f;
}

} // namespace detail

inline RgbImage read_png(const std::filesystem::path& path) {
    auto file = detail::open_file(path, "rb");

    png_byte header[8];
    if (std::fread(header, 1, 8, file.get()) != 8 || png_sig_cmp(header, 0, 8))
        throw FormatError("not a PNG file: " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_read_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("corrupt PNG: " + path.string());
    }

    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    // Normalize everything to 8-bit RGB.
    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY ||
        png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    const int passes = png_set_interlace_handling(png);
    png_read_update_info(png, info);

    const std::uint32_t w = png_get_image_width(png, info);
    const std::uint32_t h = png_get_image_height(png, info);

    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(h) *
                                     png_get_rowbytes(png, info));
    std::vector<png_bytep> rows(h);
    for (std::uint32_t y = 0; y < h; ++y)
        rows[y] = pixels.data() + static_cast<std::size_t>(y) * png_get_rowbytes(png, info);
    for (int pass = 0; pass < passes; ++pass)
        for (std::uint32_t y = 0; y < h; ++y) png_read_row(png, rows[y], nullptr);
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    RgbImage img(w, h);
    for (std::uint32_t y = 0; y < h; ++y)
        for (std::uint32_t x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) img.at(c, x, y) = rows[y][3 * x + c];
    return img;
}

inline void write_png(const std::filesystem::path& path, const RgbImage& img) {
    if (img.empty()) throw InvalidArgError("write_png: empty image");
    auto file = detail::open_file(path, "wb");

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png_create_info_struct failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed: " + path.string());
    }

    png_init_io(png, file.get());
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<std::uint8_t> row(static_cast<std::size_t>(img.width) * 3);
    for (std::uint32_t y = 0; y < img.height; ++y) {
        for (std::uint32_t x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) row[3 * x + c] = img.at(c, x, y);
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

inline RgbImage read_ppm(const std::filesystem::path& path) {
    auto file = detail::open_file(path, "rb");

    auto next_token = [&]() -> std::string {
        std::string tok;
        int c;
        for (;;) {
            c = std::fgetc(file.get());
            if (c == EOF) throw FormatError("truncated PPM header: " + path.string());
            if (c == '#') { // comment to end of line
                while (c != EOF && c != '\n') c = std::fgetc(file.get());
                continue;
            }
            if (!std::isspace(c)) break;
        }
        while (c != EOF && !std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            c = std::fgetc(file.get());
        }
        return tok;
    };

    if (next_token() != "P6") throw FormatError("not a binary PPM (P6): " + path.string());
    const long w = std::stol(next_token());
    const long h = std::stol(next_token());
    const long maxval = std::stol(next_token());
    if (w <= 0 || h <= 0 || maxval != 255)
        throw FormatError("unsupported PPM geometry: " + path.string());

    RgbImage img(static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(h));
    std::vector<std::uint8_t> raw(static_cast<std::size_t>(w) * h * 3);
    if (std::fread(raw.data(), 1, raw.size(), file.get()) != raw.size())
        throw FormatError("truncated PPM pixel data: " + path.string());
    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * h; ++i)
        for (int c = 0; c < 3; ++c) img.ch[c][i] = raw[3 * i + c];
    return img;
}

inline void write_ppm(const std::filesystem::path& path, const RgbImage& img) {
    if (img.empty()) throw InvalidArgError("write_ppm: empty image");
    auto file = detail::open_file(path, "wb");
    const std::string header =
        "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    if (std::fwrite(header.data(), 1, header.size(), file.get()) != header.size())
        throw IoError("PPM write failed: " + path.string());
    std::vector<std::uint8_t> raw(img.pixels() * 3);
    for (std::size_t i = 0; i < img.pixels(); ++i)
        for (int c = 0; c < 3; ++c) raw[3 * i + c] = img.ch[c][i];
    if (std::fwrite(raw.data(), 1, raw.size(), file.get()) != raw.size())
        throw IoError("PPM write failed: " + path.string());
}

/// Reads a PNG or binary PPM, dispatching on the file's magic bytes.
inline RgbImage read_image(const std::filesystem::path& path) {
    auto file = detail::open_file(path, "rb");
    unsigned char magic[2] = {0, 0};
    if (std::fread(magic, 1, 2, file.get()) != 2)
        throw FormatError("file too short: " + path.string());
    file.reset();
    if (magic[0] == 'P' && magic[1] == '6') return read_ppm(path);
    if (magic[0] == 0x89 && magic[1] == 'P') return read_png(path);
    throw FormatError("unrecognized image format: " + path.string());
}

/// Writes PNG or PPM depending on the extension (.ppm selects PPM).
inline void write_image(const std::filesystem::path& path, const RgbImage& img) {
    if (path.extension() == ".ppm") write_ppm(path, img);
    else write_png(path, img);
}

} // namespace chaokey

#endif
