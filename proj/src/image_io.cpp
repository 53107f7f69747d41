#include "fba/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <memory>
#include <vector>

namespace fba {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
    if (s.size() < suffix.size()) return false;
    std::string tail = s.substr(s.size() - suffix.size());
    std::transform(tail.begin(), tail.end(), tail.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return tail == suffix;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

bool host_is_little_endian() {
    return std::endian::native == std::endian::little;
}

PlanarImage read_png(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw IoError("cannot open " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, f.get()) != 8 || png_sig_cmp(header, 0, 8))
        throw IoError("not a PNG file: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                             nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw IoError("libpng init failed for " + path);

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("PNG decode failed for " + path);
    }

    png_init_io(png, f.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8)
        png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    if (bit_depth == 16 && host_is_little_endian()) png_set_swap(png);

    png_read_update_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    const int depth = png_get_bit_depth(png, info);
    const int nch = png_get_channels(png, info);
    if (depth != 8 && depth != 16) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("unsupported PNG bit depth in " + path);
    }
    if (nch != 1 && nch != 3) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("unsupported PNG channel count in " + path);
    }

    const std::size_t row_bytes = png_get_rowbytes(png, info);
    std::vector<png_byte> data(row_bytes * height);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = data.data() + row_bytes * y;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    PlanarImage img(width, height, nch);
    const double scale = depth == 8 ? 1.0 / 255.0 : 1.0 / 65535.0;
    for (int y = 0; y < height; ++y) {
        if (depth == 8) {
            const png_byte* row = data.data() + row_bytes * y;
            for (int x = 0; x < width; ++x)
                for (int c = 0; c < nch; ++c)
                    img.at(c, y, x) = row[x * nch + c] * scale;
        } else {
            const std::uint16_t* row =
                reinterpret_cast<const std::uint16_t*>(data.data() + row_bytes * y);
            for (int x = 0; x < width; ++x)
                for (int c = 0; c < nch; ++c)
                    img.at(c, y, x) = row[x * nch + c] * scale;
        }
    }
    return img;
}

void write_png(const PlanarImage& img, const std::string& path, int bits) {
    if (bits != 8 && bits != 16)
        throw std::invalid_argument("write_image: PNG bits must be 8 or 16");
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError("cannot write " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                              nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (!png || !info) throw IoError("libpng init failed for " + path);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG encode failed for " + path);
    }

    png_init_io(png, f.get());
    const int color_type =
        img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
    png_set_IHDR(png, info, img.width, img.height, bits, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (bits == 16 && host_is_little_endian()) png_set_swap(png);

    const double scale = bits == 8 ? 255.0 : 65535.0;
    const std::size_t row_elems = static_cast<std::size_t>(img.width) * img.channels;
    std::vector<std::uint16_t> row16(row_elems);
    std::vector<std::uint8_t> row8(row_elems);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < img.channels; ++c) {
                const double v = std::clamp(img.at(c, y, x), 0.0, 1.0);
                const auto q = static_cast<std::uint32_t>(std::lround(v * scale));
                if (bits == 8)
                    row8[x * img.channels + c] = static_cast<std::uint8_t>(q);
                else
                    row16[x * img.channels + c] = static_cast<std::uint16_t>(q);
            }
        }
        png_write_row(png, bits == 8
                               ? reinterpret_cast<png_bytep>(row8.data())
                               : reinterpret_cast<png_bytep>(row16.data()));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// PFM: "PF"/"Pf", dimensions, scale (negative = little endian), rows stored
// bottom-up as float32.
PlanarImage read_pfm(const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "rb"));
    if (!f) throw IoError("cannot open " + path);

    char tag[3] = {0, 0, 0};
    if (std::fscanf(f.get(), "%2s", tag) != 1) throw IoError("bad PFM header in " + path);
    int channels;
    if (std::strcmp(tag, "PF") == 0)
        channels = 3;
    else if (std::strcmp(tag, "Pf") == 0)
        channels = 1;
    else
        throw IoError("not a PFM file: " + path);

    int width = 0, height = 0;
    double scale = 0.0;
    if (std::fscanf(f.get(), "%d %d %lf", &width, &height, &scale) != 3 ||
        width < 1 || height < 1 || scale == 0.0)
        throw IoError("bad PFM header in " + path);
    std::fgetc(f.get());  // single whitespace byte before the raster

    const bool file_little = scale < 0.0;
    const std::size_t count = static_cast<std::size_t>(width) * height * channels;
    std::vector<float> raw(count);
    if (std::fread(raw.data(), sizeof(float), count, f.get()) != count)
        throw IoError("truncated PFM data in " + path);
    if (file_little != host_is_little_endian()) {
        for (float& v : raw) {
            auto* b = reinterpret_cast<unsigned char*>(&v);
            std::swap(b[0], b[3]);
            std::swap(b[1], b[2]);
        }
    }

    PlanarImage img(width, height, channels);
    for (int y = 0; y < height; ++y) {
        const int src_y = height - 1 - y;  // PFM rows run bottom-up
        for (int x = 0; x < width; ++x)
            for (int c = 0; c < channels; ++c)
                img.at(c, y, x) =
                    raw[(static_cast<std::size_t>(src_y) * width + x) * channels + c];
    }
    return img;
}

void write_pfm(const PlanarImage& img, const std::string& path) {
    FilePtr f(std::fopen(path.c_str(), "wb"));
    if (!f) throw IoError("cannot write " + path);

    const char* tag = img.channels == 3 ? "PF" : "Pf";
    const double scale = host_is_little_endian() ? -1.0 : 1.0;
    std::fprintf(f.get(), "%s\n%d %d\n%.1f\n", tag, img.width, img.height, scale);

    const std::size_t row_elems = static_cast<std::size_t>(img.width) * img.channels;
    std::vector<float> row(row_elems);
    for (int y = img.height - 1; y >= 0; --y) {
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c)
                row[x * img.channels + c] = static_cast<float>(img.at(c, y, x));
        if (std::fwrite(row.data(), sizeof(float), row_elems, f.get()) != row_elems)
            throw IoError("short write to " + path);
    }
}

}  // namespace

PlanarImage read_image(const std::string& path) {
    if (ends_with(path, ".pfm")) return read_pfm(path);
    if (ends_with(path, ".png")) return read_png(path);
    throw IoError("unsupported image format: " + path);
}

void write_image(const PlanarImage& img, const std::string& path, int png_bits) {
    if (ends_with(path, ".pfm")) {
        write_pfm(img, path);
        return;
    }
    if (ends_with(path, ".png")) {
        write_png(img, path, png_bits);
        return;
    }
    throw IoError("unsupported image format: " + path);
}

}  // namespace fba
