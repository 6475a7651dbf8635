#pragma once

#include <png.h>

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "fsmr/error.hpp"
#include "fsmr/image.hpp"

namespace fsmr::io {

namespace detail {

inline std::string lower_extension(const std::filesystem::path& path) {
    std::string ext = path.extension().string();
    for (char& c : ext) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return ext;
}

// Reads the next whitespace-separated token of a PNM header, skipping '#' comments.
inline std::string pnm_token(std::istream& in) {
    std::string token;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') {
                c = in.get();
            }
        } else if (std::isspace(c)) {
            if (!token.empty()) {
                return token;
            }
        } else {
            token.push_back(static_cast<char>(c));
        }
        c = in.get();
    }
    return token;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f != nullptr) {
            std::fclose(f);
        }
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace detail

/// Binary PGM (P5) bytes for the 8-bit export of `image`.
inline std::vector<std::uint8_t> encode_pgm(const Image& image) {
    std::ostringstream header;
    header << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
    const std::string h = header.str();
    std::vector<std::uint8_t> out(h.begin(), h.end());
    const auto bytes = image.to_bytes();
    out.insert(out.end(), bytes.begin(), bytes.end());
    return out;
}

inline void write_pgm(const Image& image, const std::filesystem::path& path) {
    const auto bytes = encode_pgm(image);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

/// Reads P5 (binary) or P2 (ASCII) graymaps with maxval <= 255.
inline Image read_pgm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    const std::string magic = detail::pnm_token(in);
    if (magic != "P5" && magic != "P2") {
        throw IoError(path.string() + ": not a PGM file");
    }
    int width = 0;
    int height = 0;
    int maxval = 0;
    try {
        width = std::stoi(detail::pnm_token(in));
        height = std::stoi(detail::pnm_token(in));
        maxval = std::stoi(detail::pnm_token(in));
    } catch (const std::exception&) {
        throw IoError(path.string() + ": malformed PGM header");
    }
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255) {
        throw IoError(path.string() + ": unsupported PGM geometry or bit depth");
    }
    std::vector<std::uint8_t> bytes(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    if (magic == "P5") {
        in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
            throw IoError(path.string() + ": truncated PGM data");
        }
    } else {
        for (auto& b : bytes) {
            int v = 0;
            if (!(in >> v)) {
                throw IoError(path.string() + ": truncated PGM data");
            }
            b = static_cast<std::uint8_t>(v);
        }
    }
    return Image::from_bytes(width, height, bytes);
}

inline void write_png(const Image& image, const std::filesystem::path& path) {
    detail::FilePtr file(std::fopen(path.string().c_str(), "wb"));
    if (!file) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (png == nullptr || info == nullptr) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng initialisation failed");
    }
    const auto bytes = image.to_bytes();
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("failed writing " + path.string());
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()), static_cast<png_uint_32>(image.height()), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int n = 0; n < image.height(); ++n) {
        png_write_row(png, const_cast<png_bytep>(bytes.data() + static_cast<std::size_t>(n) * image.width()));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

/// Reads any PNG and reduces it to 8-bit gray (color is converted with libpng's default weights).
inline Image read_png(const std::filesystem::path& path) {
    detail::FilePtr file(std::fopen(path.string().c_str(), "rb"));
    if (!file) {
        throw IoError("cannot open " + path.string());
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (png == nullptr || info == nullptr) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("libpng initialisation failed");
    }
    std::vector<std::uint8_t> bytes;
    int width = 0;
    int height = 0;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError(path.string() + ": invalid PNG");
    }
    png_init_io(png, file.get());
    png_read_info(png, info);
    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    const png_byte color = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);
    if (depth == 16) {
        png_set_strip_16(png);
    }
    if (color == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    }
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    if ((color & PNG_COLOR_MASK_ALPHA) != 0) {
        png_set_strip_alpha(png);
    }
    if ((color & PNG_COLOR_MASK_COLOR) != 0 || color == PNG_COLOR_TYPE_PALETTE) {
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    }
    png_read_update_info(png, info);
    bytes.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    for (int n = 0; n < height; ++n) {
        png_read_row(png, bytes.data() + static_cast<std::size_t>(n) * width, nullptr);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return Image::from_bytes(width, height, bytes);
}

/// Dispatches on the file extension (.png, otherwise PGM).
inline Image read_image(const std::filesystem::path& path) {
    return detail::lower_extension(path) == ".png" ? read_png(path) : read_pgm(path);
}

inline void write_image(const Image& image, const std::filesystem::path& path) {
    if (detail::lower_extension(path) == ".png") {
        write_png(image, path);
    } else {
        write_pgm(image, path);
    }
}

/// Mesh CSV: header `x,y,value`, one sample per row.
inline MeshSampleSet read_mesh_csv(const std::filesystem::path& path, int width, int height) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError(path.string() + ": empty mesh file");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != "x,y,value") {
        throw IoError(path.string() + ": expected header 'x,y,value'");
    }
    MeshSampleSet mesh{{}, width, height};
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") {
            continue;
        }
        std::istringstream fields(line);
        std::string fx;
        std::string fy;
        std::string fv;
        MeshSample s;
        try {
            if (!std::getline(fields, fx, ',') || !std::getline(fields, fy, ',') || !std::getline(fields, fv)) {
                throw std::invalid_argument("field count");
            }
            s.position = {std::stod(fx), std::stod(fy)};
            s.value = std::stod(fv);
        } catch (const std::exception&) {
            throw IoError(path.string() + ": malformed row " + std::to_string(row));
        }
        if (!std::isfinite(s.position.x) || !std::isfinite(s.position.y)) {
            throw IoError(path.string() + ": non-finite position in row " + std::to_string(row));
        }
        mesh.samples.push_back(s);
    }
    return mesh;
}

inline void write_mesh_csv(const MeshSampleSet& mesh, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    out << "x,y,value\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& s : mesh.samples) {
        out << s.position.x << ',' << s.position.y << ',' << s.value << '\n';
    }
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

} // namespace fsmr::io
