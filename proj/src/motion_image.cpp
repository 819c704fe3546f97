#include "fmd/motion_image.hpp"

#include <zlib.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "fmd/errors.hpp"

namespace fmd {

void MotionImage::validate() const {
    if (height < 1 || width < 1) throw ValidationError("motion image has empty dimensions");
    if (pixels.size() != static_cast<Eigen::Index>(height) * width * 3) {
        throw ValidationError("motion image pixel buffer has wrong size");
    }
    for (Eigen::Index i = 0; i < pixels.size(); ++i) {
        const double v = pixels[i];
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ValidationError("pixel value " + std::to_string(v) + " outside [0,1]");
        }
    }
}

MotionImage to_image(const DirectionalMotion& dm) {
    dm.require_unit_norm();
    MotionImage img;
    img.height = dm.bones();
    img.width = dm.frames();
    img.pixels.resize(static_cast<Eigen::Index>(img.height) * img.width * 3);
    for (int b = 0; b < img.height; ++b) {
        for (int f = 0; f < img.width; ++f) {
            const Eigen::Vector3d v = dm.bone(f, b);
            for (int c = 0; c < 3; ++c) {
                const double p = (v[c] + 1.0) / 2.0;
                // Unit components are in [-1,1], so p never leaves [0,1].
                if (!(p >= 0.0 && p <= 1.0)) {
                    throw ValidationError("direction component " + std::to_string(v[c]) +
                                          " outside [-1,1]");
                }
                img.at(b, f, c) = p;
            }
        }
    }
    return img;
}

DirectionalMotion from_image(const MotionImage& img) {
    img.validate();
    DirectionalMotion dm;
    dm.vectors.resize(img.width, 3 * img.height);
    for (int b = 0; b < img.height; ++b) {
        for (int f = 0; f < img.width; ++f) {
            for (int c = 0; c < 3; ++c) {
                dm.vectors(f, 3 * b + c) = 2.0 * img.at(b, f, c) - 1.0;
            }
        }
    }
    return dm;
}

namespace {

void put_u32_be(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v >> 24));
    out.push_back(static_cast<unsigned char>(v >> 16));
    out.push_back(static_cast<unsigned char>(v >> 8));
    out.push_back(static_cast<unsigned char>(v));
}

void put_chunk(std::vector<unsigned char>& out, const char type[4],
               const std::vector<unsigned char>& payload) {
    put_u32_be(out, static_cast<std::uint32_t>(payload.size()));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    const std::uint32_t crc = static_cast<std::uint32_t>(
        crc32(0L, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start)));
    put_u32_be(out, crc);
}

}  // namespace

void write_png(const MotionImage& img, const std::string& path) {
    img.validate();
    const int h = img.height;
    const int w = img.width;

    // Raw scanlines: filter byte 0 + 8-bit RGB triples.
    std::vector<unsigned char> raw;
    raw.reserve(static_cast<std::size_t>(h) * (1 + 3 * w));
    for (int b = 0; b < h; ++b) {
        raw.push_back(0);
        for (int f = 0; f < w; ++f) {
            for (int c = 0; c < 3; ++c) {
                raw.push_back(static_cast<unsigned char>(std::lround(img.at(b, f, c) * 255.0)));
            }
        }
    }

    uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
    std::vector<unsigned char> compressed(compressed_size);
    if (compress2(compressed.data(), &compressed_size, raw.data(), static_cast<uLong>(raw.size()),
                  Z_BEST_COMPRESSION) != Z_OK) {
        throw IOError("PNG deflate failed");
    }
    compressed.resize(compressed_size);

    std::vector<unsigned char> png = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
    std::vector<unsigned char> ihdr;
    put_u32_be(ihdr, static_cast<std::uint32_t>(w));
    put_u32_be(ihdr, static_cast<std::uint32_t>(h));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(2);  // truecolor
    ihdr.push_back(0);
    ihdr.push_back(0);
    ihdr.push_back(0);
    put_chunk(png, "IHDR", ihdr);
    put_chunk(png, "IDAT", compressed);
    put_chunk(png, "IEND", {});

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
    if (!out) throw IOError("failed writing '" + path + "'");
}

}  // namespace fmd
