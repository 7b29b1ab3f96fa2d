/**********
 *   Copyright 2026 The polarsep Authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
\**********/
#include "polarsep/image_io.hpp"

#include "polarsep/errors.hpp"
#include "polarsep/metrics.hpp"

#include <png.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace polarsep {

namespace {

std::string read_token(std::istream& in) {
    std::string token;
    int ch;
    while ((ch = in.get()) != EOF && std::isspace(ch)) {
    }
    if (ch == EOF)
        throw IoError(IoError::Kind::MalformedHeader, "pfm: unexpected end of header");
    token.push_back(static_cast<char>(ch));
    while ((ch = in.peek()) != EOF && !std::isspace(ch)) {
        token.push_back(static_cast<char>(in.get()));
        if (token.size() > 64)
            throw IoError(IoError::Kind::MalformedHeader, "pfm: header token too long");
    }
    return token;
}

std::size_t parse_dimension(const std::string& token) {
    if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos)
        throw IoError(IoError::Kind::MalformedHeader, "pfm: bad dimension '" + token + "'");
    if (token.size() > 12)
        throw IoError(IoError::Kind::DimensionOverflow, "pfm: dimension too large: " + token);
    const auto v = std::stoull(token);
    if (v == 0)
        throw IoError(IoError::Kind::MalformedHeader, "pfm: zero dimension");
    return static_cast<std::size_t>(v);
}

std::uint32_t byteswap32(std::uint32_t v) {
    return ((v & 0xFFu) << 24) | ((v & 0xFF00u) << 8) | ((v >> 8) & 0xFF00u) | (v >> 24);
}

} // namespace

Image read_pfm(std::istream& in) {
    const std::string magic = read_token(in);
    std::size_t channels;
    if (magic == "PF")
        channels = 3;
    else if (magic == "Pf")
        channels = 1;
    else
        throw IoError(IoError::Kind::MalformedHeader, "pfm: bad magic '" + magic + "'");
    const std::size_t width = parse_dimension(read_token(in));
    const std::size_t height = parse_dimension(read_token(in));
    if (width > kMaxImagePixels / height)
        throw IoError(IoError::Kind::DimensionOverflow, "pfm: image dimensions too large");
    const std::string scale_token = read_token(in);
    double scale = 0.0;
    try {
        std::size_t used = 0;
        scale = std::stod(scale_token, &used);
        if (used != scale_token.size())
            throw std::invalid_argument(scale_token);
    } catch (const std::exception&) {
        throw IoError(IoError::Kind::MalformedHeader, "pfm: bad scale '" + scale_token + "'");
    }
    if (scale == 0.0 || !std::isfinite(scale))
        throw IoError(IoError::Kind::MalformedHeader, "pfm: scale must be finite and non-zero");
    // Exactly one whitespace character separates the header from the payload.
    if (!std::isspace(in.get()))
        throw IoError(IoError::Kind::MalformedHeader, "pfm: missing header terminator");

    const bool little = scale < 0.0;
    const bool swap = little != (std::endian::native == std::endian::little);
    const std::size_t count = width * height * channels;
    std::vector<float> raw(count);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(float))
        throw IoError(IoError::Kind::TruncatedPayload, "pfm: payload truncated");

    Image img(height, width, channels);
    for (std::size_t r = 0; r < height; ++r) {
        const std::size_t file_row = height - 1 - r;
        for (std::size_t c = 0; c < width; ++c)
            for (std::size_t ch = 0; ch < channels; ++ch) {
                float v = raw[(file_row * width + c) * channels + ch];
                if (swap)
                    v = std::bit_cast<float>(byteswap32(std::bit_cast<std::uint32_t>(v)));
                img(r, c, ch) = v;
            }
    }
    return img;
}

Image read_pfm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError(IoError::Kind::Open, "cannot open " + path.string());
    try {
        return read_pfm(in);
    } catch (const IoError& e) {
        throw IoError(e.kind(), path.string() + ": " + e.what());
    }
}

void write_pfm(std::ostream& out, const Image& img) {
    if (img.empty())
        throw ValidationError("pfm: cannot write an empty image");
    const auto h = img.height(), w = img.width(), channels = img.channels();
    out << (channels == 3 ? "PF" : "Pf") << '\n' << w << ' ' << h << '\n' << "-1.0" << '\n';
    std::vector<float> raw(h * w * channels);
    for (std::size_t r = 0; r < h; ++r) {
        const std::size_t file_row = h - 1 - r;
        for (std::size_t c = 0; c < w; ++c)
            for (std::size_t ch = 0; ch < channels; ++ch) {
                float v = static_cast<float>(img(r, c, ch));
                if constexpr (std::endian::native == std::endian::big)
                    v = std::bit_cast<float>(byteswap32(std::bit_cast<std::uint32_t>(v)));
                raw[(file_row * w + c) * channels + ch] = v;
            }
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size() * sizeof(float)));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError(IoError::Kind::Write, "cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw IoError(IoError::Kind::Write, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw IoError(IoError::Kind::Write, "cannot rename " + tmp.string() + " to " + path.string());
}

void write_pfm(const std::filesystem::path& path, const Image& img) {
    std::ostringstream buffer(std::ios::binary);
    write_pfm(buffer, img);
    write_file_atomic(path, buffer.str());
}

Image read_png(const std::filesystem::path& path) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.string().c_str()))
        throw IoError(IoError::Kind::Open, "png: cannot read " + path.string() + ": " + image.message);
    const bool colour = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = colour ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const std::size_t channels = colour ? 3 : 1;
    if (static_cast<std::size_t>(image.width) > kMaxImagePixels / std::max<std::size_t>(1, image.height)) {
        png_image_free(&image);
        throw IoError(IoError::Kind::DimensionOverflow, "png: image dimensions too large");
    }
    std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr))
        throw IoError(IoError::Kind::TruncatedPayload, "png: decode failed for " + path.string() + ": " +
                                                           image.message);
    Image img(image.height, image.width, channels);
    for (std::size_t r = 0; r < img.height(); ++r)
        for (std::size_t c = 0; c < img.width(); ++c)
            for (std::size_t ch = 0; ch < channels; ++ch)
                img(r, c, ch) = srgb_to_linear(buffer[(r * img.width() + c) * channels + ch] / 255.0);
    return img;
}

void write_png(const std::filesystem::path& path, const Image& img) {
    if (img.empty())
        throw ValidationError("png: cannot write an empty image");
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    const auto channels = img.channels();
    std::vector<png_byte> buffer(img.size());
    for (std::size_t r = 0; r < img.height(); ++r)
        for (std::size_t c = 0; c < img.width(); ++c)
            for (std::size_t ch = 0; ch < channels; ++ch)
                buffer[(r * img.width() + c) * channels + ch] =
                    static_cast<png_byte>(std::lround(linear_to_srgb(img(r, c, ch)) * 255.0));

    png_alloc_size_t size = 0;
    if (!png_image_write_get_memory_size(image, size, 0, buffer.data(), 0, nullptr))
        throw IoError(IoError::Kind::Write, std::string("png: encode failed: ") + image.message);
    std::string bytes(size, '\0');
    if (!png_image_write_to_memory(&image, bytes.data(), &size, 0, buffer.data(), 0, nullptr))
        throw IoError(IoError::Kind::Write, std::string("png: encode failed: ") + image.message);
    bytes.resize(size);
    write_file_atomic(path, bytes);
}

} // namespace polarsep
