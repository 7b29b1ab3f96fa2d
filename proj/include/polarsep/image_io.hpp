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
#ifndef POLARSEP_IMAGE_IO_HPP
#define POLARSEP_IMAGE_IO_HPP

#include "polarsep/image.hpp"

#include <filesystem>
#include <iosfwd>

namespace polarsep {

/// Largest pixel count accepted by the readers.
inline constexpr std::size_t kMaxImagePixels = std::size_t{1} << 28;

/// Portable Float Map, 1 ("Pf") or 3 ("PF") channels. Written little-endian
/// (negative scale) with rows bottom to top, as the format prescribes.
/// Samples are 32-bit floats, so data already representable as float
/// round-trips bit-exactly.
Image read_pfm(std::istream& in);
Image read_pfm(const std::filesystem::path& path);
void write_pfm(std::ostream& out, const Image& img);
/// Writes through a temporary file and renames it into place.
void write_pfm(const std::filesystem::path& path, const Image& img);

/// 8-bit PNG (gray or RGB). Linear values are clamped and sRGB-encoded on
/// write; read decodes sRGB back to linear.
Image read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& img);

/// Atomically replaces path with the given bytes (temporary file + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

} // namespace polarsep

#endif
