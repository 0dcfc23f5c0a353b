#pragma once

#include <filesystem>
#include <vector>

#include "droso/imaging.hpp"

namespace droso {

/// Decodes .pgm/.ppm (binary P5/P6), .png and .jpg/.jpeg by extension.
RawFrame read_frame(const std::filesystem::path& path);

/// Binary P5 for gray frames, P6 for RGB.
void write_pnm(const RawFrame& frame, const std::filesystem::path& path);

/// Regular files with a supported extension, sorted by filename.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

/// Decodes every frame of list_frames(dir). On failure throws DataError
/// listing all files that could not be decoded.
std::vector<RawFrame> load_frames(const std::filesystem::path& dir);

}  // namespace droso
