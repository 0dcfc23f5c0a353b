#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "droso/voting.hpp"

namespace droso {

inline constexpr std::uint8_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderBytes = 36;

/// Exact file size for an ensemble of the given shape.
std::size_t serialized_size(std::size_t models, std::size_t input_length, std::size_t activations,
                            std::size_t places, bool quantized) noexcept;

std::vector<std::uint8_t> serialize(const Ensemble& ensemble);

/// Throws FormatError (or UnsupportedVersionError) naming the failing offset.
Ensemble deserialize(std::span<const std::uint8_t> bytes);

/// Writes via a temporary file and rename. Returns the byte count.
std::size_t save(const Ensemble& ensemble, const std::filesystem::path& path);

Ensemble load(const std::filesystem::path& path);

}  // namespace droso
