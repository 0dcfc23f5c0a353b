#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "droso/imaging.hpp"

namespace droso {

inline constexpr std::size_t kSynthWidth = 128;
inline constexpr std::size_t kSynthHeight = 64;

struct SynthConfig {
    std::uint64_t seed = 1;
    std::size_t places = 50;
    double noise_sigma = 0.0;       // fraction of 255
    double brightness_shift = 0.0;  // fraction of 255
    int shift_px = 0;               // circular horizontal shift

    void validate() const;
};

/// `places` pairwise-distinct 128x64 gray frames built from gradients and rectangles.
std::vector<RawFrame> generate_reference(const SynthConfig& cfg);

/// Shift, brighten, add Gaussian noise, clamp. Seeded per frame.
std::vector<RawFrame> generate_query(std::span<const RawFrame> reference, const SynthConfig& cfg);

}  // namespace droso
