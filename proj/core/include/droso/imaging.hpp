#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace droso {

/// Working resolution every frame is reduced to before encoding.
inline constexpr std::size_t kWorkWidth = 64;
inline constexpr std::size_t kWorkHeight = 32;
inline constexpr std::size_t kImageLength = kWorkWidth * kWorkHeight;  // 2048

/// 8-bit frame, row-major, channels interleaved (1 = gray, 3 = RGB).
struct RawFrame {
    std::size_t width = 0;
    std::size_t height = 0;
    std::size_t channels = 1;
    std::vector<std::uint8_t> pixels;

    RawFrame() = default;
    RawFrame(std::size_t w, std::size_t h, std::size_t c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c), pixels(w * h * c, fill) {}

    /// Throws ParameterError unless the invariants hold.
    void validate() const;

    std::uint8_t& at(std::size_t x, std::size_t y, std::size_t c = 0) {
        return pixels[(y * width + x) * channels + c];
    }
    std::uint8_t at(std::size_t x, std::size_t y, std::size_t c = 0) const {
        return pixels[(y * width + x) * channels + c];
    }

    friend bool operator==(const RawFrame&, const RawFrame&) = default;
};

/// Normalized grayscale frame flattened row-major; values in [0, 1].
struct ImageVector {
    std::vector<float> values;

    ImageVector() = default;
    explicit ImageVector(std::vector<float> v) : values(std::move(v)) {}

    std::size_t size() const noexcept { return values.size(); }
    std::span<const float> view() const noexcept { return values; }

    friend bool operator==(const ImageVector&, const ImageVector&) = default;
};

/// Luma conversion round(0.299 R + 0.587 G + 0.114 B); identity on gray frames.
RawFrame to_grayscale(const RawFrame& frame);

/// Area-average downsampling with fractional pixel coverage. Input must be
/// single-channel. Exact integer arithmetic, round half up.
RawFrame resize_box(const RawFrame& frame, std::size_t out_w, std::size_t out_h);

/// 64x32 gray frame -> 2048 values in [0,1]. Throws DimensionError otherwise.
ImageVector flatten_normalize(const RawFrame& frame);

/// to_grayscale, resize_box to 64x32, flatten_normalize.
ImageVector preprocess(const RawFrame& frame);

}  // namespace droso
