#include "droso/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "droso/error.hpp"

namespace droso {

void RawFrame::validate() const {
    if (width == 0 || height == 0) throw ParameterError("frame dimensions must be positive");
    if (channels != 1 && channels != 3)
        throw ParameterError("frame must have 1 or 3 channels, got " + std::to_string(channels));
    if (pixels.size() != width * height * channels)
        throw ParameterError("frame pixel buffer holds " + std::to_string(pixels.size()) +
                             " bytes, expected " + std::to_string(width * height * channels));
}

RawFrame to_grayscale(const RawFrame& frame) {
    frame.validate();
    if (frame.channels == 1) return frame;

    RawFrame gray(frame.width, frame.height, 1);
    for (std::size_t i = 0; i < frame.width * frame.height; ++i) {
        const std::uint8_t* rgb = &frame.pixels[i * 3];
        const double luma = 0.299 * rgb[0] + 0.587 * rgb[1] + 0.114 * rgb[2];
        gray.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(luma), 0L, 255L));
    }
    return gray;
}

namespace {

// Overlap of output cell `out` with source pixel `src` along one axis, in
// units where a source pixel spans `out_len` and an output cell spans `in_len`.
std::uint64_t overlap(std::size_t src, std::size_t out, std::size_t in_len, std::size_t out_len) {
    const std::uint64_t src_lo = src * out_len;
    const std::uint64_t src_hi = src_lo + out_len;
    const std::uint64_t cell_lo = out * in_len;
    const std::uint64_t cell_hi = cell_lo + in_len;
    const std::uint64_t lo = std::max(src_lo, cell_lo);
    const std::uint64_t hi = std::min(src_hi, cell_hi);
    return hi > lo ? hi - lo : 0;
}

}  // namespace

RawFrame resize_box(const RawFrame& frame, std::size_t out_w, std::size_t out_h) {
    frame.validate();
    if (frame.channels != 1) throw ParameterError("resize_box expects a single-channel frame");
    if (out_w == 0 || out_h == 0) throw ParameterError("output dimensions must be positive");

    const std::size_t in_w = frame.width;
    const std::size_t in_h = frame.height;
    // Total weight of one output cell: in_w * in_h in scaled units.
    const std::uint64_t total = static_cast<std::uint64_t>(in_w) * in_h;

    RawFrame out(out_w, out_h, 1);
    for (std::size_t oy = 0; oy < out_h; ++oy) {
        const std::size_t y0 = oy * in_h / out_h;
        const std::size_t y1 = std::min(in_h, ((oy + 1) * in_h + out_h - 1) / out_h);
        for (std::size_t ox = 0; ox < out_w; ++ox) {
            const std::size_t x0 = ox * in_w / out_w;
            const std::size_t x1 = std::min(in_w, ((ox + 1) * in_w + out_w - 1) / out_w);
            std::uint64_t sum = 0;
            for (std::size_t y = y0; y < y1; ++y) {
                const std::uint64_t wy = overlap(y, oy, in_h, out_h);
                if (wy == 0) continue;
                for (std::size_t x = x0; x < x1; ++x) {
                    const std::uint64_t wx = overlap(x, ox, in_w, out_w);
                    sum += wx * wy * frame.at(x, y);
                }
            }
            // round half up of sum / total
            out.at(ox, oy) = static_cast<std::uint8_t>((2 * sum + total) / (2 * total));
        }
    }
    return out;
}

ImageVector flatten_normalize(const RawFrame& frame) {
    frame.validate();
    if (frame.channels != 1 || frame.width != kWorkWidth || frame.height != kWorkHeight)
        throw DimensionError("flatten_normalize expects a 64x32 gray frame, got " +
                             std::to_string(frame.width) + "x" + std::to_string(frame.height) + "x" +
                             std::to_string(frame.channels));
    std::vector<float> values(kImageLength);
    std::transform(frame.pixels.begin(), frame.pixels.end(), values.begin(),
                   [](std::uint8_t p) { return static_cast<float>(p) / 255.0f; });
    return ImageVector(std::move(values));
}

ImageVector preprocess(const RawFrame& frame) {
    return flatten_normalize(resize_box(to_grayscale(frame), kWorkWidth, kWorkHeight));
}

}  // namespace droso
