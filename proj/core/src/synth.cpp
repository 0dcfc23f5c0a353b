#include "droso/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "droso/error.hpp"
#include "droso/rng.hpp"

namespace droso {

void SynthConfig::validate() const {
    if (places < 2) throw ParameterError("synthetic traversal needs >= 2 places");
    if (!(noise_sigma >= 0.0)) throw ParameterError("noise sigma must be >= 0");
    if (!std::isfinite(brightness_shift)) throw ParameterError("brightness shift must be finite");
    if (std::abs(shift_px) >= static_cast<int>(kWorkWidth)) throw ParameterError("|shift_px| must be < 64");
}

namespace {

std::uint8_t to_pixel(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

RawFrame compose_frame(Rng& rng) {
    RawFrame frame(kSynthWidth, kSynthHeight, 1);
    const double w = static_cast<double>(kSynthWidth);
    const double h = static_cast<double>(kSynthHeight);

    // Background: linear gradient along a random direction.
    const double from = rng.uniform(0.0, 255.0);
    const double to = rng.uniform(0.0, 255.0);
    const double angle = rng.uniform(0.0, 6.283185307179586);
    const double dx = std::cos(angle) / w;
    const double dy = std::sin(angle) / h;
    const double lo = std::min(0.0, dx * w) + std::min(0.0, dy * h);
    const double span = std::abs(dx * w) + std::abs(dy * h);
    for (std::size_t y = 0; y < kSynthHeight; ++y)
        for (std::size_t x = 0; x < kSynthWidth; ++x) {
            const double t = ((static_cast<double>(x) * dx + static_cast<double>(y) * dy) - lo) / span;
            frame.at(x, y) = to_pixel(from + (to - from) * t);
        }

    // Foreground: rectangles, flat or with a horizontal/vertical ramp.
    const std::size_t rects = 4 + rng.below(6);
    for (std::size_t r = 0; r < rects; ++r) {
        const std::size_t rw = 8 + rng.below(57);
        const std::size_t rh = 6 + rng.below(35);
        const std::size_t x0 = rng.below(kSynthWidth - rw + 1);
        const std::size_t y0 = rng.below(kSynthHeight - rh + 1);
        const double a = rng.uniform(0.0, 255.0);
        const double b = rng.below(2) ? rng.uniform(0.0, 255.0) : a;
        const bool horizontal = rng.below(2) == 0;
        for (std::size_t y = y0; y < y0 + rh; ++y)
            for (std::size_t x = x0; x < x0 + rw; ++x) {
                const double t = horizontal ? static_cast<double>(x - x0) / static_cast<double>(rw)
                                            : static_cast<double>(y - y0) / static_cast<double>(rh);
                frame.at(x, y) = to_pixel(a + (b - a) * t);
            }
    }
    return frame;
}

}  // namespace

std::vector<RawFrame> generate_reference(const SynthConfig& cfg) {
    cfg.validate();
    std::vector<RawFrame> frames;
    frames.reserve(cfg.places);
    for (std::size_t p = 0; p < cfg.places; ++p) {
        for (std::uint64_t attempt = 0;; ++attempt) {
            Rng rng(derive_seed(derive_seed(cfg.seed, p), attempt));
            RawFrame frame = compose_frame(rng);
            if (std::find(frames.begin(), frames.end(), frame) == frames.end()) {
                frames.push_back(std::move(frame));
                break;
            }
        }
    }
    return frames;
}

std::vector<RawFrame> generate_query(std::span<const RawFrame> reference, const SynthConfig& cfg) {
    if (reference.empty()) throw ParameterError("query generation needs a nonempty reference");
    if (!(cfg.noise_sigma >= 0.0)) throw ParameterError("noise sigma must be >= 0");
    if (std::abs(cfg.shift_px) >= static_cast<int>(kWorkWidth)) throw ParameterError("|shift_px| must be < 64");

    const double offset = cfg.brightness_shift * 255.0;
    const double sigma = cfg.noise_sigma * 255.0;
    std::vector<RawFrame> queries;
    queries.reserve(reference.size());
    for (std::size_t i = 0; i < reference.size(); ++i) {
        const RawFrame& ref = reference[i];
        ref.validate();
        if (ref.channels != 1) throw ParameterError("query generation expects gray reference frames");
        Rng rng(derive_seed(cfg.seed ^ 0x51A7E5EEDULL, i));
        const auto width = static_cast<long>(ref.width);
        RawFrame q(ref.width, ref.height, 1);
        for (std::size_t y = 0; y < ref.height; ++y)
            for (std::size_t x = 0; x < ref.width; ++x) {
                const long sx = ((static_cast<long>(x) - cfg.shift_px) % width + width) % width;
                double v = ref.at(static_cast<std::size_t>(sx), y) + offset;
                if (sigma > 0.0) v += sigma * rng.normal();
                q.at(x, y) = to_pixel(v);
            }
        queries.push_back(std::move(q));
    }
    return queries;
}

}  // namespace droso
