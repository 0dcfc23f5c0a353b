#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "droso/drosonet.hpp"

namespace droso {

inline constexpr std::size_t kDefaultModels = 64;
inline constexpr double kDefaultRadiusFraction = 0.5;

/// n independently seeded models over the same places plus the voting radius.
struct Ensemble {
    std::vector<DrosoNet> models;
    std::size_t radius = 0;
    std::uint64_t master_seed = 0;

    std::size_t places() const noexcept { return models.empty() ? 0 : models.front().places(); }

    /// Nonempty, and every member agrees on input length, activations and places.
    void validate() const;

    friend bool operator==(const Ensemble&, const Ensemble&) = default;
};

/// floor(fraction * places).
std::size_t radius_from_fraction(double fraction, std::size_t places);

/// Max-shifted softmax.
ScoreVector softmax_normalize(std::span<const double> scores);

struct Window {
    std::size_t lower = 0;
    std::size_t upper = 0;
    friend bool operator==(const Window&, const Window&) = default;
};

/// [max(0, p - r), min(P - 1, p + r)].
Window window_bounds(std::size_t place, std::size_t radius, std::size_t places);

/// Keeps the scores inside the window around argmax(scores), zeroes the rest.
ScoreVector mask_scores(std::span<const double> normalized, std::size_t radius);

/// Element-wise sum in list order. Throws on an empty list or length mismatch.
ScoreVector aggregate(std::span<const ScoreVector> masked);

struct VoteResult {
    std::size_t place = 0;
    ScoreVector fused;
};

/// Voting over already-computed raw score vectors, one per model:
/// softmax, mask, aggregate, argmax.
VoteResult vote_scores(std::span<const ScoreVector> raw_scores, std::size_t radius);

VoteResult vote(const Ensemble& ensemble, std::span<const float> image);
inline VoteResult vote(const Ensemble& ensemble, const ImageVector& image) {
    return vote(ensemble, image.view());
}

/// Trains `models` members, member i with seed derive_seed(master_seed, i),
/// quantizing each when `quantize_members` is set. Members train in parallel.
Ensemble train_ensemble(std::span<const ImageVector> images, std::size_t models,
                        std::size_t activations, const TrainConfig& cfg,
                        std::uint64_t master_seed, std::size_t radius,
                        bool quantize_members = true);

}  // namespace droso
