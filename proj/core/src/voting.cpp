#include "droso/voting.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "droso/error.hpp"
#include "droso/parallel.hpp"
#include "droso/rng.hpp"

namespace droso {

void Ensemble::validate() const {
    if (models.empty()) throw ParameterError("ensemble has no models");
    const DrosoNet& first = models.front();
    for (std::size_t i = 1; i < models.size(); ++i) {
        const DrosoNet& m = models[i];
        if (m.places() != first.places() || m.activation_count() != first.activation_count() ||
            m.input_length() != first.input_length())
            throw DimensionError("ensemble member " + std::to_string(i) + " disagrees on shape with member 0");
    }
}

std::size_t radius_from_fraction(double fraction, std::size_t places) {
    if (!(fraction >= 0.0) || !std::isfinite(fraction)) throw ParameterError("radius fraction must be >= 0");
    return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(places)));
}

ScoreVector softmax_normalize(std::span<const double> scores) {
    ScoreVector out(scores.size());
    if (scores.empty()) return out;
    const double peak = *std::max_element(scores.begin(), scores.end());
    double total = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp(scores[i] - peak);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}

Window window_bounds(std::size_t place, std::size_t radius, std::size_t places) {
    const std::size_t lower = place > radius ? place - radius : 0;
    const std::size_t upper = std::min(places - 1, place + std::min(radius, places));
    return {lower, upper};
}

ScoreVector mask_scores(std::span<const double> normalized, std::size_t radius) {
    ScoreVector out(normalized.size(), 0.0);
    if (normalized.empty()) return out;
    const Window w = window_bounds(argmax(normalized), radius, normalized.size());
    std::copy(normalized.begin() + static_cast<std::ptrdiff_t>(w.lower),
              normalized.begin() + static_cast<std::ptrdiff_t>(w.upper) + 1,
              out.begin() + static_cast<std::ptrdiff_t>(w.lower));
    return out;
}

ScoreVector aggregate(std::span<const ScoreVector> masked) {
    if (masked.empty()) throw ParameterError("cannot aggregate an empty list of score vectors");
    ScoreVector fused(masked.front().size(), 0.0);
    for (const ScoreVector& v : masked) {
        if (v.size() != fused.size()) throw DimensionError("score vectors to aggregate differ in length");
        for (std::size_t i = 0; i < v.size(); ++i) fused[i] += v[i];
    }
    return fused;
}

VoteResult vote_scores(std::span<const ScoreVector> raw_scores, std::size_t radius) {
    std::vector<ScoreVector> masked;
    masked.reserve(raw_scores.size());
    for (const ScoreVector& s : raw_scores) masked.push_back(mask_scores(softmax_normalize(s), radius));
    VoteResult out;
    out.fused = aggregate(masked);
    out.place = argmax(out.fused);
    return out;
}

VoteResult vote(const Ensemble& ensemble, std::span<const float> image) {
    std::vector<ScoreVector> raw;
    raw.reserve(ensemble.models.size());
    for (const DrosoNet& model : ensemble.models) raw.push_back(predict(model, image).scores);
    return vote_scores(raw, ensemble.radius);
}

Ensemble train_ensemble(std::span<const ImageVector> images, std::size_t models, std::size_t activations,
                        const TrainConfig& cfg, std::uint64_t master_seed, std::size_t radius,
                        bool quantize_members) {
    if (models == 0) throw ParameterError("ensemble needs at least one model");
    std::vector<std::optional<DrosoNet>> trained(models);
    parallel_for(models, [&](std::size_t i) {
        DrosoNet net = train(images, cfg, derive_seed(master_seed, i), activations);
        trained[i].emplace(quantize_members ? quantize(net) : std::move(net));
    });

    Ensemble ensemble;
    ensemble.radius = radius;
    ensemble.master_seed = master_seed;
    ensemble.models.reserve(models);
    for (auto& m : trained) ensemble.models.push_back(std::move(*m));
    return ensemble;
}

}  // namespace droso
