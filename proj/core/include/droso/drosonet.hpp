#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "droso/imaging.hpp"

namespace droso {

inline constexpr std::size_t kDefaultActivations = 192;
inline constexpr double kDefaultDensity = 0.1;

using ScoreVector = std::vector<double>;

/// Index of the largest element; the lowest index wins ties. Empty -> 0.
std::size_t argmax(std::span<const double> values) noexcept;

/// Sparse binary D x K matrix stored column-wise as sorted row indices.
/// Column k of the product img * H is the sum of img over column k's rows.
class ProjectionMatrix {
public:
    ProjectionMatrix() = default;

    /// Each column must be nonempty with strictly increasing rows < input_length.
    ProjectionMatrix(std::size_t input_length, const std::vector<std::vector<std::uint32_t>>& columns);

    std::size_t input_length() const noexcept { return input_length_; }
    std::size_t activation_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }

    std::span<const std::uint32_t> column(std::size_t k) const noexcept {
        return {rows_.data() + offsets_[k], rows_.data() + offsets_[k + 1]};
    }

    /// Activation vector F: one sum per column. Throws DimensionError on length mismatch.
    std::vector<double> activate(std::span<const float> image) const;

    friend bool operator==(const ProjectionMatrix&, const ProjectionMatrix&) = default;

private:
    std::size_t input_length_ = 0;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> rows_;
};

/// Per column, exactly round(density * input_length) distinct rows chosen by a
/// seeded partial Fisher-Yates shuffle.
ProjectionMatrix generate_projection(std::uint64_t seed, std::size_t input_length,
                                     std::size_t activation_count,
                                     double density = kDefaultDensity);

/// Binary image representation; bits[k] is 0 or 1.
struct FeatureTag {
    std::vector<std::uint8_t> bits;

    std::size_t size() const noexcept { return bits.size(); }
    std::size_t count() const noexcept;

    friend bool operator==(const FeatureTag&, const FeatureTag&) = default;
};

/// Winner-take-all: the floor(K/2) largest activations become 1, ties go to
/// the lower index.
FeatureTag binarize(std::span<const double> activations);

FeatureTag encode(std::span<const float> image, const ProjectionMatrix& projection);

/// Dense K x P float weights, row-major, no bias.
struct WeightMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> values;

    WeightMatrix() = default;
    WeightMatrix(std::size_t r, std::size_t c, float fill = 0.0f) : rows(r), cols(c), values(r * c, fill) {}

    float& at(std::size_t k, std::size_t p) { return values[k * cols + p]; }
    float at(std::size_t k, std::size_t p) const { return values[k * cols + p]; }

    friend bool operator==(const WeightMatrix&, const WeightMatrix&) = default;
};

/// Symmetric per-tensor int8 weights: w ~= scale * q, |q| <= 127.
struct QuantizedWeights {
    std::size_t rows = 0;
    std::size_t cols = 0;
    float scale = 1.0f;
    std::vector<std::int8_t> q;

    friend bool operator==(const QuantizedWeights&, const QuantizedWeights&) = default;
};

/// scale = max|W| / 127, q = round(W / scale). Throws DataError when W is all zero.
QuantizedWeights quantize_weights(const WeightMatrix& weights);
WeightMatrix dequantize(const QuantizedWeights& weights);

/// score[p] = sum of W[k][p] over set tag bits.
ScoreVector forward(const FeatureTag& tag, const WeightMatrix& weights);
/// Integer accumulation, then one multiply by scale per place.
ScoreVector forward(const FeatureTag& tag, const QuantizedWeights& weights);

/// One encoder + classifier. Immutable once built.
class DrosoNet {
public:
    DrosoNet(std::uint64_t seed, ProjectionMatrix projection, WeightMatrix weights);
    DrosoNet(std::uint64_t seed, ProjectionMatrix projection, QuantizedWeights weights);

    std::uint64_t seed() const noexcept { return seed_; }
    const ProjectionMatrix& projection() const noexcept { return projection_; }
    std::size_t input_length() const noexcept { return projection_.input_length(); }
    std::size_t activation_count() const noexcept { return projection_.activation_count(); }
    std::size_t places() const noexcept;
    bool quantized() const noexcept { return std::holds_alternative<QuantizedWeights>(weights_); }

    /// Throw std::bad_variant_access on the wrong representation.
    const WeightMatrix& float_weights() const { return std::get<WeightMatrix>(weights_); }
    const QuantizedWeights& quantized_weights() const { return std::get<QuantizedWeights>(weights_); }

    ScoreVector scores(const FeatureTag& tag) const;

    friend bool operator==(const DrosoNet&, const DrosoNet&) = default;

private:
    std::uint64_t seed_;
    ProjectionMatrix projection_;
    std::variant<WeightMatrix, QuantizedWeights> weights_;
};

struct TrainConfig {
    std::size_t epochs = 100;
    double learning_rate = 0.01;
    bool shuffle = true;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Fits a float-weight model with one exemplar per place (label = index).
/// Softmax cross-entropy, plain per-sample SGD, weights initialised uniform
/// in [-0.01, 0.01]. Fully determined by (images, cfg, seed, activations).
DrosoNet train(std::span<const ImageVector> images, const TrainConfig& cfg, std::uint64_t seed,
               std::size_t activations = kDefaultActivations);

/// Same projection and seed, int8 weights.
DrosoNet quantize(const DrosoNet& model);

struct Prediction {
    std::size_t place = 0;
    ScoreVector scores;
};

Prediction predict(const DrosoNet& model, std::span<const float> image);
inline Prediction predict(const DrosoNet& model, const ImageVector& image) {
    return predict(model, image.view());
}

/// Fraction of images whose predicted place equals their index.
double train_accuracy(const DrosoNet& model, std::span<const ImageVector> images);

}  // namespace droso
