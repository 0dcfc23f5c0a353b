#include "droso/drosonet.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "droso/error.hpp"
#include "droso/rng.hpp"

namespace droso {

std::size_t argmax(std::span<const double> values) noexcept {
    if (values.empty()) return 0;
    return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

// ---------------------------------------------------------------------------
// Projection

ProjectionMatrix::ProjectionMatrix(std::size_t input_length,
                                   const std::vector<std::vector<std::uint32_t>>& columns)
    : input_length_(input_length) {
    if (input_length == 0 || columns.empty())
        throw ParameterError("projection needs a positive input length and at least one column");
    offsets_.reserve(columns.size() + 1);
    offsets_.push_back(0);
    for (std::size_t k = 0; k < columns.size(); ++k) {
        const auto& col = columns[k];
        if (col.empty()) throw ParameterError("projection column " + std::to_string(k) + " is empty");
        for (std::size_t i = 0; i < col.size(); ++i) {
            if (col[i] >= input_length || (i > 0 && col[i] <= col[i - 1]))
                throw ParameterError("projection column " + std::to_string(k) +
                                     " rows must be strictly increasing and < input length");
        }
        rows_.insert(rows_.end(), col.begin(), col.end());
        offsets_.push_back(rows_.size());
    }
}

std::vector<double> ProjectionMatrix::activate(std::span<const float> image) const {
    if (image.size() != input_length_)
        throw DimensionError("image length " + std::to_string(image.size()) +
                             " does not match projection input length " + std::to_string(input_length_));
    const std::size_t k_count = activation_count();
    std::vector<double> activations(k_count);
    for (std::size_t k = 0; k < k_count; ++k) {
        double sum = 0.0;
        for (std::uint32_t row : column(k)) sum += image[row];
        activations[k] = sum;
    }
    return activations;
}

ProjectionMatrix generate_projection(std::uint64_t seed, std::size_t input_length,
                                     std::size_t activation_count, double density) {
    if (input_length == 0 || activation_count == 0)
        throw ParameterError("projection input length and activation count must be positive");
    if (!(density > 0.0 && density < 1.0)) throw ParameterError("projection density must lie in (0, 1)");
    const auto per_column = static_cast<std::size_t>(std::llround(density * static_cast<double>(input_length)));
    if (per_column < 1) throw ParameterError("projection density selects no rows");

    Rng rng(seed);
    std::vector<std::uint32_t> perm(input_length);
    std::vector<std::vector<std::uint32_t>> columns(activation_count);
    for (auto& col : columns) {
        std::iota(perm.begin(), perm.end(), 0u);
        for (std::size_t i = 0; i < per_column; ++i) {
            const std::size_t j = i + rng.below(input_length - i);
            std::swap(perm[i], perm[j]);
        }
        col.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(per_column));
        std::sort(col.begin(), col.end());
    }
    return ProjectionMatrix(input_length, columns);
}

// ---------------------------------------------------------------------------
// Encoding

std::size_t FeatureTag::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

FeatureTag binarize(std::span<const double> activations) {
    const std::size_t k_count = activations.size();
    const std::size_t winners = k_count / 2;
    std::vector<std::uint32_t> order(k_count);
    std::iota(order.begin(), order.end(), 0u);
    auto ranks_before = [&](std::uint32_t a, std::uint32_t b) {
        if (activations[a] != activations[b]) return activations[a] > activations[b];
        return a < b;
    };
    if (winners > 0 && winners < k_count)
        std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(winners - 1), order.end(),
                         ranks_before);

    // nth_element leaves every element before the pivot ranked ahead of it.
    FeatureTag tag;
    tag.bits.assign(k_count, 0);
    for (std::size_t i = 0; i < winners; ++i) tag.bits[order[i]] = 1;
    return tag;
}

FeatureTag encode(std::span<const float> image, const ProjectionMatrix& projection) {
    return binarize(projection.activate(image));
}

// ---------------------------------------------------------------------------
// Classifier

QuantizedWeights quantize_weights(const WeightMatrix& weights) {
    float max_abs = 0.0f;
    for (float w : weights.values) {
        if (!std::isfinite(w)) throw DataError("cannot quantize non-finite weights");
        max_abs = std::max(max_abs, std::fabs(w));
    }
    if (max_abs == 0.0f) throw DataError("cannot quantize an all-zero weight matrix: scale is undefined");

    QuantizedWeights out;
    out.rows = weights.rows;
    out.cols = weights.cols;
    out.scale = static_cast<float>(static_cast<double>(max_abs) / 127.0);
    const double scale = out.scale;
    out.q.resize(weights.values.size());
    std::transform(weights.values.begin(), weights.values.end(), out.q.begin(), [scale](float w) {
        const double q = std::round(static_cast<double>(w) / scale);
        return static_cast<std::int8_t>(std::clamp(q, -127.0, 127.0));
    });
    return out;
}

WeightMatrix dequantize(const QuantizedWeights& weights) {
    WeightMatrix out(weights.rows, weights.cols);
    for (std::size_t i = 0; i < weights.q.size(); ++i)
        out.values[i] = static_cast<float>(static_cast<double>(weights.scale) * weights.q[i]);
    return out;
}

ScoreVector forward(const FeatureTag& tag, const WeightMatrix& weights) {
    if (tag.size() != weights.rows)
        throw DimensionError("tag length " + std::to_string(tag.size()) + " does not match weight rows " +
                             std::to_string(weights.rows));
    ScoreVector scores(weights.cols, 0.0);
    for (std::size_t k = 0; k < weights.rows; ++k) {
        if (!tag.bits[k]) continue;
        const float* row = &weights.values[k * weights.cols];
        for (std::size_t p = 0; p < weights.cols; ++p) scores[p] += row[p];
    }
    return scores;
}

ScoreVector forward(const FeatureTag& tag, const QuantizedWeights& weights) {
    if (tag.size() != weights.rows)
        throw DimensionError("tag length " + std::to_string(tag.size()) + " does not match weight rows " +
                             std::to_string(weights.rows));
    std::vector<std::int32_t> acc(weights.cols, 0);
    for (std::size_t k = 0; k < weights.rows; ++k) {
        if (!tag.bits[k]) continue;
        const std::int8_t* row = &weights.q[k * weights.cols];
        for (std::size_t p = 0; p < weights.cols; ++p) acc[p] += row[p];
    }
    ScoreVector scores(weights.cols);
    const double scale = weights.scale;
    for (std::size_t p = 0; p < weights.cols; ++p) scores[p] = scale * acc[p];
    return scores;
}

// ---------------------------------------------------------------------------
// Model

namespace {

void check_shape(const ProjectionMatrix& projection, std::size_t rows, std::size_t cols, std::size_t stored) {
    if (rows != projection.activation_count())
        throw DimensionError("weight rows " + std::to_string(rows) + " do not match activation count " +
                             std::to_string(projection.activation_count()));
    if (cols < 2) throw DimensionError("a model needs at least 2 places");
    if (stored != rows * cols) throw DimensionError("weight buffer size does not match its shape");
}

}  // namespace

DrosoNet::DrosoNet(std::uint64_t seed, ProjectionMatrix projection, WeightMatrix weights)
    : seed_(seed), projection_(std::move(projection)), weights_(std::move(weights)) {
    const auto& w = std::get<WeightMatrix>(weights_);
    check_shape(projection_, w.rows, w.cols, w.values.size());
}

DrosoNet::DrosoNet(std::uint64_t seed, ProjectionMatrix projection, QuantizedWeights weights)
    : seed_(seed), projection_(std::move(projection)), weights_(std::move(weights)) {
    const auto& w = std::get<QuantizedWeights>(weights_);
    check_shape(projection_, w.rows, w.cols, w.q.size());
    if (!(w.scale > 0.0f) || !std::isfinite(w.scale)) throw DataError("quantization scale must be positive");
}

std::size_t DrosoNet::places() const noexcept {
    return std::visit([](const auto& w) { return w.cols; }, weights_);
}

ScoreVector DrosoNet::scores(const FeatureTag& tag) const {
    return std::visit([&](const auto& w) { return forward(tag, w); }, weights_);
}

void TrainConfig::validate() const {
    if (epochs < 1) throw ParameterError("epochs must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        throw ParameterError("learning rate must be positive");
}

DrosoNet train(std::span<const ImageVector> images, const TrainConfig& cfg, std::uint64_t seed,
               std::size_t activations) {
    cfg.validate();
    const std::size_t places = images.size();
    if (places < 2) throw DataError("need >= 2 places to train, got " + std::to_string(places));
    const std::size_t input_length = images.front().size();

    ProjectionMatrix projection = generate_projection(seed, input_length, activations);

    std::vector<std::vector<std::uint32_t>> active(places);
    for (std::size_t p = 0; p < places; ++p) {
        const FeatureTag tag = encode(images[p].view(), projection);
        for (std::uint32_t k = 0; k < tag.size(); ++k)
            if (tag.bits[k]) active[p].push_back(k);
    }

    WeightMatrix weights(activations, places);
    Rng init(derive_seed(seed, 1));
    for (float& w : weights.values) w = static_cast<float>(init.uniform(-0.01, 0.01));

    Rng order_rng(derive_seed(seed ^ cfg.seed, 2));
    std::vector<std::size_t> order(places);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> probs(places);
    std::vector<float> grad(places);
    const auto lr = static_cast<float>(cfg.learning_rate);

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.shuffle) {
            for (std::size_t i = places - 1; i > 0; --i) std::swap(order[i], order[order_rng.below(i + 1)]);
        }
        for (std::size_t target : order) {
            std::fill(probs.begin(), probs.end(), 0.0);
            for (std::uint32_t k : active[target]) {
                const float* row = &weights.values[k * places];
                for (std::size_t p = 0; p < places; ++p) probs[p] += row[p];
            }
            const double peak = *std::max_element(probs.begin(), probs.end());
            double total = 0.0;
            for (double& v : probs) {
                v = std::exp(v - peak);
                total += v;
            }
            // d(loss)/d(logit_p) = prob_p - [p == target]; each active row gets it.
            for (std::size_t p = 0; p < places; ++p)
                grad[p] = lr * static_cast<float>(probs[p] / total - (p == target ? 1.0 : 0.0));
            for (std::uint32_t k : active[target]) {
                float* row = &weights.values[k * places];
                for (std::size_t p = 0; p < places; ++p) row[p] -= grad[p];
            }
        }
    }
    return DrosoNet(seed, std::move(projection), std::move(weights));
}

DrosoNet quantize(const DrosoNet& model) {
    if (model.quantized()) throw DataError("model is already quantized");
    return DrosoNet(model.seed(), model.projection(), quantize_weights(model.float_weights()));
}

Prediction predict(const DrosoNet& model, std::span<const float> image) {
    Prediction out;
    out.scores = model.scores(encode(image, model.projection()));
    out.place = argmax(out.scores);
    return out;
}

double train_accuracy(const DrosoNet& model, std::span<const ImageVector> images) {
    if (images.empty()) return 0.0;
    std::size_t hits = 0;
    for (std::size_t p = 0; p < images.size(); ++p)
        if (predict(model, images[p]).place == p) ++hits;
    return static_cast<double>(hits) / static_cast<double>(images.size());
}

}  // namespace droso
