#include "droso/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "droso/error.hpp"
#include "droso/parallel.hpp"

namespace droso {

bool match_correct(std::size_t predicted, std::size_t truth, std::size_t tolerance) noexcept {
    const std::size_t distance = predicted > truth ? predicted - truth : truth - predicted;
    return distance <= tolerance;
}

PRCurve pr_curve(std::span<const MatchResult> results) {
    if (results.empty()) throw DataError("cannot build a PR curve from zero results");
    for (const MatchResult& r : results)
        if (!std::isfinite(r.confidence)) throw DataError("PR curve confidences must be finite");

    std::vector<std::size_t> order(results.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (results[a].confidence != results[b].confidence) return results[a].confidence > results[b].confidence;
        return results[a].query < results[b].query;
    });

    const auto total = static_cast<double>(results.size());
    PRCurve curve;
    std::vector<std::size_t> correct_counts;
    std::size_t retrieved = 0;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const MatchResult& r = results[order[i]];
        ++retrieved;
        if (r.correct) ++correct;
        const bool group_ends = i + 1 == order.size() || results[order[i + 1]].confidence != r.confidence;
        if (!group_ends) continue;
        curve.points.push_back({static_cast<double>(correct) / total,
                                static_cast<double>(correct) / static_cast<double>(retrieved)});
        correct_counts.push_back(correct);
    }

    // Trapezoids in units of correct matches, scaled by 1/total at the end so
    // a perfect curve integrates to exactly 1.
    double area = 0.0;
    double prev_precision = curve.points.front().precision;
    std::size_t prev_correct = 0;
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        const double precision = curve.points[i].precision;
        area += static_cast<double>(correct_counts[i] - prev_correct) * (prev_precision + precision) / 2.0;
        prev_precision = precision;
        prev_correct = correct_counts[i];
    }
    curve.auc = area / total;
    return curve;
}

double Evaluation::correct_rate() const {
    if (matches.empty()) return 0.0;
    const auto hits = std::count_if(matches.begin(), matches.end(), [](const MatchResult& m) { return m.correct; });
    return static_cast<double>(hits) / static_cast<double>(matches.size());
}

Evaluation evaluate(const Ensemble& ensemble, std::span<const ImageVector> queries, const GroundTruth& gt) {
    ensemble.validate();
    if (queries.empty()) throw DataError("no queries to evaluate");
    if (!gt.mapping.empty() && gt.mapping.size() != queries.size())
        throw DataError("ground-truth mapping covers " + std::to_string(gt.mapping.size()) + " queries, got " +
                        std::to_string(queries.size()));

    Evaluation out;
    out.matches.resize(queries.size());
    parallel_for(queries.size(), [&](std::size_t q) {
        const VoteResult v = vote(ensemble, queries[q]);
        MatchResult& m = out.matches[q];
        m.query = q;
        m.predicted = v.place;
        m.truth = gt.truth(q);
        m.confidence = v.fused[v.place];
        m.correct = match_correct(m.predicted, m.truth, gt.tolerance);
    });
    out.curve = pr_curve(out.matches);
    return out;
}

LatencyStats benchmark(const Ensemble& ensemble, const ImageVector& image, std::size_t iterations) {
    if (iterations < 10) throw ParameterError("benchmark needs at least 10 iterations");
    ensemble.validate();
    using clock = std::chrono::steady_clock;

    std::size_t sink = 0;
    for (int i = 0; i < 3; ++i) sink += vote(ensemble, image).place;

    std::vector<double> samples(iterations);
    for (double& ms : samples) {
        const auto start = clock::now();
        sink += vote(ensemble, image).place;
        ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    }
    // Keeps the calls observable.
    volatile std::size_t keep = sink;
    (void)keep;

    LatencyStats stats;
    stats.iterations = iterations;
    stats.mean_ms = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(iterations);
    std::sort(samples.begin(), samples.end());
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(iterations)));
    stats.p95_ms = samples[std::max<std::size_t>(rank, 1) - 1];
    stats.fps = 1000.0 / stats.mean_ms;
    return stats;
}

void write_pr_csv(std::ostream& out, const PRCurve& curve) {
    out << "recall,precision\n";
    char line[64];
    for (const CurvePoint& p : curve.points) {
        std::snprintf(line, sizeof line, "%.6f,%.6f\n", p.recall, p.precision);
        out << line;
    }
}

void write_match_log(std::ostream& out, std::span<const MatchResult> matches) {
    out << "query,predicted,truth,confidence,correct\n";
    char line[128];
    for (const MatchResult& m : matches) {
        std::snprintf(line, sizeof line, "%zu,%zu,%zu,%.6f,%d\n", m.query, m.predicted, m.truth, m.confidence,
                      m.correct ? 1 : 0);
        out << line;
    }
}

}  // namespace droso
