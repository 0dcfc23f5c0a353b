#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "droso/voting.hpp"

namespace droso {

/// Query -> reference mapping (identity when empty) and inclusive frame tolerance.
struct GroundTruth {
    std::vector<std::size_t> mapping;
    std::size_t tolerance = 0;

    std::size_t truth(std::size_t query) const {
        return mapping.empty() ? query : mapping.at(query);
    }
};

struct MatchResult {
    std::size_t query = 0;
    std::size_t predicted = 0;
    std::size_t truth = 0;
    double confidence = 0.0;
    bool correct = false;

    friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

struct CurvePoint {
    double recall = 0.0;
    double precision = 0.0;
    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct PRCurve {
    std::vector<CurvePoint> points;  // without the recall-0 prefix point
    double auc = 0.0;
};

bool match_correct(std::size_t predicted, std::size_t truth, std::size_t tolerance) noexcept;

/// One point per distinct confidence, swept from high to low. Recall is
/// relative to the total number of results. AUC is the trapezoid area of the
/// points prefixed with (0, precision of the first point).
PRCurve pr_curve(std::span<const MatchResult> results);

struct Evaluation {
    PRCurve curve;
    std::vector<MatchResult> matches;  // ordered by query index

    double correct_rate() const;
};

/// Votes every query (fanned out over worker threads); confidence = max of
/// the fused score vector.
Evaluation evaluate(const Ensemble& ensemble, std::span<const ImageVector> queries,
                    const GroundTruth& gt);

struct LatencyStats {
    double mean_ms = 0.0;
    double p95_ms = 0.0;
    double fps = 0.0;
    std::size_t iterations = 0;
};

/// Single-threaded wall-clock timing of vote(); 3 warm-up calls first.
/// iterations must be >= 10.
LatencyStats benchmark(const Ensemble& ensemble, const ImageVector& image, std::size_t iterations);

/// `recall,precision` with 6 decimals, one point per line.
void write_pr_csv(std::ostream& out, const PRCurve& curve);
/// `query,predicted,truth,confidence,correct`.
void write_match_log(std::ostream& out, std::span<const MatchResult> matches);

}  // namespace droso
