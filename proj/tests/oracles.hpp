#pragma once

// Straight-line reference implementations used only by tests. They share no
// code with the library paths they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <set>
#include <vector>

#include "droso/eval.hpp"
#include "droso/imaging.hpp"

namespace oracle {

/// Fractional-coverage box filter in floating point, then round half up.
inline droso::RawFrame resize_box(const droso::RawFrame& in, std::size_t out_w, std::size_t out_h) {
    droso::RawFrame out(out_w, out_h, 1);
    const double sx = static_cast<double>(in.width) / static_cast<double>(out_w);
    const double sy = static_cast<double>(in.height) / static_cast<double>(out_h);
    for (std::size_t oy = 0; oy < out_h; ++oy)
        for (std::size_t ox = 0; ox < out_w; ++ox) {
            double sum = 0.0;
            for (std::size_t y = 0; y < in.height; ++y) {
                const double cy = std::max(0.0, std::min(y + 1.0, (oy + 1) * sy) - std::max<double>(y, oy * sy));
                for (std::size_t x = 0; x < in.width; ++x) {
                    const double cx =
                        std::max(0.0, std::min(x + 1.0, (ox + 1) * sx) - std::max<double>(x, ox * sx));
                    sum += cx * cy * in.at(x, y);
                }
            }
            out.at(ox, oy) = static_cast<std::uint8_t>(std::floor(sum / (sx * sy) + 0.5));
        }
    return out;
}

/// Softmax, windowed selection, element-wise sum, argmax, written out in one
/// loop nest. Returns the fused vector; the winner is written to `place`.
inline std::vector<double> vote(const std::vector<std::vector<double>>& raw, std::size_t r, std::size_t& place) {
    const std::size_t P = raw.front().size();
    std::vector<double> f(P, 0.0);
    for (const auto& s_raw : raw) {
        double mx = s_raw[0];
        for (double v : s_raw) mx = v > mx ? v : mx;
        std::vector<double> s(P);
        double z = 0.0;
        for (std::size_t i = 0; i < P; ++i) {
            s[i] = std::exp(s_raw[i] - mx);
            z += s[i];
        }
        for (std::size_t i = 0; i < P; ++i) s[i] /= z;
        std::size_t p = 0;
        for (std::size_t i = 1; i < P; ++i)
            if (s[i] > s[p]) p = i;
        const long l = std::max(0L, static_cast<long>(p) - static_cast<long>(r));
        const long u = std::min(static_cast<long>(P) - 1, static_cast<long>(p) + static_cast<long>(r));
        for (std::size_t i = 0; i < P; ++i) {
            const double v = (static_cast<long>(i) >= l && static_cast<long>(i) <= u) ? s[i] : 0.0;
            f[i] += v;
        }
    }
    place = 0;
    for (std::size_t i = 1; i < P; ++i)
        if (f[i] > f[place]) place = i;
    return f;
}

struct Curve {
    std::vector<droso::CurvePoint> points;
    double auc = 0.0;
};

/// O(n^2): for every distinct confidence t (high to low), count the results
/// with confidence >= t by scanning all of them.
inline Curve pr_enumerate(const std::vector<droso::MatchResult>& results) {
    std::set<double, std::greater<>> thresholds;
    for (const auto& r : results) thresholds.insert(r.confidence);
    Curve c;
    std::vector<std::size_t> hits;
    const double n = static_cast<double>(results.size());
    for (double t : thresholds) {
        std::size_t retrieved = 0, correct = 0;
        for (const auto& r : results)
            if (r.confidence >= t) {
                ++retrieved;
                correct += r.correct ? 1 : 0;
            }
        c.points.push_back({static_cast<double>(correct) / n,
                            static_cast<double>(correct) / static_cast<double>(retrieved)});
        hits.push_back(correct);
    }
    double area = 0.0;
    double prev_p = c.points.front().precision;
    std::size_t prev_c = 0;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        area += static_cast<double>(hits[i] - prev_c) * (prev_p + c.points[i].precision) / 2.0;
        prev_p = c.points[i].precision;
        prev_c = hits[i];
    }
    c.auc = area / n;
    return c;
}

}  // namespace oracle
