#pragma once
// Session-level evaluation metrics: seen-relevant recall, NDCG and LOESS
// smoothing of NDCG-over-time scatter.

#include "prefsearch/error.hpp"
#include "prefsearch/relevance.hpp"
#include "prefsearch/session.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <vector>

namespace prefsearch {

// Decreasing relevance thresholds reported for seen-relevant recall.
inline const std::vector<int>& recall_thresholds() {
    static const std::vector<int> kThresholds = {8, 7, 5, 4, 3, 1};
    return kThresholds;
}

struct SeenCounts {
    std::size_t seen = 0;      // relevant products visible at least once
    std::size_t relevant = 0;  // products with grade >= threshold

    double ratio() const {
        if (relevant == 0) throw EvalError("seen recall undefined: no product reaches the threshold");
        return static_cast<double>(seen) / static_cast<double>(relevant);
    }
};

inline std::set<ProductId> all_visible(const SessionLog& log) {
    std::set<ProductId> seen;
    for (const auto& e : log.events) seen.insert(e.visible_ids.begin(), e.visible_ids.end());
    return seen;
}

inline SeenCounts seen_counts(const SessionLog& log, const Judgments& judgments, int threshold) {
    SeenCounts c;
    const auto visible = all_visible(log);
    for (const auto& [id, grade] : judgments) {
        if (grade < threshold) continue;
        ++c.relevant;
        if (visible.count(id) > 0) ++c.seen;
    }
    return c;
}

// Share of products with grade >= threshold that appeared on any viewed
// page during the session.
inline double seen_recall(const SessionLog& log, const Judgments& judgments, int threshold) {
    return seen_counts(log, judgments, threshold).ratio();
}

inline constexpr std::size_t kNdcgCutoff = 15;

inline double grade_of(const Judgments& judgments, const ProductId& id) {
    auto it = judgments.find(id);
    return it == judgments.end() ? 0.0 : static_cast<double>(it->second);
}

// NDCG@k with the grade as gain and 1/log2(rank+1) discount; the ideal list
// is drawn from all judged products. Zero when no product has a positive
// grade.
inline double ndcg(const std::vector<ProductId>& ranked, const Judgments& judgments, std::size_t k = kNdcgCutoff) {
    if (k < 1) throw EvalError("ndcg cutoff must be >= 1");
    double dcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
        dcg += grade_of(judgments, ranked[i]) / std::log2(static_cast<double>(i) + 2.0);
    }
    std::vector<double> gains;
    gains.reserve(judgments.size());
    for (const auto& [_, g] : judgments) gains.push_back(static_cast<double>(g));
    std::sort(gains.begin(), gains.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, gains.size()); ++i) {
        idcg += gains[i] / std::log2(static_cast<double>(i) + 2.0);
    }
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

// ---------------------------------------------------------------------------
// LOESS

struct Point2 {
    double x = 0.0;
    double y = 0.0;
    auto operator<=>(const Point2&) const = default;
};

struct LoessOptions {
    int degree = 2;
    double span = 0.75;
};

struct LoessSample {
    double x = 0.0;
    double y = 0.0;
    int degree_used = 2;
    bool degraded = false;  // local fit fell back to a lower degree
};

namespace detail {

// Weighted least squares of y on powers of (x - x0)/scale; returns the fit
// at x0 or nullopt when the design is rank deficient.
inline std::optional<double> local_fit(const std::vector<Point2>& pts, const std::vector<double>& w, double x0,
                                       double scale, int degree) {
    std::vector<std::size_t> used;
    std::set<double> distinct;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (w[i] > 0) {
            used.push_back(i);
            distinct.insert(pts[i].x);
        }
    }
    const auto cols = static_cast<Eigen::Index>(degree + 1);
    if (distinct.size() < static_cast<std::size_t>(cols)) return std::nullopt;
    // Fit y - y_ref so that constant data yields exactly y_ref.
    const double y_ref = pts[used.front()].y;
    Eigen::MatrixXd a(static_cast<Eigen::Index>(used.size()), cols);
    Eigen::VectorXd b(static_cast<Eigen::Index>(used.size()));
    for (std::size_t r = 0; r < used.size(); ++r) {
        const auto& p = pts[used[r]];
        const double sw = std::sqrt(w[used[r]]);
        const double u = (p.x - x0) / scale;
        double pw = 1.0;
        for (Eigen::Index c = 0; c < cols; ++c) {
            a(static_cast<Eigen::Index>(r), c) = sw * pw;
            pw *= u;
        }
        b(static_cast<Eigen::Index>(r)) = sw * (p.y - y_ref);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-12);
    if (qr.rank() < cols) return std::nullopt;
    const Eigen::VectorXd coef = qr.solve(b);
    return coef(0) + y_ref;
}

} // namespace detail

// Locally weighted polynomial regression: at each grid point, fit a
// polynomial of the given degree to the ceil(span * n) nearest points with
// tricube weights and report the fit at that point. No robustness
// iterations.
inline std::vector<LoessSample> loess(std::vector<Point2> points, const std::vector<double>& grid,
                                      const LoessOptions& opts = {}) {
    if (opts.degree < 0 || opts.degree > 2) throw EvalError("loess degree must be 0, 1 or 2");
    if (!(opts.span > 0)) throw EvalError("loess span must be > 0");
    std::sort(points.begin(), points.end());
    const std::size_t n = points.size();
    std::set<double> distinct;
    for (const auto& p : points) distinct.insert(p.x);
    const auto need = static_cast<std::size_t>(opts.degree + 1);
    const auto q = std::min(n, static_cast<std::size_t>(std::ceil(opts.span * static_cast<double>(n) - 1e-9)));
    if (distinct.size() < need || q < need) {
        throw EvalError("loess: insufficient points (" + std::to_string(n) + " points, " +
                        std::to_string(distinct.size()) + " distinct x, neighbourhood " + std::to_string(q) + ")");
    }

    std::vector<LoessSample> out;
    out.reserve(grid.size());
    std::vector<double> dist(n);
    std::vector<double> w(n);
    for (double x0 : grid) {
        for (std::size_t i = 0; i < n; ++i) dist[i] = std::abs(points[i].x - x0);
        auto sorted = dist;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(q - 1), sorted.end());
        double h = sorted[q - 1];
        if (opts.span > 1.0) h *= opts.span;
        for (std::size_t i = 0; i < n; ++i) {
            if (h <= 0) {
                w[i] = dist[i] == 0 ? 1.0 : 0.0;
                continue;
            }
            const double u = dist[i] / h;
            w[i] = u < 1.0 ? std::pow(1.0 - u * u * u, 3) : 0.0;
        }
        const double scale = h > 0 ? h : 1.0;
        LoessSample s;
        s.x = x0;
        for (int deg = opts.degree; deg >= 0; --deg) {
            if (auto fit = detail::local_fit(points, w, x0, scale, deg)) {
                s.y = *fit;
                s.degree_used = deg;
                s.degraded = deg < opts.degree;
                break;
            }
            if (deg == 0) throw EvalError("loess: no usable local fit at x=" + std::to_string(x0));
        }
        out.push_back(s);
    }
    return out;
}

// Evenly spaced grid over [lo, hi] with `count` points (count >= 2).
inline std::vector<double> linear_grid(double lo, double hi, std::size_t count) {
    std::vector<double> g;
    if (count == 0) return g;
    if (count == 1 || hi <= lo) return {lo};
    g.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        g.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    }
    return g;
}

} // namespace prefsearch
