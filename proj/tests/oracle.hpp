#pragma once
// Brute-force reference implementations used as test oracles. They follow
// the scoring definitions directly and share no code with the library's
// scorers beyond the data types.

#include "prefsearch.hpp"

#include <array>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using namespace prefsearch;

inline double gaussian(double d, double sigma, double offset, double cutoff) {
    if (d <= offset) return 1.0;
    const double x = d - offset;
    if (x > cutoff * sigma) return 0.0;
    return std::exp(-0.5 * (x / sigma) * (x / sigma));
}

inline double trilinear(double v, double lo, double hi, const std::array<double, 6>& a, double ext) {
    const double l = lo - lo * ext;
    const double r = hi + hi * ext;
    if (lo <= v && v <= hi) return a[0] - (a[0] - a[1]) * (v - lo) / (hi - lo);
    if (l <= v && v < lo) return a[2] - (a[2] - a[3]) * (v - l) / (lo - l);
    if (hi < v && v <= r) return a[4] - (a[4] - a[5]) * (v - hi) / (r - hi);
    return 0.0;
}

inline double distance_km(const GeoPoint& p, const GeoPoint& q) {
    const double k = M_PI / 180.0;
    const double s1 = std::sin((q.lat - p.lat) * k / 2);
    const double s2 = std::sin((q.lon - p.lon) * k / 2);
    const double h = s1 * s1 + std::cos(p.lat * k) * std::cos(q.lat * k) * s2 * s2;
    return 2 * 6371.0088 * std::atan2(std::sqrt(h), std::sqrt(1 - h));
}

inline double field_value(const Product& p, NumericField f) {
    if (f == NumericField::Price) return p.price;
    if (f == NumericField::Stars) return p.stars;
    return p.rating;
}

// Plain tf-idf with max normalization, recomputed from scratch per call.
inline std::vector<double> text_scores_uncached(const Catalog& c, const std::string& term) {
    auto words = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        for (unsigned char ch : s) {
            if (std::isalnum(ch) || ch >= 0x80) {
                cur += static_cast<char>(std::tolower(ch));
            } else if (!cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
        }
        if (!cur.empty()) out.push_back(cur);
        return out;
    };
    std::vector<std::map<std::string, int>> tf(c.products.size());
    std::map<std::string, int> df;
    for (std::size_t i = 0; i < c.products.size(); ++i) {
        for (const auto& blob : c.products[i].text_blobs) {
            for (const auto& w : words(blob)) tf[i][w]++;
        }
        for (const auto& [w, _] : tf[i]) df[w]++;
    }
    const auto q = words(term);
    const std::set<std::string> distinct(q.begin(), q.end());
    std::vector<double> out(c.products.size(), 0.0);
    double best = 0;
    for (std::size_t i = 0; i < c.products.size(); ++i) {
        for (const auto& w : distinct) {
            if (df.count(w) == 0 || tf[i].count(w) == 0) continue;
            out[i] += tf[i][w] * std::log(1.0 + double(c.products.size()) / df[w]);
        }
        best = std::max(best, out[i]);
    }
    if (best > 0) {
        for (auto& s : out) s /= best;
    }
    return out;
}

inline const std::vector<double>& text_scores(const Catalog& c, const std::string& term) {
    static std::map<std::pair<const Catalog*, std::string>, std::vector<double>> cache;
    auto key = std::make_pair(&c, term);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, text_scores_uncached(c, term)).first;
    return it->second;
}

// rs of criterion `c` for product index `i`.
inline double rs(const Catalog& cat, const Criterion& c, std::size_t i) {
    const auto& p = cat.products[i];
    if (const auto* t = std::get_if<NominalTerm>(&c.target)) {
        auto it = p.nominal_features.find(t->facet_id);
        return it != p.nominal_features.end() && it->second.count(t->value) ? 1.0 : 0.0;
    }
    if (const auto* t = std::get_if<FreeText>(&c.target)) return text_scores(cat, t->term)[i];
    const auto& f = *cat.find_facet(target_facet(c.target));
    if (const auto* t = std::get_if<NumericPoint>(&c.target)) {
        const auto& g = std::get<GaussianConfig>(f.scoring);
        return gaussian(std::abs(field_value(p, *f.field) - t->value), g.sigma, g.offset, g.cutoff_sigmas);
    }
    if (std::get_if<NumericDirectedPref>(&c.target)) {
        const auto& l = std::get<LinearConfig>(f.scoring);
        double v = std::min(std::max(field_value(p, *f.field), l.scale_min), l.scale_max);
        double t = (v - l.scale_min) / (l.scale_max - l.scale_min);
        return l.direction == Direction::HigherBetter ? t : 1 - t;
    }
    if (const auto* t = std::get_if<NumericRange>(&c.target)) {
        const auto& tri = std::get<TriLinearConfig>(f.scoring);
        return trilinear(field_value(p, *f.field), t->lo, t->hi, tri.anchors, tri.extension_fraction);
    }
    const auto& t = std::get<GeoTerm>(c.target);
    const auto& g = std::get<GaussianConfig>(f.scoring);
    return gaussian(distance_km(p.location, cat.neighborhoods.at(t.neighborhood)), g.sigma, g.offset,
                    g.cutoff_sigmas);
}

// Crisp reading of a criterion used for must-have / must-not.
inline bool satisfies(const Catalog& cat, const Criterion& c, std::size_t i) {
    const auto& p = cat.products[i];
    if (const auto* t = std::get_if<NominalTerm>(&c.target)) {
        auto it = p.nominal_features.find(t->facet_id);
        return it != p.nominal_features.end() && it->second.count(t->value) > 0;
    }
    if (const auto* t = std::get_if<GeoTerm>(&c.target)) {
        auto it = p.nominal_features.find(t->facet_id);
        return it != p.nominal_features.end() && it->second.count(t->neighborhood) > 0;
    }
    if (const auto* t = std::get_if<NumericRange>(&c.target)) {
        const auto& f = *cat.find_facet(t->facet_id);
        const double v = field_value(p, *f.field);
        return t->lo <= v && v <= t->hi;
    }
    if (const auto* t = std::get_if<NumericPoint>(&c.target)) {
        const auto& f = *cat.find_facet(t->facet_id);
        return std::abs(field_value(p, *f.field) - t->value) <= std::get<GaussianConfig>(f.scoring).offset;
    }
    return rs(cat, c, i) > 0;
}

struct Expected {
    std::set<ProductId> survivors;
    std::map<ProductId, double> srs;
};

inline Expected brute_force(const Catalog& cat, const WeightedQuery& q) {
    Expected e;
    for (std::size_t i = 0; i < cat.products.size(); ++i) {
        bool keep = true;
        double total = 0;
        for (const auto& c : q.criteria) {
            if (c.weight == 1.0 && !satisfies(cat, c, i)) keep = false;
            if (c.weight == 0.0 && satisfies(cat, c, i)) keep = false;
            total += c.weight * rs(cat, c, i);
        }
        if (keep) {
            e.survivors.insert(cat.products[i].product_id);
            e.srs[cat.products[i].product_id] = total;
        }
    }
    return e;
}

// Random valid query over the catalog. Weights are drawn from the 0.1-step
// slider scale so that must-have and must-not terms occur regularly.
inline WeightedQuery random_query(const Catalog& cat, std::mt19937_64& rng, bool with_text = true) {
    std::vector<const FacetDefinition*> nominal;
    std::vector<const FacetDefinition*> directed;
    const FacetDefinition* range = nullptr;
    const FacetDefinition* point = nullptr;
    const FacetDefinition* geo = nullptr;
    for (const auto& f : cat.schema) {
        switch (f.criterion_class) {
            case CriterionClass::Nominal: nominal.push_back(&f); break;
            case CriterionClass::NumericDirected: directed.push_back(&f); break;
            case CriterionClass::NumericRange: range = &f; break;
            case CriterionClass::NumericPoint: point = &f; break;
            case CriterionClass::Geo: geo = &f; break;
            default: break;
        }
    }
    static const std::vector<std::string> kWords = {"breakfast", "quiet", "garden", "station", "spa", "rooms",
                                                    "friendly staff", "view"};
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
    WeightedQuery q;
    const std::size_t n = 1 + pick(5);
    for (std::size_t k = 0; k < n; ++k) {
        Criterion c;
        c.criterion_id = "c" + std::to_string(k);
        c.weight = static_cast<double>(pick(11)) / 10.0;
        const auto kind = pick(with_text ? 7 : 6);
        if (kind <= 1 && !nominal.empty()) {
            const auto* f = nominal[pick(nominal.size())];
            c.target = NominalTerm{f->facet_id, f->values[pick(f->values.size())]};
        } else if (kind == 2 && range != nullptr) {
            const double lo = 20.0 + static_cast<double>(pick(200));
            c.target = NumericRange{range->facet_id, lo, lo + 5.0 + static_cast<double>(pick(150))};
        } else if (kind == 3 && point != nullptr) {
            c.target = NumericPoint{point->facet_id, 40.0 + static_cast<double>(pick(200))};
        } else if (kind == 4 && !directed.empty()) {
            c.target = NumericDirectedPref{directed[pick(directed.size())]->facet_id};
        } else if (kind == 5 && geo != nullptr) {
            auto it = cat.neighborhoods.begin();
            std::advance(it, static_cast<std::ptrdiff_t>(pick(cat.neighborhoods.size())));
            c.target = GeoTerm{geo->facet_id, it->first};
        } else if (with_text) {
            c.target = FreeText{kWords[pick(kWords.size())]};
        } else {
            const auto* f = nominal[pick(nominal.size())];
            c.target = NominalTerm{f->facet_id, f->values[pick(f->values.size())]};
        }
        q.criteria.push_back(std::move(c));
    }
    return q;
}

// NDCG straight from the definition: gains are grades, the ideal DCG is
// the best DCG over every ordering of the judged grades.
inline double dcg(const std::vector<int>& grades, std::size_t k) {
    double total = 0;
    for (std::size_t i = 0; i < grades.size() && i < k; ++i) total += grades[i] / std::log2(static_cast<double>(i + 2));
    return total;
}

// Second LOESS implementation: long double normal equations on the raw
// (x - x0) basis, solved by Gaussian elimination with partial pivoting.
inline std::vector<double> loess_reference(const std::vector<std::pair<double, double>>& pts,
                                           const std::vector<double>& grid, int degree, double span) {
    const std::size_t n = pts.size();
    const auto q = static_cast<std::size_t>(std::ceil(span * static_cast<double>(n) - 1e-9));
    const std::size_t qq = std::min(q, n);
    std::vector<double> out;
    for (double x0 : grid) {
        std::vector<long double> d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = std::fabs(static_cast<long double>(pts[i].first) - x0);
        auto sorted = d;
        std::sort(sorted.begin(), sorted.end());
        long double h = sorted[qq - 1];
        if (span > 1) h *= span;
        const int m = degree + 1;
        std::vector<std::vector<long double>> a(m, std::vector<long double>(m + 1, 0.0L));
        for (std::size_t i = 0; i < n; ++i) {
            const long double u = d[i] / h;
            if (u >= 1) continue;
            const long double w = std::pow(1 - u * u * u, 3);
            const long double dx = static_cast<long double>(pts[i].first) - x0;
            for (int r = 0; r < m; ++r) {
                for (int c = 0; c < m; ++c) a[r][c] += w * std::pow(dx, r + c);
                a[r][m] += w * std::pow(dx, r) * pts[i].second;
            }
        }
        for (int col = 0; col < m; ++col) {
            int piv = col;
            for (int r = col + 1; r < m; ++r) {
                if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
            }
            std::swap(a[col], a[piv]);
            for (int r = 0; r < m; ++r) {
                if (r == col) continue;
                const long double f = a[r][col] / a[col][col];
                for (int c = col; c <= m; ++c) a[r][c] -= f * a[col][c];
            }
        }
        out.push_back(static_cast<double>(a[0][m] / a[0][0]));
    }
    return out;
}

// Deterministic noisy series used by the LOESS fixtures.
inline std::vector<std::pair<double, double>> noisy_series(std::size_t n) {
    std::vector<std::pair<double, double>> pts;
    std::uint64_t state = 88172645463325252ULL;
    for (std::size_t i = 0; i < n; ++i) {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        const double noise = static_cast<double>(state % 10000) / 10000.0 - 0.5;
        const double x = 0.5 * static_cast<double>(i) + 0.1 * static_cast<double>(i % 3);
        pts.emplace_back(x, std::sin(x / 4.0) + 0.3 * noise);
    }
    return pts;
}

} // namespace oracle
