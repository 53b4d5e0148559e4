#pragma once
// Per-criterion relevance score functions. Every function returns a value
// in [0,1]; a score of exactly 0 means "mismatched".

#include "prefsearch/catalog.hpp"
#include "prefsearch/error.hpp"
#include "prefsearch/scoring_config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace prefsearch {

inline double score_nominal(const Product& product, const std::string& facet_id,
                            const std::string& value) {
    return product.has_feature(facet_id, value) ? 1.0 : 0.0;
}

// Checked variant: the facet must exist and be nominal.
inline double score_nominal(const Product& product, const Catalog& catalog,
                            const std::string& facet_id, const std::string& value) {
    const auto* facet = catalog.find_facet(facet_id);
    if (facet == nullptr) throw QueryError("unknown facet_id \"" + facet_id + "\"");
    if (facet->criterion_class != CriterionClass::Nominal) {
        throw QueryError("facet \"" + facet_id + "\" is not nominal");
    }
    return score_nominal(product, facet_id, value);
}

inline double score_gaussian(double distance, const GaussianConfig& cfg) {
    if (distance <= cfg.offset) return 1.0;
    const double excess = distance - cfg.offset;
    if (excess > cfg.cutoff_sigmas * cfg.sigma) return 0.0;
    return std::exp(-(excess * excess) / (2.0 * cfg.sigma * cfg.sigma));
}

inline double score_linear_directed(double value, const LinearConfig& cfg) {
    const double v = std::clamp(value, cfg.scale_min, cfg.scale_max);
    const double t = (v - cfg.scale_min) / (cfg.scale_max - cfg.scale_min);
    return cfg.direction == Direction::HigherBetter ? t : 1.0 - t;
}

struct TriLinearSegments {
    double left_start;   // lo * (1 - ext)
    double lo;
    double hi;
    double right_end;    // hi * (1 + ext)
};

inline TriLinearSegments trilinear_segments(double lo, double hi, const TriLinearConfig& cfg) {
    if (!(lo > 0) || !(lo < hi)) {
        throw QueryError("invalid range: need 0 < lo < hi");
    }
    return {lo * (1.0 - cfg.extension_fraction), lo, hi, hi * (1.0 + cfg.extension_fraction)};
}

// Range [lo,hi] scores a[0]..a[1]; the left border [lo*(1-ext), lo) scores
// a[2]..a[3]; the right border (hi, hi*(1+ext)] scores a[4]..a[5]. Each
// segment descends linearly in value.
inline double score_trilinear(double value, double lo, double hi, const TriLinearConfig& cfg) {
    const auto seg = trilinear_segments(lo, hi, cfg);
    const auto& a = cfg.anchors;
    auto lerp = [](double from, double to, double t) { return from + (to - from) * t; };
    if (value >= seg.lo && value <= seg.hi) {
        return lerp(a[0], a[1], (value - seg.lo) / (seg.hi - seg.lo));
    }
    if (value >= seg.left_start && value < seg.lo) {
        return lerp(a[2], a[3], (value - seg.left_start) / (seg.lo - seg.left_start));
    }
    if (value > seg.hi && value <= seg.right_end) {
        return lerp(a[4], a[5], (value - seg.hi) / (seg.right_end - seg.hi));
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Text scoring

// Lower-cases ASCII and splits on anything that is not a letter or digit.
// Bytes >= 0x80 are kept so UTF-8 words stay intact.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c) || c >= 0x80) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

// Term statistics over every product's concatenated text blobs.
class TextIndex {
public:
    TextIndex() = default;

    explicit TextIndex(const Catalog& catalog) {
        term_counts_.reserve(catalog.products.size());
        for (std::size_t i = 0; i < catalog.products.size(); ++i) {
            const auto& p = catalog.products[i];
            position_[p.product_id] = i;
            std::unordered_map<std::string, std::uint32_t> counts;
            for (const auto& blob : p.text_blobs) {
                for (auto& tok : tokenize(blob)) ++counts[std::move(tok)];
            }
            for (const auto& [term, _] : counts) ++document_frequency_[term];
            term_counts_.push_back(std::move(counts));
        }
    }

    std::size_t size() const { return term_counts_.size(); }

    std::uint32_t df(const std::string& term) const {
        auto it = document_frequency_.find(term);
        return it == document_frequency_.end() ? 0 : it->second;
    }

    std::uint32_t tf(std::size_t product_index, const std::string& term) const {
        const auto& counts = term_counts_.at(product_index);
        auto it = counts.find(term);
        return it == counts.end() ? 0 : it->second;
    }

    // Unnormalized tf * ln(1 + N/df), summed over the distinct tokens of
    // `term`.
    double raw_score(std::size_t product_index, std::string_view term) const {
        double total = 0.0;
        for (const auto& tok : distinct_tokens(term)) {
            const auto d = df(tok);
            if (d == 0) continue;
            const double idf = std::log(1.0 + static_cast<double>(size()) / d);
            total += tf(product_index, tok) * idf;
        }
        return total;
    }

    // Normalized scores for all products, in catalog order.
    std::vector<double> scores(std::string_view term) const {
        std::vector<double> out(size(), 0.0);
        double best = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            out[i] = raw_score(i, term);
            best = std::max(best, out[i]);
        }
        if (best > 0) {
            for (auto& s : out) s /= best;
        }
        return out;
    }

    std::size_t index_of(const ProductId& id) const {
        auto it = position_.find(id);
        if (it == position_.end()) throw QueryError("product not indexed: " + id);
        return it->second;
    }

private:
    static std::vector<std::string> distinct_tokens(std::string_view term) {
        auto toks = tokenize(term);
        std::sort(toks.begin(), toks.end());
        toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
        return toks;
    }

    std::vector<std::unordered_map<std::string, std::uint32_t>> term_counts_;
    std::unordered_map<std::string, std::uint32_t> document_frequency_;
    std::unordered_map<ProductId, std::size_t> position_;
};

inline double score_text(const Product& product, std::string_view term, const TextIndex& index) {
    const auto all = index.scores(term);
    return all[index.index_of(product.product_id)];
}

} // namespace prefsearch
