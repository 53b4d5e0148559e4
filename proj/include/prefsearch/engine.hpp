#pragma once
// Weighted preference engine: term suggestions, must-have/must-not
// filtering, summed relevance scores and result pages.

#include "prefsearch/catalog.hpp"
#include "prefsearch/error.hpp"
#include "prefsearch/json_util.hpp"
#include "prefsearch/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

namespace prefsearch {

inline constexpr std::size_t kPageSize = 15;

// Weight a freshly added criterion carries: high, but below must-have, so
// adding a term never shrinks the result list.
inline constexpr double kInitialWeight = 0.9;
inline constexpr double kMustNotWeight = 0.0;
inline constexpr double kMustHaveWeight = 1.0;

struct NominalTerm {
    std::string facet_id;
    std::string value;
    bool operator==(const NominalTerm&) const = default;
};
struct NumericPoint {
    std::string facet_id;
    double value = 0.0;
    bool operator==(const NumericPoint&) const = default;
};
struct NumericDirectedPref {
    std::string facet_id;
    bool operator==(const NumericDirectedPref&) const = default;
};
struct NumericRange {
    std::string facet_id;
    double lo = 0.0;
    double hi = 0.0;
    bool operator==(const NumericRange&) const = default;
};
struct GeoTerm {
    std::string facet_id;
    std::string neighborhood;
    bool operator==(const GeoTerm&) const = default;
};
struct FreeText {
    std::string term;
    bool operator==(const FreeText&) const = default;
};

using CriterionTarget =
    std::variant<NominalTerm, NumericPoint, NumericDirectedPref, NumericRange, GeoTerm, FreeText>;

struct Criterion {
    std::string criterion_id;
    CriterionTarget target;
    double weight = kInitialWeight;

    bool is_must_have() const { return weight == kMustHaveWeight; }
    bool is_must_not() const { return weight == kMustNotWeight; }
    bool operator==(const Criterion&) const = default;
};

struct WeightedQuery {
    std::vector<Criterion> criteria;

    const Criterion* find(const std::string& id) const {
        for (const auto& c : criteria) {
            if (c.criterion_id == id) return &c;
        }
        return nullptr;
    }
    Criterion* find(const std::string& id) {
        for (auto& c : criteria) {
            if (c.criterion_id == id) return &c;
        }
        return nullptr;
    }
    bool operator==(const WeightedQuery&) const = default;
};

struct CriterionMatch {
    std::string criterion_id;
    double rs = 0.0;
    bool matched = false;
};

struct ScoredResult {
    ProductId product_id;
    double srs = 0.0;
    std::vector<CriterionMatch> per_criterion;
};

struct ResultPage {
    std::size_t page_index = 0;
    std::size_t page_size = kPageSize;
    std::vector<ScoredResult> items;
    std::size_t total_count = 0;
};

// ---------------------------------------------------------------------------
// JSON

inline json target_to_json(const CriterionTarget& target) {
    return std::visit(
        [](const auto& t) -> json {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, NominalTerm>) {
                return {{"type", "nominal"}, {"facet", t.facet_id}, {"value", t.value}};
            } else if constexpr (std::is_same_v<T, NumericPoint>) {
                return {{"type", "point"}, {"facet", t.facet_id}, {"value", t.value}};
            } else if constexpr (std::is_same_v<T, NumericDirectedPref>) {
                return {{"type", "directed"}, {"facet", t.facet_id}};
            } else if constexpr (std::is_same_v<T, NumericRange>) {
                return {{"type", "range"}, {"facet", t.facet_id}, {"lo", t.lo}, {"hi", t.hi}};
            } else if constexpr (std::is_same_v<T, GeoTerm>) {
                return {{"type", "geo"}, {"facet", t.facet_id}, {"neighborhood", t.neighborhood}};
            } else {
                return {{"type", "text"}, {"term", t.term}};
            }
        },
        target);
}

inline CriterionTarget target_from_json(const json& j, const std::string& where) {
    using detail::field;
    const auto type = field<std::string>(j, "type", where);
    if (type == "nominal") {
        return NominalTerm{field<std::string>(j, "facet", where), field<std::string>(j, "value", where)};
    }
    if (type == "point") {
        return NumericPoint{field<std::string>(j, "facet", where), field<double>(j, "value", where)};
    }
    if (type == "directed") return NumericDirectedPref{field<std::string>(j, "facet", where)};
    if (type == "range") {
        return NumericRange{field<std::string>(j, "facet", where), field<double>(j, "lo", where),
                            field<double>(j, "hi", where)};
    }
    if (type == "geo") {
        return GeoTerm{field<std::string>(j, "facet", where),
                       field<std::string>(j, "neighborhood", where)};
    }
    if (type == "text") return FreeText{field<std::string>(j, "term", where)};
    throw ParseError(where + ".type: unknown criterion type \"" + type + "\"");
}

inline json criterion_to_json(const Criterion& c) {
    return {{"id", c.criterion_id}, {"weight", c.weight}, {"target", target_to_json(c.target)}};
}

inline Criterion criterion_from_json(const json& j, const std::string& where) {
    Criterion c;
    c.criterion_id = detail::field<std::string>(j, "id", where);
    c.weight = detail::field_or<double>(j, "weight", kInitialWeight, where);
    c.target = target_from_json(detail::require(j, "target", where), where + ".target");
    return c;
}

inline json query_to_json(const WeightedQuery& q) {
    json criteria = json::array();
    for (const auto& c : q.criteria) criteria.push_back(criterion_to_json(c));
    return {{"criteria", std::move(criteria)}};
}

inline WeightedQuery query_from_json(const json& j) {
    WeightedQuery q;
    const auto& list = detail::require(j, "criteria", "query");
    if (!list.is_array()) throw ParseError("query.criteria: expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
        q.criteria.push_back(criterion_from_json(list[i], "query.criteria[" + std::to_string(i) + "]"));
    }
    return q;
}

inline json result_to_json(const ScoredResult& r) {
    json detail = json::array();
    for (const auto& m : r.per_criterion) {
        detail.push_back({{"id", m.criterion_id}, {"rs", m.rs}, {"matched", m.matched}});
    }
    return {{"product_id", r.product_id}, {"srs", r.srs}, {"criteria", std::move(detail)}};
}

inline json page_to_json(const ResultPage& page) {
    json items = json::array();
    for (const auto& r : page.items) items.push_back(result_to_json(r));
    return {{"page_index", page.page_index},
            {"page_size", page.page_size},
            {"total_count", page.total_count},
            {"items", std::move(items)}};
}

// ---------------------------------------------------------------------------
// Evaluation context

inline const std::string& target_facet(const CriterionTarget& t) {
    static const std::string kNone;
    return std::visit(
        [](const auto& v) -> const std::string& {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, FreeText>) {
                return kNone;
            } else {
                return v.facet_id;
            }
        },
        t);
}

// Immutable per-catalog state shared by all query evaluations: the text
// index and id lookups. The catalog must outlive the context.
class SearchContext {
public:
    explicit SearchContext(const Catalog& catalog) : catalog_(&catalog), text_(catalog) {
        for (std::size_t i = 0; i < catalog.products.size(); ++i) {
            index_[catalog.products[i].product_id] = i;
        }
    }

    const Catalog& catalog() const { return *catalog_; }
    const TextIndex& text_index() const { return text_; }

    const Product* product(const ProductId& id) const {
        auto it = index_.find(id);
        return it == index_.end() ? nullptr : &catalog_->products[it->second];
    }

    const FacetDefinition& facet_for(const Criterion& c, CriterionClass expected) const {
        const auto& id = target_facet(c.target);
        const auto* facet = catalog_->find_facet(id);
        if (facet == nullptr) {
            throw QueryError("criterion \"" + c.criterion_id + "\": unknown facet \"" + id + "\"");
        }
        if (facet->criterion_class != expected) {
            throw QueryError("criterion \"" + c.criterion_id + "\": facet \"" + id + "\" is " +
                             to_string(facet->criterion_class) + ", not " + to_string(expected));
        }
        return *facet;
    }

    void validate(const WeightedQuery& q) const {
        std::unordered_set<std::string> ids;
        for (const auto& c : q.criteria) {
            if (c.criterion_id.empty()) throw QueryError("criterion with empty id");
            if (!ids.insert(c.criterion_id).second) {
                throw QueryError("duplicate criterion id \"" + c.criterion_id + "\"");
            }
            if (!(c.weight >= 0.0 && c.weight <= 1.0)) {
                throw QueryError("criterion \"" + c.criterion_id + "\": weight outside [0,1]");
            }
            std::visit(
                [&](const auto& t) {
                    using T = std::decay_t<decltype(t)>;
                    if constexpr (std::is_same_v<T, NominalTerm>) {
                        const auto& f = facet_for(c, CriterionClass::Nominal);
                        if (std::find(f.values.begin(), f.values.end(), t.value) == f.values.end()) {
                            throw QueryError("criterion \"" + c.criterion_id + "\": unknown value \"" +
                                             t.value + "\" for facet \"" + f.facet_id + "\"");
                        }
                    } else if constexpr (std::is_same_v<T, NumericPoint>) {
                        facet_for(c, CriterionClass::NumericPoint);
                    } else if constexpr (std::is_same_v<T, NumericDirectedPref>) {
                        facet_for(c, CriterionClass::NumericDirected);
                    } else if constexpr (std::is_same_v<T, NumericRange>) {
                        const auto& f = facet_for(c, CriterionClass::NumericRange);
                        trilinear_segments(t.lo, t.hi, std::get<TriLinearConfig>(f.scoring));
                    } else if constexpr (std::is_same_v<T, GeoTerm>) {
                        facet_for(c, CriterionClass::Geo);
                        if (catalog_->neighborhoods.count(t.neighborhood) == 0) {
                            throw QueryError("criterion \"" + c.criterion_id +
                                             "\": unknown neighborhood \"" + t.neighborhood + "\"");
                        }
                    } else {
                        if (tokenize(t.term).empty()) {
                            throw QueryError("criterion \"" + c.criterion_id + "\": empty free text");
                        }
                    }
                },
                c.target);
        }
    }

    // rs of one criterion for every product, in catalog order.
    std::vector<double> scores(const Criterion& c) const {
        const auto& products = catalog_->products;
        std::vector<double> out(products.size(), 0.0);
        std::visit(
            [&](const auto& t) {
                using T = std::decay_t<decltype(t)>;
                if constexpr (std::is_same_v<T, FreeText>) {
                    out = text_.scores(t.term);
                } else {
                    for (std::size_t i = 0; i < products.size(); ++i) {
                        out[i] = score_one(products[i], c, t);
                    }
                }
            },
            c.target);
        return out;
    }

    // Boolean reading of a criterion used when it acts as a filter
    // (weight 0 or 1). `rs` is the criterion's score for this product.
    bool satisfies(const Product& p, const Criterion& c, double rs) const {
        return std::visit(
            [&](const auto& t) -> bool {
                using T = std::decay_t<decltype(t)>;
                if constexpr (std::is_same_v<T, NominalTerm>) {
                    return p.has_feature(t.facet_id, t.value);
                } else if constexpr (std::is_same_v<T, NumericPoint>) {
                    const auto& f = facet_for(c, CriterionClass::NumericPoint);
                    const auto& g = std::get<GaussianConfig>(f.scoring);
                    return std::abs(p.numeric(*f.field) - t.value) <= g.offset;
                } else if constexpr (std::is_same_v<T, NumericRange>) {
                    const auto& f = facet_for(c, CriterionClass::NumericRange);
                    const double v = p.numeric(*f.field);
                    return v >= t.lo && v <= t.hi;
                } else if constexpr (std::is_same_v<T, GeoTerm>) {
                    return p.has_feature(t.facet_id, t.neighborhood);
                } else {
                    return rs > 0.0;  // directed preference, free text
                }
            },
            c.target);
    }

private:
    template <typename T>
    double score_one(const Product& p, const Criterion& c, const T& t) const {
        if constexpr (std::is_same_v<T, NominalTerm>) {
            return score_nominal(p, t.facet_id, t.value);
        } else if constexpr (std::is_same_v<T, NumericPoint>) {
            const auto& f = facet_for(c, CriterionClass::NumericPoint);
            return score_gaussian(std::abs(p.numeric(*f.field) - t.value),
                                  std::get<GaussianConfig>(f.scoring));
        } else if constexpr (std::is_same_v<T, NumericDirectedPref>) {
            const auto& f = facet_for(c, CriterionClass::NumericDirected);
            return score_linear_directed(p.numeric(*f.field), std::get<LinearConfig>(f.scoring));
        } else if constexpr (std::is_same_v<T, NumericRange>) {
            const auto& f = facet_for(c, CriterionClass::NumericRange);
            return score_trilinear(p.numeric(*f.field), t.lo, t.hi,
                                   std::get<TriLinearConfig>(f.scoring));
        } else if constexpr (std::is_same_v<T, GeoTerm>) {
            const auto& f = facet_for(c, CriterionClass::Geo);
            const auto& centroid = catalog_->neighborhoods.at(t.neighborhood);
            return score_gaussian(haversine_km(p.location, centroid),
                                  std::get<GaussianConfig>(f.scoring));
        } else {
            return 0.0;
        }
    }

    const Catalog* catalog_;
    TextIndex text_;
    std::unordered_map<ProductId, std::size_t> index_;
};

namespace detail {

// Correctly rounded sum of weight * rs terms. Each product is split into
// its rounded value and exact error (via fma) and accumulated in
// non-overlapping partials, so sums that are mathematically equal compare
// equal regardless of term order.
class ExactSum {
public:
    void add_product(double a, double b) {
        const double p = a * b;
        add(p);
        add(std::fma(a, b, -p));
    }

    void add(double x) {
        std::size_t i = 0;
        for (double y : partials_) {
            if (std::abs(x) < std::abs(y)) std::swap(x, y);
            const double hi = x + y;
            const double lo = y - (hi - x);
            if (lo != 0.0) partials_[i++] = lo;
            x = hi;
        }
        partials_.resize(i);
        partials_.push_back(x);
    }

    double value() const {
        std::size_t n = partials_.size();
        if (n == 0) return 0.0;
        double hi = partials_[--n];
        double lo = 0.0;
        while (n > 0) {
            const double x = hi;
            const double y = partials_[--n];
            hi = x + y;
            lo = y - (hi - x);
            if (lo != 0.0) break;
        }
        // Round half to even across the remaining partials.
        if (n > 0 && ((lo < 0 && partials_[n - 1] < 0) || (lo > 0 && partials_[n - 1] > 0))) {
            const double y = lo * 2;
            const double x = hi + y;
            if (y == x - hi) hi = x;
        }
        return hi;
    }

private:
    std::vector<double> partials_;
};

struct Evaluation {
    std::vector<std::vector<double>> scores;  // [criterion][product]
    std::vector<std::size_t> survivors;       // product indices, catalog order
};

inline Evaluation evaluate(const WeightedQuery& query, const SearchContext& ctx) {
    ctx.validate(query);
    const auto& products = ctx.catalog().products;
    Evaluation ev;
    ev.scores.reserve(query.criteria.size());
    for (const auto& c : query.criteria) ev.scores.push_back(ctx.scores(c));
    for (std::size_t i = 0; i < products.size(); ++i) {
        bool keep = true;
        for (std::size_t k = 0; k < query.criteria.size() && keep; ++k) {
            const auto& c = query.criteria[k];
            if (c.is_must_have()) {
                keep = ctx.satisfies(products[i], c, ev.scores[k][i]);
            } else if (c.is_must_not()) {
                keep = !ctx.satisfies(products[i], c, ev.scores[k][i]);
            }
        }
        if (keep) ev.survivors.push_back(i);
    }
    return ev;
}

} // namespace detail

// Products that satisfy every must-have criterion and no must-not criterion.
inline std::set<ProductId> filter(const WeightedQuery& query, const SearchContext& ctx) {
    const auto ev = detail::evaluate(query, ctx);
    std::set<ProductId> out;
    for (auto i : ev.survivors) out.insert(ctx.catalog().products[i].product_id);
    return out;
}

// Filtered products ordered by srs = sum of weight * rs over all criteria
// (correctly rounded), descending, ties by ascending product_id.
inline std::vector<ScoredResult> rank(const WeightedQuery& query, const SearchContext& ctx) {
    const auto ev = detail::evaluate(query, ctx);
    const auto& products = ctx.catalog().products;
    std::vector<ScoredResult> results;
    results.reserve(ev.survivors.size());
    for (auto i : ev.survivors) {
        ScoredResult r;
        r.product_id = products[i].product_id;
        r.per_criterion.reserve(query.criteria.size());
        detail::ExactSum srs;
        for (std::size_t k = 0; k < query.criteria.size(); ++k) {
            const double rs = ev.scores[k][i];
            srs.add_product(query.criteria[k].weight, rs);
            r.per_criterion.push_back({query.criteria[k].criterion_id, rs, rs > 0.0});
        }
        r.srs = srs.value();
        results.push_back(std::move(r));
    }
    std::sort(results.begin(), results.end(), [](const ScoredResult& a, const ScoredResult& b) {
        if (a.srs != b.srs) return a.srs > b.srs;
        return a.product_id < b.product_id;
    });
    return results;
}

inline std::vector<ProductId> ranked_ids(const std::vector<ScoredResult>& results) {
    std::vector<ProductId> ids;
    ids.reserve(results.size());
    for (const auto& r : results) ids.push_back(r.product_id);
    return ids;
}

template <typename T>
std::vector<T> page_window(const std::vector<T>& items, std::size_t page_index,
                           std::size_t page_size) {
    const std::size_t begin = page_index * page_size;
    if (page_size == 0 || begin >= items.size()) return {};
    const std::size_t end = std::min(items.size(), begin + page_size);
    return std::vector<T>(items.begin() + static_cast<std::ptrdiff_t>(begin),
                          items.begin() + static_cast<std::ptrdiff_t>(end));
}

inline ResultPage paginate(const std::vector<ScoredResult>& results, std::size_t page_index,
                           std::size_t page_size = kPageSize) {
    ResultPage page;
    page.page_index = page_index;
    page.page_size = page_size;
    page.total_count = results.size();
    page.items = page_window(results, page_index, page_size);
    return page;
}

// ---------------------------------------------------------------------------
// Suggestions

enum class SuggestionKind { FacetTerm, FacetCategory, FreeText };

struct Suggestion {
    SuggestionKind kind = SuggestionKind::FreeText;
    std::string text;
    std::string facet_id;  // empty for free text
    std::string category;  // empty for free text

    bool operator==(const Suggestion&) const = default;
};

inline const char* to_string(SuggestionKind k) {
    switch (k) {
        case SuggestionKind::FacetTerm: return "facet_term";
        case SuggestionKind::FacetCategory: return "facet_category";
        case SuggestionKind::FreeText: return "free_text";
    }
    return "?";
}

inline json suggestion_to_json(const Suggestion& s) {
    json j = {{"kind", to_string(s.kind)}, {"text", s.text}};
    if (!s.facet_id.empty()) j["facet"] = s.facet_id;
    if (!s.category.empty()) j["category"] = s.category;
    return j;
}

namespace detail {

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return out;
}

} // namespace detail

// Case-insensitive substring match over facet terms (nominal values and
// neighborhood names) and category names. Terms come first, each group
// alphabetical. With no match at all the input is offered as free text.
inline std::vector<Suggestion> suggest(std::string_view prefix, const Catalog& catalog,
                                       std::size_t limit) {
    const auto needle = detail::lower(prefix);
    auto hit = [&](const std::string& s) { return detail::lower(s).find(needle) != std::string::npos; };

    std::vector<Suggestion> terms;
    std::vector<Suggestion> categories;
    std::set<std::string> seen_categories;
    for (const auto& f : catalog.schema) {
        if (f.criterion_class == CriterionClass::Nominal) {
            for (const auto& v : f.values) {
                if (hit(v)) terms.push_back({SuggestionKind::FacetTerm, v, f.facet_id, f.category});
            }
        } else if (f.criterion_class == CriterionClass::Geo) {
            for (const auto& [name, _] : catalog.neighborhoods) {
                if (hit(name)) terms.push_back({SuggestionKind::FacetTerm, name, f.facet_id, f.category});
            }
        }
        if (hit(f.category) && seen_categories.insert(f.category).second) {
            categories.push_back({SuggestionKind::FacetCategory, f.category, f.facet_id, f.category});
        }
    }
    auto by_text = [](const Suggestion& a, const Suggestion& b) {
        const auto la = detail::lower(a.text);
        const auto lb = detail::lower(b.text);
        if (la != lb) return la < lb;
        return a.facet_id < b.facet_id;
    };
    std::sort(terms.begin(), terms.end(), by_text);
    std::sort(categories.begin(), categories.end(), by_text);

    std::vector<Suggestion> out;
    if (terms.empty() && categories.empty()) {
        if (!prefix.empty() && limit > 0) {
            out.push_back({SuggestionKind::FreeText, std::string(prefix), {}, {}});
        }
        return out;
    }
    for (auto* group : {&terms, &categories}) {
        for (auto& s : *group) {
            if (out.size() >= limit) return out;
            out.push_back(std::move(s));
        }
    }
    return out;
}

// Turns a picked suggestion into a criterion at the initial weight.
inline Criterion criterion_from_suggestion(const Suggestion& s, std::string criterion_id,
                                           const Catalog& catalog) {
    Criterion c;
    c.criterion_id = std::move(criterion_id);
    c.weight = kInitialWeight;
    if (s.kind == SuggestionKind::FacetTerm) {
        const auto* f = catalog.find_facet(s.facet_id);
        if (f != nullptr && f->criterion_class == CriterionClass::Geo) {
            c.target = GeoTerm{s.facet_id, s.text};
        } else {
            c.target = NominalTerm{s.facet_id, s.text};
        }
    } else if (s.kind == SuggestionKind::FacetCategory) {
        // Picking a directed category ("stars") means "the more the better";
        // other categories need a concrete term, so fall back to text.
        const auto* f = catalog.find_facet(s.facet_id);
        if (f != nullptr && f->criterion_class == CriterionClass::NumericDirected) {
            c.target = NumericDirectedPref{s.facet_id};
        } else {
            c.target = FreeText{s.text};
        }
    } else {
        c.target = FreeText{s.text};
    }
    return c;
}

} // namespace prefsearch
