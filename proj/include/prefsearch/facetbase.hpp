#pragma once
// Conjunctive faceted baseline: every selected facet value must hold.

#include "prefsearch/catalog.hpp"
#include "prefsearch/error.hpp"
#include "prefsearch/json_util.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace prefsearch {

struct FacetValue {
    std::string facet_id;
    std::string value;

    auto operator<=>(const FacetValue&) const = default;
};

enum class SortOrder { Relevance, PriceAsc, StarsDesc, RatingDesc };

struct FacetSelection {
    std::set<FacetValue> selected;
    SortOrder sort = SortOrder::Relevance;

    bool operator==(const FacetSelection&) const = default;
};

inline const char* to_string(SortOrder s) {
    switch (s) {
        case SortOrder::Relevance: return "relevance";
        case SortOrder::PriceAsc: return "price_asc";
        case SortOrder::StarsDesc: return "stars_desc";
        case SortOrder::RatingDesc: return "rating_desc";
    }
    return "?";
}

inline SortOrder sort_order_from(const std::string& s) {
    for (auto o : {SortOrder::Relevance, SortOrder::PriceAsc, SortOrder::StarsDesc,
                   SortOrder::RatingDesc}) {
        if (s == to_string(o)) return o;
    }
    throw ParseError("unknown sort order \"" + s + "\"");
}

inline json selection_to_json(const FacetSelection& sel) {
    json list = json::array();
    for (const auto& fv : sel.selected) list.push_back({{"facet", fv.facet_id}, {"value", fv.value}});
    return {{"selected", std::move(list)}, {"sort", to_string(sel.sort)}};
}

inline FacetSelection selection_from_json(const json& j) {
    FacetSelection sel;
    const auto& list = detail::require(j, "selected", "selection");
    if (!list.is_array()) throw ParseError("selection.selected: expected an array");
    for (const auto& item : list) {
        sel.selected.insert({detail::field<std::string>(item, "facet", "selection.selected"),
                             detail::field<std::string>(item, "value", "selection.selected")});
    }
    sel.sort = sort_order_from(detail::field_or<std::string>(j, "sort", "relevance", "selection"));
    return sel;
}

// Every value the baseline offers: nominal terms, neighborhood names and
// numeric buckets, in schema order.
inline std::vector<FacetValue> facet_values(const Catalog& catalog) {
    std::vector<FacetValue> out;
    for (const auto& f : catalog.schema) {
        switch (f.criterion_class) {
            case CriterionClass::Nominal:
                for (const auto& v : f.values) out.push_back({f.facet_id, v});
                break;
            case CriterionClass::Geo:
                for (const auto& [name, _] : catalog.neighborhoods) out.push_back({f.facet_id, name});
                break;
            case CriterionClass::Text:
                break;
            default:
                for (const auto& b : f.buckets) out.push_back({f.facet_id, b.label});
                break;
        }
    }
    return out;
}

inline void validate_selection(const FacetSelection& sel, const Catalog& catalog) {
    for (const auto& fv : sel.selected) {
        const auto* f = catalog.find_facet(fv.facet_id);
        if (f == nullptr) throw QueryError("unknown facet \"" + fv.facet_id + "\"");
        bool known = false;
        switch (f->criterion_class) {
            case CriterionClass::Nominal:
                known = std::find(f->values.begin(), f->values.end(), fv.value) != f->values.end();
                break;
            case CriterionClass::Geo:
                known = catalog.neighborhoods.count(fv.value) > 0;
                break;
            case CriterionClass::Text:
                break;
            default:
                known = f->find_bucket(fv.value) != nullptr;
                break;
        }
        if (!known) {
            throw QueryError("unknown value \"" + fv.value + "\" for facet \"" + fv.facet_id + "\"");
        }
    }
}

inline bool matches_facet_value(const Product& p, const FacetDefinition& f, const std::string& value) {
    if (f.is_numeric()) {
        const auto* b = f.find_bucket(value);
        return b != nullptr && b->contains(p.numeric(*f.field));
    }
    return p.has_feature(f.facet_id, value);
}

namespace detail {

inline bool matches_all(const Product& p, const std::vector<std::pair<const FacetDefinition*, std::string>>& terms) {
    for (const auto& [f, v] : terms) {
        if (!matches_facet_value(p, *f, v)) return false;
    }
    return true;
}

inline std::vector<std::pair<const FacetDefinition*, std::string>> resolve(const FacetSelection& sel,
                                                                           const Catalog& catalog) {
    validate_selection(sel, catalog);
    std::vector<std::pair<const FacetDefinition*, std::string>> out;
    for (const auto& fv : sel.selected) out.emplace_back(catalog.find_facet(fv.facet_id), fv.value);
    return out;
}

} // namespace detail

// Products matching every selected value, in the requested order. Ties (and
// the whole list under Relevance, where all survivors match equally) are
// broken by ascending product_id.
inline std::vector<ProductId> facet_filter(const FacetSelection& sel, const Catalog& catalog) {
    const auto terms = detail::resolve(sel, catalog);
    std::vector<const Product*> hits;
    for (const auto& p : catalog.products) {
        if (detail::matches_all(p, terms)) hits.push_back(&p);
    }
    auto key = [&](const Product& p) -> double {
        switch (sel.sort) {
            case SortOrder::PriceAsc: return p.price;
            case SortOrder::StarsDesc: return -static_cast<double>(p.stars);
            case SortOrder::RatingDesc: return -p.rating;
            case SortOrder::Relevance: return 0.0;
        }
        return 0.0;
    };
    std::sort(hits.begin(), hits.end(), [&](const Product* a, const Product* b) {
        const double ka = key(*a);
        const double kb = key(*b);
        if (ka != kb) return ka < kb;
        return a->product_id < b->product_id;
    });
    std::vector<ProductId> ids;
    ids.reserve(hits.size());
    for (const auto* p : hits) ids.push_back(p->product_id);
    return ids;
}

// For an unselected value v: the size of the result list after also
// selecting v. For a selected value: the current result count.
inline std::map<FacetValue, std::size_t> facet_counts(const FacetSelection& sel, const Catalog& catalog) {
    const auto terms = detail::resolve(sel, catalog);
    std::vector<const Product*> current;
    for (const auto& p : catalog.products) {
        if (detail::matches_all(p, terms)) current.push_back(&p);
    }
    std::map<FacetValue, std::size_t> counts;
    for (const auto& fv : facet_values(catalog)) {
        if (sel.selected.count(fv) > 0) {
            counts[fv] = current.size();
            continue;
        }
        const auto& facet = *catalog.find_facet(fv.facet_id);
        counts[fv] = static_cast<std::size_t>(std::count_if(
            current.begin(), current.end(),
            [&](const Product* p) { return matches_facet_value(*p, facet, fv.value); }));
    }
    return counts;
}

inline json counts_to_json(const std::map<FacetValue, std::size_t>& counts) {
    json out = json::array();
    for (const auto& [fv, n] : counts) {
        out.push_back({{"facet", fv.facet_id}, {"value", fv.value}, {"count", n}});
    }
    return out;
}

} // namespace prefsearch
