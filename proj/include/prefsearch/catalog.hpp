#pragma once
// Product and facet data model, catalog file I/O and validation.
//
// A catalog is a single JSON document:
//
//   { "format": "prefsearch-catalog/1",
//     "schema": [FacetDefinition...],
//     "products": [Product...],
//     "neighborhoods": { name: {"lat": .., "lon": ..}, ... } }
//
// See docs/formats.md for the field-level description.

#include "prefsearch/error.hpp"
#include "prefsearch/json_util.hpp"
#include "prefsearch/scoring_config.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace prefsearch {

inline constexpr const char* kCatalogFormat = "prefsearch-catalog/1";

enum class CriterionClass { Nominal, NumericPoint, NumericDirected, NumericRange, Geo, Text };

// Numeric product attribute a numeric facet reads.
enum class NumericField { Price, Stars, Rating };

struct GeoPoint {
    double lat = 0.0;
    double lon = 0.0;

    bool operator==(const GeoPoint&) const = default;
};

// Great-circle distance in kilometres.
inline double haversine_km(const GeoPoint& a, const GeoPoint& b) {
    constexpr double kEarthRadiusKm = 6371.0088;
    constexpr double kDeg = 3.14159265358979323846 / 180.0;
    const double dlat = (b.lat - a.lat) * kDeg;
    const double dlon = (b.lon - a.lon) * kDeg;
    const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(a.lat * kDeg) * std::cos(b.lat * kDeg) * std::sin(dlon / 2) *
                         std::sin(dlon / 2);
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

// Inclusive numeric interval offered as a selectable value in the facet
// baseline, e.g. price "60-120" or stars "4 stars".
struct Bucket {
    std::string label;
    double min = 0.0;
    double max = 0.0;

    bool contains(double v) const { return v >= min && v <= max; }
    bool operator==(const Bucket&) const = default;
};

struct FacetDefinition {
    std::string facet_id;
    std::string display_name;
    std::string category;
    CriterionClass criterion_class = CriterionClass::Nominal;
    std::optional<NumericField> field;  // numeric classes only
    std::vector<std::string> values;    // nominal vocabulary
    ScoringConfig scoring;
    std::vector<Bucket> buckets;        // numeric classes, facet baseline only

    bool is_numeric() const {
        return criterion_class == CriterionClass::NumericPoint ||
               criterion_class == CriterionClass::NumericDirected ||
               criterion_class == CriterionClass::NumericRange;
    }
    const Bucket* find_bucket(std::string_view label) const {
        for (const auto& b : buckets) {
            if (b.label == label) return &b;
        }
        return nullptr;
    }
    bool operator==(const FacetDefinition&) const = default;
};

using ProductId = std::string;

struct Product {
    ProductId product_id;
    std::string name;
    double price = 0.0;
    int stars = 1;
    double rating = 1.0;
    GeoPoint location;
    std::map<std::string, std::set<std::string>> nominal_features;
    std::vector<std::string> text_blobs;

    double numeric(NumericField f) const {
        switch (f) {
            case NumericField::Price: return price;
            case NumericField::Stars: return static_cast<double>(stars);
            case NumericField::Rating: return rating;
        }
        return 0.0;
    }
    bool has_feature(const std::string& facet_id, const std::string& value) const {
        auto it = nominal_features.find(facet_id);
        return it != nominal_features.end() && it->second.count(value) > 0;
    }
    bool operator==(const Product&) const = default;
};

struct Catalog {
    std::vector<FacetDefinition> schema;
    std::vector<Product> products;
    std::map<std::string, GeoPoint> neighborhoods;

    const FacetDefinition* find_facet(std::string_view id) const {
        for (const auto& f : schema) {
            if (f.facet_id == id) return &f;
        }
        return nullptr;
    }
    const Product* find_product(std::string_view id) const {
        for (const auto& p : products) {
            if (p.product_id == id) return &p;
        }
        return nullptr;
    }
    std::set<std::string> categories() const {
        std::set<std::string> out;
        for (const auto& f : schema) out.insert(f.category);
        return out;
    }
    bool operator==(const Catalog&) const = default;
};

// ---------------------------------------------------------------------------
// Enum names

inline const char* to_string(CriterionClass c) {
    switch (c) {
        case CriterionClass::Nominal: return "nominal";
        case CriterionClass::NumericPoint: return "numeric_point";
        case CriterionClass::NumericDirected: return "numeric_directed";
        case CriterionClass::NumericRange: return "numeric_range";
        case CriterionClass::Geo: return "geo";
        case CriterionClass::Text: return "text";
    }
    return "?";
}

inline CriterionClass criterion_class_from(const std::string& s, const std::string& where) {
    for (auto c : {CriterionClass::Nominal, CriterionClass::NumericPoint,
                   CriterionClass::NumericDirected, CriterionClass::NumericRange,
                   CriterionClass::Geo, CriterionClass::Text}) {
        if (s == to_string(c)) return c;
    }
    throw ParseError(where + ": unknown criterion class \"" + s + "\"");
}

inline const char* to_string(NumericField f) {
    switch (f) {
        case NumericField::Price: return "price";
        case NumericField::Stars: return "stars";
        case NumericField::Rating: return "rating";
    }
    return "?";
}

inline NumericField numeric_field_from(const std::string& s, const std::string& where) {
    for (auto f : {NumericField::Price, NumericField::Stars, NumericField::Rating}) {
        if (s == to_string(f)) return f;
    }
    throw ParseError(where + ": unknown numeric field \"" + s + "\"");
}

inline const char* to_string(Direction d) {
    return d == Direction::HigherBetter ? "higher_better" : "lower_better";
}

// ---------------------------------------------------------------------------
// JSON encoding

inline json scoring_to_json(const ScoringConfig& cfg) {
    if (const auto* g = std::get_if<GaussianConfig>(&cfg)) {
        return {{"function", "gaussian"},
                {"sigma", g->sigma},
                {"offset", g->offset},
                {"cutoff_sigmas", g->cutoff_sigmas}};
    }
    if (const auto* l = std::get_if<LinearConfig>(&cfg)) {
        return {{"function", "linear"},
                {"scale_min", l->scale_min},
                {"scale_max", l->scale_max},
                {"direction", to_string(l->direction)}};
    }
    if (const auto* t = std::get_if<TriLinearConfig>(&cfg)) {
        return {{"function", "trilinear"},
                {"extension_fraction", t->extension_fraction},
                {"anchors", t->anchors}};
    }
    return nullptr;
}

inline ScoringConfig scoring_from_json(const json& j, const std::string& where) {
    if (j.is_null()) return std::monostate{};
    const auto fn = detail::field<std::string>(j, "function", where);
    if (fn == "gaussian") {
        GaussianConfig g;
        g.sigma = detail::field<double>(j, "sigma", where);
        g.offset = detail::field_or<double>(j, "offset", 0.0, where);
        g.cutoff_sigmas = detail::field_or<double>(j, "cutoff_sigmas", 3.0, where);
        return g;
    }
    if (fn == "linear") {
        LinearConfig l;
        l.scale_min = detail::field<double>(j, "scale_min", where);
        l.scale_max = detail::field<double>(j, "scale_max", where);
        const auto dir = detail::field_or<std::string>(j, "direction", "higher_better", where);
        if (dir == "higher_better") {
            l.direction = Direction::HigherBetter;
        } else if (dir == "lower_better") {
            l.direction = Direction::LowerBetter;
        } else {
            throw ParseError(where + ".direction: unknown direction \"" + dir + "\"");
        }
        return l;
    }
    if (fn == "trilinear") {
        TriLinearConfig t;
        t.extension_fraction = detail::field_or<double>(j, "extension_fraction", 0.2, where);
        if (j.contains("anchors")) {
            t.anchors = detail::get_as<std::array<double, 6>>(j.at("anchors"), where + ".anchors");
        }
        return t;
    }
    throw ParseError(where + ".function: unknown scoring function \"" + fn + "\"");
}

inline json facet_to_json(const FacetDefinition& f) {
    json j = {{"facet_id", f.facet_id},
              {"display_name", f.display_name},
              {"category", f.category},
              {"class", to_string(f.criterion_class)}};
    if (f.field) j["field"] = to_string(*f.field);
    if (!f.values.empty()) j["values"] = f.values;
    if (!std::holds_alternative<std::monostate>(f.scoring)) j["scoring"] = scoring_to_json(f.scoring);
    if (!f.buckets.empty()) {
        json buckets = json::array();
        for (const auto& b : f.buckets) {
            buckets.push_back({{"label", b.label}, {"min", b.min}, {"max", b.max}});
        }
        j["buckets"] = std::move(buckets);
    }
    return j;
}

inline FacetDefinition facet_from_json(const json& j, const std::string& where) {
    FacetDefinition f;
    f.facet_id = detail::field<std::string>(j, "facet_id", where);
    const std::string at = where + "[" + f.facet_id + "]";
    f.display_name = detail::field_or<std::string>(j, "display_name", f.facet_id, at);
    f.category = detail::field<std::string>(j, "category", at);
    f.criterion_class = criterion_class_from(detail::field<std::string>(j, "class", at), at);
    if (j.contains("field")) {
        f.field = numeric_field_from(detail::field<std::string>(j, "field", at), at);
    }
    f.values = detail::field_or<std::vector<std::string>>(j, "values", {}, at);
    if (j.contains("scoring")) f.scoring = scoring_from_json(j.at("scoring"), at + ".scoring");
    if (j.contains("buckets")) {
        for (const auto& b : detail::require(j, "buckets", at)) {
            f.buckets.push_back({detail::field<std::string>(b, "label", at + ".buckets"),
                                 detail::field<double>(b, "min", at + ".buckets"),
                                 detail::field<double>(b, "max", at + ".buckets")});
        }
    }
    return f;
}

inline json product_to_json(const Product& p) {
    json features = json::object();
    for (const auto& [facet, values] : p.nominal_features) {
        features[facet] = std::vector<std::string>(values.begin(), values.end());
    }
    return {{"product_id", p.product_id},
            {"name", p.name},
            {"price", p.price},
            {"stars", p.stars},
            {"rating", p.rating},
            {"location", {{"lat", p.location.lat}, {"lon", p.location.lon}}},
            {"features", std::move(features)},
            {"text", p.text_blobs}};
}

inline Product product_from_json(const json& j, const std::string& where) {
    Product p;
    p.product_id = detail::field<std::string>(j, "product_id", where);
    const std::string at = where + "[" + p.product_id + "]";
    p.name = detail::field<std::string>(j, "name", at);
    p.price = detail::field<double>(j, "price", at);
    p.stars = detail::field<int>(j, "stars", at);
    p.rating = detail::field<double>(j, "rating", at);
    const auto& loc = detail::require(j, "location", at);
    p.location = {detail::field<double>(loc, "lat", at + ".location"),
                  detail::field<double>(loc, "lon", at + ".location")};
    if (j.contains("features")) {
        const auto& feats = j.at("features");
        if (!feats.is_object()) throw ParseError(at + ".features: expected an object");
        for (const auto& [facet, values] : feats.items()) {
            auto list = detail::get_as<std::vector<std::string>>(values, at + ".features." + facet);
            p.nominal_features[facet] = std::set<std::string>(list.begin(), list.end());
        }
    }
    p.text_blobs = detail::field_or<std::vector<std::string>>(j, "text", {}, at);
    return p;
}

inline json catalog_to_json(const Catalog& c) {
    json schema = json::array();
    for (const auto& f : c.schema) schema.push_back(facet_to_json(f));
    json products = json::array();
    for (const auto& p : c.products) products.push_back(product_to_json(p));
    json hoods = json::object();
    for (const auto& [name, pt] : c.neighborhoods) hoods[name] = {{"lat", pt.lat}, {"lon", pt.lon}};
    return {{"format", kCatalogFormat},
            {"schema", std::move(schema)},
            {"products", std::move(products)},
            {"neighborhoods", std::move(hoods)}};
}

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline void validate_facet(const FacetDefinition& f) {
    const std::string at = "facet \"" + f.facet_id + "\"";
    if (f.facet_id.empty()) throw ValidationError("facet with empty facet_id");
    if (f.category.empty()) throw ValidationError(at + ": empty category");

    const bool wants_gauss = f.criterion_class == CriterionClass::Geo ||
                             f.criterion_class == CriterionClass::NumericPoint;
    const bool wants_linear = f.criterion_class == CriterionClass::NumericDirected;
    const bool wants_tri = f.criterion_class == CriterionClass::NumericRange;
    const bool wants_none = !(wants_gauss || wants_linear || wants_tri);

    if (wants_none != std::holds_alternative<std::monostate>(f.scoring) ||
        wants_gauss != std::holds_alternative<GaussianConfig>(f.scoring) ||
        wants_linear != std::holds_alternative<LinearConfig>(f.scoring) ||
        wants_tri != std::holds_alternative<TriLinearConfig>(f.scoring)) {
        throw ValidationError(at + ": scoring config does not match class " +
                              to_string(f.criterion_class));
    }
    if (const auto* g = std::get_if<GaussianConfig>(&f.scoring)) {
        if (!(g->sigma > 0)) throw ValidationError(at + ": sigma must be > 0");
        if (!(g->offset >= 0)) throw ValidationError(at + ": offset must be >= 0");
        if (!(g->cutoff_sigmas > 0)) throw ValidationError(at + ": cutoff_sigmas must be > 0");
    }
    if (const auto* l = std::get_if<LinearConfig>(&f.scoring)) {
        if (!(l->scale_min < l->scale_max)) {
            throw ValidationError(at + ": scale_min must be < scale_max");
        }
    }
    if (const auto* t = std::get_if<TriLinearConfig>(&f.scoring)) {
        if (!(t->extension_fraction > 0 && t->extension_fraction < 1)) {
            throw ValidationError(at + ": extension_fraction must lie in (0,1)");
        }
        const auto& a = t->anchors;
        // inner >= ... strictly above left border, above right border, above zero
        bool ordered = a[0] > a[1] && a[1] > a[2] && a[2] > a[3] && a[3] > a[4] &&
                       a[4] > a[5] && a[5] > 0 && a[0] <= 1.0;
        if (!ordered) throw ValidationError(at + ": trilinear anchors must be strictly descending in (0,1]");
    }
    if (f.is_numeric() != f.field.has_value()) {
        throw ValidationError(at + ": numeric facets need a \"field\", others must not have one");
    }
    if (f.criterion_class == CriterionClass::Nominal && f.values.empty()) {
        throw ValidationError(at + ": nominal facet without values");
    }
    if (f.criterion_class != CriterionClass::Nominal && !f.values.empty()) {
        throw ValidationError(at + ": only nominal facets carry a value list");
    }
    std::set<std::string> seen(f.values.begin(), f.values.end());
    if (seen.size() != f.values.size()) throw ValidationError(at + ": duplicate values");
    std::set<std::string> labels;
    for (const auto& b : f.buckets) {
        if (!f.is_numeric()) throw ValidationError(at + ": buckets on a non-numeric facet");
        if (!(b.min <= b.max)) throw ValidationError(at + ": bucket \"" + b.label + "\" has min > max");
        if (!labels.insert(b.label).second) {
            throw ValidationError(at + ": duplicate bucket \"" + b.label + "\"");
        }
    }
}

} // namespace detail

// Throws ValidationError naming the first violated invariant and the record.
inline void validate_catalog(const Catalog& c) {
    std::unordered_set<std::string> facet_ids;
    for (const auto& f : c.schema) {
        detail::validate_facet(f);
        if (!facet_ids.insert(f.facet_id).second) {
            throw ValidationError("duplicate facet_id \"" + f.facet_id + "\"");
        }
    }
    for (const auto& f : c.schema) {
        if (f.criterion_class == CriterionClass::Geo && c.neighborhoods.empty()) {
            throw ValidationError("geo facet \"" + f.facet_id + "\" but no neighborhoods defined");
        }
    }

    double rating_min = 1.0;
    double rating_max = 10.0;
    for (const auto& f : c.schema) {
        if (f.field == NumericField::Rating) {
            if (const auto* l = std::get_if<LinearConfig>(&f.scoring)) {
                rating_min = l->scale_min;
                rating_max = l->scale_max;
            }
        }
    }

    std::unordered_set<std::string> product_ids;
    for (const auto& p : c.products) {
        const std::string at = "product \"" + p.product_id + "\"";
        if (p.product_id.empty()) throw ValidationError("product with empty product_id");
        if (!product_ids.insert(p.product_id).second) {
            throw ValidationError("duplicate product_id \"" + p.product_id + "\"");
        }
        if (!(p.price > 0)) throw ValidationError(at + ": price must be > 0");
        if (p.stars < 1 || p.stars > 5) throw ValidationError(at + ": stars outside 1..5");
        if (!(p.rating >= rating_min && p.rating <= rating_max)) {
            throw ValidationError(at + ": rating outside the declared scale");
        }
        for (const auto& [facet_id, values] : p.nominal_features) {
            const auto* f = c.find_facet(facet_id);
            if (f == nullptr) {
                throw ValidationError(at + ": unknown facet_id \"" + facet_id + "\"");
            }
            for (const auto& v : values) {
                if (f->criterion_class == CriterionClass::Nominal) {
                    if (std::find(f->values.begin(), f->values.end(), v) == f->values.end()) {
                        throw ValidationError(at + ": value \"" + v + "\" not declared for facet \"" +
                                              facet_id + "\"");
                    }
                } else if (f->criterion_class == CriterionClass::Geo) {
                    if (c.neighborhoods.count(v) == 0) {
                        throw ValidationError(at + ": unknown neighborhood \"" + v + "\"");
                    }
                } else {
                    throw ValidationError(at + ": facet \"" + facet_id +
                                          "\" cannot hold feature values");
                }
            }
        }
    }
}

inline Catalog catalog_from_json(const json& j) {
    const std::string where = "catalog";
    const auto format = detail::field<std::string>(j, "format", where);
    if (format != kCatalogFormat) {
        throw ParseError("catalog: unsupported format \"" + format + "\"");
    }
    Catalog c;
    for (const auto& f : detail::require(j, "schema", where)) {
        c.schema.push_back(facet_from_json(f, "schema"));
    }
    for (const auto& p : detail::require(j, "products", where)) {
        c.products.push_back(product_from_json(p, "products"));
    }
    const auto& hoods = detail::require(j, "neighborhoods", where);
    if (!hoods.is_object()) throw ParseError("catalog.neighborhoods: expected an object");
    for (const auto& [name, pt] : hoods.items()) {
        c.neighborhoods[name] = {detail::field<double>(pt, "lat", "neighborhoods." + name),
                                 detail::field<double>(pt, "lon", "neighborhoods." + name)};
    }
    validate_catalog(c);
    return c;
}

inline Catalog parse_catalog(const std::string& text) {
    return catalog_from_json(detail::parse_text(text, "catalog"));
}

inline Catalog load_catalog(const std::string& path) {
    return catalog_from_json(detail::read_json_file(path));
}

inline std::string dump_catalog(const Catalog& c) {
    return catalog_to_json(c).dump(2) + "\n";
}

inline void save_catalog(const Catalog& c, const std::string& path) {
    detail::write_file(path, dump_catalog(c));
}

// Content hash over the canonical serialization; identifies a catalog in
// session logs and the readiness endpoint.
inline std::string catalog_hash(const Catalog& c) {
    return "fnv1a64:" + detail::hex64(detail::fnv1a64(catalog_to_json(c).dump()));
}

} // namespace prefsearch
