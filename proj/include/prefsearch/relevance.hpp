#pragma once
// Graded relevance judgments: a product gets 0 unless it meets every
// mandatory predicate and no must-not predicate; otherwise 1 plus the points
// of each satisfied bonus predicate.

#include "prefsearch/catalog.hpp"
#include "prefsearch/error.hpp"
#include "prefsearch/json_util.hpp"

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace prefsearch {

inline constexpr const char* kRelevanceSpecFormat = "prefsearch-relevance/1";

struct Predicate {
    enum class Kind { Feature, Range, Any, All };

    Kind kind = Kind::Feature;
    std::string facet_id;
    std::string value;  // Feature: nominal value, neighborhood or bucket label
    double min = 0.0;   // Range, inclusive
    double max = 0.0;
    std::vector<Predicate> children;  // Any / All

    static Predicate feature(std::string facet, std::string value) {
        Predicate p;
        p.kind = Kind::Feature;
        p.facet_id = std::move(facet);
        p.value = std::move(value);
        return p;
    }
    static Predicate range(std::string facet, double lo, double hi) {
        Predicate p;
        p.kind = Kind::Range;
        p.facet_id = std::move(facet);
        p.min = lo;
        p.max = hi;
        return p;
    }
    static Predicate any(std::vector<Predicate> children) {
        Predicate p;
        p.kind = Kind::Any;
        p.children = std::move(children);
        return p;
    }
    static Predicate all(std::vector<Predicate> children) {
        Predicate p;
        p.kind = Kind::All;
        p.children = std::move(children);
        return p;
    }
    bool operator==(const Predicate&) const = default;
};

struct Bonus {
    std::string label;
    Predicate predicate;
    int points = 1;
    bool operator==(const Bonus&) const = default;
};

struct RelevanceSpec {
    std::string name;
    std::vector<Predicate> mandatory;
    std::vector<Predicate> must_not;
    std::vector<Bonus> bonuses;

    int max_grade() const {
        int total = 1;
        for (const auto& b : bonuses) total += b.points;
        return total;
    }
    bool operator==(const RelevanceSpec&) const = default;
};

using Judgments = std::map<ProductId, int>;

// ---------------------------------------------------------------------------
// JSON

inline json predicate_to_json(const Predicate& p) {
    switch (p.kind) {
        case Predicate::Kind::Feature: return {{"facet", p.facet_id}, {"value", p.value}};
        case Predicate::Kind::Range: return {{"facet", p.facet_id}, {"min", p.min}, {"max", p.max}};
        case Predicate::Kind::Any:
        case Predicate::Kind::All: {
            json list = json::array();
            for (const auto& c : p.children) list.push_back(predicate_to_json(c));
            return {{p.kind == Predicate::Kind::Any ? "any" : "all", std::move(list)}};
        }
    }
    return nullptr;
}

inline Predicate predicate_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    for (const char* key : {"any", "all"}) {
        if (j.contains(key)) {
            std::vector<Predicate> children;
            const auto& list = j.at(key);
            if (!list.is_array() || list.empty()) {
                throw ParseError(where + "." + key + ": expected a non-empty array");
            }
            for (std::size_t i = 0; i < list.size(); ++i) {
                children.push_back(predicate_from_json(list[i], where + "." + key + "[" + std::to_string(i) + "]"));
            }
            return std::string(key) == "any" ? Predicate::any(std::move(children))
                                             : Predicate::all(std::move(children));
        }
    }
    auto facet = detail::field<std::string>(j, "facet", where);
    if (j.contains("value")) return Predicate::feature(std::move(facet), detail::field<std::string>(j, "value", where));
    return Predicate::range(std::move(facet), detail::field<double>(j, "min", where),
                            detail::field<double>(j, "max", where));
}

inline json relevance_spec_to_json(const RelevanceSpec& spec) {
    json mandatory = json::array();
    for (const auto& p : spec.mandatory) mandatory.push_back(predicate_to_json(p));
    json must_not = json::array();
    for (const auto& p : spec.must_not) must_not.push_back(predicate_to_json(p));
    json bonuses = json::array();
    for (const auto& b : spec.bonuses) {
        bonuses.push_back({{"label", b.label}, {"points", b.points}, {"when", predicate_to_json(b.predicate)}});
    }
    return {{"format", kRelevanceSpecFormat},
            {"name", spec.name},
            {"mandatory", std::move(mandatory)},
            {"must_not", std::move(must_not)},
            {"bonuses", std::move(bonuses)}};
}

inline RelevanceSpec relevance_spec_from_json(const json& j) {
    const std::string where = "relevance spec";
    const auto format = detail::field<std::string>(j, "format", where);
    if (format != kRelevanceSpecFormat) throw ParseError(where + ": unsupported format \"" + format + "\"");
    RelevanceSpec spec;
    spec.name = detail::field_or<std::string>(j, "name", "", where);
    const auto list = [&](const char* key) {
        std::vector<Predicate> out;
        if (!j.contains(key)) return out;
        const auto& arr = j.at(key);
        if (!arr.is_array()) throw ParseError(where + "." + key + ": expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            out.push_back(predicate_from_json(arr[i], std::string(key) + "[" + std::to_string(i) + "]"));
        }
        return out;
    };
    spec.mandatory = list("mandatory");
    spec.must_not = list("must_not");
    if (j.contains("bonuses")) {
        for (const auto& b : j.at("bonuses")) {
            Bonus bonus;
            bonus.label = detail::field_or<std::string>(b, "label", "", "bonuses");
            bonus.points = detail::field<int>(b, "points", "bonuses");
            bonus.predicate = predicate_from_json(detail::require(b, "when", "bonuses"), "bonuses.when");
            if (bonus.points <= 0) throw ValidationError("bonus \"" + bonus.label + "\": points must be > 0");
            spec.bonuses.push_back(std::move(bonus));
        }
    }
    return spec;
}

inline RelevanceSpec load_relevance_spec(const std::string& path) {
    return relevance_spec_from_json(detail::read_json_file(path));
}

// ---------------------------------------------------------------------------
// Judging

inline void validate_predicate(const Predicate& p, const Catalog& catalog) {
    if (p.kind == Predicate::Kind::Any || p.kind == Predicate::Kind::All) {
        for (const auto& c : p.children) validate_predicate(c, catalog);
        return;
    }
    const auto* f = catalog.find_facet(p.facet_id);
    if (f == nullptr) throw ValidationError("predicate references unknown facet \"" + p.facet_id + "\"");
    if (p.kind == Predicate::Kind::Range && !f->is_numeric()) {
        throw ValidationError("range predicate on non-numeric facet \"" + p.facet_id + "\"");
    }
    if (p.kind == Predicate::Kind::Feature && f->is_numeric() && f->find_bucket(p.value) == nullptr) {
        throw ValidationError("unknown bucket \"" + p.value + "\" for facet \"" + p.facet_id + "\"");
    }
}

inline void validate_relevance_spec(const RelevanceSpec& spec, const Catalog& catalog) {
    for (const auto& p : spec.mandatory) validate_predicate(p, catalog);
    for (const auto& p : spec.must_not) validate_predicate(p, catalog);
    for (const auto& b : spec.bonuses) {
        if (b.points <= 0) throw ValidationError("bonus \"" + b.label + "\": points must be > 0");
        validate_predicate(b.predicate, catalog);
    }
}

inline bool holds(const Predicate& p, const Product& product, const Catalog& catalog) {
    switch (p.kind) {
        case Predicate::Kind::Any:
            for (const auto& c : p.children) {
                if (holds(c, product, catalog)) return true;
            }
            return false;
        case Predicate::Kind::All:
            for (const auto& c : p.children) {
                if (!holds(c, product, catalog)) return false;
            }
            return true;
        case Predicate::Kind::Range: {
            const auto* f = catalog.find_facet(p.facet_id);
            if (f == nullptr || !f->field) throw ValidationError("bad range predicate on \"" + p.facet_id + "\"");
            const double v = product.numeric(*f->field);
            return v >= p.min && v <= p.max;
        }
        case Predicate::Kind::Feature: {
            const auto* f = catalog.find_facet(p.facet_id);
            if (f == nullptr) throw ValidationError("predicate references unknown facet \"" + p.facet_id + "\"");
            if (f->is_numeric()) {
                const auto* b = f->find_bucket(p.value);
                return b != nullptr && b->contains(product.numeric(*f->field));
            }
            return product.has_feature(p.facet_id, p.value);
        }
    }
    return false;
}

inline bool meets_mandatory(const Product& product, const RelevanceSpec& spec, const Catalog& catalog) {
    for (const auto& p : spec.mandatory) {
        if (!holds(p, product, catalog)) return false;
    }
    for (const auto& p : spec.must_not) {
        if (holds(p, product, catalog)) return false;
    }
    return true;
}

inline int judge(const Product& product, const RelevanceSpec& spec, const Catalog& catalog) {
    if (!meets_mandatory(product, spec, catalog)) return 0;
    int grade = 1;
    for (const auto& b : spec.bonuses) {
        if (holds(b.predicate, product, catalog)) grade += b.points;
    }
    return grade;
}

inline Judgments judge_all(const Catalog& catalog, const RelevanceSpec& spec) {
    validate_relevance_spec(spec, catalog);
    Judgments out;
    for (const auto& p : catalog.products) out[p.product_id] = judge(p, spec, catalog);
    return out;
}

// Every grade the spec can produce: 0, and 1 plus each subset sum of the
// bonus points.
inline std::set<int> reachable_grades(const RelevanceSpec& spec) {
    std::set<int> out{0};
    const std::size_t n = spec.bonuses.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        int g = 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::size_t{1} << i)) g += spec.bonuses[i].points;
        }
        out.insert(g);
    }
    return out;
}

// grade -> number of products
inline std::map<int, std::size_t> grade_histogram(const Judgments& j) {
    std::map<int, std::size_t> h;
    for (const auto& [_, g] : j) ++h[g];
    return h;
}

inline std::size_t count_at_least(const Judgments& j, int threshold) {
    std::size_t n = 0;
    for (const auto& [_, g] : j) n += g >= threshold ? 1 : 0;
    return n;
}

// The conference-trip scenario used throughout the bundled data: price
// 60-120 EUR, breakfast, Mitte or public transport, never Tiergarten;
// restaurant or bar +4, invoice +3, fitness +2.
inline RelevanceSpec paul_scenario_spec() {
    RelevanceSpec spec;
    spec.name = "paul-scenario";
    spec.mandatory = {
        Predicate::range("price", 60.0, 120.0),
        Predicate::feature("meal", "breakfast"),
        Predicate::any({Predicate::feature("neighborhood", "Mitte"),
                        Predicate::feature("transport", "public transport")}),
    };
    spec.must_not = {Predicate::feature("neighborhood", "Tiergarten")};
    spec.bonuses = {
        {"fitness center", Predicate::feature("sport", "fitness center"), 2},
        {"invoice", Predicate::feature("payment", "invoice"), 3},
        {"restaurant or bar",
         Predicate::any({Predicate::feature("meal", "restaurant"), Predicate::feature("entertainment", "bar")}),
         4},
    };
    return spec;
}

} // namespace prefsearch
