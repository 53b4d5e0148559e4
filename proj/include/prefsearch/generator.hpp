#pragma once
// Bundled hotel schema and a deterministic synthetic dataset generator.
//
// The generator builds the scenario-relevant hotels explicitly (a fixed
// number meeting every mandatory criterion, a fixed number of those at the
// top grade, none above it), fills up with hotels that each break at least
// one mandatory criterion, shuffles, and finally re-judges everything as a
// self-check.

#include "prefsearch/catalog.hpp"
#include "prefsearch/error.hpp"
#include "prefsearch/relevance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace prefsearch {

// Platform-independent helpers over mt19937_64; the standard distributions
// are implementation-defined and would break byte-identical output.
class DeterministicRng {
public:
    DeterministicRng(std::uint64_t seed, std::uint64_t stream)
        : engine_(seed * 0x9e3779b97f4a7c15ULL ^ (stream + 0x632be59bd9b4e019ULL)) {}

    std::uint64_t next() { return engine_(); }

    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    // Uniform integer in [0, n).
    std::size_t below(std::size_t n) {
        const std::uint64_t bound = n;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

    int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::size_t>(hi - lo + 1))); }

    bool chance(double p) { return unit() < p; }

    template <typename T>
    const T& pick(const std::vector<T>& items) {
        return items[below(items.size())];
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Bundled schema

inline std::map<std::string, GeoPoint> bundled_neighborhoods() {
    return {
        {"Charlottenburg", {52.5167, 13.3041}}, {"Friedrichshain", {52.5158, 13.4541}},
        {"Kreuzberg", {52.4986, 13.4030}},      {"Lichtenberg", {52.5167, 13.5000}},
        {"Mitte", {52.5200, 13.4050}},          {"Moabit", {52.5300, 13.3420}},
        {"Neukoelln", {52.4811, 13.4353}},      {"Prenzlauer Berg", {52.5388, 13.4244}},
        {"Schoeneberg", {52.4833, 13.3500}},    {"Tiergarten", {52.5145, 13.3501}},
        {"Wedding", {52.5500, 13.3667}},        {"Wilmersdorf", {52.4870, 13.3200}},
    };
}

// 18 categories: price, neighborhood, transport, room type, meal,
// entertainment, sport, payment type, rating, stars, plus eight generic
// amenity categories standing in for the ones not individually named.
inline std::vector<FacetDefinition> bundled_schema() {
    auto nominal = [](std::string id, std::string display, std::string category,
                      std::vector<std::string> values) {
        FacetDefinition f;
        f.facet_id = std::move(id);
        f.display_name = std::move(display);
        f.category = std::move(category);
        f.criterion_class = CriterionClass::Nominal;
        f.values = std::move(values);
        return f;
    };

    std::vector<FacetDefinition> schema;

    FacetDefinition price;
    price.facet_id = "price";
    price.display_name = "Price per night (EUR)";
    price.category = "price";
    price.criterion_class = CriterionClass::NumericRange;
    price.field = NumericField::Price;
    price.scoring = TriLinearConfig{};
    price.buckets = {{"under 60", 0.0, 59.99},
                     {"60-120", 60.0, 120.0},
                     {"120-200", 120.01, 200.0},
                     {"over 200", 200.01, 100000.0}};
    schema.push_back(price);

    FacetDefinition price_around;
    price_around.facet_id = "price_around";
    price_around.display_name = "Price around (EUR)";
    price_around.category = "price";
    price_around.criterion_class = CriterionClass::NumericPoint;
    price_around.field = NumericField::Price;
    price_around.scoring = GaussianConfig{15.0, 5.0, 3.0};
    schema.push_back(price_around);

    FacetDefinition hood;
    hood.facet_id = "neighborhood";
    hood.display_name = "Neighborhood";
    hood.category = "neighborhood";
    hood.criterion_class = CriterionClass::Geo;
    hood.scoring = GaussianConfig{1.0, 0.5, 3.0};  // kilometres
    schema.push_back(hood);

    schema.push_back(nominal("transport", "Transport", "transport",
                             {"public transport", "airport shuttle", "bike rental", "car rental"}));
    schema.push_back(nominal("room_type", "Room type", "room type",
                             {"single room", "double room", "twin room", "family room", "suite", "apartment"}));
    schema.push_back(nominal("meal", "Meals", "meal",
                             {"breakfast", "restaurant", "half board", "vegetarian options", "room service"}));
    schema.push_back(nominal("entertainment", "Entertainment", "entertainment",
                             {"bar", "lounge", "live music", "rooftop terrace", "games room"}));
    schema.push_back(nominal("sport", "Sport", "sport",
                             {"fitness center", "swimming pool", "sauna", "yoga classes", "tennis court"}));
    schema.push_back(nominal("payment", "Payment", "payment type", {"invoice", "credit card", "cash", "paypal"}));

    FacetDefinition rating;
    rating.facet_id = "rating";
    rating.display_name = "Customer rating";
    rating.category = "rating";
    rating.criterion_class = CriterionClass::NumericDirected;
    rating.field = NumericField::Rating;
    rating.scoring = LinearConfig{1.0, 10.0, Direction::HigherBetter};
    rating.buckets = {{"7+", 7.0, 10.0}, {"8+", 8.0, 10.0}, {"9+", 9.0, 10.0}};
    schema.push_back(rating);

    FacetDefinition stars;
    stars.facet_id = "stars";
    stars.display_name = "Hotel stars";
    stars.category = "stars";
    stars.criterion_class = CriterionClass::NumericDirected;
    stars.field = NumericField::Stars;
    stars.scoring = LinearConfig{1.0, 5.0, Direction::HigherBetter};
    stars.buckets = {{"1 star", 1, 1}, {"2 stars", 2, 2}, {"3 stars", 3, 3}, {"4 stars", 4, 4}, {"5 stars", 5, 5}};
    schema.push_back(stars);

    schema.push_back(nominal("wellness", "Wellness", "wellness", {"spa", "massage", "steam bath", "beauty salon"}));
    schema.push_back(nominal("parking", "Parking", "parking", {"garage", "outdoor parking", "ev charging"}));
    schema.push_back(nominal("internet", "Internet", "internet", {"free wifi", "wired internet", "high-speed wifi"}));
    schema.push_back(nominal("accessibility", "Accessibility", "accessibility",
                             {"wheelchair accessible", "elevator", "step-free access"}));
    schema.push_back(nominal("pets", "Pets", "pets", {"pets allowed", "pet bowls", "dog walking"}));
    schema.push_back(nominal("family", "Family", "family", {"cribs", "kids club", "babysitting", "family discounts"}));
    schema.push_back(nominal("business", "Business", "business",
                             {"meeting rooms", "business center", "printing service", "coworking space"}));
    schema.push_back(nominal("languages", "Languages spoken", "languages",
                             {"english", "german", "french", "spanish", "turkish"}));
    return schema;
}

struct DatasetConstraints {
    std::size_t total_products = 150;
    std::size_t relevant_products = 15;  // grade >= 1 under the scenario spec
    std::size_t top_grade_products = 5;  // grade == kTopGrade

    static constexpr int kTopGrade = 8;  // restaurant-or-bar + invoice, no fitness
};

namespace detail {

inline std::vector<std::string> draw_names(std::uint64_t seed, std::size_t count) {
    static const std::vector<std::string> kPrefixes = {
        "Hotel", "Pension", "Hostel", "Apartments", "Boutique Hotel", "Gasthaus", "Residenz", "Inn"};
    static const std::vector<std::string> kWords = {
        "Spree",  "Linden",  "Adler",  "Brandenburg", "Atrium", "Kastanie", "Sonnen", "Stern",  "Kiez",
        "Baeren", "Ufer",    "Mond",   "Park",        "Turm",   "Garten",   "Bernstein", "Kranich", "Falken",
        "Eichen", "Lilien",  "Rosen",  "Havel",       "Tor",    "Markt",    "Kaiser", "Moewe"};
    static const std::vector<std::string> kSuffixes = {"", " Berlin", " City", " Plaza", " Suites"};
    const std::size_t space = kPrefixes.size() * kWords.size() * kSuffixes.size();
    if (count > space) throw ConstraintViolation("not enough distinct hotel names");

    DeterministicRng rng(seed, 0x6e616d6573ULL);
    std::set<std::size_t> used;
    std::vector<std::string> names;
    names.reserve(count);
    while (names.size() < count) {
        const auto code = rng.below(space);
        if (!used.insert(code).second) continue;
        const auto& prefix = kPrefixes[code % kPrefixes.size()];
        const auto& word = kWords[(code / kPrefixes.size()) % kWords.size()];
        const auto& suffix = kSuffixes[code / (kPrefixes.size() * kWords.size())];
        names.push_back(prefix + " " + word + suffix);
    }
    return names;
}

enum class Role { Top, Relevant, PriceLow, PriceHigh, NoBreakfast, Tiergarten, BadLocation };

struct Bonuses {
    bool fitness = false;
    bool invoice = false;
    bool restaurant_or_bar = false;
};

class ProductBuilder {
public:
    ProductBuilder(DeterministicRng& rng, const std::vector<FacetDefinition>& schema,
                   const std::map<std::string, GeoPoint>& hoods)
        : rng_(rng), schema_(schema), hoods_(hoods) {
        for (const auto& [name, _] : hoods) hood_names_.push_back(name);
    }

    Product build(Role role, const Bonuses& bonuses) {
        Product p;
        p.stars = pick_stars();
        p.rating = std::round(rng_.uniform(5.0, 9.8) * 10.0) / 10.0;
        p.price = rng_.between(35, 260);
        for (const auto& f : schema_) {
            if (f.criterion_class != CriterionClass::Nominal) continue;
            auto& set = p.nominal_features[f.facet_id];
            for (const auto& v : f.values) {
                if (rng_.chance(0.3)) set.insert(v);
            }
        }
        auto& features = p.nominal_features;
        features["payment"].insert("credit card");
        features["languages"].insert("german");
        if (features["room_type"].empty()) features["room_type"].insert("double room");

        std::string hood = rng_.pick(hood_names_);

        switch (role) {
            case Role::Top:
            case Role::Relevant:
                p.price = rng_.between(62, 118);
                features["meal"].insert("breakfast");
                hood = rng_.chance(0.5) ? "Mitte" : other_hood();
                if (hood != "Mitte") features["transport"].insert("public transport");
                set_bonuses(p, bonuses, role == Role::Top);
                break;
            case Role::PriceLow:
                p.price = rng_.between(35, 59);
                break;
            case Role::PriceHigh:
                p.price = rng_.between(121, 260);
                break;
            case Role::NoBreakfast:
                features["meal"].erase("breakfast");
                break;
            case Role::Tiergarten:
                hood = "Tiergarten";
                break;
            case Role::BadLocation:
                hood = other_hood();
                features["transport"].erase("public transport");
                // At most one of restaurant/bar so these stay below the
                // top-graded hotels in a scenario-style weighted query.
                if (features["meal"].count("restaurant") && features["entertainment"].count("bar")) {
                    features["entertainment"].erase("bar");
                }
                break;
        }
        if (role == Role::Top) {
            // Mitte and transport for some, transport-only for the rest.
            hood = rng_.chance(0.6) ? "Mitte" : other_hood();
            features["transport"].insert("public transport");
        }

        features["neighborhood"] = {hood};
        p.location = jitter(hoods_.at(hood), hood == "Mitte" ? 0.6 : 1.2);
        for (auto it = features.begin(); it != features.end();) {
            it = it->second.empty() ? features.erase(it) : std::next(it);
        }
        p.text_blobs = describe(p, hood);
        return p;
    }

private:
    int pick_stars() {
        static const std::vector<int> kStars = {1, 2, 2, 3, 3, 3, 3, 4, 4, 4, 5};
        return rng_.pick(kStars);
    }

    std::string other_hood() {
        for (;;) {
            const auto& h = rng_.pick(hood_names_);
            if (h != "Mitte" && h != "Tiergarten") return h;
        }
    }

    void set_bonuses(Product& p, const Bonuses& b, bool both_venues) {
        auto& f = p.nominal_features;
        if (b.fitness) f["sport"].insert("fitness center"); else f["sport"].erase("fitness center");
        if (b.invoice) f["payment"].insert("invoice"); else f["payment"].erase("invoice");
        f["meal"].erase("restaurant");
        f["entertainment"].erase("bar");
        if (b.restaurant_or_bar) {
            if (both_venues) {
                f["meal"].insert("restaurant");
                f["entertainment"].insert("bar");
            } else if (rng_.chance(0.5)) {
                f["meal"].insert("restaurant");
            } else {
                f["entertainment"].insert("bar");
            }
        }
    }

    GeoPoint jitter(const GeoPoint& centre, double radius_km) {
        constexpr double kKmPerDegLat = 111.32;
        const double km_per_deg_lon = kKmPerDegLat * std::cos(centre.lat * 3.14159265358979323846 / 180.0);
        const double r = radius_km * std::sqrt(rng_.unit());
        const double theta = rng_.uniform(0.0, 2.0 * 3.14159265358979323846);
        auto round6 = [](double v) { return std::round(v * 1e6) / 1e6; };
        return {round6(centre.lat + r * std::sin(theta) / kKmPerDegLat),
                round6(centre.lon + r * std::cos(theta) / km_per_deg_lon)};
    }

    std::vector<std::string> describe(const Product& p, const std::string& hood) {
        static const std::vector<std::string> kAdjectives = {"Cozy", "Modern", "Historic", "Quiet", "Stylish",
                                                             "Family-run", "Spacious", "Charming"};
        static const std::vector<std::string> kPhrases = {
            "friendly staff",  "great location", "noisy street",       "clean and modern rooms",
            "cozy atmosphere", "excellent breakfast", "spacious rooms", "historic building",
            "view over the river", "quiet courtyard", "small bathrooms", "helpful reception",
            "close to the underground", "comfortable beds", "lovely garden"};
        std::string desc = rng_.pick(kAdjectives) + " " + std::to_string(p.stars) + "-star hotel in " + hood;
        std::vector<std::string> highlights;
        for (const auto& facet : {"meal", "entertainment", "sport", "wellness"}) {
            auto it = p.nominal_features.find(facet);
            if (it == p.nominal_features.end()) continue;
            for (const auto& v : it->second) highlights.push_back(v);
        }
        if (!highlights.empty()) {
            desc += " offering ";
            for (std::size_t i = 0; i < highlights.size(); ++i) {
                if (i > 0) desc += i + 1 == highlights.size() ? " and " : ", ";
                desc += highlights[i];
            }
        }
        desc += ".";
        std::string review = "Guests mention ";
        const auto first = rng_.pick(kPhrases);
        auto second = rng_.pick(kPhrases);
        if (second == first) second = "comfortable beds";
        review += first + " and " + second + ".";
        return {desc, review};
    }

    DeterministicRng& rng_;
    const std::vector<FacetDefinition>& schema_;
    const std::map<std::string, GeoPoint>& hoods_;
    std::vector<std::string> hood_names_;
};

inline std::string format_id(std::size_t n, std::size_t total) {
    std::size_t width = 3;
    for (std::size_t t = total; t >= 1000; t /= 10) ++width;
    std::string digits = std::to_string(n);
    return "h" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

} // namespace detail

// Checks the generated catalog against the scenario spec; throws
// ConstraintViolation on any mismatch.
inline void check_dataset_constraints(const Catalog& catalog, const DatasetConstraints& constraints) {
    const auto judgments = judge_all(catalog, paul_scenario_spec());
    const auto relevant = count_at_least(judgments, 1);
    const auto histogram = grade_histogram(judgments);
    const auto top = histogram.count(DatasetConstraints::kTopGrade) ? histogram.at(DatasetConstraints::kTopGrade) : 0;
    const auto above = count_at_least(judgments, DatasetConstraints::kTopGrade + 1);
    if (catalog.products.size() != constraints.total_products || relevant != constraints.relevant_products ||
        top != constraints.top_grade_products || above != 0) {
        throw ConstraintViolation("generated catalog fails self-check: products=" +
                                  std::to_string(catalog.products.size()) + " relevant=" + std::to_string(relevant) +
                                  " top=" + std::to_string(top) + " above_top=" + std::to_string(above));
    }
}

inline Catalog generate_dataset(std::uint64_t seed, const DatasetConstraints& constraints = {}) {
    if (constraints.top_grade_products > constraints.relevant_products ||
        constraints.relevant_products > constraints.total_products) {
        throw ValidationError("dataset constraints need top <= relevant <= total");
    }
    Catalog catalog;
    catalog.schema = bundled_schema();
    catalog.neighborhoods = bundled_neighborhoods();

    DeterministicRng rng(seed, 0x64617461ULL);
    detail::ProductBuilder builder(rng, catalog.schema, catalog.neighborhoods);

    std::vector<Product> products;
    for (std::size_t i = 0; i < constraints.top_grade_products; ++i) {
        products.push_back(builder.build(detail::Role::Top, {false, true, true}));
    }
    // Bonus subsets below the top grade: {}, F, I, R, F+I, F+R -> 1,3,4,5,6,7.
    static const std::vector<detail::Bonuses> kLowerMasks = {
        {false, false, false}, {true, false, false}, {false, true, false},
        {false, false, true},  {true, true, false},  {true, false, true}};
    const std::size_t others = constraints.relevant_products - constraints.top_grade_products;
    for (std::size_t i = 0; i < others; ++i) {
        products.push_back(builder.build(detail::Role::Relevant, kLowerMasks[i % kLowerMasks.size()]));
    }
    static const std::vector<detail::Role> kFillRoles = {detail::Role::PriceLow, detail::Role::PriceHigh,
                                                         detail::Role::NoBreakfast, detail::Role::Tiergarten,
                                                         detail::Role::BadLocation};
    const std::size_t fill = constraints.total_products - constraints.relevant_products;
    for (std::size_t i = 0; i < fill; ++i) {
        products.push_back(builder.build(kFillRoles[i % kFillRoles.size()], {}));
    }
    rng.shuffle(products);

    const auto names = detail::draw_names(seed, products.size());
    for (std::size_t i = 0; i < products.size(); ++i) {
        products[i].product_id = detail::format_id(i + 1, products.size());
        products[i].name = names[i];
    }
    catalog.products = std::move(products);

    validate_catalog(catalog);
    check_dataset_constraints(catalog, constraints);
    return catalog;
}

// Same catalog with freshly drawn product names; everything else, ids
// included, is unchanged.
inline Catalog clone_with_renames(const Catalog& catalog, std::uint64_t seed) {
    validate_catalog(catalog);
    Catalog out = catalog;
    const auto names = detail::draw_names(seed ^ 0x72656e616d65ULL, out.products.size());
    for (std::size_t i = 0; i < out.products.size(); ++i) out.products[i].name = names[i];
    return out;
}

} // namespace prefsearch
