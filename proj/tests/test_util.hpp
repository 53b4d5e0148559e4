#pragma once

#include "prefsearch.hpp"

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

namespace testutil {

inline std::string data_path(const std::string& rel) { return std::string(PREFSEARCH_DATA_DIR) + "/" + rel; }
inline std::string fixture_path(const std::string& rel) { return std::string(PREFSEARCH_FIXTURE_DIR) + "/" + rel; }

inline const prefsearch::Catalog& bundled() {
    static const prefsearch::Catalog c = prefsearch::load_catalog(data_path("hotels.json"));
    return c;
}

inline const prefsearch::Catalog& mini() {
    static const prefsearch::Catalog c = prefsearch::load_catalog(fixture_path("mini-catalog.json"));
    return c;
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("prefsearch-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline prefsearch::Criterion nominal(const std::string& id, const std::string& facet, const std::string& value,
                                     double w = prefsearch::kInitialWeight) {
    return {id, prefsearch::NominalTerm{facet, value}, w};
}

inline prefsearch::Criterion geo(const std::string& id, const std::string& name, double w = prefsearch::kInitialWeight) {
    return {id, prefsearch::GeoTerm{"neighborhood", name}, w};
}

inline prefsearch::Criterion price_range(const std::string& id, double lo, double hi,
                                         double w = prefsearch::kInitialWeight) {
    return {id, prefsearch::NumericRange{"price", lo, hi}, w};
}

// The weighted query from the Paul scenario: must-haves, the Tiergarten
// exclusion and optional weights bar/restaurant > invoice > fitness.
inline prefsearch::WeightedQuery paul_query() {
    prefsearch::WeightedQuery q;
    q.criteria = {price_range("price", 60, 120, 1.0),
                  nominal("breakfast", "meal", "breakfast", 1.0),
                  geo("tiergarten", "Tiergarten", 0.0),
                  geo("mitte", "Mitte", 0.8),
                  nominal("transport", "transport", "public transport", 0.8),
                  nominal("restaurant", "meal", "restaurant", 0.7),
                  nominal("bar", "entertainment", "bar", 0.7),
                  nominal("invoice", "payment", "invoice", 0.5),
                  nominal("fitness", "sport", "fitness center", 0.3)};
    return q;
}

} // namespace testutil
