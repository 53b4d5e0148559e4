#pragma once

#include "prefsearch/error.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>

namespace prefsearch {

using json = nlohmann::json;

namespace detail {

inline const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) {
        throw ParseError(where + ": expected an object");
    }
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ParseError(where + ": missing field \"" + key + "\"");
    }
    return *it;
}

template <typename T>
T get_as(const json& value, const std::string& where) {
    try {
        return value.get<T>();
    } catch (const json::exception& e) {
        throw ParseError(where + ": " + e.what());
    }
}

template <typename T>
T field(const json& obj, const char* key, const std::string& where) {
    return get_as<T>(require(obj, key, where), where + "." + key);
}

template <typename T>
T field_or(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.is_object()) {
        throw ParseError(where + ": expected an object");
    }
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        return fallback;
    }
    return get_as<T>(*it, where + "." + key);
}

inline json parse_text(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(where + ": " + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write file: " + path);
    }
    out << content;
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

inline json read_json_file(const std::string& path) {
    return parse_text(read_file(path), path);
}

// 64-bit FNV-1a, used for content hashes of catalogs and configs.
inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

} // namespace detail
} // namespace prefsearch
