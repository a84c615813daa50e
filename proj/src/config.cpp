#include "hyperion/config.hpp"

#include <algorithm>
#include <cmath>

#include "hyperion/errors.hpp"

namespace hyperion {

namespace {

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto dot = path.find('.', start);
        parts.push_back(path.substr(start, dot - start));
        if (dot == std::string::npos) {
            return parts;
        }
        start = dot + 1;
    }
}

}  // namespace

void require_field(bool ok, const std::string& path, const std::string& message) {
    if (!ok) {
        throw ConfigError(path + ": " + message);
    }
}

ConfigReader::ConfigReader(json input) : in_(std::move(input)) {
    if (!in_.is_object()) {
        throw ConfigError("config: expected a JSON object at the top level");
    }
}

const json* ConfigReader::find(const std::string& path) const {
    const json* node = &in_;
    for (const auto& part : split_path(path)) {
        if (!node->is_object()) {
            return nullptr;
        }
        const auto it = node->find(part);
        if (it == node->end()) {
            return nullptr;
        }
        node = &*it;
    }
    return node;
}

bool ConfigReader::has(const std::string& path) const { return find(path) != nullptr; }

json ConfigReader::require(const std::string& path, const std::optional<json>& fallback) {
    used_.insert(path);
    if (const json* node = find(path)) {
        return *node;
    }
    if (!fallback) {
        throw ConfigError(path + ": required field is missing");
    }
    return *fallback;
}

void ConfigReader::put(const std::string& path, json value) {
    json* node = &out_;
    const auto parts = split_path(path);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        node = &(*node)[parts[i]];
    }
    (*node)[parts.back()] = std::move(value);
}

double ConfigReader::number(const std::string& path, std::optional<double> fallback) {
    const json v = require(path, fallback ? std::optional<json>(*fallback) : std::nullopt);
    require_field(v.is_number(), path, "expected a number");
    const double x = v.get<double>();
    require_field(std::isfinite(x), path, "must be finite");
    put(path, x);
    return x;
}

std::uint64_t ConfigReader::integer(const std::string& path, std::optional<std::uint64_t> fallback) {
    const json v = require(path, fallback ? std::optional<json>(*fallback) : std::nullopt);
    require_field(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0),
                  path, "expected a non-negative integer");
    const auto x = v.get<std::uint64_t>();
    put(path, x);
    return x;
}

bool ConfigReader::boolean(const std::string& path, bool fallback) {
    const json v = require(path, json(fallback));
    require_field(v.is_boolean(), path, "expected true or false");
    put(path, v);
    return v.get<bool>();
}

std::string ConfigReader::text(const std::string& path, std::optional<std::string> fallback,
                               const std::vector<std::string>& allowed) {
    const json v = require(path, fallback ? std::optional<json>(*fallback) : std::nullopt);
    require_field(v.is_string(), path, "expected a string");
    auto s = v.get<std::string>();
    if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
        std::string list;
        for (const auto& a : allowed) {
            list += (list.empty() ? "" : ", ") + a;
        }
        throw ConfigError(path + ": '" + s + "' is not one of " + list);
    }
    put(path, s);
    return s;
}

std::vector<double> ConfigReader::numbers(const std::string& path,
                                          std::optional<std::vector<double>> fallback) {
    const json v = require(path, fallback ? std::optional<json>(json(*fallback)) : std::nullopt);
    require_field(v.is_array(), path, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        require_field(v[i].is_number(), path + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(v[i].get<double>());
    }
    put(path, out);
    return out;
}

json ConfigReader::array(const std::string& path, std::optional<json> fallback) {
    json v = require(path, fallback);
    require_field(v.is_array(), path, "expected an array");
    return v;
}

void ConfigReader::collect_unknown(const json& node, const std::string& prefix,
                                   std::vector<std::string>& unknown) const {
    for (auto it = node.begin(); it != node.end(); ++it) {
        const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
        if (used_.count(path)) {
            continue;
        }
        if (it->is_object()) {
            bool prefix_used = false;
            for (const auto& u : used_) {
                if (u.starts_with(path + ".")) {
                    prefix_used = true;
                    break;
                }
            }
            if (prefix_used) {
                collect_unknown(*it, path, unknown);
                continue;
            }
        }
        unknown.push_back(path);
    }
}

void ConfigReader::reject_unknown() const {
    std::vector<std::string> unknown;
    collect_unknown(in_, "", unknown);
    if (!unknown.empty()) {
        throw ConfigError(unknown.front() + ": unknown field");
    }
}

}  // namespace hyperion
