#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace hyperion {

using json = nlohmann::json;

/// Reads a JSON config by dotted path, fills defaults, and builds the
/// normalized copy that goes into the run manifest. Type errors and unknown
/// keys are reported as ConfigError with the field path.
class ConfigReader {
public:
    explicit ConfigReader(json input);

    double number(const std::string& path, std::optional<double> fallback = std::nullopt);
    std::uint64_t integer(const std::string& path, std::optional<std::uint64_t> fallback = std::nullopt);
    bool boolean(const std::string& path, bool fallback);
    std::string text(const std::string& path, std::optional<std::string> fallback = std::nullopt,
                     const std::vector<std::string>& allowed = {});
    std::vector<double> numbers(const std::string& path,
                                std::optional<std::vector<double>> fallback = std::nullopt);
    bool has(const std::string& path) const;

    /// Raw array of objects; each element is read through its own reader and
    /// the normalized elements are stored back with `put`.
    json array(const std::string& path, std::optional<json> fallback = std::nullopt);
    void put(const std::string& path, json value);

    /// Throws ConfigError naming the first key that was never read.
    void reject_unknown() const;

    const json& normalized() const noexcept { return out_; }

private:
    const json* find(const std::string& path) const;
    json require(const std::string& path, const std::optional<json>& fallback);
    void collect_unknown(const json& node, const std::string& prefix,
                         std::vector<std::string>& unknown) const;

    json in_;
    json out_ = json::object();
    std::set<std::string> used_;
};

/// Throws ConfigError("<path>: <message>") if `ok` is false.
void require_field(bool ok, const std::string& path, const std::string& message);

}  // namespace hyperion
