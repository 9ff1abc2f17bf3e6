#ifndef BWSHRINK_CONFIG_HPP
#define BWSHRINK_CONFIG_HPP

#include "bwshrink/contraction.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bwshrink {

/// Full lab configuration: the experiment plus probe settings.
struct LabConfig {
    ExperimentConfig experiment;
    std::int64_t probe_samples = 20000;

    friend bool operator==(const LabConfig&, const LabConfig&) = default;
};

/// Diagnostics collected while parsing; what() lists one per line.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> diagnostics);
    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

/// Parses the flat `key = value` format. `[section]` headers are optional;
/// when present a key must belong to the open section. '#' starts a comment.
/// Unknown keys, malformed values, duplicates and range violations are
/// reported with their line numbers. `overrides` are extra `key=value`
/// entries applied after the text.
LabConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});

/// Every key with its resolved value, grouped by section; parse_config of
/// the result reproduces the configuration.
std::string emit_config(const LabConfig& cfg);

struct ConfigEntry {
    std::string section;
    std::string key;
    std::string value;
};

/// The resolved configuration as (section, key, value) triples in emit order.
std::vector<ConfigEntry> config_entries(const LabConfig& cfg);

/// Parses "2^8..2^18" or a comma/space separated integer list.
std::vector<std::int64_t> parse_n_grid(std::string_view text);

} // namespace bwshrink

#endif // BWSHRINK_CONFIG_HPP
