#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace spectra {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ValueType { real, integer, boolean, text, real_list, complex_list, text_list };

struct KeySpec {
    std::string key;  // "section.name" or "name" for top-level keys
    ValueType type;
    std::optional<std::string> fallback;  // empty means required
    double lo = -1e300, hi = 1e300;       // inclusive bounds for numeric values
    std::string help;
    bool optional = false;                // absent stays absent (assertion thresholds)
};

extern const std::vector<std::string> kExperimentKinds;

// Keys accepted for one experiment kind (common keys included).
const std::vector<KeySpec>& schema_for(const std::string& kind);

class ExperimentConfig {
public:
    // Parses an INI-style file ([section] headers, key = value, '#' or ';' comments).
    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig from_map(const std::map<std::string, std::string>& kv);

    // Applies defaults, rejects unknown keys and checks every value against the schema.
    void validate();

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    const std::string& kind() const;
    std::uint64_t seed() const;

    double real(const std::string& key) const;
    long long integer(const std::string& key) const;
    bool boolean(const std::string& key) const;
    std::string text(const std::string& key) const;
    std::vector<double> real_list(const std::string& key) const;
    std::vector<std::complex<double>> complex_list(const std::string& key) const;
    std::vector<std::string> text_list(const std::string& key) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
    const std::string& raw(const std::string& key) const;
};

std::complex<double> parse_complex(const std::string& s);

}  // namespace spectra
