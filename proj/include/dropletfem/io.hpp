#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "dropletfem/properties.hpp"
#include "dropletfem/timeloop.hpp"

namespace dropletfem {

/// Config parse or validation failure; the message carries file:line where
/// one is known.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat `key = value` text with `#` comments. Typed getters consume keys so
/// that leftovers can be rejected by name and line.
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_text(const std::string& text, const std::string& name);

    bool has(const std::string& key) const;
    double number(const std::string& key);
    long long integer(const std::string& key);
    bool boolean(const std::string& key);
    std::string word(const std::string& key);

    /// Throws ConfigError naming the first (lowest-line) unconsumed key.
    void reject_unknown() const;

private:
    struct Entry {
        std::string value;
        int line = 0;
        bool consumed = false;
    };
    std::string location(const std::string& key) const;
    std::string name_;
    std::map<std::string, Entry> entries_;
};

struct RunSetup {
    FluidPair fluids{};
    RunConfig config{};
};

/// Packaged 85%-glycerol-in-air scenario. Flow values follow the study
/// geometry (u_in = 5 mm/s, u_c = 1 m/s, h_in = 2.5 mm, r_tube = 25 mm);
/// material constants are standard-table approximations and meant to be
/// overridden from a config file when better data exists.
RunSetup preset_glycerol85();

/// Applies config-file entries on top of a setup. Without a preset every
/// FluidPair key is required; RunConfig keys always default. Unknown keys,
/// malformed values, and validation failures all throw ConfigError.
RunSetup apply_config(ConfigFile& cfg, std::optional<RunSetup> base);

/// preset -> config file -> flag overrides, then validation.
RunSetup load_setup(const std::optional<std::string>& config_path,
                    const std::optional<std::string>& preset,
                    const std::optional<std::string>& strategy_flag,
                    std::optional<double> lambda_flag);

/// Every key with full precision (%.17g); reloading reproduces the setup
/// bit-for-bit.
std::string format_effective_config(const RunSetup& setup);

std::string format_double(double x);  ///< %.17g

void write_snapshot_csv(std::ostream& os, const Snapshot& snap, const FluidPair& fp);
void write_report(std::ostream& os, const RunReport& rep);

}  // namespace dropletfem
