#include "dropletfem/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>
#include <vector>

#include "dropletfem/physics.hpp"

namespace dropletfem {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& name) {
    ConfigFile cfg;
    cfg.name_ = name;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string stripped = trim(raw);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ConfigError(name + ":" + std::to_string(line) + ": expected `key = value`");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            throw ConfigError(name + ":" + std::to_string(line) + ": empty key");
        if (value.empty())
            throw ConfigError(name + ":" + std::to_string(line) + ": empty value for key '" +
                              key + "'");
        const auto [it, inserted] = cfg.entries_.emplace(key, Entry{value, line, false});
        if (!inserted)
            throw ConfigError(name + ":" + std::to_string(line) + ": duplicate key '" + key +
                              "' (first at line " + std::to_string(it->second.line) + ")");
    }
    return cfg;
}

std::string ConfigFile::location(const std::string& key) const {
    const auto it = entries_.find(key);
    return name_ + ":" + (it == entries_.end() ? "?" : std::to_string(it->second.line));
}

bool ConfigFile::has(const std::string& key) const { return entries_.count(key) != 0; }

double ConfigFile::number(const std::string& key) {
    auto& e = entries_.at(key);
    e.consumed = true;
    const char* begin = e.value.c_str();
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ConfigError(location(key) + ": key '" + key + "' is not a number: '" + e.value +
                          "'");
    return x;
}

long long ConfigFile::integer(const std::string& key) {
    auto& e = entries_.at(key);
    e.consumed = true;
    const char* begin = e.value.c_str();
    char* end = nullptr;
    const long long x = std::strtoll(begin, &end, 10);
    if (end == begin || *end != '\0')
        throw ConfigError(location(key) + ": key '" + key + "' is not an integer: '" + e.value +
                          "'");
    return x;
}

bool ConfigFile::boolean(const std::string& key) {
    auto& e = entries_.at(key);
    e.consumed = true;
    if (e.value == "true" || e.value == "1") return true;
    if (e.value == "false" || e.value == "0") return false;
    throw ConfigError(location(key) + ": key '" + key + "' is not a boolean: '" + e.value + "'");
}

std::string ConfigFile::word(const std::string& key) {
    auto& e = entries_.at(key);
    e.consumed = true;
    return e.value;
}

void ConfigFile::reject_unknown() const {
    const Entry* worst = nullptr;
    std::string worst_key;
    for (const auto& [key, e] : entries_) {
        if (e.consumed) continue;
        if (!worst || e.line < worst->line) {
            worst = &e;
            worst_key = key;
        }
    }
    if (worst)
        throw ConfigError(name_ + ":" + std::to_string(worst->line) + ": unknown key '" +
                          worst_key + "'");
}

RunSetup preset_glycerol85() {
    RunSetup s;
    FluidPair& fp = s.fluids;
    fp.gamma = 0.0642;   // N/m, 85% glycerol against air (approximation)
    fp.rho_d = 1222.0;   // kg/m^3 (approximation)
    fp.rho_c = 1.2;      // air
    fp.mu_d = 0.109;     // Pa s (approximation)
    fp.mu_c = 1.8e-5;    // air
    fp.nu_d = fp.mu_d / fp.rho_d;
    fp.u_in = 5e-3;
    fp.u_c = 1.0;
    fp.h_in = 2.5e-3;
    fp.r_tube = 2.5e-2;
    fp.c_shear = 2.0;
    fp.dpdz_c = annular_dpdz(fp.mu_c, fp.u_c, fp.h_in, fp.r_tube);
    fp.g = 9.81;

    RunConfig& cfg = s.config;
    cfg.t_max = 2.0;
    cfg.n_elements_init = 100;
    cfg.dt_max = 5e-4;  // resolves the pinch approach; pinch-time shifts < 0.5% vs 2.5e-4
    return s;
}

namespace {

MarkingStrategy parse_strategy(const std::string& word, const std::string& where) {
    if (word == "none") return MarkingStrategy::none;
    if (word == "max" || word == "max_threshold") return MarkingStrategy::max_threshold;
    if (word == "doerfler") return MarkingStrategy::doerfler;
    throw ConfigError(where + ": unknown strategy '" + word +
                      "' (expected none, max, or doerfler)");
}

const char* strategy_word(MarkingStrategy s) {
    switch (s) {
        case MarkingStrategy::none: return "none";
        case MarkingStrategy::max_threshold: return "max";
        case MarkingStrategy::doerfler: return "doerfler";
    }
    return "none";
}

}  // namespace

RunSetup apply_config(ConfigFile& cfg, std::optional<RunSetup> base) {
    RunSetup s = base ? std::move(*base) : RunSetup{};
    FluidPair& fp = s.fluids;
    const bool seeded = base.has_value();

    const auto fluid = [&](const char* key, double& field) {
        if (cfg.has(key))
            field = cfg.number(key);
        else if (!seeded)
            throw ConfigError("config: missing required key '" + std::string(key) + "'");
    };
    fluid("gamma", fp.gamma);
    fluid("rho_d", fp.rho_d);
    fluid("rho_c", fp.rho_c);
    fluid("mu_d", fp.mu_d);
    fluid("mu_c", fp.mu_c);
    fluid("u_in", fp.u_in);
    fluid("u_c", fp.u_c);
    fluid("h_in", fp.h_in);
    fluid("r_tube", fp.r_tube);
    fluid("c_shear", fp.c_shear);
    fluid("g", fp.g);
    if (cfg.has("nu_d"))
        fp.nu_d = cfg.number("nu_d");
    else if (!seeded || cfg.has("mu_d") || cfg.has("rho_d"))
        fp.nu_d = fp.mu_d / fp.rho_d;
    if (cfg.has("dpdz_c")) {
        if (cfg.word("dpdz_c") == "annular")
            fp.dpdz_c = annular_dpdz(fp.mu_c, fp.u_c, fp.h_in, fp.r_tube);
        else {
            // re-read as a number; word() already consumed the key
            const std::string raw = cfg.word("dpdz_c");
            char* end = nullptr;
            fp.dpdz_c = std::strtod(raw.c_str(), &end);
            if (end == raw.c_str() || *end != '\0')
                throw ConfigError("config: key 'dpdz_c' must be a number or 'annular'");
        }
    } else if (!seeded) {
        throw ConfigError("config: missing required key 'dpdz_c'");
    }

    RunConfig& rc = s.config;
    if (cfg.has("dt_init")) rc.dt_init = cfg.number("dt_init");
    if (cfg.has("dt_min")) rc.dt_min = cfg.number("dt_min");
    if (cfg.has("dt_max")) rc.dt_max = cfg.number("dt_max");
    if (cfg.has("t_max")) rc.t_max = cfg.number("t_max");
    if (cfg.has("time_scheme")) {
        const std::string w = cfg.word("time_scheme");
        if (w == "backward_euler" || w == "be")
            rc.scheme = TimeScheme::backward_euler;
        else if (w == "bdf2")
            rc.scheme = TimeScheme::bdf2;
        else
            throw ConfigError("config: unknown time_scheme '" + w + "'");
    }
    if (cfg.has("newton_tol")) rc.newton_tol = cfg.number("newton_tol");
    if (cfg.has("newton_max_iters"))
        rc.newton_max_iters = static_cast<int>(cfg.integer("newton_max_iters"));
    if (cfg.has("n_elements_init"))
        rc.n_elements_init = static_cast<std::size_t>(cfg.integer("n_elements_init"));
    if (cfg.has("initial_length")) rc.initial_length = cfg.number("initial_length");
    if (cfg.has("quad_order")) rc.quad_order = static_cast<int>(cfg.integer("quad_order"));
    if (cfg.has("tip_model")) {
        const std::string w = cfg.word("tip_model");
        if (w == "pinned")
            rc.tip_model = TipModel::pinned;
        else if (w == "free")
            rc.tip_model = TipModel::free_tip;
        else
            throw ConfigError("config: unknown tip_model '" + w + "'");
    }
    if (cfg.has("eps_tip_frac")) rc.eps_tip_frac = cfg.number("eps_tip_frac");
    if (cfg.has("include_bulk_pressure_term"))
        rc.include_bulk_pressure_term = cfg.boolean("include_bulk_pressure_term");
    if (cfg.has("parallel")) rc.parallel = cfg.boolean("parallel");
    if (cfg.has("amr_strategy"))
        rc.strategy = parse_strategy(cfg.word("amr_strategy"), "config");
    if (cfg.has("lambda")) rc.lambda = cfg.number("lambda");
    if (cfg.has("doerfler_accounting")) {
        const std::string w = cfg.word("doerfler_accounting");
        if (w == "sum")
            rc.accounting = DoerflerAccounting::sum;
        else if (w == "sum_of_squares")
            rc.accounting = DoerflerAccounting::sum_of_squares;
        else
            throw ConfigError("config: unknown doerfler_accounting '" + w + "'");
    }
    if (cfg.has("refine_trigger_n"))
        rc.refine_trigger_n = static_cast<int>(cfg.integer("refine_trigger_n"));
    if (cfg.has("safety_min_h_frac")) rc.safety_min_h_frac = cfg.number("safety_min_h_frac");
    if (cfg.has("max_generation"))
        rc.max_generation = static_cast<int>(cfg.integer("max_generation"));
    if (cfg.has("pinch_threshold_frac"))
        rc.pinch_threshold_frac = cfg.number("pinch_threshold_frac");
    if (cfg.has("tip_exclusion_frac")) rc.tip_exclusion_frac = cfg.number("tip_exclusion_frac");
    if (cfg.has("output_every")) rc.output_every = static_cast<int>(cfg.integer("output_every"));
    if (cfg.has("snapshot_dt")) rc.snapshot_dt = cfg.number("snapshot_dt");

    cfg.reject_unknown();
    return s;
}

RunSetup load_setup(const std::optional<std::string>& config_path,
                    const std::optional<std::string>& preset,
                    const std::optional<std::string>& strategy_flag,
                    std::optional<double> lambda_flag) {
    std::optional<RunSetup> base;
    if (preset) {
        if (*preset != "glycerol85")
            throw ConfigError("unknown preset '" + *preset + "' (expected glycerol85)");
        base = preset_glycerol85();
    }

    RunSetup s;
    if (config_path) {
        ConfigFile cfg = ConfigFile::parse_file(*config_path);
        s = apply_config(cfg, std::move(base));
    } else if (base) {
        s = std::move(*base);
    } else {
        throw ConfigError("no configuration: pass --config and/or --seed-preset");
    }

    if (strategy_flag) s.config.strategy = parse_strategy(*strategy_flag, "--strategy");
    if (lambda_flag) s.config.lambda = *lambda_flag;

    try {
        validate(s.fluids);
        validate(s.config);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return s;
}

std::string format_effective_config(const RunSetup& s) {
    std::ostringstream os;
    const FluidPair& fp = s.fluids;
    const RunConfig& rc = s.config;
    const auto kv = [&](const char* key, const std::string& value) {
        os << key << " = " << value << "\n";
    };
    const auto kd = [&](const char* key, double v) { kv(key, format_double(v)); };

    os << "# effective configuration, full precision\n";
    kd("gamma", fp.gamma);
    kd("rho_d", fp.rho_d);
    kd("rho_c", fp.rho_c);
    kd("mu_d", fp.mu_d);
    kd("mu_c", fp.mu_c);
    kd("nu_d", fp.nu_d);
    kd("u_in", fp.u_in);
    kd("u_c", fp.u_c);
    kd("h_in", fp.h_in);
    kd("r_tube", fp.r_tube);
    kd("c_shear", fp.c_shear);
    kd("dpdz_c", fp.dpdz_c);
    kd("g", fp.g);
    kd("dt_init", rc.dt_init);
    kd("dt_min", rc.dt_min);
    kd("dt_max", rc.dt_max);
    kd("t_max", rc.t_max);
    kv("time_scheme", rc.scheme == TimeScheme::bdf2 ? "bdf2" : "backward_euler");
    kd("newton_tol", rc.newton_tol);
    kv("newton_max_iters", std::to_string(rc.newton_max_iters));
    kv("n_elements_init", std::to_string(rc.n_elements_init));
    kd("initial_length", rc.initial_length);
    kv("quad_order", std::to_string(rc.quad_order));
    kv("tip_model", rc.tip_model == TipModel::pinned ? "pinned" : "free");
    kd("eps_tip_frac", rc.eps_tip_frac);
    kv("include_bulk_pressure_term", rc.include_bulk_pressure_term ? "true" : "false");
    kv("parallel", rc.parallel ? "true" : "false");
    kv("amr_strategy", strategy_word(rc.strategy));
    kd("lambda", marking_parameter(rc));
    kv("doerfler_accounting",
       rc.accounting == DoerflerAccounting::sum ? "sum" : "sum_of_squares");
    kv("refine_trigger_n", std::to_string(rc.refine_trigger_n));
    kd("safety_min_h_frac", rc.safety_min_h_frac);
    kv("max_generation", std::to_string(rc.max_generation));
    kd("pinch_threshold_frac", rc.pinch_threshold_frac);
    kd("tip_exclusion_frac", rc.tip_exclusion_frac);
    kv("output_every", std::to_string(rc.output_every));
    kd("snapshot_dt", rc.snapshot_dt);
    return os.str();
}

void write_snapshot_csv(std::ostream& os, const Snapshot& snap, const FluidPair& fp) {
    os << "t,node,zeta,z,z_over_hin,u,h,h_over_hin,s,curvature,eta_K\n";
    const std::vector<double> k = nodal_curvature(snap.state, snap.mesh);
    const std::string t = format_double(snap.state.time);
    for (std::size_t e = 0; e < snap.mesh.n_elements(); ++e) {
        for (std::size_t i = e; i <= e + 1; ++i) {
            const double z = snap.mesh.node_z(i);
            os << t << ',' << i << ',' << format_double(snap.mesh.ref_coords[i]) << ','
               << format_double(z) << ',' << format_double(z / fp.h_in) << ','
               << format_double(snap.state.u[i]) << ',' << format_double(snap.state.h[i]) << ','
               << format_double(snap.state.h[i] / fp.h_in) << ','
               << format_double(snap.state.s[i]) << ',' << format_double(k[i]) << ','
               << format_double(snap.error.eta[e]) << '\n';
        }
    }
}

void write_report(std::ostream& os, const RunReport& rep) {
    const auto kv = [&](const char* key, const std::string& value) {
        os << key << " = " << value << "\n";
    };
    const char* term = "t_max";
    if (rep.termination == Termination::pinch) term = "pinch";
    if (rep.termination == Termination::hard_failure) term = "hard_failure";
    kv("termination", term);
    kv("pinch_time_s", format_double(rep.pinch_time));
    kv("pinch_z_m", format_double(rep.pinch ? rep.pinch->z
                                            : std::numeric_limits<double>::quiet_NaN()));
    kv("droplet_volume_m3", format_double(rep.droplet_volume));
    kv("n_steps", std::to_string(rep.n_steps));
    kv("n_refinements", std::to_string(rep.n_refinements));
    kv("final_n_elements", std::to_string(rep.final_mesh.n_elements()));
    kv("eta_global_final", format_double(rep.eta_global_final));
    kv("end_time_s", format_double(rep.end_time));
    kv("final_length_m", format_double(rep.final_state.length));
    kv("total_marked", std::to_string(rep.total_marked));
    kv("max_volume_defect", format_double(rep.max_volume_defect));
    kv("injected_volume_defect", format_double(rep.injected_volume_defect));
    kv("n_dt_changes", std::to_string(rep.dt_changes.size()));
}

}  // namespace dropletfem
