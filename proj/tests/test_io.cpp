#include <doctest/doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dropletfem/estimator.hpp"
#include "dropletfem/io.hpp"
#include "dropletfem/mesh.hpp"
#include "dropletfem/physics.hpp"
#include "dropletfem/timeloop.hpp"

using namespace dropletfem;

namespace {

// Message fragment check that reports the full message on failure.
void check_throws_with(const std::function<void()>& f, const std::string& fragment) {
    try {
        f();
        FAIL_CHECK("expected ConfigError containing '" << fragment << "', nothing thrown");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        INFO("message: " << what);
        CHECK(what.find(fragment) != std::string::npos);
    }
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

// RAII temp config file under the system temp directory.
struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& text) {
        path = std::filesystem::temp_directory_path() /
               ("dropletfem_io_test_" + std::to_string(::getpid()) + ".cfg");
        std::ofstream out(path);
        out << text;
    }
    ~TempFile() { std::filesystem::remove(path); }
};

std::string minimal_fluid_config() {
    return "gamma = 0.0642\n"
           "rho_d = 1222\n"
           "rho_c = 1.2\n"
           "mu_d = 0.109\n"
           "mu_c = 1.8e-5\n"
           "u_in = 5e-3\n"
           "u_c = 1.0\n"
           "h_in = 2.5e-3\n"
           "r_tube = 2.5e-2\n"
           "c_shear = 2.0\n"
           "g = 9.81\n"
           "dpdz_c = annular\n";
}

}  // namespace

TEST_CASE("config parser handles comments, blanks, and typed values") {
    ConfigFile cfg = ConfigFile::parse_text(
        "# leading comment\n"
        "\n"
        "  gamma = 0.0642   # trailing comment\n"
        "n_elements_init   =100\n"
        "parallel= true\n"
        "tip_model = pinned\n"
        "negative = -3.5e-2\n",
        "mem");

    CHECK(cfg.has("gamma"));
    CHECK(cfg.has("parallel"));
    CHECK_FALSE(cfg.has("missing"));

    CHECK(cfg.number("gamma") == 0.0642);
    CHECK(cfg.number("negative") == -3.5e-2);
    CHECK(cfg.integer("n_elements_init") == 100);
    CHECK(cfg.boolean("parallel"));
    CHECK(cfg.word("tip_model") == "pinned");
    CHECK_NOTHROW(cfg.reject_unknown());
}

TEST_CASE("config parser accepts 0/1 booleans and rejects everything else") {
    ConfigFile cfg = ConfigFile::parse_text("a = 1\nb = 0\nc = yes\n", "mem");
    CHECK(cfg.boolean("a"));
    CHECK_FALSE(cfg.boolean("b"));
    check_throws_with([&] { cfg.boolean("c"); }, "is not a boolean");
}

TEST_CASE("config parse errors carry file and line") {
    check_throws_with([] { ConfigFile::parse_text("gamma\n", "f.cfg"); },
                      "f.cfg:1: expected `key = value`");
    check_throws_with([] { ConfigFile::parse_text("ok = 1\n = 2\n", "f.cfg"); },
                      "f.cfg:2: empty key");
    check_throws_with([] { ConfigFile::parse_text("gamma = # gone\n", "f.cfg"); },
                      "f.cfg:1: empty value for key 'gamma'");
    check_throws_with(
        [] { ConfigFile::parse_text("gamma = 1\n\ngamma = 2\n", "f.cfg"); },
        "f.cfg:3: duplicate key 'gamma' (first at line 1)");
}

TEST_CASE("typed getter errors name the key, value, and location") {
    ConfigFile cfg = ConfigFile::parse_text("\n\nx = banana\ny = 1.5\n", "g.cfg");
    check_throws_with([&] { cfg.number("x"); }, "g.cfg:3: key 'x' is not a number: 'banana'");
    // 1.5 is a valid double but not an integer: strtoll must consume the
    // whole token.
    check_throws_with([&] { cfg.integer("y"); }, "g.cfg:4: key 'y' is not an integer: '1.5'");
    // partial numeric prefixes are rejected too
    ConfigFile cfg2 = ConfigFile::parse_text("z = 1.5abc\n", "g.cfg");
    check_throws_with([&] { cfg2.number("z"); }, "is not a number");
}

TEST_CASE("reject_unknown names the first unconsumed key by line") {
    ConfigFile cfg = ConfigFile::parse_text(
        "known = 1\n"
        "zzz_late = 2\n"
        "aaa_early = 3\n",
        "h.cfg");
    (void)cfg.number("known");
    // zzz_late sits on the lower line; alphabetical order must not matter.
    check_throws_with([&] { cfg.reject_unknown(); }, "h.cfg:2: unknown key 'zzz_late'");
}

TEST_CASE("parse_file reads from disk and rejects missing files") {
    TempFile tmp("gamma = 0.07\n");
    ConfigFile cfg = ConfigFile::parse_file(tmp.path.string());
    CHECK(cfg.number("gamma") == 0.07);

    check_throws_with([] { ConfigFile::parse_file("/nonexistent/droplet.cfg"); },
                      "cannot open config file");
}

TEST_CASE("apply_config without a preset requires every fluid key") {
    // complete config parses and computes nu_d and the annular gradient
    ConfigFile full = ConfigFile::parse_text(minimal_fluid_config(), "mem");
    RunSetup s = apply_config(full, std::nullopt);
    CHECK(s.fluids.gamma == 0.0642);
    CHECK(s.fluids.nu_d == 0.109 / 1222.0);
    CHECK(s.fluids.dpdz_c == annular_dpdz(1.8e-5, 1.0, 2.5e-3, 2.5e-2));

    // drop gamma -> the error names it
    std::string text = minimal_fluid_config();
    text.erase(0, text.find('\n') + 1);
    ConfigFile nogamma = ConfigFile::parse_text(text, "mem");
    check_throws_with([&] { apply_config(nogamma, std::nullopt); },
                      "missing required key 'gamma'");

    // dpdz_c accepts a literal number and rejects garbage
    std::string numeric = minimal_fluid_config();
    numeric.replace(numeric.find("dpdz_c = annular"), 16, "dpdz_c = -0.125");
    ConfigFile num = ConfigFile::parse_text(numeric, "mem");
    CHECK(apply_config(num, std::nullopt).fluids.dpdz_c == -0.125);

    std::string bad = minimal_fluid_config();
    bad.replace(bad.find("dpdz_c = annular"), 16, "dpdz_c = radial");
    ConfigFile badcfg = ConfigFile::parse_text(bad, "mem");
    check_throws_with([&] { apply_config(badcfg, std::nullopt); },
                      "key 'dpdz_c' must be a number or 'annular'");
}

TEST_CASE("apply_config over a preset overrides selectively") {
    ConfigFile cfg = ConfigFile::parse_text(
        "u_in = 7e-3\n"
        "t_max = 0.25\n"
        "amr_strategy = max\n"
        "lambda = 0.2\n",
        "mem");
    RunSetup s = apply_config(cfg, preset_glycerol85());
    CHECK(s.fluids.u_in == 7e-3);
    CHECK(s.fluids.gamma == 0.0642);  // untouched preset value
    CHECK(s.config.t_max == 0.25);
    CHECK(s.config.strategy == MarkingStrategy::max_threshold);
    CHECK(marking_parameter(s.config) == 0.2);

    // kinematic viscosity follows a density override even when nu_d is absent
    ConfigFile dense = ConfigFile::parse_text("rho_d = 1000\n", "mem");
    RunSetup sd = apply_config(dense, preset_glycerol85());
    CHECK(sd.fluids.nu_d == sd.fluids.mu_d / 1000.0);

    // unknown keys are rejected by name
    ConfigFile typo = ConfigFile::parse_text("viscosity = 0.1\n", "mem");
    check_throws_with([&] { apply_config(typo, preset_glycerol85()); },
                      "unknown key 'viscosity'");

    // enum-valued keys reject unrecognised words
    ConfigFile badscheme = ConfigFile::parse_text("time_scheme = rk4\n", "mem");
    check_throws_with([&] { apply_config(badscheme, preset_glycerol85()); },
                      "unknown time_scheme 'rk4'");
    ConfigFile badtip = ConfigFile::parse_text("tip_model = clamped\n", "mem");
    check_throws_with([&] { apply_config(badtip, preset_glycerol85()); },
                      "unknown tip_model 'clamped'");
    ConfigFile badacc = ConfigFile::parse_text("doerfler_accounting = mean\n", "mem");
    check_throws_with([&] { apply_config(badacc, preset_glycerol85()); },
                      "unknown doerfler_accounting 'mean'");
}

TEST_CASE("glycerol85 preset matches the study geometry") {
    const RunSetup s = preset_glycerol85();
    const FluidPair& fp = s.fluids;
    CHECK(fp.u_in == 5e-3);
    CHECK(fp.u_c == 1.0);
    CHECK(fp.h_in == 2.5e-3);
    CHECK(fp.r_tube / fp.h_in == 10.0);
    CHECK(fp.nu_d == fp.mu_d / fp.rho_d);
    CHECK(fp.dpdz_c == annular_dpdz(fp.mu_c, fp.u_c, fp.h_in, fp.r_tube));
    CHECK(s.config.t_max == 2.0);
    CHECK(s.config.n_elements_init == 100);
    CHECK(s.config.dt_max == 5e-4);
    CHECK_NOTHROW(validate(s.fluids));
    CHECK_NOTHROW(validate(s.config));
}

TEST_CASE("load_setup resolves preset, file, and flag layers") {
    // preset only
    RunSetup s = load_setup(std::nullopt, std::string("glycerol85"), std::nullopt, std::nullopt);
    CHECK(s.fluids.h_in == 2.5e-3);

    // file on top of the preset
    TempFile tmp("u_c = 0.5\nt_max = 0.1\n");
    RunSetup sf = load_setup(tmp.path.string(), std::string("glycerol85"), std::nullopt,
                             std::nullopt);
    CHECK(sf.fluids.u_c == 0.5);
    CHECK(sf.config.t_max == 0.1);

    // flags beat both layers; every strategy spelling is accepted
    for (const char* w : {"none", "max", "max_threshold", "doerfler"}) {
        RunSetup sw = load_setup(std::nullopt, std::string("glycerol85"), std::string(w),
                                 std::nullopt);
        if (std::string(w) == "none") CHECK(sw.config.strategy == MarkingStrategy::none);
        if (std::string(w) == "doerfler") CHECK(sw.config.strategy == MarkingStrategy::doerfler);
        if (std::string(w) == "max" || std::string(w) == "max_threshold")
            CHECK(sw.config.strategy == MarkingStrategy::max_threshold);
    }
    RunSetup sl = load_setup(std::nullopt, std::string("glycerol85"), std::string("max"), 0.3);
    CHECK(marking_parameter(sl.config) == 0.3);

    check_throws_with(
        [] { load_setup(std::nullopt, std::string("water"), std::nullopt, std::nullopt); },
        "unknown preset 'water'");
    check_throws_with(
        [] {
            load_setup(std::nullopt, std::string("glycerol85"), std::string("greedy"),
                       std::nullopt);
        },
        "--strategy: unknown strategy 'greedy'");
    check_throws_with(
        [] { load_setup(std::nullopt, std::nullopt, std::nullopt, std::nullopt); },
        "no configuration");

    // validation failures surface as ConfigError with the offending field
    TempFile bad("dt_min = -1\n");
    check_throws_with(
        [&] {
            load_setup(bad.path.string(), std::string("glycerol85"), std::nullopt, std::nullopt);
        },
        "dt_min");
}

TEST_CASE("format_effective_config round-trips bit-for-bit") {
    RunSetup base = preset_glycerol85();
    base.config.strategy = MarkingStrategy::doerfler;
    base.config.lambda = 0.85;

    const std::string text1 = format_effective_config(base);
    CHECK(split_lines(text1).front() == "# effective configuration, full precision");

    // the dump is itself a complete, standalone config (no preset needed)
    ConfigFile cfg = ConfigFile::parse_text(text1, "eff");
    RunSetup reloaded = apply_config(cfg, std::nullopt);
    CHECK_NOTHROW(validate(reloaded.fluids));
    CHECK_NOTHROW(validate(reloaded.config));

    const std::string text2 = format_effective_config(reloaded);
    CHECK(text1 == text2);

    // scalar fields survive exactly
    CHECK(reloaded.fluids.gamma == base.fluids.gamma);
    CHECK(reloaded.fluids.dpdz_c == base.fluids.dpdz_c);
    CHECK(reloaded.config.dt_max == base.config.dt_max);
    CHECK(reloaded.config.strategy == MarkingStrategy::doerfler);
    CHECK(marking_parameter(reloaded.config) == 0.85);
}

TEST_CASE("format_double prints shortest-exact decimal") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0) == "1");
    // %.17g guarantees the parse inverts exactly
    for (double x : {0.0642, 5e-4, 1.0 / 3.0, 2.5e-3, -9.81}) {
        const std::string s = format_double(x);
        CHECK(std::stod(s) == x);
    }
}

TEST_CASE("snapshot CSV carries nodal fields and per-element eta") {
    const FluidPair fp = preset_glycerol85().fluids;
    Mesh1D mesh = build_uniform(4, 1.0e-2);
    State st;
    st.u.assign(5, 2e-3);
    st.h = {2.5e-3, 2.4e-3, 2.2e-3, 1.9e-3, 1.5e-3};
    st.s = project_slope(st.h, mesh);
    st.length = mesh.length;
    st.time = 0.125;

    Snapshot snap;
    snap.step = 7;
    snap.state = st;
    snap.mesh = mesh;
    snap.error = estimate(st, mesh);

    std::ostringstream os;
    write_snapshot_csv(os, snap, fp);
    const std::vector<std::string> lines = split_lines(os.str());

    REQUIRE(lines.size() == 1 + 2 * mesh.n_elements());
    CHECK(lines[0] == "t,node,zeta,z,z_over_hin,u,h,h_over_hin,s,curvature,eta_K");

    const std::vector<double> k = nodal_curvature(st, mesh);
    for (std::size_t e = 0; e < mesh.n_elements(); ++e) {
        for (std::size_t side = 0; side < 2; ++side) {
            const std::vector<std::string> f = split_csv(lines[1 + 2 * e + side]);
            REQUIRE(f.size() == 11);
            const std::size_t i = e + side;
            CHECK(f[0] == format_double(0.125));
            CHECK(f[1] == std::to_string(i));
            CHECK(f[2] == format_double(mesh.ref_coords[i]));
            CHECK(f[3] == format_double(mesh.node_z(i)));
            CHECK(f[4] == format_double(mesh.node_z(i) / fp.h_in));
            CHECK(f[5] == format_double(st.u[i]));
            CHECK(f[6] == format_double(st.h[i]));
            CHECK(f[7] == format_double(st.h[i] / fp.h_in));
            CHECK(f[8] == format_double(st.s[i]));
            CHECK(f[9] == format_double(k[i]));
            // eta is an element quantity: both rows of element e repeat it
            CHECK(f[10] == format_double(snap.error.eta[e]));
        }
    }
}

TEST_CASE("run report is key = value with every summary field") {
    RunReport rep;
    rep.termination = Termination::pinch;
    rep.n_steps = 1234;
    rep.end_time = 0.51912;
    rep.pinch = PinchPoint{0.0145, 1.1e-4, 42};
    rep.pinch_time = 0.51912;
    rep.droplet_volume = 6.1e-8;
    rep.n_refinements = 5;
    rep.total_marked = 321;
    rep.eta_global_final = 3.2e-4;
    rep.max_volume_defect = 2.3e-4;
    rep.injected_volume_defect = 2.8e-5;
    rep.dt_changes.resize(3);
    rep.final_mesh = build_uniform(8, 0.02);
    rep.final_state.length = 0.02;

    std::ostringstream os;
    write_report(os, rep);
    const std::vector<std::string> lines = split_lines(os.str());

    REQUIRE(lines.size() == 14);
    CHECK(lines[0] == "termination = pinch");
    CHECK(lines[1] == "pinch_time_s = " + format_double(0.51912));
    CHECK(lines[2] == "pinch_z_m = " + format_double(0.0145));
    CHECK(lines[3] == "droplet_volume_m3 = " + format_double(6.1e-8));
    CHECK(lines[4] == "n_steps = 1234");
    CHECK(lines[5] == "n_refinements = 5");
    CHECK(lines[6] == "final_n_elements = 8");
    CHECK(lines[7] == "eta_global_final = " + format_double(3.2e-4));
    CHECK(lines[8] == "end_time_s = " + format_double(0.51912));
    CHECK(lines[9] == "final_length_m = " + format_double(0.02));
    CHECK(lines[10] == "total_marked = 321");
    CHECK(lines[11] == "max_volume_defect = " + format_double(2.3e-4));
    CHECK(lines[12] == "injected_volume_defect = " + format_double(2.8e-5));
    CHECK(lines[13] == "n_dt_changes = 3");
}

TEST_CASE("run report spells out the other termination causes") {
    RunReport rep;
    rep.final_mesh = build_uniform(4, 0.01);

    std::ostringstream os;
    rep.termination = Termination::t_max_reached;
    write_report(os, rep);
    CHECK(split_lines(os.str())[0] == "termination = t_max");
    // no pinch recorded: location is nan, not absent
    CHECK(split_lines(os.str())[2] == "pinch_z_m = nan");

    std::ostringstream os2;
    rep.termination = Termination::hard_failure;
    write_report(os2, rep);
    CHECK(split_lines(os2.str())[0] == "termination = hard_failure");
}
