#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lpflow/bony.hpp"
#include "lpflow/chemin_lerner.hpp"
#include "lpflow/elliptic.hpp"
#include "lpflow/errors.hpp"
#include "lpflow/fft.hpp"
#include "lpflow/field.hpp"
#include "lpflow/grid.hpp"
#include "lpflow/harness.hpp"
#include "lpflow/io.hpp"
#include "lpflow/littlewood_paley.hpp"
#include "lpflow/ns.hpp"
#include "lpflow/operators.hpp"
#include "lpflow/transport.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lpflow;

namespace {

[[noreturn]] void bad_config(const std::string& msg) { throw ParameterError("config: " + msg); }

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream is(path);
    if (!is) throw IoError("io: cannot open " + path);
    try {
        return json::parse(is);
    } catch (const json::exception& e) {
        throw IoError("io: malformed JSON in " + path + ": " + std::string(e.what()));
    }
}

/// Apply one `key=value` override; dots in the key descend into objects and
/// the value is parsed as JSON when possible, else taken as a string.
void apply_override(json& cfg, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
        bad_config("override must look like key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string text = kv.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::exception&) {
        value = text;
    }
    json* node = &cfg;
    std::size_t pos = 0;
    while (true) {
        const auto dot = key.find('.', pos);
        const std::string part =
            key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (part.empty()) bad_config("empty key segment in override '" + kv + "'");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            return;
        }
        node = &(*node)[part];
        pos = dot + 1;
    }
}

double num_or(const json& j, const std::string& key, double def) {
    if (!j.is_object() || !j.contains(key)) return def;
    const json& v = j.at(key);
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "infinity") return infinity;
    }
    bad_config("expected a number for '" + key + "'");
}

int int_or(const json& j, const std::string& key, int def) {
    if (!j.is_object() || !j.contains(key)) return def;
    const json& v = j.at(key);
    if (v.is_number_integer()) return v.get<int>();
    bad_config("expected an integer for '" + key + "'");
}

bool bool_or(const json& j, const std::string& key, bool def) {
    if (!j.is_object() || !j.contains(key)) return def;
    const json& v = j.at(key);
    if (v.is_boolean()) return v.get<bool>();
    bad_config("expected true/false for '" + key + "'");
}

std::string str_or(const json& j, const std::string& key, const std::string& def) {
    if (!j.is_object() || !j.contains(key)) return def;
    const json& v = j.at(key);
    if (v.is_string()) return v.get<std::string>();
    bad_config("expected a string for '" + key + "'");
}

TorusGrid parse_grid(const json& cfg) {
    const int n = int_or(cfg, "resolution", 64);
    const int dim = int_or(cfg, "dim", 2);
    const double period = num_or(cfg, "period", two_pi);
    if (dim == 2) return TorusGrid::square(n, period);
    if (dim == 3) return TorusGrid::cube(n, period);
    bad_config("dim must be 2 or 3");
}

std::uint64_t mix(std::uint64_t& s) {
    s += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Band-limited random field: iid node values pushed through a Gaussian
/// spectral taper of width k0, rescaled to sup amplitude amp.
SpectralField random_taper(const TorusGrid& g, int comps, std::uint64_t seed, double k0,
                           double amp) {
    RealField noise(g, comps);
    std::uint64_t state = seed;
    for (int c = 0; c < comps; ++c)
        for (std::int64_t idx = 0; idx < g.points(); ++idx)
            noise.data()(idx, c) = 2.0 * (static_cast<double>(mix(state) >> 11) * 0x1.0p-53) - 1.0;
    SpectralField u = radial_multiplier(
        transform(noise), [k0](double k) { return std::exp(-0.5 * k * k / (k0 * k0)); });
    const double m = inverse_transform(u).data().abs().maxCoeff();
    if (m > 0.0 && amp > 0.0) u *= amp / m;
    return u;
}

/// Named initial-data families. `spec` is either a family name or an object
/// with a "family" key plus per-family options; unknown names are rejected
/// before any solve runs.
SpectralField make_field(const json& spec, const TorusGrid& g, int comps, std::uint64_t seed,
                         const std::string& what) {
    json opts = json::object();
    std::string family;
    if (spec.is_string()) {
        family = spec.get<std::string>();
    } else if (spec.is_object()) {
        opts = spec;
        family = str_or(opts, "family", "zero");
    } else if (spec.is_null()) {
        family = "zero";
    } else {
        bad_config(what + ": field spec must be a family name or an object");
    }

    const std::uint64_t fam_seed =
        opts.contains("seed") ? static_cast<std::uint64_t>(int_or(opts, "seed", 0)) : seed;
    const double amp = num_or(opts, "amplitude", 1.0);

    std::optional<SpectralField> u;
    if (family == "zero") {
        u.emplace(g, comps);
    } else if (family == "constant") {
        SpectralField f(g, comps);
        for (int c = 0; c < comps; ++c) f.comp(c)(0) = amp;
        u = std::move(f);
    } else if (family == "taylor-green") {
        if (comps != g.dim()) bad_config(what + ": taylor-green is a velocity family");
        RealField f(g, comps);
        for (std::int64_t idx = 0; idx < g.points(); ++idx) {
            const auto i = g.unflatten(idx);
            const double x = g.node(0, i[0]), y = g.node(1, i[1]);
            const double cz = g.dim() == 3 ? std::cos(g.node(2, i[2])) : 1.0;
            f.data()(idx, 0) = amp * std::sin(x) * std::cos(y) * cz;
            f.data()(idx, 1) = -amp * std::cos(x) * std::sin(y) * cz;
        }
        u = transform(f);
    } else if (family == "shear") {
        if (comps != g.dim()) bad_config(what + ": shear is a velocity family");
        RealField f(g, comps);
        for (std::int64_t idx = 0; idx < g.points(); ++idx)
            f.data()(idx, 1) = amp * std::cos(g.node(0, g.unflatten(idx)[0]));
        u = transform(f);
    } else if (family == "random") {
        u = random_taper(g, comps, fam_seed, num_or(opts, "taper", 3.0), amp);
    } else if (family == "sample") {
        SampleSpec ss;
        ss.dim = g.dim();
        ss.resolution = g.size(0);
        ss.components = comps;
        ss.s = num_or(opts, "s", 1.0);
        ss.p = num_or(opts, "p", 2.0);
        ss.r = num_or(opts, "r", 2.0);
        ss.amplitude = amp;
        ss.first_block = int_or(opts, "first-block", -1);
        ss.last_block = int_or(opts, "last-block", SampleSpec::auto_block);
        ss.seed = fam_seed;
        u = generate_sample(ss, g);
    } else if (family == "file") {
        const std::string stem = str_or(opts, "stem", "");
        if (stem.empty()) bad_config(what + ": file family needs a 'stem'");
        RealField f = read_field(stem);
        if (f.grid() != g) bad_config(what + ": stored field grid does not match the run grid");
        if (f.components() != comps)
            bad_config(what + ": stored field has " + std::to_string(f.components()) +
                       " components, expected " + std::to_string(comps));
        u = transform(f);
    } else {
        bad_config(what + ": unknown field family '" + family + "'");
    }

    if (bool_or(opts, "project", false)) {
        if (comps != g.dim()) bad_config(what + ": 'project' applies to velocity fields");
        *u = leray_project(*u);
        for (int c = 0; c < comps; ++c) u->comp(c)(0) = 0.0;
    }
    const double offset = num_or(opts, "offset", 0.0);
    if (offset != 0.0)
        for (int c = 0; c < comps; ++c) u->comp(c)(0) += offset;
    return std::move(*u);
}

/// Field spec for cfg[key]: per-family defaults overlaid with the user's
/// object (user keys win); a bare string selects a family by name.
json field_spec(const json& cfg, const std::string& key, json defaults) {
    if (!cfg.is_object() || !cfg.contains(key)) return defaults;
    const json& user = cfg.at(key);
    if (user.is_string()) return json{{"family", user.get<std::string>()}};
    if (!user.is_object()) bad_config(key + ": field spec must be a family name or an object");
    defaults.update(user);
    return defaults;
}

/// Collects artifact names so the manifest can list everything written.
struct RunDir {
    fs::path dir;
    std::vector<std::string> artifacts;

    explicit RunDir(const fs::path& d) : dir(d) {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("io: cannot create run directory " + dir.string());
    }
    fs::path path(const std::string& name) {
        artifacts.push_back(name);
        return dir / name;
    }
};

/// Plots are best-effort artifacts: a run whose series has nothing
/// drawable (all zeros on a log axis, say) should still succeed.
template <typename... Args>
void plot_or_skip(RunDir& out, const std::string& name, Args&&... args) {
    try {
        write_svg_plot(out.path(name), std::forward<Args>(args)...);
    } catch (const IoError&) {
        out.artifacts.pop_back();
    }
}

void write_manifest(RunDir& out, const std::string& command, std::uint64_t seed,
                    const json& cfg) {
    json m;
    m["format"] = "lpflow-run";
    m["version"] = 1;
    m["command"] = command;
    m["seed"] = seed;
    m["config"] = cfg;
    m["artifacts"] = out.artifacts;
    std::ofstream os(out.dir / "manifest.json");
    if (!os) throw IoError("io: cannot write manifest in " + out.dir.string());
    os << m.dump(2) << '\n';
}

/// A (quantity, value) table printed to stdout and mirrored to a CSV.
struct SummaryTable {
    std::vector<std::pair<std::string, double>> rows;
    void add(const std::string& k, double v) { rows.emplace_back(k, v); }
    void emit(RunDir& out, const std::string& csv_name) const {
        std::cout << "quantity,value\n";
        for (const auto& [k, v] : rows) std::cout << k << ',' << format_full(v) << '\n';
        std::ofstream os(out.path(csv_name));
        os << "quantity,value\n";
        for (const auto& [k, v] : rows) os << k << ',' << format_full(v) << '\n';
    }
};

SolverConfig parse_solver_config(const json& cfg) {
    SolverConfig sc;
    sc.mu = num_or(cfg, "mu", sc.mu);
    sc.dt = num_or(cfg, "dt", sc.dt);
    sc.t_final = num_or(cfg, "t-final", sc.t_final);
    sc.p1 = num_or(cfg, "p1", sc.p1);
    sc.p2 = num_or(cfg, "p2", sc.p2);
    sc.r = num_or(cfg, "r", sc.r);
    sc.eps = num_or(cfg, "eps", sc.eps);
    sc.c_small = num_or(cfg, "c-small", sc.c_small);
    sc.eta = num_or(cfg, "eta", sc.eta);
    if (cfg.contains("m-override")) sc.m_override = int_or(cfg, "m-override", 0);
    sc.pi_tilde_constant = num_or(cfg, "pi-tilde-constant", sc.pi_tilde_constant);
    sc.big_c = num_or(cfg, "big-c", sc.big_c);
    sc.smoothing_index = int_or(cfg, "smoothing-index", sc.smoothing_index);
    sc.dealias_fraction = num_or(cfg, "dealias-fraction", sc.dealias_fraction);
    sc.cfl_limit = num_or(cfg, "cfl-limit", sc.cfl_limit);
    sc.divergence_tol = num_or(cfg, "divergence-tol", sc.divergence_tol);
    sc.elliptic_tol = num_or(cfg, "elliptic-tol", sc.elliptic_tol);
    sc.elliptic_max_iter = int_or(cfg, "elliptic-max-iter", sc.elliptic_max_iter);
    const std::string split = str_or(cfg, "splitting", "lie");
    if (split == "lie") sc.splitting = SolverConfig::Splitting::lie;
    else if (split == "strang") sc.splitting = SolverConfig::Splitting::strang;
    else bad_config("splitting must be 'lie' or 'strang'");
    const std::string breach = str_or(cfg, "on-breach", "warn");
    if (breach == "warn") sc.on_breach = SolverConfig::BreachPolicy::warn;
    else if (breach == "halt") sc.on_breach = SolverConfig::BreachPolicy::halt;
    else bad_config("on-breach must be 'warn' or 'halt'");
    sc.monitor_every = int_or(cfg, "monitor-every", sc.monitor_every);
    sc.pressure_split_diagnostics =
        bool_or(cfg, "pressure-split-diagnostics", sc.pressure_split_diagnostics);
    sc.snapshot_every = int_or(cfg, "snapshot-every", sc.snapshot_every);
    return sc;
}

ForceFn parse_forcing(const json& cfg, const TorusGrid& g, std::uint64_t seed) {
    const json spec = field_spec(cfg, "forcing", json{{"family", "zero"}});
    if (str_or(spec, "family", "zero") == "zero") return {};
    SpectralField base = make_field(spec, g, g.dim(), seed ^ 0xF0F0ULL, "forcing");
    const double omega = num_or(spec, "omega", 0.0);
    return [base = std::move(base), omega](double t) {
        return omega == 0.0 ? base : std::cos(omega * t) * base;
    };
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

// ---------------------------------------------------------------- commands

int cmd_norm(const json& cfg, std::uint64_t seed, RunDir& out) {
    const TorusGrid g = parse_grid(cfg);
    const DyadicDecomposition dec(g);
    const int comps = int_or(cfg, "components", 1);
    const double s = num_or(cfg, "s", 1.0);
    const double p = num_or(cfg, "p", 2.0);
    const double r = num_or(cfg, "r", 2.0);
    const SpectralField u =
        make_field(field_spec(cfg, "field", json{{"family", "sample"}}), g, comps, seed, "field");
    const RealField ureal = inverse_transform(u);

    SummaryTable table;
    table.add("l2", l2_norm(u));
    table.add("lp[" + format_full(p) + "]", lp_norm(ureal, p));
    table.add("linf", lp_norm(ureal, infinity));
    table.add("besov[" + format_full(s) + "," + format_full(p) + "," + format_full(r) + "]",
              dec.besov_norm(u, s, p, r));
    table.emit(out, "norms.csv");

    const Eigen::ArrayXd blocks = dec.block_norms(u, p);
    {
        std::ofstream os(out.path("blocks.csv"));
        os << "block,lp_norm\n";
        for (int l = dec.lmin(); l <= dec.lmax(); ++l)
            os << l << ',' << format_full(blocks(l + 1)) << '\n';
    }
    PlotSeries series{"block L^p norm", {}, {}};
    for (int l = dec.lmin(); l <= dec.lmax(); ++l) {
        series.x.push_back(l);
        series.y.push_back(blocks(l + 1));
    }
    plot_or_skip(out, "blocks.svg", "Dyadic block norms", "block", "L^p norm",
                 std::vector<PlotSeries>{series}, false, true);
    return 0;
}

int cmd_decompose(const json& cfg, std::uint64_t seed, RunDir& out) {
    const TorusGrid g = parse_grid(cfg);
    const DyadicDecomposition dec(g);
    const int comps = int_or(cfg, "components", 1);
    const double p = num_or(cfg, "p", 2.0);
    const FieldStorage storage =
        str_or(cfg, "storage", "binary") == "csv" ? FieldStorage::csv : FieldStorage::binary;
    const SpectralField u =
        make_field(field_spec(cfg, "field", json{{"family", "sample"}}), g, comps, seed, "field");

    const Eigen::ArrayXd blocks = dec.block_norms(u, p);
    std::cout << "block,lp_norm\n";
    {
        std::ofstream os(out.path("blocks.csv"));
        os << "block,lp_norm\n";
        for (int l = dec.lmin(); l <= dec.lmax(); ++l) {
            os << l << ',' << format_full(blocks(l + 1)) << '\n';
            std::cout << l << ',' << format_full(blocks(l + 1)) << '\n';
        }
    }
    for (int l = dec.lmin(); l <= dec.lmax(); ++l)
        write_field(out.path("block_" + std::to_string(l)), dec.block(u, l), storage);
    write_field(out.path("field"), u, storage);
    return 0;
}

int cmd_solve_elliptic(const json& cfg, std::uint64_t seed, RunDir& out) {
    const TorusGrid g = parse_grid(cfg);
    const DyadicDecomposition dec(g);
    const SpectralField a =
        make_field(field_spec(cfg, "a", json{{"family", "random"}, {"amplitude", 0.05}}), g, 1,
                   seed ^ 0xAULL, "a");
    const SpectralField F =
        make_field(field_spec(cfg, "f", json{{"family", "random"}}), g, g.dim(), seed ^ 0xFULL, "f");
    const CoefficientField coef(dec, a, num_or(cfg, "p1", 2.0));
    const PressureSolution sol =
        solve_pressure(coef, F, num_or(cfg, "tol", 1e-10), int_or(cfg, "max-iter", 500));

    SummaryTable table;
    table.add("iterations", sol.iterations);
    table.add("residual", sol.residual);
    table.add("b_lower", coef.b_lower());
    table.add("cutoff_m", coef.cutoff_index());
    table.emit(out, "solve.csv");

    write_solver_log_csv(out.path("solver_log.csv"), sol.log);
    write_field(out.path("grad_pi"), sol.grad_pi);
    PlotSeries series{"residual", {}, {}};
    for (const EllipticLogRow& row : sol.log) {
        series.x.push_back(row.iter);
        series.y.push_back(row.residual);
    }
    plot_or_skip(out, "residual.svg", "Fixed-point residual", "iteration", "residual",
                 std::vector<PlotSeries>{series}, false, true);
    return 0;
}

int cmd_solve_transport(const json& cfg, std::uint64_t seed, RunDir& out) {
    const TorusGrid g = parse_grid(cfg);
    const DyadicDecomposition dec(g);

    TransportConfig tcfg;
    tcfg.dt = num_or(cfg, "dt", tcfg.dt);
    tcfg.t_final = num_or(cfg, "t-final", tcfg.t_final);
    tcfg.cfl_limit = num_or(cfg, "cfl-limit", tcfg.cfl_limit);
    tcfg.dealias_fraction = num_or(cfg, "dealias-fraction", tcfg.dealias_fraction);
    tcfg.record_every = int_or(cfg, "record-every", tcfg.record_every);
    tcfg.divergence_tol = num_or(cfg, "divergence-tol", tcfg.divergence_tol);
    tcfg.p = num_or(cfg, "p", tcfg.p);
    const double p1 = num_or(cfg, "p1", infinity);
    tcfg.p1_list = {p1};
    const double alpha = num_or(cfg, "alpha", 1.0);
    const double s = num_or(cfg, "s", 1.0);
    const double r = num_or(cfg, "r", infinity);

    const SpectralField a0 =
        make_field(field_spec(cfg, "initial", json{{"family", "sample"}}), g, 1, seed, "initial");
    const json vspec =
        field_spec(cfg, "velocity", json{{"family", "taylor-green"}, {"amplitude", 1.0}});
    const SpectralField vbase = make_field(vspec, g, g.dim(), seed ^ 0x5EULL, "velocity");
    const double omega = vspec.is_object() ? num_or(vspec, "omega", 0.0) : 0.0;
    const VelocityFn v = [&vbase, omega](double t) {
        return omega == 0.0 ? vbase : std::cos(omega * t) * vbase;
    };

    const TransportTrajectory traj = advect(dec, a0, v, {}, tcfg);

    {
        std::ofstream os(out.path("transport.csv"));
        const std::string btag = "besov_b" + format_full(s) + "_" + format_full(r);
        os << "t,mass,l2,min,max," << btag << ",vprime\n";
        for (int i = 0; i < traj.samples(); ++i)
            os << format_full(traj.time(i)) << ',' << format_full(traj.mass(i)) << ','
               << format_full(traj.l2(i)) << ',' << format_full(traj.min_value(i)) << ','
               << format_full(traj.max_value(i)) << ','
               << format_full(traj.scalar().besov_at(i, s, r)) << ','
               << format_full(traj.v_prime_at(i, p1, alpha)) << '\n';
    }
    write_field(out.path("a_final"), traj.final_state());

    PlotSeries l2s{"L^2", traj.times(), {}}, bs{"Besov", traj.times(), {}};
    for (int i = 0; i < traj.samples(); ++i) {
        l2s.y.push_back(traj.l2(i));
        bs.y.push_back(traj.scalar().besov_at(i, s, r));
    }
    plot_or_skip(out, "norms.svg", "Transported norms", "t", "norm",
                 std::vector<PlotSeries>{l2s, bs});

    SummaryTable table;
    table.add("samples", traj.samples());
    table.add("mass_drift", std::abs(traj.mass(traj.samples() - 1) - traj.mass(0)));
    const double l2_0 = traj.l2(0);
    table.add("l2_drift_rel",
              l2_0 > 0 ? std::abs(traj.l2(traj.samples() - 1) - l2_0) / l2_0 : 0.0);
    table.add("v_integral", traj.v_integral(p1, alpha));
    table.emit(out, "solve.csv");
    return 0;
}

int cmd_solve_ns(const json& cfg, std::uint64_t seed, RunDir& out) {
    const TorusGrid g = parse_grid(cfg);
    const DyadicDecomposition dec(g);
    const SolverConfig scfg = parse_solver_config(cfg);

    const SpectralField a0 =
        make_field(field_spec(cfg, "a0", json{{"family", "random"}, {"amplitude", 0.05}}), g, 1,
                   seed ^ 0x0AULL, "a0");
    const SpectralField u0 =
        make_field(field_spec(cfg, "u0", json{{"family", "taylor-green"}, {"amplitude", 0.5}}), g,
                   g.dim(), seed ^ 0x50ULL, "u0");
    const ForceFn f = parse_forcing(cfg, g, seed);

    const RunResult res = run(dec, a0, u0, f, scfg);

    write_energy_csv(out.path("energy.csv"), res.energy);
    if (res.monitor) {
        std::vector<std::pair<double, double>> indices;
        if (cfg.contains("besov-indices")) {
            for (const json& pair : cfg.at("besov-indices")) {
                if (!pair.is_array() || pair.size() != 2)
                    bad_config("besov-indices entries must be [s, r] pairs");
                indices.emplace_back(pair[0].get<double>(), pair[1].get<double>());
            }
        }
        write_monitors_csv(out.path("monitors.csv"), res, indices);

        std::vector<PlotSeries> margin_series;
        std::vector<double> times;
        for (int i = 0; i < res.monitor->samples(); ++i) times.push_back(res.monitor->time(i));
        if (!res.hypothesis_history.empty()) {
            for (std::size_t h = 0; h < res.hypothesis_history.front().size(); ++h) {
                PlotSeries ser{res.hypothesis_history.front()[h].name, times, {}};
                for (const auto& row : res.hypothesis_history) ser.y.push_back(row[h].margin());
                margin_series.push_back(std::move(ser));
            }
            plot_or_skip(out, "margins.svg", "Hypothesis margins", "t", "margin", margin_series);
        }
    }

    PlotSeries kin{"kinetic", {}, {}}, resid{"residual", {}, {}};
    for (const EnergySample& e : res.energy) {
        kin.x.push_back(e.t);
        kin.y.push_back(e.kinetic);
        resid.x.push_back(e.t);
        resid.y.push_back(std::abs(e.residual));
    }
    plot_or_skip(out, "energy.svg", "Energy ledger", "t", "kinetic energy",
                 std::vector<PlotSeries>{kin});

    write_field(out.path("a_final"), res.state.a);
    write_field(out.path("u_final"), res.state.u);
    if (!res.snapshots.empty()) {
        write_trajectory(out.dir / "trajectory", res.snapshots, scfg.dt);
        out.artifacts.push_back("trajectory");
    }

    SummaryTable table;
    table.add("steps", static_cast<double>(res.steps));
    table.add("terminal_kinetic", res.energy.back().kinetic);
    table.add("terminal_energy_residual", res.energy.back().residual);
    if (res.monitor) {
        for (const HypothesisStatus& h : res.monitor->hypotheses())
            table.add("margin_" + h.name, h.margin());
        table.add("cutoff_m", res.monitor->cutoff_m());
    }
    table.emit(out, "solve.csv");

    if (res.halted_on_breach) {
        std::string name = "hypothesis";
        if (!res.hypothesis_history.empty())
            for (const HypothesisStatus& h : res.hypothesis_history.back())
                if (!h.holds()) {
                    name = h.name;
                    break;
                }
        std::cerr << "numerical abort: bootstrap hypothesis " << name << " breached at t="
                  << format_full(res.halt_time)
                  << "; suggested cutoff m=" << res.monitor->suggested_m() << "\n";
        return 3;
    }
    return 0;
}

int cmd_verify(const json& cfg, std::uint64_t seed, RunDir& out) {
    SuiteConfig sc;
    if (cfg.contains("laws")) sc.laws = cfg.at("laws").get<std::vector<std::string>>();
    if (sc.laws.empty()) sc.laws = registered_laws();
    sc.samples = int_or(cfg, "samples", sc.samples);
    if (cfg.contains("resolutions")) sc.resolutions = cfg.at("resolutions").get<std::vector<int>>();
    sc.dim = int_or(cfg, "dim", sc.dim);
    sc.seed = seed;
    sc.stability_ceiling = num_or(cfg, "stability-ceiling", sc.stability_ceiling);
    sc.degenerate_quota = num_or(cfg, "degenerate-quota", sc.degenerate_quota);
    if (cfg.contains("params"))
        for (const auto& [key, value] : cfg.at("params").items())
            sc.params[key] = value.get<double>();

    const SuiteResult result = run_suite(sc);

    write_reports_csv(out.path("reports.csv"), result.reports);
    write_suite_summary(out.path("summary.json"), result);

    std::vector<PlotSeries> ratio_series;
    for (const LawSummary& sum : result.summaries) {
        PlotSeries ser{sum.law, {}, {}};
        int k = 0;
        for (const InequalityReport& rep : result.reports)
            if (rep.law_id.rfind(sum.law, 0) == 0) {
                ser.x.push_back(k++);
                ser.y.push_back(rep.ratio());
            }
        if (!ser.x.empty()) ratio_series.push_back(std::move(ser));
    }
    if (!ratio_series.empty())
        plot_or_skip(out, "ratios.svg", "Observed ratios", "sample", "lhs/rhs", ratio_series,
                     false, true);

    for (const LawSummary& sum : result.summaries) {
        double c_emp = 0.0;
        for (double c : sum.c_emp) c_emp = std::max(c_emp, c);
        std::cout << sum.law << ": C_emp=" << format_full(c_emp)
                  << " stability=" << format_full(sum.stability) << " samples=" << sum.samples
                  << " degenerate=" << sum.degenerate << " " << sum.verdict() << "\n";
    }
    std::cout << "suite: " << (result.passed ? "PASS" : "FAIL") << "\n";
    return result.passed ? 0 : 1;
}

int cmd_stability(const json& cfg, std::uint64_t seed, RunDir& out) {
    const TorusGrid g = parse_grid(cfg);
    const DyadicDecomposition dec(g);
    json base = cfg;
    if (!base.contains("t-final")) base["t-final"] = 0.25;
    const SolverConfig scfg = parse_solver_config(base);

    const SpectralField a0 =
        make_field(field_spec(cfg, "a0", json{{"family", "random"}, {"amplitude", 0.05}}), g, 1,
                   seed ^ 0x0AULL, "a0");
    const SpectralField u0 =
        make_field(field_spec(cfg, "u0", json{{"family", "taylor-green"}, {"amplitude", 0.5}}), g,
                   g.dim(), seed ^ 0x50ULL, "u0");
    const SpectralField da_unit =
        make_field(field_spec(cfg, "da", json{{"family", "random"}}), g, 1, seed ^ 0xDAULL, "da");
    const SpectralField du_unit =
        make_field(field_spec(cfg, "du", json{{"family", "random"}, {"project", true}}), g,
                   g.dim(), seed ^ 0xD0ULL, "du");

    std::vector<double> deltas = {1e-2, 1e-3, 1e-4};
    if (cfg.contains("deltas")) deltas = cfg.at("deltas").get<std::vector<double>>();
    if (deltas.empty()) bad_config("deltas must be non-empty");

    std::vector<double> log_d, log_t;
    std::ofstream os(out.path("stability.csv"));
    os << "delta,initial,terminal,peak,amplification\n";
    PlotSeries series{"terminal size", {}, {}};
    for (double delta : deltas) {
        const StabilityReport rep =
            stability_experiment(dec, a0, u0, delta * da_unit, delta * du_unit, {}, scfg);
        os << format_full(delta) << ',' << format_full(rep.initial_size) << ','
           << format_full(rep.terminal_size) << ',' << format_full(rep.peak_size) << ','
           << format_full(rep.amplification()) << '\n';
        series.x.push_back(delta);
        series.y.push_back(rep.terminal_size);
        if (rep.terminal_size > 0.0) {
            log_d.push_back(std::log(delta));
            log_t.push_back(std::log(rep.terminal_size));
        }
    }
    os.close();
    plot_or_skip(out, "loglog.svg", "Terminal perturbation vs initial size", "delta",
                 "terminal size", std::vector<PlotSeries>{series}, true, true);

    SummaryTable table;
    const double slope = log_d.size() >= 2 ? least_squares_slope(log_d, log_t) : 0.0;
    table.add("runs", static_cast<double>(deltas.size()));
    table.add("slope", slope);
    table.emit(out, "solve.csv");

    if (bool_or(cfg, "check", false) &&
        std::abs(slope - 1.0) > num_or(cfg, "slope-tol", 0.1))
        return 1;
    return 0;
}

int cmd_scaling_check(const json& cfg, std::uint64_t seed, RunDir& out) {
    const TorusGrid g = parse_grid(cfg);
    const DyadicDecomposition dec(g);
    json base = cfg;
    if (!base.contains("t-final")) base["t-final"] = 0.2;
    const SolverConfig scfg = parse_solver_config(base);
    const int l = int_or(cfg, "l", 2);
    const double tol = num_or(cfg, "tol", 1e-10);

    const SpectralField a0 =
        make_field(field_spec(cfg, "a0", json{{"family", "random"}, {"amplitude", 0.05}}), g, 1,
                   seed ^ 0x0AULL, "a0");
    const SpectralField u0 =
        make_field(field_spec(cfg, "u0", json{{"family", "taylor-green"}, {"amplitude", 0.5}}), g,
                   g.dim(), seed ^ 0x50ULL, "u0");

    const double err = scaling_covariance_error(dec, a0, u0, scfg, l);

    SummaryTable table;
    table.add("scale", l);
    table.add("error", err);
    table.add("tol", tol);
    table.emit(out, "scaling.csv");
    std::cout << "scaling: " << (err <= tol ? "PASS" : "FAIL") << "\n";
    return err <= tol ? 0 : 1;
}

struct Common {
    std::string config;
    std::string output;
    std::uint64_t seed = 1;
    std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_out) {
    c.output = default_out;
    sub->add_option("--config", c.config, "JSON config file");
    sub->add_option("--output", c.output, "run directory for artifacts");
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--set", c.sets, "config override key=value (repeatable, dots nest)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic spectral toolkit: dyadic analysis, paraproducts, pressure/transport/"
                 "flow solvers, and an inequality verification harness"};
    app.require_subcommand(1);

    int code = 0;
    const auto dispatch = [&code](const std::string& name, const Common& c,
                                  const std::vector<std::string>& extra,
                                  int (*fn)(const json&, std::uint64_t, RunDir&)) {
        json cfg = load_config(c.config);
        for (const std::string& kv : extra) apply_override(cfg, kv);
        for (const std::string& kv : c.sets) apply_override(cfg, kv);
        RunDir out{fs::path(c.output)};
        code = fn(cfg, c.seed, out);
        write_manifest(out, name, c.seed, cfg);
    };

    Common norm_c, dec_c, ell_c, tr_c, ns_c, ver_c, st_c, scale_c;

    CLI::App* norm = app.add_subcommand("norm", "Lebesgue/Besov norms of a field");
    add_common(norm, norm_c, "lpflow-norm");
    norm->callback([&] { dispatch("norm", norm_c, {}, cmd_norm); });

    CLI::App* deco = app.add_subcommand("decompose", "write dyadic blocks of a field");
    add_common(deco, dec_c, "lpflow-decompose");
    deco->callback([&] { dispatch("decompose", dec_c, {}, cmd_decompose); });

    CLI::App* ell = app.add_subcommand("solve-elliptic", "variable-coefficient pressure solve");
    add_common(ell, ell_c, "lpflow-elliptic");
    ell->callback([&] { dispatch("solve-elliptic", ell_c, {}, cmd_solve_elliptic); });

    CLI::App* tr = app.add_subcommand("solve-transport", "advect a scalar by a given velocity");
    add_common(tr, tr_c, "lpflow-transport");
    tr->callback([&] { dispatch("solve-transport", tr_c, {}, cmd_solve_transport); });

    CLI::App* ns = app.add_subcommand("solve-ns", "variable-density incompressible flow");
    add_common(ns, ns_c, "lpflow-ns");
    ns->callback([&] { dispatch("solve-ns", ns_c, {}, cmd_solve_ns); });

    CLI::App* ver = app.add_subcommand("verify", "run inequality verification suites");
    add_common(ver, ver_c, "lpflow-verify");
    std::vector<std::string> ver_laws;
    int ver_samples = -1;
    std::vector<int> ver_res;
    ver->add_option("--law", ver_laws, "law id (repeatable; default: all registered)");
    ver->add_option("--samples", ver_samples, "samples per law and resolution");
    ver->add_option("--resolution", ver_res, "grid resolutions (repeatable)");
    ver->callback([&] {
        std::vector<std::string> extra;
        if (!ver_laws.empty()) {
            json laws = json::array();
            for (const std::string& l : ver_laws) laws.push_back(l);
            extra.push_back("laws=" + laws.dump());
        }
        if (ver_samples > 0) extra.push_back("samples=" + std::to_string(ver_samples));
        if (!ver_res.empty()) {
            json res = json::array();
            for (int n : ver_res) res.push_back(n);
            extra.push_back("resolutions=" + res.dump());
        }
        dispatch("verify", ver_c, extra, cmd_verify);
    });

    CLI::App* st = app.add_subcommand("stability", "perturbation growth experiment");
    add_common(st, st_c, "lpflow-stability");
    st->callback([&] { dispatch("stability", st_c, {}, cmd_stability); });

    CLI::App* scale = app.add_subcommand("scaling-check", "parabolic co-scaling consistency");
    add_common(scale, scale_c, "lpflow-scaling");
    scale->callback([&] { dispatch("scaling-check", scale_c, {}, cmd_scaling_check); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int c = app.exit(e);
        return c == 0 ? 0 : 2;
    } catch (const ParameterError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ShapeError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const ConvergenceError& e) {
        std::cerr << "numerical abort: fixed-point divergence: " << e.what() << " (contraction "
                  << format_full(e.contraction_factor) << ", iterations " << e.iterations
                  << ")\n";
        return 3;
    } catch (const StabilityError& e) {
        std::cerr << "numerical abort: CFL limit exceeded: " << e.what() << "\n";
        return 3;
    } catch (const ScheduleError& e) {
        std::cerr << "numerical abort: regularity schedule breached at t="
                  << format_full(e.breach_time) << ": " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "numerical abort: " << e.what() << "\n";
        return 3;
    }
    return code;
}
