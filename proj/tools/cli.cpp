#include "cli.hpp"

#include "qbnet/closed_forms.hpp"
#include "qbnet/config.hpp"
#include "qbnet/dynamics.hpp"
#include "qbnet/errors.hpp"
#include "qbnet/experiments.hpp"
#include "qbnet/nonreciprocity.hpp"
#include "qbnet/observables.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace qbnet::cli {

namespace {

struct Options {
    std::string config_file;
    std::string out_dir;
    std::string format = "csv";
    bool deterministic = false;

    std::optional<std::string> family;
    std::optional<std::string> variant;
    std::optional<int> n;
    std::optional<double> gb;
    std::optional<double> gamma;
    std::optional<double> gamma_c;
    std::vector<double> gamma_b;
    std::optional<double> big_gamma;
    std::optional<double> xi;
    std::vector<double> thetas;
    std::optional<std::string> target;

    // per-subcommand
    std::optional<double> t_stop;
    std::optional<int> points;
    bool with_power = false;
    std::vector<std::string> figures;
};

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

RunConfig load(const Options& o) {
    RunConfig cfg = o.config_file.empty() ? RunConfig{} : load_config(o.config_file);
    const bool inline_params = o.family || o.variant || o.n || o.gb || o.gamma || o.gamma_c || !o.gamma_b.empty() ||
                               o.big_gamma || o.xi || !o.thetas.empty();
    if (inline_params) {
        if (cfg.network) {
            throw ConfigError("$.network", "inline topology flags cannot modify an explicit network");
        }
        TopologyParams p;
        if (cfg.topology) {
            p = *cfg.topology;
        } else {
            if (!o.gb) {
                throw ConfigError("--gb", "required when no config topology is given");
            }
            p = TopologyParams::uniform(Family::cascaded, Variant::nr, 1, 0.0, 0.1, 0.1);
        }
        const bool had_topology = cfg.topology.has_value();
        try {
            if (o.family) p.family = parse_family(*o.family);
            if (o.variant) p.variant = parse_variant(*o.variant);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(o.family ? "--family/--variant" : "--variant", e.what());
        }
        if (o.n) {
            if (*o.n < 1) throw ConfigError("--n", "battery count must be >= 1");
            const double gb = p.gamma_b.empty() ? p.gamma_c : p.gamma_b.front();
            p.n = *o.n;
            p.gamma_b.assign(static_cast<std::size_t>(p.n), gb);
            if (!p.thetas.empty() && p.thetas.size() != static_cast<std::size_t>(p.n)) p.thetas.clear();
        }
        if (o.gb) p.g_b = *o.gb;
        if (o.gamma) {
            p.gamma_c = *o.gamma;
            p.gamma_b.assign(static_cast<std::size_t>(p.n), *o.gamma);
            if (!had_topology && !o.big_gamma) p.big_gamma = *o.gamma;
        }
        if (o.gamma_c) p.gamma_c = *o.gamma_c;
        if (!o.gamma_b.empty()) {
            if (o.gamma_b.size() == 1) {
                p.gamma_b.assign(static_cast<std::size_t>(p.n), o.gamma_b.front());
            } else {
                p.gamma_b = o.gamma_b;
            }
        }
        if (o.big_gamma) p.big_gamma = *o.big_gamma;
        if (o.xi) p.xi = {*o.xi, 0.0};
        if (!o.thetas.empty()) p.thetas = o.thetas;
        if (p.variant == Variant::custom && p.thetas.empty()) {
            p.thetas.assign(static_cast<std::size_t>(p.n), 0.0);
        }
        if (auto violations = validate(p); !violations.empty()) {
            throw ValidationError(std::move(violations));
        }
        cfg.topology = p;
    }
    if (o.target) cfg.target = *o.target;
    return cfg;
}

NetworkSpec network_of(const RunConfig& cfg) {
    if (cfg.network) return *cfg.network;
    if (cfg.topology) return build_network(*cfg.topology);
    throw ConfigError("$", "no topology or network given (use --config or inline flags)");
}

std::string target_of(const RunConfig& cfg) {
    if (cfg.target) return *cfg.target;
    if (cfg.topology) return default_target(*cfg.topology);
    throw ConfigError("$.target", "required for an explicit network");
}

void describe(SweepTable& t, const RunConfig& cfg) {
    if (cfg.topology) {
        const auto& p = *cfg.topology;
        t.metadata.emplace_back("family", std::string(to_string(p.family)));
        t.metadata.emplace_back("variant", std::string(to_string(p.variant)));
        t.metadata.emplace_back("n", std::to_string(p.n));
        t.metadata.emplace_back("g_b", num(p.g_b));
        t.metadata.emplace_back("gamma_c", num(p.gamma_c));
        std::string gb;
        for (const double g : p.gamma_b) gb += (gb.empty() ? "" : " ") + num(g);
        t.metadata.emplace_back("gamma_b", gb);
        t.metadata.emplace_back("big_gamma", num(p.big_gamma));
        t.metadata.emplace_back("xi", p.xi.imag() == 0.0 ? num(p.xi.real())
                                                         : "(" + num(p.xi.real()) + "," + num(p.xi.imag()) + ")");
        if (!p.thetas.empty()) {
            std::string th;
            for (const double x : p.thetas) th += (th.empty() ? "" : " ") + num(x);
            t.metadata.emplace_back("thetas", th);
        }
    } else {
        t.metadata.emplace_back("network", "explicit (" + std::to_string(cfg.network->modes.size()) + " modes)");
    }
    t.metadata.emplace_back("units", "frequencies in omega; energies E/omega; times in 1/omega");
}

SweepTable base_table(const std::string& name, const RunConfig& cfg) {
    SweepTable t;
    t.name = name;
    t.metadata.emplace_back("toolkit", std::string(toolkit_version));
    t.metadata.emplace_back("table", name);
    describe(t, cfg);
    return t;
}

OutputOptions output_options(const Options& o, const RunConfig& cfg) {
    OutputOptions opts;
    opts.deterministic = o.deterministic;
    opts.format = o.format;
    if (cfg.format && o.format == "csv") opts.format = *cfg.format;
    return opts;
}

void emit(const SweepTable& t, const Options& o, const RunConfig& cfg, std::ostream& out) {
    const OutputOptions opts = output_options(o, cfg);
    const std::string dir = !o.out_dir.empty() ? o.out_dir : cfg.out_dir.value_or("");
    if (!dir.empty()) {
        for (const auto& path : write_table(t, dir, opts)) {
            out << path.string() << '\n';
        }
        return;
    }
    if (opts.format == "json") {
        out << to_json(t, opts.deterministic).dump(2) << '\n';
    } else {
        write_csv(t, out, opts.deterministic);
    }
}

int cmd_steady(const Options& o, std::ostream& out) {
    const RunConfig cfg = load(o);
    const LinearSystem sys = assemble(network_of(cfg));
    const Stability st = is_stable(sys);
    if (!st.stable) {
        throw UnstableSystemError("network is not stable (spectral abscissa " + num(st.spectral_abscissa) + ")",
                                  st.spectral_abscissa);
    }
    const SteadyState ss = steady_state(sys);
    SweepTable t = base_table("steady", cfg);
    const std::string target = target_of(cfg);
    t.metadata.emplace_back("target", target);
    t.metadata.emplace_back("E/omega", num(std::norm(ss.amplitudes[sys.index(target)])));
    t.metadata.emplace_back("spectral_abscissa", num(st.spectral_abscissa));
    t.metadata.emplace_back("residual", num(ss.residual));
    t.columns = {"mode_index", "re_alpha", "im_alpha", "E"};
    std::string ids;
    for (Eigen::Index i = 0; i < sys.size(); ++i) {
        t.rows.push_back({static_cast<double>(i), ss.amplitudes[i].real(), ss.amplitudes[i].imag(),
                          std::norm(ss.amplitudes[i])});
        ids += (ids.empty() ? "" : " ") + sys.ids[static_cast<std::size_t>(i)];
    }
    t.metadata.emplace_back("modes", ids);
    emit(t, o, cfg, out);
    return success;
}

std::vector<double> time_grid(const Options& o, const RunConfig& cfg) {
    TimeGrid g = cfg.times.value_or(TimeGrid{0.0, 2000.0, 2001});
    if (o.t_stop) g.stop = *o.t_stop;
    if (o.points) g.points = *o.points;
    if (g.points < 1 || (g.points > 1 && !(g.stop > g.start))) {
        throw ConfigError("--t-stop/--points", "need points >= 1 and stop > start");
    }
    return g.values();
}

int cmd_evolve(const Options& o, std::ostream& out) {
    const RunConfig cfg = load(o);
    const LinearSystem sys = assemble(network_of(cfg));
    const auto ts = time_grid(o, cfg);
    const Trajectory traj = evolve(sys, cvec::Zero(sys.size()), ts);
    SweepTable t = base_table("evolve", cfg);
    t.metadata.emplace_back("initial", "vacuum");
    t.columns = {"time"};
    for (const auto& id : sys.ids) t.columns.push_back("E_" + id);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        std::vector<double> row = {ts[i]};
        for (Eigen::Index m = 0; m < sys.size(); ++m) row.push_back(std::norm(traj.amplitudes[i][m]));
        t.rows.push_back(std::move(row));
    }
    emit(t, o, cfg, out);
    return success;
}

int cmd_power(const Options& o, std::ostream& out) {
    const RunConfig cfg = load(o);
    const LinearSystem sys = assemble(network_of(cfg));
    const std::string target = target_of(cfg);
    const MaxPower mp = max_power(sys, target);
    auto ts = time_grid(o, cfg);
    ts.erase(std::remove_if(ts.begin(), ts.end(), [](double x) { return !(x > 0.0); }), ts.end());
    SweepTable t = base_table("power", cfg);
    t.metadata.emplace_back("target", target);
    t.metadata.emplace_back("t_star", num(mp.t_star));
    t.metadata.emplace_back("P_max", num(mp.p_max));
    t.columns = {"time", "P"};
    if (!ts.empty()) {
        const PowerCurve pc = power_curve(sys, target, ts);
        for (std::size_t i = 0; i < ts.size(); ++i) t.rows.push_back({ts[i], pc.power[i]});
    }
    emit(t, o, cfg, out);
    return success;
}

int cmd_gains(const Options& o, std::ostream& out) {
    const RunConfig cfg = load(o);
    if (!cfg.topology) throw ConfigError("$.topology", "gains need a topology");
    const GainReport r = gain_report(*cfg.topology, o.with_power);
    SweepTable t = base_table("gains", cfg);
    t.columns = {"battery", "E_nr", "E_r1", "E_r2", "G1", "G2"};
    if (o.with_power) {
        for (const auto* c : {"t_nr", "P_nr", "t_r1", "P_r1", "t_r2", "P_r2", "eta1", "eta2"}) t.columns.emplace_back(c);
    }
    for (std::size_t i = 0; i < r.entries.size(); ++i) {
        const auto& e = r.entries[i];
        const int k = std::stoi(e.target.substr(1));
        if (!e.g1 || !e.g2 || (o.with_power && (!e.eta1 || !e.eta2))) {
            t.failures.push_back({i, static_cast<double>(k), "ratio undefined for " + e.target});
            continue;
        }
        std::vector<double> row = {static_cast<double>(k), e.e_nr, e.e_r1, e.e_r2, *e.g1, *e.g2};
        if (o.with_power) {
            for (const auto* p : {&e.p_nr, &e.p_r1, &e.p_r2}) {
                row.push_back((*p)->t_star);
                row.push_back((*p)->p_max);
            }
            row.push_back(*e.eta1);
            row.push_back(*e.eta2);
        }
        t.rows.push_back(std::move(row));
    }
    emit(t, o, cfg, out);
    return success;
}

int cmd_landscape(const Options& o, std::ostream& out) {
    RunConfig cfg = load(o);
    if (!cfg.topology) throw ConfigError("$.topology", "landscape needs a topology");
    TopologyParams p = *cfg.topology;
    if (p.variant != Variant::r1) p.variant = Variant::custom;
    if (p.thetas.empty()) p.thetas.assign(static_cast<std::size_t>(p.n), 0.0);
    const int points = o.points.value_or(cfg.landscape_points.value_or(41));
    const std::string target = target_of(cfg);
    const PhaseLandscape land = phase_landscape(p, target, points);
    SweepTable t = base_table("landscape", cfg);
    t.metadata.emplace_back("target", target);
    t.metadata.emplace_back("grid", std::to_string(points) + " points per axis, theta_j = -pi + 2 pi (j+1)/points");
    for (const auto& a : land.argmax) {
        std::string s;
        for (const double x : a) s += (s.empty() ? "" : " ") + num(x);
        t.metadata.emplace_back("argmax", s);
    }
    for (int a = 1; a <= p.n; ++a) t.columns.push_back("theta_" + std::to_string(a));
    t.columns.emplace_back("E");
    const std::size_t g = land.grid.size();
    for (std::size_t flat = 0; flat < land.values.size(); ++flat) {
        std::vector<double> row(static_cast<std::size_t>(p.n));
        std::size_t rem = flat;
        for (std::size_t a = row.size(); a-- > 0;) {
            row[a] = land.grid[rem % g];
            rem /= g;
        }
        row.push_back(land.values[flat]);
        t.rows.push_back(std::move(row));
    }
    emit(t, o, cfg, out);
    return success;
}

int cmd_sweep(const Options& o, std::ostream& out) {
    const RunConfig cfg = load(o);
    const SweepTable t = run_sweep(cfg);
    emit(t, o, cfg, out);
    return success;
}

int cmd_figure(const Options& o, std::ostream& out) {
    std::vector<std::string> ids = o.figures;
    if (ids.size() == 1 && ids.front() == "all") ids = figure_ids();
    for (const auto& id : ids) {
        if (std::find(figure_ids().begin(), figure_ids().end(), id) == figure_ids().end()) {
            throw ConfigError("figure", "unknown figure id '" + id + "'");
        }
    }
    RunConfig cfg = o.config_file.empty() ? RunConfig{} : load_config(o.config_file);
    const std::string dir = !o.out_dir.empty() ? o.out_dir : cfg.out_dir.value_or(".");
    const OutputOptions opts = output_options(o, cfg);
    for (const auto& id : ids) {
        for (const auto& path : run_figure(id, dir, opts)) {
            out << path.string() << '\n';
        }
    }
    return success;
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = load(o);
    std::vector<std::string> violations;
    if (cfg.topology) {
        violations = validate(*cfg.topology);
        if (violations.empty()) violations = validate(build_network(*cfg.topology));
    } else if (cfg.network) {
        violations = validate(*cfg.network);
    } else {
        violations.emplace_back("$: no topology or network given");
    }
    if (!violations.empty()) {
        for (const auto& v : violations) err << "violation: " << v << '\n';
        return usage_error;
    }
    out << "valid\n";
    return success;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config_file, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out_dir, "output directory (files instead of stdout)");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_flag("--deterministic", o.deterministic, "omit the generation timestamp");
}

void add_params(CLI::App* sub, Options& o) {
    sub->add_option("--family", o.family, "cascaded | parallel");
    sub->add_option("--variant", o.variant, "r1 | r2 | nr | custom");
    sub->add_option("--n", o.n, "battery count");
    sub->add_option("--gb", o.gb, "direct coupling g_b");
    sub->add_option("--gamma", o.gamma, "uniform decay gamma_c = gamma_b");
    sub->add_option("--gamma-c", o.gamma_c, "charger decay");
    sub->add_option("--gamma-b", o.gamma_b, "battery decays (one value or N values)")->delimiter(',');
    sub->add_option("--big-gamma", o.big_gamma, "intermediate decay Gamma");
    sub->add_option("--xi", o.xi, "drive amplitude");
    sub->add_option("--theta", o.thetas, "direct-coupling phases (N values)")->delimiter(',');
    sub->add_option("--target", o.target, "target mode id (default b_N)");
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"qbnet: driven-dissipative charging networks"};
    app.require_subcommand(1);
    Options o;

    auto* steady = app.add_subcommand("steady", "steady-state amplitudes and energies");
    auto* evolve_cmd = app.add_subcommand("evolve", "energy dynamics from vacuum");
    auto* power = app.add_subcommand("power", "charging power curve and maximum power");
    auto* gains = app.add_subcommand("gains", "nr vs r1/r2 gain report");
    auto* landscape = app.add_subcommand("landscape", "steady energy over direct-coupling phases");
    auto* sweep = app.add_subcommand("sweep", "parameter sweep from a config file");
    auto* figure = app.add_subcommand("figure", "write the data behind a figure panel");
    auto* validate_cmd = app.add_subcommand("validate", "check a configuration");

    for (auto* sub : {steady, evolve_cmd, power, gains, landscape, sweep, figure, validate_cmd}) {
        add_common(sub, o);
    }
    for (auto* sub : {steady, evolve_cmd, power, gains, landscape, sweep, validate_cmd}) {
        add_params(sub, o);
    }
    for (auto* sub : {evolve_cmd, power}) {
        sub->add_option("--t-stop", o.t_stop, "end of the time grid");
        sub->add_option("--points", o.points, "time grid points");
    }
    landscape->add_option("--points", o.points, "grid points per axis (>= 21)");
    gains->add_flag("--power", o.with_power, "also compute maximum-power gains");
    figure->add_option("ids", o.figures, "figure ids (fig2a..fig4d) or 'all'")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return success;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return success;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return usage_error;
    }

    try {
        if (*steady) return cmd_steady(o, out);
        if (*evolve_cmd) return cmd_evolve(o, out);
        if (*power) return cmd_power(o, out);
        if (*gains) return cmd_gains(o, out);
        if (*landscape) return cmd_landscape(o, out);
        if (*sweep) return cmd_sweep(o, out);
        if (*figure) return cmd_figure(o, out);
        if (*validate_cmd) return cmd_validate(o, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return usage_error;
    } catch (const ValidationError& e) {
        err << "invalid input: " << e.what() << '\n';
        return usage_error;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return numeric_failure;
    } catch (const std::out_of_range& e) {
        err << "invalid input: " << e.what() << '\n';
        return usage_error;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return usage_error;
    } catch (const std::domain_error& e) {
        err << "invalid input: " << e.what() << '\n';
        return usage_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return io_failure;
    }
    return usage_error;
}

}  // namespace qbnet::cli
