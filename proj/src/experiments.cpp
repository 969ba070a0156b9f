#include "qbnet/experiments.hpp"

#include "qbnet/closed_forms.hpp"
#include "qbnet/errors.hpp"
#include "qbnet/nonreciprocity.hpp"
#include "qbnet/observables.hpp"
#include "qbnet/parallel.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qbnet {

namespace {

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_complex(complex z) {
    return z.imag() == 0.0 ? format_number(z.real()) : "(" + format_number(z.real()) + "," + format_number(z.imag()) + ")";
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::vector<double> linspace(double lo, double hi, int points) {
    SweepSpec s;
    s.start = lo;
    s.stop = hi;
    s.points = points;
    return s.values();
}

void describe_params(SweepTable& table, const TopologyParams& p) {
    auto& md = table.metadata;
    md.emplace_back("family", std::string(to_string(p.family)));
    md.emplace_back("n", std::to_string(p.n));
    md.emplace_back("gamma_c", format_number(p.gamma_c));
    std::string gb;
    for (const double g : p.gamma_b) {
        gb += (gb.empty() ? "" : " ") + format_number(g);
    }
    md.emplace_back("gamma_b", gb);
    md.emplace_back("big_gamma", format_number(p.big_gamma));
    md.emplace_back("xi", format_complex(p.xi));
    md.emplace_back("intermediate_coupling", "matched g1=g2=sqrt(g_b*big_gamma/2)");
}

void add_units(SweepTable& table) {
    table.metadata.emplace_back("units", "frequencies and rates in omega; energies E/omega; times in 1/omega; power in omega^2");
}

SweepTable make_table(std::string name, std::string description) {
    SweepTable t;
    t.name = std::move(name);
    t.metadata.emplace_back("toolkit", std::string(toolkit_version));
    t.metadata.emplace_back("table", t.name);
    t.metadata.emplace_back("description", std::move(description));
    return t;
}

// Evaluates row(i) for every point concurrently, keeping point order and
// moving numeric failures to the sidecar list.
void fill_rows(SweepTable& table, const std::vector<double>& xs,
               const std::function<std::vector<double>(std::size_t)>& row) {
    std::vector<std::optional<std::vector<double>>> rows(xs.size());
    std::vector<std::string> errors(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
        try {
            rows[i] = row(i);
        } catch (const NumericError& e) {
            errors[i] = e.what();
        } catch (const ValidationError& e) {
            errors[i] = e.what();
        } catch (const std::domain_error& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (rows[i]) {
            bool finite = true;
            for (const double v : *rows[i]) finite = finite && std::isfinite(v);
            if (finite) {
                table.rows.push_back(std::move(*rows[i]));
                continue;
            }
            errors[i] = "non-finite value in row";
        }
        table.failures.push_back({i, xs[i], errors[i]});
    }
}

std::string gain_column(char prefix, int n, int kind) {
    return std::string(prefix == 'G' ? "G_" : "eta_") + std::to_string(n) + std::to_string(kind);
}

constexpr double kFig2Gamma = 0.1;
constexpr double kFig4Gamma = 5e-4;
constexpr double kFig4BigGamma = 1.0;

TopologyParams fig2_params(Family family, int n, double g_b) {
    return TopologyParams::uniform(family, Variant::nr, n, g_b, kFig2Gamma, kFig2Gamma);
}

TopologyParams fig4_params(Family family, double g_b) {
    return TopologyParams::uniform(family, Variant::nr, 4, g_b, kFig4Gamma, kFig4BigGamma);
}

SweepTable landscape_table(const std::string& id, Family family) {
    TopologyParams p = fig2_params(family, 2, 0.1 * kFig2Gamma);
    p.variant = Variant::custom;
    p.thetas = {0.0, 0.0};
    SweepTable t = make_table(id, "steady E_2/omega over (theta_1, theta_2), g_b/gamma = 0.1");
    describe_params(t, p);
    t.metadata.emplace_back("variant", "custom");
    t.metadata.emplace_back("g_b", format_number(p.g_b));
    t.metadata.emplace_back("target", "b2");
    t.metadata.emplace_back("grid", "41 x 41, theta_j = -pi + 2 pi (j+1)/41");
    add_units(t);
    t.columns = {"theta_1", "theta_2", "E"};
    const PhaseLandscape land = phase_landscape(p, "b2", 41);
    for (std::size_t i = 0; i < land.grid.size(); ++i) {
        for (std::size_t j = 0; j < land.grid.size(); ++j) {
            const std::array<std::size_t, 2> idx = {i, j};
            t.rows.push_back({land.grid[i], land.grid[j], land.at(idx)});
        }
    }
    return t;
}

SweepTable energy_sweep_table(const std::string& id, Family family, int n, bool gains) {
    const auto xs = linspace(0.001, 0.3, 301);
    SweepTable t = make_table(id, gains ? "gain factors vs g_b/gamma" : "steady target energies vs g_b/gamma");
    describe_params(t, fig2_params(family, n, 0.0));
    t.metadata.emplace_back("target", family == Family::cascaded ? battery_id(n) : battery_id(n) + " (all batteries equal)");
    t.metadata.emplace_back("sweep", "gb_over_gamma linear [0.001, 0.3], 301 points");
    add_units(t);
    t.columns = gains ? std::vector<std::string>{"gb_over_gamma", gain_column('G', n, 1), gain_column('G', n, 2)}
                      : std::vector<std::string>{"gb_over_gamma", "E_nr", "E_r1", "E_r2"};
    fill_rows(t, xs, [&](std::size_t i) -> std::vector<double> {
        const GainReport r = gain_report(fig2_params(family, n, xs[i] * kFig2Gamma), false);
        const GainEntry& e = r.entries.back();
        if (gains) {
            if (!e.g1 || !e.g2) throw NumericError("gain ratio undefined (denominator underflow)");
            return {xs[i], *e.g1, *e.g2};
        }
        return {xs[i], e.e_nr, e.e_r1, e.e_r2};
    });
    return t;
}

SweepTable logfit_table() {
    SweepTable t = make_table("fig2f", "optimal nr coupling and E_max^nr/E_max^r1 for odd N");
    describe_params(t, fig2_params(Family::cascaded, 1, 0.0));
    const std::vector<int> ns = {1, 3, 5, 7, 9, 11, 13, 15};
    const LogFit fit = logfit_ratio(ns, kFig2Gamma, 1.0);
    t.metadata.emplace_back("fit", "ratio = 1 + k ln N, k = " + format_number(fit.k));
    add_units(t);
    t.columns = {"N", "gb_opt", "ratio_Emax"};
    for (std::size_t i = 0; i < ns.size(); ++i) {
        t.rows.push_back({static_cast<double>(ns[i]), fit.gb_opt_nr[i], fit.ratios[i]});
    }
    return t;
}

SweepTable dynamics_table() {
    const TopologyParams base = fig2_params(Family::parallel, 4, kFig2Gamma / 100.0);
    SweepTable t = make_table("fig3d", "charging dynamics E_4(t) from vacuum, parallel N=4, g_b = gamma/100");
    describe_params(t, base);
    t.metadata.emplace_back("g_b", format_number(base.g_b));
    t.metadata.emplace_back("target", "b4");
    t.metadata.emplace_back("times", "linear [0, 2000], 2001 points");
    add_units(t);
    t.columns = {"time", "E_nr", "E_r1", "E_r2"};
    const auto ts = linspace(0.0, 2000.0, 2001);
    const EnergyCurve nr = energy_curve(base.with_variant(Variant::nr), "b4", ts);
    const EnergyCurve r1 = energy_curve(base.with_variant(Variant::r1), "b4", ts);
    const EnergyCurve r2 = energy_curve(base.with_variant(Variant::r2), "b4", ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        t.rows.push_back({ts[i], nr.energy[i], r1.energy[i], r2.energy[i]});
    }
    return t;
}

SweepTable power_table(const std::string& id, Family family, double t_stop) {
    const TopologyParams base = fig4_params(family, kFig4Gamma / 10.0);
    SweepTable t = make_table(id, family == Family::cascaded ? "charging power of terminal battery b4, N=4"
                                                             : "charging power of each battery (b4 shown), N=4");
    describe_params(t, base);
    t.metadata.emplace_back("g_b", format_number(base.g_b));
    t.metadata.emplace_back("target", "b4");
    t.metadata.emplace_back("times", "linear [0, " + format_number(t_stop) + "], 2001 points; P(0) reported as 0");
    add_units(t);
    t.columns = {"time", "P_nr", "P_r1", "P_r2"};
    const auto ts = linspace(0.0, t_stop, 2001);
    const std::vector<double> positive(ts.begin() + 1, ts.end());
    const PowerCurve nr = power_curve(base.with_variant(Variant::nr), "b4", positive);
    const PowerCurve r1 = power_curve(base.with_variant(Variant::r1), "b4", positive);
    const PowerCurve r2 = power_curve(base.with_variant(Variant::r2), "b4", positive);
    t.rows.push_back({0.0, 0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < positive.size(); ++i) {
        t.rows.push_back({positive[i], nr.power[i], r1.power[i], r2.power[i]});
    }
    return t;
}

SweepTable eta_table(const std::string& id, Family family) {
    const auto xs = linspace(0.001, 0.1, 100);
    SweepTable t = make_table(id, "maximum-power gains vs g_b/gamma, N=4");
    describe_params(t, fig4_params(family, 0.0));
    t.metadata.emplace_back("target", "b4");
    t.metadata.emplace_back("sweep", "gb_over_gamma linear [0.001, 0.1], 100 points");
    t.metadata.emplace_back("max_power", "2000-point log scan over (0, 50 t_relax], golden section to 1e-8 in t");
    add_units(t);
    t.columns = {"gb_over_gamma", gain_column('e', 4, 1), gain_column('e', 4, 2)};
    fill_rows(t, xs, [&](std::size_t i) -> std::vector<double> {
        const GainReport r = gain_report(fig4_params(family, xs[i] * kFig4Gamma), true);
        const GainEntry& e = r.at("b4");
        if (!e.eta1 || !e.eta2) throw NumericError("power ratio undefined (denominator underflow)");
        return {xs[i], *e.eta1, *e.eta2};
    });
    return t;
}

TopologyParams apply_sweep_value(TopologyParams p, const SweepSpec& s, double v) {
    switch (s.variable) {
        case SweepVariable::g_b: p.g_b = v; break;
        case SweepVariable::theta:
            if (s.index > p.n) throw ValidationError({"sweep.index: exceeds battery count"});
            if (p.thetas.empty()) p.thetas.assign(static_cast<std::size_t>(p.n), 0.0);
            p.thetas[static_cast<std::size_t>(s.index - 1)] = v;
            break;
        case SweepVariable::n: {
            const double rounded = std::round(v);
            if (rounded < 1.0 || std::abs(rounded - v) > 1e-9) {
                throw ValidationError({"sweep: n must take positive integer values"});
            }
            const int n = static_cast<int>(rounded);
            const double gb = p.gamma_b.empty() ? p.gamma_c : p.gamma_b.front();
            p.gamma_b.assign(static_cast<std::size_t>(n), gb);
            if (!p.thetas.empty()) p.thetas.assign(static_cast<std::size_t>(n), p.thetas.front());
            p.n = n;
            break;
        }
        case SweepVariable::gamma:
            p.gamma_c = v;
            p.gamma_b.assign(p.gamma_b.size(), v);
            break;
        case SweepVariable::big_gamma: p.big_gamma = v; break;
        case SweepVariable::xi: p.xi = {v, 0.0}; break;
    }
    return p;
}

}  // namespace

void write_csv(const SweepTable& table, std::ostream& out, bool deterministic) {
    for (const auto& [key, value] : table.metadata) {
        out << "# " << key << ": " << value << '\n';
    }
    if (!deterministic) {
        out << "# generated: " << utc_timestamp() << '\n';
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        out << (c ? "," : "") << table.columns[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << (c ? "," : "") << format_number(row[c]);
        }
        out << '\n';
    }
}

void write_failures_csv(const SweepTable& table, std::ostream& out) {
    out << "point," << (table.columns.empty() ? "value" : table.columns.front()) << ",error\n";
    for (const auto& f : table.failures) {
        std::string msg = f.message;
        for (auto& ch : msg) {
            if (ch == '"') ch = '\'';
        }
        out << f.point << ',' << format_number(f.value) << ",\"" << msg << "\"\n";
    }
}

nlohmann::json to_json(const SweepTable& table, bool deterministic) {
    nlohmann::json j;
    j["metadata"] = nlohmann::json::object();
    for (const auto& [key, value] : table.metadata) {
        j["metadata"][key] = value;
    }
    if (!deterministic) {
        j["metadata"]["generated"] = utc_timestamp();
    }
    j["columns"] = table.columns;
    j["rows"] = table.rows;
    j["failures"] = nlohmann::json::array();
    for (const auto& f : table.failures) {
        j["failures"].push_back({{"point", f.point}, {"value", f.value}, {"error", f.message}});
    }
    return j;
}

std::vector<std::filesystem::path> write_table(const SweepTable& table, const std::filesystem::path& dir,
                                               const OutputOptions& options) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    const bool json_format = options.format == "json";
    const auto main_path = dir / (table.name + (json_format ? ".json" : ".csv"));
    {
        std::ofstream out(main_path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write '" + main_path.string() + "'");
        }
        if (json_format) {
            out << to_json(table, options.deterministic).dump(2) << '\n';
        } else {
            write_csv(table, out, options.deterministic);
        }
        if (!out) {
            throw std::runtime_error("write failed for '" + main_path.string() + "'");
        }
    }
    written.push_back(main_path);
    if (!table.failures.empty() && !json_format) {
        const auto err_path = dir / (table.name + ".errors.csv");
        std::ofstream out(err_path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write '" + err_path.string() + "'");
        }
        write_failures_csv(table, out);
        written.push_back(err_path);
    }
    return written;
}

SweepTable run_sweep(const RunConfig& config) {
    if (!config.topology) {
        throw ConfigError("$.topology", "sweep requires a topology section");
    }
    if (!config.sweep) {
        throw ConfigError("$.sweep", "missing sweep section");
    }
    const SweepSpec& s = *config.sweep;
    const TopologyParams& base = *config.topology;
    if (s.variable == SweepVariable::theta && (base.variant == Variant::nr || base.variant == Variant::r2)) {
        throw ConfigError("$.sweep.variable", "theta sweeps need variant custom or r1");
    }
    if (s.variable == SweepVariable::theta && s.index > base.n) {
        throw ConfigError("$.sweep.index", "exceeds battery count");
    }

    const std::string var_name(to_string(s.variable));
    SweepTable t = make_table("sweep_" + var_name, "parameter sweep");
    describe_params(t, base);
    t.metadata.emplace_back("variant", std::string(to_string(base.variant)));
    t.metadata.emplace_back("g_b", format_number(base.g_b));
    t.metadata.emplace_back("target", config.target.value_or(default_target(base)));
    t.metadata.emplace_back("sweep", var_name + (s.variable == SweepVariable::theta ? std::to_string(s.index) : "") +
                                         (s.log_scale ? " log [" : " linear [") + format_number(s.start) + ", " +
                                         format_number(s.stop) + "], " + std::to_string(s.points) + " points");
    add_units(t);

    t.columns = {var_name};
    for (const auto& obs : s.observables) {
        if (obs == "max_power") {
            t.columns.emplace_back("t_star");
            t.columns.emplace_back("P_max");
        } else {
            t.columns.push_back(obs);
        }
    }

    const auto xs = s.values();
    fill_rows(t, xs, [&](std::size_t i) -> std::vector<double> {
        const TopologyParams p = apply_sweep_value(base, s, xs[i]);
        const std::string target = config.target.value_or(default_target(p));
        std::optional<GainReport> gains;
        auto gain_entry = [&](bool power) -> const GainEntry& {
            if (!gains || (power && !gains->entries.front().eta1.has_value())) {
                gains = gain_report(p, power);
            }
            return gains->at(target);
        };
        std::vector<double> row = {xs[i]};
        for (const auto& obs : s.observables) {
            if (obs == "steady_energy") {
                row.push_back(steady_energy(p, target));
            } else if (obs == "max_power") {
                const MaxPower mp = max_power(p, target);
                row.push_back(mp.t_star);
                row.push_back(mp.p_max);
            } else if (obs == "E_nr") {
                row.push_back(gain_entry(false).e_nr);
            } else if (obs == "E_r1") {
                row.push_back(gain_entry(false).e_r1);
            } else if (obs == "E_r2") {
                row.push_back(gain_entry(false).e_r2);
            } else {
                const bool power = obs == "eta1" || obs == "eta2";
                const GainEntry& e = gain_entry(power);
                const auto& ratio = obs == "G1" ? e.g1 : obs == "G2" ? e.g2 : obs == "eta1" ? e.eta1 : e.eta2;
                if (!ratio) throw NumericError(obs + " undefined (denominator underflow)");
                row.push_back(*ratio);
            }
        }
        return row;
    });
    return t;
}

const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids = {"fig2a", "fig2b", "fig2c", "fig2d", "fig2e", "fig2f", "fig3a",
                                                 "fig3b", "fig3c", "fig3d", "fig4a", "fig4b", "fig4c", "fig4d"};
    return ids;
}

SweepTable figure_table(std::string_view fig_id) {
    const std::string id(fig_id);
    if (id == "fig2a") return landscape_table(id, Family::cascaded);
    if (id == "fig2b") return energy_sweep_table(id, Family::cascaded, 3, false);
    if (id == "fig2c") return energy_sweep_table(id, Family::cascaded, 4, false);
    if (id == "fig2d") return energy_sweep_table(id, Family::cascaded, 3, true);
    if (id == "fig2e") return energy_sweep_table(id, Family::cascaded, 4, true);
    if (id == "fig2f") return logfit_table();
    if (id == "fig3a") return landscape_table(id, Family::parallel);
    if (id == "fig3b") return energy_sweep_table(id, Family::parallel, 2, false);
    if (id == "fig3c") return energy_sweep_table(id, Family::parallel, 2, true);
    if (id == "fig3d") return dynamics_table();
    if (id == "fig4a") return power_table(id, Family::cascaded, 1e5);
    if (id == "fig4b") return power_table(id, Family::parallel, 5e4);
    if (id == "fig4c") return eta_table(id, Family::cascaded);
    if (id == "fig4d") return eta_table(id, Family::parallel);
    throw std::invalid_argument("unknown figure id '" + id + "'");
}

std::vector<std::filesystem::path> run_figure(std::string_view fig_id, const std::filesystem::path& out_dir,
                                              const OutputOptions& options) {
    return write_table(figure_table(fig_id), out_dir, options);
}

}  // namespace qbnet
