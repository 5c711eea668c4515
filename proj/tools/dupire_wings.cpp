#include "dupire/config.hpp"
#include "dupire/critical.hpp"
#include "dupire/curve.hpp"
#include "dupire/riccati.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace {

using dupire::format_double;
using json = nlohmann::ordered_json;

constexpr int kExitConfig = 1;
constexpr int kExitDomain = 2;
constexpr int kExitAllFailed = 3;
constexpr int kExitError = 4;

struct Options {
    std::string config;
    std::string out;
    std::optional<double> rel_tol;
    std::optional<double> truncation;
    std::string methods;

    double s_re = 0.0;
    double s_im = 0.0;
    std::optional<double> T;

    std::string figure;

    double xi_max = 2.0;
    std::vector<double> y_list{20.0, 50.0, 100.0};
    int time_steps = 100;
    std::optional<double> y0;
    std::string violations_out;
};

json number(double x) {
    if (std::isfinite(x)) return x;
    return format_double(x);
}

json complex_json(dupire::cplx z) { return {{"re", number(z.real())}, {"im", number(z.imag())}}; }

dupire::RunConfig load(const Options& o) {
    if (o.config.empty()) throw dupire::ConfigError("--config is required");
    return dupire::load_run_config(o.config);
}

double maturity(const Options& o, const dupire::RunConfig& cfg) {
    return o.T ? *o.T : cfg.T_grid.front();
}

// Writes to --out, else the config's output path, else stdout.
template <class Fn>
void emit(const Options& o, const std::optional<std::string>& cfg_out, Fn write) {
    const std::string path = !o.out.empty() ? o.out : cfg_out.value_or("");
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream f(path);
    if (!f) throw dupire::ConfigError("cannot open output file " + path);
    write(f);
}

void apply_overrides(const Options& o, dupire::RunConfig& cfg) {
    if (o.rel_tol) {
        if (!(*o.rel_tol > 0.0)) throw dupire::ConfigError("--rel-tol must be > 0");
        cfg.quadrature.rel_tol = *o.rel_tol;
    }
    if (o.truncation) {
        if (*o.truncation < 0.0) throw dupire::ConfigError("--truncation must be >= 0");
        cfg.quadrature.truncation = *o.truncation;
    }
    if (!o.methods.empty()) cfg.methods = dupire::parse_methods(o.methods);
}

int cmd_mgf(const Options& o) {
    const dupire::RunConfig cfg = load(o);
    const double T = maturity(o, cfg);
    const dupire::cplx s(o.s_re, o.s_im);
    dupire::MgfValue v;
    try {
        v = dupire::mgf_log(cfg.model, s, T);
    } catch (const dupire::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    }
    json j;
    j["model"] = std::string(dupire::family_name(cfg.model.family()));
    j["s"] = complex_json(s);
    j["T"] = T;
    j["m"] = complex_json(v.m);
    j["dm_ds"] = complex_json(v.dm_ds);
    j["dm_dT"] = complex_json(v.dm_dT);
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_critical(const Options& o) {
    const dupire::RunConfig cfg = load(o);
    const double T = maturity(o, cfg);
    const dupire::CriticalReport r = dupire::critical_moment(cfg.model, T);
    json j;
    j["model"] = std::string(dupire::family_name(cfg.model.family()));
    j["T"] = T;
    j["s_plus"] = number(r.s_plus);
    j["s_minus"] = number(r.s_minus);
    j["kind"] = std::string(dupire::blowup_name(r.kind));
    if (r.algebraic) {
        j["c1"] = number(r.algebraic->c1);
        j["c2"] = number(r.algebraic->c2);
        j["c2_dot"] = number(r.algebraic->c2_dot);
    }
    if (cfg.model.family() == dupire::Family::Heston) {
        j["explosion_time_at_s_plus"] = number(dupire::explosion_time(cfg.model, r.s_plus));
        if (r.slope) {
            const auto cs = dupire::heston_critical_slope(cfg.model, T, r.s_plus);
            j["slope"] = number(cs.slope);
            j["r1"] = number(cs.r1);
            j["r2"] = number(cs.r2);
        } else {
            j["slope"] = nullptr;
        }
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

int run_curve(const Options& o, dupire::RunConfig cfg) {
    apply_overrides(o, cfg);
    dupire::validate_for_curve(cfg);
    const dupire::CurveResult result = dupire::compute_curve(cfg);
    for (const auto& msg : result.failures) std::cerr << "nan: " << msg << '\n';
    emit(o, cfg.output, [&](std::ostream& out) { dupire::write_curve_csv(out, cfg, result); });
    if (result.evaluated > 0 && result.failures.size() == result.evaluated) {
        std::cerr << "error: every grid point failed\n";
        return kExitAllFailed;
    }
    return 0;
}

std::string violation_summary(const dupire::WingBoundReport& r) {
    std::map<std::string, std::vector<double>> by_check;
    for (const auto& v : r.violations) by_check[v.check].push_back(v.t);
    std::string out;
    for (const auto& [check, times] : by_check) {
        if (!out.empty()) out += ';';
        out += check + "[t=" + format_double(times.front()) + ".." + format_double(times.back()) +
               " n=" + std::to_string(times.size()) + "]";
    }
    return out;
}

int cmd_verify_bounds(const Options& o) {
    const dupire::RunConfig cfg = load(o);
    const double T = o.T ? *o.T : 1.0;
    dupire::WingBoundOptions wo;
    wo.time_steps = o.time_steps;
    wo.y0 = o.y0;
    const auto reports = dupire::verify_wing_bounds(cfg.model, o.xi_max, o.y_list, T, wo);
    auto flag = [](bool ok) { return ok ? "pass" : "fail"; };
    emit(o, std::nullopt, [&](std::ostream& out) {
        out << "xi,y,T,f,g,C1,C2,C3,C4,y0,claim,f_upper,f_upper_interior,f_upper_from,"
               "f_lower,g_upper,g_lower,g_nonneg,all_pass,violations\n";
        for (const auto& r : reports) {
            out << format_double(r.xi) << ',' << format_double(r.y) << ',' << format_double(r.T) << ','
                << format_double(r.f) << ',' << format_double(r.g) << ','
                << format_double(r.bounds.c1) << ',' << format_double(r.bounds.c2) << ','
                << format_double(r.bounds.c3) << ',' << format_double(r.bounds.c4) << ','
                << format_double(r.y0) << ',' << (r.below_y0 ? "below_y0" : "in_range") << ','
                << flag(r.f_upper) << ",na," << format_double(r.f_upper_from) << ','
                << flag(r.f_lower) << ',' << flag(r.g_upper) << ',' << flag(r.g_lower) << ','
                << flag(r.g_nonneg) << ',' << flag(r.all_pass()) << ',' << violation_summary(r)
                << '\n';
        }
    });
    std::size_t violated = 0;
    for (const auto& r : reports) violated += r.all_pass() ? 0 : 1;
    if (violated > 0) {
        std::cerr << violated << " of " << reports.size() << " (xi, y) points violate a bound\n";
    }
    if (!o.violations_out.empty()) {
        std::ofstream f(o.violations_out);
        if (!f) throw dupire::ConfigError("cannot open " + o.violations_out);
        f << "xi,y,t,check,value,bound\n";
        for (const auto& r : reports) {
            for (const auto& v : r.violations) {
                f << format_double(r.xi) << ',' << format_double(r.y) << ',' << format_double(v.t)
                  << ',' << v.check << ',' << format_double(v.value) << ',' << format_double(v.bound)
                  << '\n';
            }
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dupire local volatility from moment generating functions"};
    app.require_subcommand(1);
    app.fallthrough();
    Options o;
    app.add_option("--config", o.config, "JSON model spec or run config");
    app.add_option("--out", o.out, "output file (default: stdout)");
    app.add_option("--rel-tol", o.rel_tol, "quadrature relative tolerance");
    app.add_option("--truncation", o.truncation, "|Im s| cutoff, 0 = adaptive");
    app.add_option("--methods", o.methods, "comma list of exact,saddle,asymptote");

    auto* mgf = app.add_subcommand("mgf", "log-mgf and its partials at complex s");
    mgf->add_option("--s-re", o.s_re, "Re s")->required();
    mgf->add_option("--s-im", o.s_im, "Im s");
    mgf->add_option("--T", o.T, "maturity (default: config T)");

    auto* critical = app.add_subcommand("critical", "critical moments and blow-up report (JSON)");
    critical->add_option("--T", o.T, "maturity (default: config T)");

    auto* curve = app.add_subcommand("curve", "local variance curve over the config k-grid (CSV)");

    auto* figure = app.add_subcommand("figure", "curve preset with the figure parameters (CSV)");
    figure->add_option("name", o.figure, "heston | kou | vargamma")->required();

    auto* bounds = app.add_subcommand("verify-bounds", "check the Heston wing bounds (CSV)");
    bounds->add_option("--xi-max", o.xi_max, "upper end of Re s");
    bounds->add_option("--y", o.y_list, "Im s values")->delimiter(',');
    bounds->add_option("--T", o.T, "maturity (default 1)");
    bounds->add_option("--time-steps", o.time_steps, "time grid size");
    bounds->add_option("--y0", o.y0, "override the default y0");
    bounds->add_option("--violations", o.violations_out, "write every violation to this CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*mgf) return cmd_mgf(o);
        if (*critical) return cmd_critical(o);
        if (*curve) return run_curve(o, load(o));
        if (*figure) return run_curve(o, dupire::figure_preset(o.figure));
        if (*bounds) return cmd_verify_bounds(o);
    } catch (const dupire::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const dupire::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDomain;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return 0;
}
