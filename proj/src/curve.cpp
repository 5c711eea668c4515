#include "dupire/curve.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <thread>

namespace dupire {

unsigned curve_threads() {
    if (const char* env = std::getenv("DUPIRE_WINGS_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

double evaluate_method(const ModelSpec& model, VolMethod method, double k, double T,
                       const QuadratureConfig& q) {
    switch (method) {
        case VolMethod::Exact: return local_vol_exact(model, k, T, q).sigma_loc_sq;
        case VolMethod::Saddle: return local_vol_saddle(model, k, T).sigma_loc_sq;
        case VolMethod::Asymptote: return model_asymptote(model, T, k).sigma_loc_sq;
    }
    return std::nan("");
}

CurveResult compute_curve(const RunConfig& cfg, unsigned threads) {
    validate_for_curve(cfg);
    const std::vector<double> ks = cfg.k_grid.points();
    CurveResult result;
    for (const double T : cfg.T_grid) {
        for (const double k : ks) result.rows.push_back({T, k});
    }
    std::vector<std::vector<std::string>> failures(result.rows.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (std::size_t i = next++; i < result.rows.size(); i = next++) {
            CurveRow& row = result.rows[i];
            for (const VolMethod m : cfg.methods) {
                double value = std::nan("");
                try {
                    value = evaluate_method(cfg.model, m, row.k, row.T, cfg.quadrature);
                } catch (const std::exception& e) {
                    failures[i].push_back("k=" + format_double(row.k) + " T=" + format_double(row.T) +
                                          " " + std::string(method_name(m)) + ": " + e.what());
                }
                switch (m) {
                    case VolMethod::Exact: row.exact = value; break;
                    case VolMethod::Saddle: row.saddle = value; break;
                    case VolMethod::Asymptote: row.asymptote = value; break;
                }
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(threads, result.rows.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    for (auto& f : failures) {
        for (auto& msg : f) result.failures.push_back(std::move(msg));
    }
    result.evaluated = result.rows.size() * cfg.methods.size();
    return result;
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_curve_csv(std::ostream& out, const RunConfig& cfg, const CurveResult& result) {
    auto wants = [&](VolMethod m) {
        return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
    };
    const bool with_T = cfg.T_grid.size() > 1;
    if (with_T) out << "T,";
    out << "k,exact,saddle,asymptote\n";
    for (const CurveRow& row : result.rows) {
        if (with_T) out << format_double(row.T) << ',';
        out << format_double(row.k) << ',';
        out << (wants(VolMethod::Exact) ? format_double(row.exact) : "") << ',';
        out << (wants(VolMethod::Saddle) ? format_double(row.saddle) : "") << ',';
        out << (wants(VolMethod::Asymptote) ? format_double(row.asymptote) : "") << '\n';
    }
}

}  // namespace dupire
