#include "dupire/inversion.hpp"

#include "dupire/errors.hpp"
#include "dupire/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace dupire {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kPoleGap = 0.05;

template <std::size_t N>
struct LineIntegral {
    std::array<double, N> value{};
    std::array<double, N> error{};
    std::array<double, N> imag{};
    double upper = 0.0;
    std::size_t evals = 0;
};

// Integral over y in R of F(c + iy) for a vector of integrands F with
// F(conj s) = conj F(s); only y >= 0 is evaluated unless symmetry is checked.
template <std::size_t N, class F>
LineIntegral<N> line_integral(F f, double c, double h0, const QuadratureConfig& cfg) {
    quad::Options opt{cfg.rel_tol, cfg.abs_tol, cfg.max_evals};
    LineIntegral<N> out;
    if (!cfg.check_symmetry) {
        auto g = [&](double y) {
            const std::array<cplx, N> v = f(cplx(c, y));
            quad::Vec<N> r;
            for (std::size_t i = 0; i < N; ++i) r[i] = 2.0 * v[i].real();
            return r;
        };
        const auto res = quad::half_line<N>(g, h0, opt, cfg.truncation);
        out.value = res.value;
        out.error = res.error;
        out.upper = res.upper;
        out.evals = res.evals;
        return out;
    }
    auto g = [&](double y) {
        const std::array<cplx, N> up = f(cplx(c, y));
        const std::array<cplx, N> down = f(cplx(c, -y));
        quad::Vec<2 * N> r;
        for (std::size_t i = 0; i < N; ++i) {
            const cplx sum = up[i] + down[i];
            r[i] = sum.real();
            r[N + i] = sum.imag();
        }
        return r;
    };
    const auto res = quad::half_line<2 * N>(g, h0, opt, cfg.truncation);
    for (std::size_t i = 0; i < N; ++i) {
        out.value[i] = res.value[i];
        out.error[i] = res.error[i];
        out.imag[i] = res.value[N + i];
    }
    out.upper = res.upper;
    out.evals = 2 * res.evals;
    return out;
}

double first_panel(const ModelSpec& model, double c, double T) {
    const double curv = mgf_curvature(model, c, T);
    if (!(curv > 0.0) || !std::isfinite(curv)) return 1.0;
    return std::clamp(1.0 / std::sqrt(curv), 1e-2, 1e2);
}

void require_density(const ModelSpec& model, double T) {
    if (model.family() == Family::VarianceGamma) {
        const double nu = model.as<VarianceGammaParams>().nu;
        if (T < 0.55 * nu) {
            throw SmallMaturityError("variance gamma: density requires T >= nu/2 + 0.05 nu = " +
                                     std::to_string(0.55 * nu));
        }
    }
    if (model.family() == Family::Kou && model.as<KouParams>().sigma == 0.0) {
        throw DomainError("kou: no density without a diffusion part (atom at the drift)");
    }
}

void require_maturity(double T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ParameterError("maturity T must be > 0");
}

void require_inputs(double level, double T, const char* what) {
    if (!(level > 0.0) || !std::isfinite(level)) {
        throw ParameterError(std::string(what) + " must be > 0");
    }
    require_maturity(T);
}

double call_contour(const ModelSpec& model, double k, double T, const QuadratureConfig& cfg) {
    const double c = cfg.contour_re ? *cfg.contour_re : default_call_contour(model, k, T);
    const Strip strip = finiteness_strip(model, T);
    if (!(c > 1.0 && c < strip.upper)) {
        throw ContourError("contour Re s = " + std::to_string(c) + " must lie in (1, s_+ = " +
                           std::to_string(strip.upper) + ")");
    }
    return c;
}

double density_contour(const ModelSpec& model, double k, double T, const QuadratureConfig& cfg) {
    const double c = cfg.contour_re ? *cfg.contour_re : default_density_contour(model, k, T);
    const Strip strip = finiteness_strip(model, T);
    if (!strip.contains(c)) {
        throw ContourError("contour Re s = " + std::to_string(c) + " outside the strip (" +
                           std::to_string(strip.lower) + ", " + std::to_string(strip.upper) + ")");
    }
    return c;
}

// e^{m(s) - m(c) - k (s - c)}: the mgf integrand normalized at the contour
// crossing, bounded by one in modulus.
struct Normalized {
    const ModelSpec& model;
    double T;
    double k;
    double c;
    double m_c;

    std::pair<cplx, MgfValue> operator()(cplx s) const {
        const MgfValue v = detail::mgf_log_unchecked(model, s, T);
        return {std::exp(v.m - m_c - k * (s - c)), v};
    }
};

InversionResult finish(double scale, const LineIntegral<1>& li, double c) {
    InversionResult r;
    r.value = scale * li.value[0] / kTwoPi;
    r.error = std::abs(scale) * li.error[0] / kTwoPi;
    r.contour_re = c;
    r.upper = li.upper;
    r.imag_residual = li.value[0] != 0.0 ? std::abs(li.imag[0] / li.value[0]) : 0.0;
    r.evals = li.evals;
    return r;
}

enum class CallKind { Price, Theta };

InversionResult call_integral(const ModelSpec& model, double K, double T,
                              const QuadratureConfig& cfg, CallKind kind) {
    require_inputs(K, T, "strike K");
    const double s0 = model.spot();
    const double k = std::log(K / s0);
    // dm_dT vanishes at s = 0 and s = 1 for a martingale, so the theta
    // integrand has no poles and may use the density contour by default.
    const double c = kind == CallKind::Theta && !cfg.contour_re
                         ? default_density_contour(model, k, T)
                         : call_contour(model, k, T, cfg);
    const Normalized base{model, T, k, c, mgf_log(model, c, T).m.real()};
    auto f = [&](cplx s) {
        const auto [e, v] = base(s);
        cplx val = e / (s * (s - 1.0));
        if (kind == CallKind::Theta) val *= v.dm_dT;
        return std::array<cplx, 1>{val};
    };
    const double scale = s0 * std::exp(k + base.m_c - k * c);
    const auto li = line_integral<1>(f, c, first_panel(model, c, T), cfg);
    return finish(scale, li, c);
}

}  // namespace

double default_call_contour(const ModelSpec& model, double k, double T) {
    const Strip strip = finiteness_strip(model, T);
    const double s_hat = strip_saddle(model, k, T, strip);
    const double lo = 1.0 + std::min(0.5, 0.5 * (strip.upper - 1.0));
    return std::max(s_hat, lo);
}

double default_density_contour(const ModelSpec& model, double k, double T) {
    const Strip strip = finiteness_strip(model, T);
    double c = strip_saddle(model, k, T, strip);
    // keep clear of s = 0 and s = 1, where the ratio integrand is 0/0
    for (const double pole : {0.0, 1.0}) {
        if (std::abs(c - pole) < kPoleGap) c = pole + (c >= pole ? kPoleGap : -kPoleGap);
    }
    return c;
}

InversionResult call_price(const ModelSpec& model, double K, double T,
                           const QuadratureConfig& cfg) {
    return call_integral(model, K, T, cfg, CallKind::Price);
}

InversionResult dcall_dT(const ModelSpec& model, double K, double T,
                         const QuadratureConfig& cfg) {
    return call_integral(model, K, T, cfg, CallKind::Theta);
}

InversionResult density(const ModelSpec& model, double x, double T,
                        const QuadratureConfig& cfg) {
    require_inputs(x, T, "price level x");
    require_density(model, T);
    const double s0 = model.spot();
    const double k = std::log(x / s0);
    const double c = density_contour(model, k, T, cfg);
    const Normalized base{model, T, k, c, mgf_log(model, c, T).m.real()};
    auto f = [&](cplx s) { return std::array<cplx, 1>{base(s).first}; };
    const double scale = std::exp(-k + base.m_c - k * c) / s0;
    const auto li = line_integral<1>(f, c, first_panel(model, c, T), cfg);
    return finish(scale, li, c);
}

VolEstimate local_vol_exact(const ModelSpec& model, double k, double T,
                            const QuadratureConfig& cfg) {
    if (!std::isfinite(k)) throw ParameterError("log-strike k must be finite");
    require_maturity(T);
    require_density(model, T);
    const double c = density_contour(model, k, T, cfg);
    const Normalized base{model, T, k, c, mgf_log(model, c, T).m.real()};
    auto f = [&](cplx s) {
        const auto [e, v] = base(s);
        return std::array<cplx, 2>{e * v.dm_dT / (s * (s - 1.0)), e};
    };
    const auto li = line_integral<2>(f, c, first_panel(model, c, T), cfg);
    const double num = li.value[0];
    const double den = li.value[1];
    if (!(std::abs(den) > 0.0) || li.error[1] > 0.1 * std::abs(den)) {
        throw RatioInstabilityError("local_vol_exact: denominator integral not resolved (value " +
                                    std::to_string(den) + ", error " +
                                    std::to_string(li.error[1]) + ")");
    }
    VolEstimate out;
    out.sigma_loc_sq = 2.0 * num / den;
    out.method = VolMethod::Exact;
    out.k = k;
    out.T = T;
    out.diagnostics["contour_re"] = c;
    out.diagnostics["upper"] = li.upper;
    out.diagnostics["evals"] = static_cast<double>(li.evals);
    out.diagnostics["rel_error"] =
        std::abs(li.error[0] / num) + std::abs(li.error[1] / den);
    if (cfg.check_symmetry) {
        out.diagnostics["imag_residual"] =
            std::max(std::abs(li.imag[0] / num), std::abs(li.imag[1] / den));
    }
    return out;
}

}  // namespace dupire
