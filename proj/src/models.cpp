#include "dupire/models.hpp"

#include "dupire/critical.hpp"
#include "dupire/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace dupire {

namespace {

using std::numbers::pi;

void require(bool ok, const char* msg) {
    if (!ok) throw ParameterError(msg);
}

void validate(const HestonParams& p) {
    require(std::isfinite(p.a) && p.a >= 0.0, "heston: a must be >= 0");
    require(std::isfinite(p.b) && p.b <= 0.0, "heston: b must be <= 0");
    require(std::isfinite(p.c) && p.c > 0.0, "heston: c must be > 0");
    require(p.rho > -1.0 && p.rho <= 0.0, "heston: rho must lie in (-1, 0]");
    require(std::isfinite(p.s0) && p.s0 > 0.0, "heston: s0 must be > 0");
    require(std::isfinite(p.v0) && p.v0 > 0.0, "heston: v0 must be > 0");
}

void validate(const BsTimeDepParams& p) {
    require(!p.variances.empty(), "bs: at least one variance piece is required");
    require(p.start_times.size() == p.variances.size(),
            "bs: start_times and variances must have equal length");
    require(p.start_times.front() == 0.0, "bs: first start time must be 0");
    for (std::size_t i = 0; i < p.variances.size(); ++i) {
        require(std::isfinite(p.variances[i]) && p.variances[i] > 0.0,
                "bs: variances must be > 0");
        if (i > 0) {
            require(p.start_times[i] > p.start_times[i - 1],
                    "bs: start times must be strictly increasing");
        }
    }
}

void validate(const KouParams& p) {
    require(std::isfinite(p.sigma) && p.sigma >= 0.0, "kou: sigma must be >= 0");
    require(std::isfinite(p.lambda) && p.lambda > 0.0, "kou: lambda must be > 0");
    require(p.p > 0.0 && p.p < 1.0, "kou: p must lie in (0, 1)");
    require(std::isfinite(p.lambda_plus) && p.lambda_plus > 1.0,
            "kou: lambda_plus must be > 1");
    require(std::isfinite(p.lambda_minus) && p.lambda_minus > 0.0,
            "kou: lambda_minus must be > 0");
}

// Roots of 1 - theta nu s - sigma^2 nu s^2 / 2.
Strip vg_roots(const VarianceGammaParams& p) {
    const double a = p.nu * p.sigma * p.sigma;
    const double disc = std::sqrt(2.0 * a + p.nu * p.nu * p.theta * p.theta);
    return {(-p.nu * p.theta - disc) / a, (disc - p.nu * p.theta) / a};
}

void validate(const VarianceGammaParams& p) {
    require(std::isfinite(p.sigma) && p.sigma > 0.0, "vargamma: sigma must be > 0");
    require(std::isfinite(p.theta), "vargamma: theta must be finite");
    require(std::isfinite(p.nu) && p.nu > 0.0, "vargamma: nu must be > 0");
    require(vg_roots(p).upper > 1.0,
            "vargamma: critical moment must exceed 1 (no finite forward otherwise)");
}

void validate(const NigParams& p) {
    require(std::isfinite(p.alpha) && p.alpha > 0.0, "nig: alpha must be > 0");
    require(std::isfinite(p.beta) && std::abs(p.beta) < p.alpha, "nig: |beta| must be < alpha");
    require(std::isfinite(p.delta) && p.delta > 0.0, "nig: delta must be > 0");
    require(p.alpha - p.beta > 1.0, "nig: s_+ = alpha - beta must exceed 1");
}

// Levy exponents without the martingale drift.
detail::LevyExponent kou_raw(const KouParams& p, cplx s) {
    const cplx up = p.lambda_plus - s;
    const cplx dn = p.lambda_minus + s;
    const double s2 = p.sigma * p.sigma;
    const cplx kappa = 0.5 * s2 * s * s +
                       p.lambda * (p.p * p.lambda_plus / up +
                                   (1.0 - p.p) * p.lambda_minus / dn - 1.0);
    const cplx dkappa = s2 * s + p.lambda * (p.p * p.lambda_plus / (up * up) -
                                             (1.0 - p.p) * p.lambda_minus / (dn * dn));
    return {kappa, dkappa};
}

detail::LevyExponent vg_raw(const VarianceGammaParams& p, cplx s) {
    // 1 - theta nu s - sigma^2 nu s^2/2 = (sigma^2 nu/2)(s_+ - s)(s - s_-); the
    // factored logarithm is continuous on the whole strip.
    const Strip r = vg_roots(p);
    const cplx up = r.upper - s;
    const cplx dn = s - r.lower;
    const double lead = 0.5 * p.sigma * p.sigma * p.nu;
    const cplx log_q = std::log(lead) + std::log(up) + std::log(dn);
    return {-log_q / p.nu, (1.0 / up - 1.0 / dn) / p.nu};
}

detail::LevyExponent nig_raw(const NigParams& p, cplx s) {
    const double gamma = std::sqrt(p.alpha * p.alpha - p.beta * p.beta);
    const cplx root = std::sqrt(cplx(p.alpha - p.beta) - s) * std::sqrt(s + (p.alpha + p.beta));
    return {p.delta * (gamma - root), p.delta * (p.beta + s) / root};
}

// ---------------------------------------------------------------------------
// Heston: closed-form solution of the Riccati system.
//
// With q = s^2 - s, kt = -(b + s rho c), z = kt^2 - c^2 q and
// C = cosh(t sqrt(z)/2), S = sinh(t sqrt(z)/2)/sqrt(z), W = C + kt S,
//   psi = q S / W,   phi = (a/c^2) (kt t - 2 log W).
// Both are entire in z, so the branch of sqrt(z) is irrelevant; only log W
// needs a continuous branch along t.

struct HestonTerms {
    cplx psi, phi, dpsi_ds, dphi_ds;
};

// Scaled hyperbolic pieces at time t: hat quantities are multiplied by
// exp(-t sqrt(z)/2) when |t sqrt(z)| is large (keeps them bounded).
struct Hyperbolic {
    cplx c, s, dc_dz, ds_dz;
    cplx log_scale;  // log of the factor removed
};

Hyperbolic hyperbolic(cplx z, cplx d, double t) {
    const cplx x = d * t;
    if (std::abs(x) < 2.0) {
        const double tau = 0.5 * t;
        const cplx w = z * tau * tau;
        cplx c_sum = 0.0, s_sum = 0.0, ds_sum = 0.0;
        cplx wn = 1.0;  // w^n
        cplx wn1 = 0.0;  // w^(n-1)
        double fact_even = 1.0;  // (2n)!
        double fact_odd = 1.0;   // (2n+1)!
        for (int n = 0; n < 24; ++n) {
            if (n > 0) {
                fact_even *= (2.0 * n - 1.0) * (2.0 * n);
                fact_odd *= (2.0 * n) * (2.0 * n + 1.0);
            }
            c_sum += wn / fact_even;
            s_sum += wn / fact_odd;
            if (n > 0) ds_sum += static_cast<double>(n) * wn1 / fact_odd;
            wn1 = wn;
            wn *= w;
        }
        const cplx s = tau * s_sum;
        return {c_sum, s, 0.25 * t * s, tau * tau * tau * ds_sum, 0.0};
    }
    if (z.real() < 0.0 && std::abs(z.imag()) <= 1e-6 * std::abs(z)) {
        // Near the negative real axis: trigonometric form, real-analytic in z.
        const cplx w = std::sqrt(-z);
        const cplx ch = std::cos(0.5 * t * w);
        const cplx sh = std::sin(0.5 * t * w) / w;
        return {ch, sh, 0.25 * t * sh, (0.5 * t * ch - sh) / (2.0 * z), 0.0};
    }
    const cplx e = std::exp(-x);
    const cplx ch = 0.5 * (1.0 + e);
    const cplx sh = 0.5 * (1.0 - e) / d;
    return {ch, sh, 0.25 * t * sh, (0.5 * t * ch - sh) / (2.0 * z), 0.5 * x};
}

// W(t') * exp(-d t'/2), used only for branch tracking.
cplx w_hat(cplx kt, cplx z, cplx d, double t) {
    const Hyperbolic h = hyperbolic(z, d, t);
    cplx w = h.c + kt * h.s;
    if (h.log_scale == 0.0) w *= std::exp(-0.5 * d * t);
    return w;
}

// Continuous argument of t' -> w_hat(t') on [0, t], starting from arg 0.
double tracked_arg(cplx kt, cplx z, cplx d, double t) {
    for (int n = 8; n <= (1 << 16); n *= 2) {
        double total = 0.0;
        cplx prev = 1.0;
        bool ok = true;
        for (int j = 1; j <= n; ++j) {
            const cplx cur = w_hat(kt, z, d, t * static_cast<double>(j) / n);
            const double step = std::arg(cur / prev);
            if (std::abs(step) > 0.5 * pi) {
                ok = false;
                break;
            }
            total += step;
            prev = cur;
        }
        if (ok) return total;
    }
    throw DomainError("heston: could not track the logarithm branch (W vanishes on the path)");
}

HestonTerms heston_terms(const HestonParams& p, cplx s, double t) {
    const double c2 = p.c * p.c;
    const cplx q = s * s - s;
    const cplx dq = 2.0 * s - 1.0;
    const cplx kt = -p.b - s * (p.rho * p.c);
    const double dkt = -p.rho * p.c;
    const cplx z = kt * kt - c2 * q;
    const cplx dz = 2.0 * kt * dkt - c2 * dq;
    const cplx d = std::sqrt(z);

    const Hyperbolic h = hyperbolic(z, d, t);
    const cplx w = h.c + kt * h.s;
    const cplx dw = dkt * h.s + (kt * h.ds_dz + h.dc_dz) * dz;

    cplx log_w;
    if (std::abs(s.imag()) <= 1e-8 * (1.0 + std::abs(s.real()))) {
        // (Nearly) real argument: W is real and positive before explosion; the
        // principal logarithm keeps complex-step perturbations analytic.
        log_w = w.real() > 0.0 ? h.log_scale + std::log(w) : cplx(std::nan(""), 0.0);
    } else if (h.log_scale != 0.0 && std::abs(kt - d) < std::abs(kt + d)) {
        // |g| < 1 with g = (kt - d)/(kt + d): w_hat = (1 - g e^{-x})/(1 - g) and
        // both factors stay in the right half plane for all t'.
        const cplx g = (kt - d) / (kt + d);
        log_w = h.log_scale + std::log(1.0 - g * std::exp(-d * t)) - std::log(1.0 - g);
    } else {
        const cplx wh = w_hat(kt, z, d, t);
        log_w = 0.5 * d * t + cplx(std::log(std::abs(wh)), tracked_arg(kt, z, d, t));
    }

    HestonTerms out;
    out.psi = q * h.s / w;
    out.dpsi_ds = (dq * h.s + q * h.ds_dz * dz) / w - q * h.s * dw / (w * w);
    out.phi = (p.a / c2) * (kt * t - 2.0 * log_w);
    out.dphi_ds = (p.a / c2) * (dkt * t - 2.0 * dw / w);
    return out;
}

MgfValue heston_mgf(const HestonParams& p, cplx s, double T) {
    const HestonTerms h = heston_terms(p, s, T);
    const cplx kt = -p.b - s * (p.rho * p.c);
    const cplx psi_dot = 0.5 * (s * s - s) + 0.5 * p.c * p.c * h.psi * h.psi - kt * h.psi;
    return {h.phi + p.v0 * h.psi, h.dphi_ds + p.v0 * h.dpsi_ds, p.a * h.psi + p.v0 * psi_dot};
}

void check_time(double T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ParameterError("maturity T must be > 0");
}

}  // namespace

std::string_view family_name(Family f) {
    switch (f) {
        case Family::Heston: return "heston";
        case Family::BsTimeDep: return "bs";
        case Family::Kou: return "kou";
        case Family::VarianceGamma: return "vargamma";
        case Family::Nig: return "nig";
    }
    return "unknown";
}

ModelSpec::ModelSpec(Params params) : params_(std::move(params)) {
    std::visit([](const auto& p) { validate(p); }, params_);
    if (const auto* k = std::get_if<KouParams>(&params_)) {
        drift_ = -kou_raw(*k, 1.0).kappa.real();
    } else if (const auto* v = std::get_if<VarianceGammaParams>(&params_)) {
        drift_ = -vg_raw(*v, 1.0).kappa.real();
    } else if (const auto* n = std::get_if<NigParams>(&params_)) {
        drift_ = -nig_raw(*n, 1.0).kappa.real();
    }
}

Family ModelSpec::family() const noexcept {
    return static_cast<Family>(params_.index());
}

double ModelSpec::spot() const noexcept {
    if (const auto* h = std::get_if<HestonParams>(&params_)) return h->s0;
    return 1.0;
}

bool ModelSpec::is_levy() const noexcept {
    const Family f = family();
    return f == Family::Kou || f == Family::VarianceGamma || f == Family::Nig;
}

double integrated_variance(const BsTimeDepParams& p, double T) {
    double total = 0.0;
    for (std::size_t i = 0; i < p.variances.size(); ++i) {
        const double lo = p.start_times[i];
        if (lo >= T) break;
        const double hi = i + 1 < p.variances.size() ? std::min(p.start_times[i + 1], T) : T;
        total += p.variances[i] * (hi - lo);
    }
    return total;
}

double variance_at(const BsTimeDepParams& p, double T) {
    // Right-continuous: at a knot the new piece applies.
    const auto it = std::upper_bound(p.start_times.begin(), p.start_times.end(), T);
    const auto idx = static_cast<std::size_t>(std::distance(p.start_times.begin(), it));
    return p.variances[idx == 0 ? 0 : idx - 1];
}

namespace detail {

LevyExponent levy_exponent(const ModelSpec& model, cplx s) {
    LevyExponent e;
    switch (model.family()) {
        case Family::Kou: e = kou_raw(model.as<KouParams>(), s); break;
        case Family::VarianceGamma: e = vg_raw(model.as<VarianceGammaParams>(), s); break;
        case Family::Nig: e = nig_raw(model.as<NigParams>(), s); break;
        default: throw ParameterError("levy_exponent: not a Levy model");
    }
    e.kappa += model.drift() * s;
    e.dkappa += model.drift();
    return e;
}

MgfValue mgf_log_unchecked(const ModelSpec& model, cplx s, double T) {
    switch (model.family()) {
        case Family::Heston: return heston_mgf(model.as<HestonParams>(), s, T);
        case Family::BsTimeDep: {
            const auto& p = model.as<BsTimeDepParams>();
            const double w = integrated_variance(p, T);
            const cplx q = s * (s - 1.0);
            return {0.5 * q * w, (s - 0.5) * w, 0.5 * q * variance_at(p, T)};
        }
        default: {
            const LevyExponent e = levy_exponent(model, s);
            return {T * e.kappa, T * e.dkappa, e.kappa};
        }
    }
}

}  // namespace detail

Strip finiteness_strip(const ModelSpec& model, double T) {
    check_time(T);
    switch (model.family()) {
        case Family::Heston: return heston_strip(model.as<HestonParams>(), T);
        case Family::BsTimeDep: return {};
        case Family::Kou: {
            const auto& p = model.as<KouParams>();
            return {-p.lambda_minus, p.lambda_plus};
        }
        case Family::VarianceGamma: return vg_roots(model.as<VarianceGammaParams>());
        case Family::Nig: {
            const auto& p = model.as<NigParams>();
            return {-p.alpha - p.beta, p.alpha - p.beta};
        }
    }
    return {};
}

MgfValue mgf_log(const ModelSpec& model, cplx s, double T) {
    check_time(T);
    bool inside = false;
    if (model.family() == Family::Heston) {
        // The strip is {s : T*(s) > T}; avoids a root search per call.
        inside = explosion_time(model, s.real()) > T;
    } else {
        inside = finiteness_strip(model, T).contains(s.real());
    }
    if (!inside) {
        throw DomainError("mgf_log: Re(s) = " + std::to_string(s.real()) +
                          " is outside the finiteness strip");
    }
    return detail::mgf_log_unchecked(model, s, T);
}

MgfValue mgf_log_complex_step(const ModelSpec& model, double s, double T) {
    constexpr double h = 1e-20;
    const MgfValue base = mgf_log(model, s, T);
    const MgfValue stepped = mgf_log(model, cplx(s, h), T);
    const double dT = 1e-5 * std::max(T, 1.0);
    const double t_lo = std::max(T - dT, 0.5 * T);
    const double t_hi = T + dT;
    const double m_hi = mgf_log(model, s, t_hi).m.real();
    const double m_lo = mgf_log(model, s, t_lo).m.real();
    return {base.m, stepped.m.imag() / h, (m_hi - m_lo) / (t_hi - t_lo)};
}

double mgf_curvature(const ModelSpec& model, double s, double T) {
    constexpr double h = 1e-20;
    return detail::mgf_log_unchecked(model, cplx(s, h), T).dm_ds.imag() / h;
}

}  // namespace dupire
