#include "dupire/saddle.hpp"

#include "dupire/critical.hpp"
#include "dupire/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>

namespace dupire {

namespace {

struct RootResult {
    double s = 0.0;
    double residual = 0.0;
    int iterations = 0;
};

double saddle_tolerance(double k) { return 1e-10 * std::max(1.0, std::abs(k)); }

// dm_ds(s) - k, with NaN mapped to "beyond the endpoint".
double excess(const ModelSpec& model, double s, double T, double k) {
    return detail::mgf_log_unchecked(model, s, T).dm_ds.real() - k;
}

// Safeguarded Newton on a scalar parameter v with s = to_s(v). h(v) is the
// oriented residual: h(v_neg) < 0 < h(v_pos). dh_dv(v, s) may return NaN.
template <class ToS, class H, class DH>
RootResult bracketed_newton(double v_neg, double v_pos, std::optional<double> v0, ToS to_s, H h,
                            DH dh_dv, double tol) {
    double v = v0.value_or(0.5 * (v_neg + v_pos));
    if (!(std::min(v_neg, v_pos) < v && v < std::max(v_neg, v_pos))) v = 0.5 * (v_neg + v_pos);
    double best_s = to_s(v_neg);
    double best_r = std::abs(h(v_neg));
    for (int it = 1; it <= 400; ++it) {
        const double hv = h(v);
        const double s = to_s(v);
        if (std::isfinite(hv) && std::abs(hv) < best_r) {
            best_r = std::abs(hv);
            best_s = s;
        }
        if (std::isfinite(hv) && std::abs(hv) <= tol) return {s, std::abs(hv), it};
        if (!(hv < 0.0)) {
            v_pos = v;
        } else {
            v_neg = v;
        }
        const double s_a = to_s(v_neg);
        const double s_b = to_s(v_pos);
        if (std::abs(s_a - s_b) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                         std::max(1.0, std::abs(s_a))) {
            return {best_s, best_r, it};
        }
        double next = std::nan("");
        if (std::isfinite(hv)) {
            const double slope = dh_dv(v, s);
            if (std::isfinite(slope) && slope != 0.0) next = v - hv / slope;
        }
        const double lo = std::min(v_neg, v_pos);
        const double hi = std::max(v_neg, v_pos);
        if (!(lo < next && next < hi)) next = 0.5 * (lo + hi);
        if (next == v) next = 0.5 * (lo + hi);
        v = next;
    }
    return {best_s, best_r, 400};
}

// Root of dm_ds = k between s_start (where the residual has the sign -dir) and
// `end` in direction dir; u_guess is a distance-to-end hint.
std::optional<RootResult> solve_toward(const ModelSpec& model, double k, double T, double s_start,
                                       double end, double dir, std::optional<double> u_guess) {
    const double tol = saddle_tolerance(k);
    auto oriented = [&](double s) {
        const double e = dir * excess(model, s, T, k);
        return std::isnan(e) ? kInf : e;
    };
    if (std::isfinite(end)) {
        // s = end - dir * exp(v): v -> -inf approaches the endpoint.
        auto to_s = [&](double v) { return end - dir * std::exp(v); };
        auto h = [&](double v) { return oriented(to_s(v)); };
        auto dh = [&](double v, double s) { return -mgf_curvature(model, s, T) * std::exp(v); };
        const double v_neg0 = std::log(std::abs(end - s_start));
        double v_neg = v_neg0;
        double u = u_guess && *u_guess > 0.0 && *u_guess < std::abs(end - s_start)
                       ? *u_guess
                       : 0.5 * std::abs(end - s_start);
        double v_pos = std::log(u);
        while (!(h(v_pos) > 0.0)) {
            v_neg = v_pos;
            u *= 0.25;
            if (u < 1e-280 * std::max(1.0, std::abs(end))) return std::nullopt;
            v_pos = std::log(u);
        }
        std::optional<double> start;
        if (u_guess && *u_guess > 0.0) {
            const double vg = std::log(*u_guess);
            if (std::min(v_neg, v_pos) < vg && vg < std::max(v_neg, v_pos)) start = vg;
        }
        return bracketed_newton(v_neg, v_pos, start, to_s, h, dh, tol);
    }
    // Unbounded side: s = s_start + dir * x with doubling.
    auto to_s = [&](double x) { return s_start + dir * x; };
    auto h = [&](double x) { return oriented(to_s(x)); };
    auto dh = [&](double, double s) { return mgf_curvature(model, s, T); };
    double x_neg = 0.0;
    double x_pos = 1.0;
    while (!(h(x_pos) > 0.0)) {
        x_neg = x_pos;
        x_pos *= 2.0;
        if (x_pos > 1e300) return std::nullopt;
    }
    return bracketed_newton(x_neg, x_pos, std::nullopt, to_s, h, dh, tol);
}

// Leading-order distance of the saddle to s_+ for models with a known law.
std::optional<double> right_wing_guess(const ModelSpec& model, double k, double T, double s_plus) {
    if (!(k > 0.0)) return std::nullopt;
    switch (model.family()) {
        case Family::Heston: {
            try {
                const auto& p = model.as<HestonParams>();
                const double sigma = heston_critical_slope(model, T, s_plus).slope;
                const double beta = std::sqrt(2.0 * p.v0) / (p.c * std::sqrt(sigma));
                return beta / std::sqrt(k);
            } catch (const Error&) {
                return std::nullopt;
            }
        }
        case Family::Kou: {
            const auto& p = model.as<KouParams>();
            return std::sqrt(p.lambda * p.lambda_plus * p.p * T / k);
        }
        case Family::VarianceGamma: return T / (model.as<VarianceGammaParams>().nu * k);
        default: return std::nullopt;
    }
}

std::string wing_label(Wing w) {
    switch (w) {
        case Wing::Right: return "right";
        case Wing::Left: return "left";
        case Wing::Central: return "central";
    }
    return "?";
}

void require_family(const ModelSpec& model, Family f, const char* op) {
    if (model.family() != f) {
        throw ParameterError(std::string(op) + ": requires the " +
                             std::string(family_name(f)) + " model");
    }
}

}  // namespace

std::string_view method_name(VolMethod m) {
    switch (m) {
        case VolMethod::Exact: return "exact";
        case VolMethod::Saddle: return "saddle";
        case VolMethod::Asymptote: return "asymptote";
    }
    return "unknown";
}

SaddleSolution solve_saddle(const ModelSpec& model, double k, double T, Wing wing) {
    if (model.family() == Family::Nig) {
        throw NoBlowupError("solve_saddle: the NIG mgf stays bounded at s_+; use nig_limit");
    }
    const Strip strip = finiteness_strip(model, T);
    std::optional<RootResult> root;
    if (wing == Wing::Right) {
        const double lo = 1.0 + kWingMargin;
        if (!(excess(model, lo, T, k) < 0.0)) {
            throw KTooSmallError("solve_saddle: k = " + std::to_string(k) +
                                 " is below the right-wing threshold dm_ds(1 + 1e-4)");
        }
        root = solve_toward(model, k, T, lo, strip.upper, 1.0,
                            right_wing_guess(model, k, T, strip.upper));
    } else if (wing == Wing::Left) {
        const double hi = -kWingMargin;
        if (!(excess(model, hi, T, k) > 0.0)) {
            throw KTooSmallError("solve_saddle: k = " + std::to_string(k) +
                                 " is above the left-wing threshold dm_ds(-1e-4)");
        }
        root = solve_toward(model, k, T, hi, strip.lower, -1.0, std::nullopt);
    } else {
        const double lo = kWingMargin;
        const double hi = 1.0 - kWingMargin;
        if (!(excess(model, lo, T, k) < 0.0) || !(excess(model, hi, T, k) > 0.0)) {
            throw KTooSmallError("solve_saddle: k outside the central zone");
        }
        root = solve_toward(model, k, T, lo, hi, 1.0, std::nullopt);
    }
    if (!root) {
        throw DomainError("solve_saddle: could not bracket the saddle point on the " +
                          wing_label(wing) + " wing");
    }
    return {root->s, wing, root->residual, root->iterations};
}

double strip_saddle(const ModelSpec& model, double k, double T, const Strip& strip) {
    const double mid = 0.5;
    const double e = excess(model, mid, T, k);
    if (e == 0.0) return mid;
    const double dir = e < 0.0 ? 1.0 : -1.0;
    const double end = dir > 0.0 ? strip.upper : strip.lower;
    std::optional<double> guess;
    if (dir > 0.0 && std::isfinite(end)) guess = right_wing_guess(model, k, T, end);
    const auto root = solve_toward(model, k, T, mid, end, dir, guess);
    if (root) return root->s;
    return end - dir * 0.01 * std::abs(end - mid);
}

VolEstimate local_vol_saddle(const ModelSpec& model, double k, double T) {
    if (model.family() == Family::Nig) {
        throw NoBlowupError("local_vol_saddle: no blow-up at the critical moment for NIG; "
                            "use nig_limit");
    }
    Wing wing = Wing::Central;
    if (excess(model, 1.0 + kWingMargin, T, k) < 0.0) {
        wing = Wing::Right;
    } else if (excess(model, -kWingMargin, T, k) > 0.0) {
        wing = Wing::Left;
    }
    const SaddleSolution sol = solve_saddle(model, k, T, wing);
    const double s = sol.s_hat;
    const MgfValue v = mgf_log(model, s, T);
    VolEstimate out;
    out.sigma_loc_sq = 2.0 * v.dm_dT.real() / (s * (s - 1.0));
    out.method = VolMethod::Saddle;
    out.k = k;
    out.T = T;
    out.diagnostics["s_hat"] = s;
    out.diagnostics["residual"] = sol.residual;
    out.diagnostics["iterations"] = sol.iterations;
    out.diagnostics["wing"] = static_cast<double>(static_cast<int>(wing));
    if (model.family() == Family::Heston && wing == Wing::Right) {
        const auto& p = model.as<HestonParams>();
        const Strip strip = finiteness_strip(model, T);
        try {
            const double sigma = heston_critical_slope(model, T, strip.upper).slope;
            out.diagnostics["beta"] = std::sqrt(2.0 * p.v0) / (p.c * std::sqrt(sigma));
        } catch (const DegenerateSlopeError&) {
        }
    }
    if (out.sigma_loc_sq < 0.0) {
        throw DomainError("local_vol_saddle: negative estimate at k = " + std::to_string(k));
    }
    return out;
}

VolEstimate heston_asymptote(const ModelSpec& model, double T, double k) {
    require_family(model, Family::Heston, "heston_asymptote");
    const CriticalReport cr = critical_moment(model, T);
    const CriticalSlope slope = heston_critical_slope(model, T, cr.s_plus);
    const double sp = cr.s_plus;
    const double coeff = 2.0 / (slope.slope * sp * (sp - 1.0));
    VolEstimate out;
    out.sigma_loc_sq = coeff * k;
    out.method = VolMethod::Asymptote;
    out.k = k;
    out.T = T;
    out.diagnostics["slope_coefficient"] = coeff;
    out.diagnostics["critical_slope"] = slope.slope;
    out.diagnostics["R1"] = slope.r1;
    out.diagnostics["R2"] = slope.r2;
    out.diagnostics["s_plus"] = sp;
    return out;
}

VolEstimate kou_asymptote(const ModelSpec& model, double T, double k) {
    require_family(model, Family::Kou, "kou_asymptote");
    if (!(T > 0.0)) throw ParameterError("kou_asymptote: T must be > 0");
    const auto& p = model.as<KouParams>();
    VolEstimate out;
    const double coeff = 2.0 * std::sqrt(p.lambda * p.p) /
                         (std::sqrt(p.lambda_plus * T) * (p.lambda_plus - 1.0));
    out.sigma_loc_sq = coeff * std::sqrt(std::max(k, 0.0));
    out.method = VolMethod::Asymptote;
    out.k = k;
    out.T = T;
    out.diagnostics["sqrt_k_coefficient"] = coeff;
    return out;
}

VolEstimate karamata_asymptote(double c1, double c2, double c2_dot, double s_plus, double k) {
    if (!(c1 > 0.0) || !(c2 > 0.0)) {
        throw ParameterError("karamata_asymptote: c1 and c2 must be > 0");
    }
    if (!(s_plus > 1.0) || !std::isfinite(s_plus)) {
        throw ParameterError("karamata_asymptote: s_plus must be finite and > 1");
    }
    if (!(k > std::exp(1.0))) throw DomainError("karamata_asymptote: requires k > e");
    VolEstimate out;
    out.sigma_loc_sq = 2.0 * c2_dot * std::log(k) / (s_plus * (s_plus - 1.0));
    out.method = VolMethod::Asymptote;
    out.k = k;
    out.diagnostics["c1"] = c1;
    out.diagnostics["c2"] = c2;
    return out;
}

VolEstimate vg_asymptote(const ModelSpec& model, double T, double k) {
    require_family(model, Family::VarianceGamma, "vg_asymptote");
    const auto& p = model.as<VarianceGammaParams>();
    if (!(T > 0.5 * p.nu)) {
        throw SmallMaturityError("vg_asymptote: requires T > nu/2 for a density to exist");
    }
    if (!(k / T > 1.0)) throw DomainError("vg_asymptote: requires k/T > 1");
    const double sp = finiteness_strip(model, T).upper;
    VolEstimate out;
    out.sigma_loc_sq = 2.0 * std::log(k / T) / (p.nu * sp * (sp - 1.0));
    out.method = VolMethod::Asymptote;
    out.k = k;
    out.T = T;
    out.diagnostics["s_plus"] = sp;
    return out;
}

VolEstimate nig_limit(const ModelSpec& model, double T) {
    require_family(model, Family::Nig, "nig_limit");
    if (!(T > 0.0)) throw ParameterError("nig_limit: T must be > 0");
    const auto& p = model.as<NigParams>();
    const double sp = p.alpha - p.beta;
    if (!(sp > 1.0)) throw ParameterError("nig_limit: requires s_+ = alpha - beta > 1");
    if (p.beta < 0.0) throw ParameterError("nig_limit: requires beta >= 0");
    const double gamma = std::sqrt(p.alpha * p.alpha - p.beta * p.beta);
    VolEstimate out;
    out.sigma_loc_sq = 2.0 * (1.0 + p.delta * T * gamma) / (sp * (sp - 1.0));
    out.method = VolMethod::Asymptote;
    out.T = T;
    out.diagnostics["low_confidence"] = 1.0;
    out.diagnostics["s_plus"] = sp;
    // Limit of the exact Dupire ratio for the drift-normalized model,
    // 2 (1 + T kappa(s_+)) / (T s_+ (s_+ - 1)); equal to the value above when
    // T = 1 and the drift vanishes.
    const double kappa_plus = detail::levy_exponent(model, sp).kappa.real();
    out.diagnostics["drift_corrected"] = 2.0 * (1.0 + T * kappa_plus) / (T * sp * (sp - 1.0));
    return out;
}

VolEstimate model_asymptote(const ModelSpec& model, double T, double k) {
    VolEstimate out;
    switch (model.family()) {
        case Family::Heston: return heston_asymptote(model, T, k);
        case Family::Kou: return kou_asymptote(model, T, k);
        case Family::VarianceGamma: return vg_asymptote(model, T, k);
        case Family::Nig: out = nig_limit(model, T); break;
        case Family::BsTimeDep:
            out.sigma_loc_sq = variance_at(model.as<BsTimeDepParams>(), T);
            out.method = VolMethod::Asymptote;
            out.T = T;
            break;
    }
    out.k = k;
    return out;
}

}  // namespace dupire
