#include "dupire/critical.hpp"

#include "dupire/errors.hpp"

#include <cmath>
#include <numbers>

namespace dupire {

namespace {

constexpr double kBracketStart = 1e-6;
constexpr double kSearchBound = 1e12;

// Bisection for the boundary of {s : T*(s) > T} between `inside` and `outside`.
double bisect_boundary(const HestonParams& p, double T, double inside, double outside) {
    for (int i = 0; i < 400; ++i) {
        const double mid = 0.5 * (inside + outside);
        if (mid == inside || mid == outside) break;
        if (explosion_time(p, mid) > T) {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    return inside;
}

double strip_end(const HestonParams& p, double T, double direction) {
    // moments of order in [0, 1] always exist
    double inside = direction > 0.0 ? 1.0 : 0.0;
    double outside = inside + direction * kBracketStart;
    if (explosion_time(p, outside) > T) {
        inside = outside;
        double step = 1.0;
        outside = inside + direction * step;
        while (explosion_time(p, outside) > T) {
            inside = outside;
            step *= 2.0;
            outside = inside + direction * step;
            if (std::abs(outside) > kSearchBound) return direction * kInf;
        }
    }
    return bisect_boundary(p, T, inside, outside);
}

}  // namespace

std::string_view blowup_name(BlowupKind kind) {
    switch (kind) {
        case BlowupKind::Exponential: return "exponential";
        case BlowupKind::Algebraic: return "algebraic";
        case BlowupKind::Bounded: return "bounded";
    }
    return "unknown";
}

double explosion_time(const HestonParams& p, double s) {
    const double q = s * s - s;
    if (q <= 0.0) return kInf;  // s in [0, 1]
    const double kt = -p.b - s * p.rho * p.c;
    const double z = kt * kt - p.c * p.c * q;
    if (z >= 0.0) {
        if (kt >= 0.0) return kInf;
        const double d = std::sqrt(z);
        if (d == 0.0) return 2.0 / -kt;
        // (2/d) atanh(d/|kt|)
        return std::log((-kt + d) / (-kt - d)) / d;
    }
    const double w = std::sqrt(-z);
    return (std::numbers::pi + 2.0 * std::atan(kt / w)) / w;
}

double explosion_time(const ModelSpec& model, double s) {
    if (model.family() != Family::Heston) {
        throw ParameterError("explosion_time: only defined for the Heston model");
    }
    return explosion_time(model.as<HestonParams>(), s);
}

Strip heston_strip(const HestonParams& p, double T) {
    if (!(T > 0.0)) throw ParameterError("maturity T must be > 0");
    return {strip_end(p, T, -1.0), strip_end(p, T, 1.0)};
}

CriticalSlope heston_critical_slope(const ModelSpec& model, double T, double s_plus) {
    if (model.family() != Family::Heston) {
        throw ParameterError("heston_critical_slope: only defined for the Heston model");
    }
    if (!std::isfinite(s_plus) || !(s_plus > 1.0)) {
        throw ParameterError("heston_critical_slope: s_plus must be finite and > 1");
    }
    const auto& p = model.as<HestonParams>();
    const double c = p.c;
    const double c2 = c * c;
    const double s = s_plus;
    const double q = s * (s - 1.0);
    const double A = s * p.rho * c + p.b;
    const double P = c2 * (2.0 * s - 1.0) - 2.0 * p.rho * c * A;
    const double omega = c2 * q - A * A;

    CriticalSlope out;
    out.r1 = c2 * q * P - 2.0 * A * P + 4.0 * p.rho * c * omega;
    out.r2 = 2.0 * c2 * q * omega;
    if (!(out.r2 > 0.0)) {
        throw DegenerateSlopeError("heston_critical_slope: R2 <= 0, parameters outside "
                                   "the validity of the closed form");
    }
    // -dT*/ds from the closed-form explosion time; T enters the first term of
    // R1 only, so this equals T*R1/R2 exactly at T = 1.
    out.slope = (T * c2 * q * P - 2.0 * A * P + 4.0 * p.rho * c * omega) / out.r2;
    if (!(out.slope > 0.0)) {
        throw DegenerateSlopeError("heston_critical_slope: non-positive slope");
    }
    return out;
}

CriticalReport critical_moment(const ModelSpec& model, double T) {
    if (!(T > 0.0) || !std::isfinite(T)) throw ParameterError("maturity T must be > 0");
    CriticalReport r;
    r.T = T;
    const Strip strip = finiteness_strip(model, T);
    r.s_plus = strip.upper;
    r.s_minus = strip.lower;
    switch (model.family()) {
        case Family::Heston:
            if (!std::isfinite(r.s_plus)) {
                throw NoExplosionError("critical_moment: no moment explosion up to the search bound");
            }
            r.kind = BlowupKind::Exponential;
            try {
                r.slope = heston_critical_slope(model, T, r.s_plus).slope;
            } catch (const DegenerateSlopeError&) {
                r.slope.reset();
            }
            break;
        case Family::BsTimeDep:
        case Family::Kou:
            r.kind = BlowupKind::Exponential;
            break;
        case Family::VarianceGamma: {
            // 1 - theta nu s - sigma^2 nu s^2/2 = (sigma^2 nu/2)(s_+ - s)(s - s_-)
            const auto& p = model.as<VarianceGammaParams>();
            const double lead = 0.5 * p.sigma * p.sigma * p.nu * (r.s_plus - r.s_minus);
            AlgebraicBlowup alg;
            alg.c2 = T / p.nu;
            alg.c2_dot = 1.0 / p.nu;
            alg.c1 = std::pow(lead, -T / p.nu) * std::exp(model.drift() * T * r.s_plus);
            r.kind = BlowupKind::Algebraic;
            r.algebraic = alg;
            break;
        }
        case Family::Nig:
            r.kind = BlowupKind::Bounded;
            break;
    }
    return r;
}

}  // namespace dupire
