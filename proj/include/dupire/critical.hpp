#pragma once

#include "dupire/models.hpp"

#include <optional>
#include <string_view>

namespace dupire {

enum class BlowupKind { Exponential, Algebraic, Bounded };

std::string_view blowup_name(BlowupKind kind);

// M(s,T) ~ c1 / (s_+ - s)^c2 as s -> s_+; c2_dot = dc2/dT.
struct AlgebraicBlowup {
    double c1 = 0.0;
    double c2 = 0.0;
    double c2_dot = 0.0;
};

struct CriticalReport {
    double T = 0.0;
    double s_plus = kInf;
    double s_minus = -kInf;
    BlowupKind kind = BlowupKind::Exponential;
    std::optional<AlgebraicBlowup> algebraic;  // VarianceGamma only
    std::optional<double> slope;               // Heston only
};

// Heston critical slope sigma(T) = -dT*/ds at s_+ together with the closed-form
// constants R1, R2.
struct CriticalSlope {
    double slope = 0.0;
    double r1 = 0.0;
    double r2 = 0.0;
};

// Moment explosion time T*(s) of the Heston model (closed form); +inf when the
// s-th moment exists for all times.
double explosion_time(const HestonParams& p, double s);
double explosion_time(const ModelSpec& model, double s);

// (s_-(T), s_+(T)) for Heston by bracketing and bisection on T*(s) = T. The
// returned ends lie inside the strip (T*(end) > T).
Strip heston_strip(const HestonParams& p, double T);

// Throws NoExplosionError for Heston when s_+ is infinite at T.
CriticalReport critical_moment(const ModelSpec& model, double T);

// Throws DegenerateSlopeError when R2 <= 0.
CriticalSlope heston_critical_slope(const ModelSpec& model, double T, double s_plus);

}  // namespace dupire
