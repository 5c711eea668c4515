#pragma once

#include "dupire/models.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dupire {

// Heston Riccati system
//   phi' = a psi,  psi' = (s^2 - s)/2 + c^2 psi^2 / 2 + (b + s rho c) psi,
// with phi(0) = psi(0) = 0 and m(s, t) = phi + v0 psi.
struct RiccatiState {
    cplx phi;
    cplx psi;
    double t = 0.0;
};

inline constexpr double kBlowupThreshold = 1e8;

// (phi, psi) at time T by adaptive Dormand-Prince stepping with relative and
// absolute local error step_control. Throws BlowupEncountered when |psi|
// exceeds 1e8 first, IntegrationError when step control fails.
RiccatiState integrate_riccati(const ModelSpec& model, cplx s, double T,
                               double step_control = 1e-12);

// States at each time of `times` (ascending, >= 0).
std::vector<RiccatiState> riccati_path(const ModelSpec& model, cplx s,
                                       const std::vector<double>& times,
                                       double step_control = 1e-12);

// Blow-up time of psi(s, .) for real s from the ODE alone: integrate until
// psi passes 1e6 and 1e8 and extrapolate the 1/(T* - t) pole through both
// points. +inf when psi stays below 1e6 up to `horizon`.
struct NumericExplosion {
    double t_star = kInf;
    double t6 = 0.0, psi6 = 0.0;
    double t8 = 0.0, psi8 = 0.0;
};
NumericExplosion explosion_time_numeric(const ModelSpec& model, double s,
                                        double horizon = 1e3,
                                        double step_control = 1e-12);

struct WingBoundConstants {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
};

WingBoundConstants wing_bound_constants(const HestonParams& p, double xi_max, double T);

struct WingBoundViolation {
    double t = 0.0;
    std::string check;  // f_lower, g_upper, g_lower, g_nonneg
    double value = 0.0;
    double bound = 0.0;
};

// Checks, with psi = f + i g along s = xi + i y:
//   f_upper:  f <= -C1 y     (terminal time T only; see f_upper_from)
//   f_lower:  f >= -C3 y^2
//   g_upper:  g <= C2 y
//   g_lower:  g >= -C4 y^3
//   g_nonneg: g >= 0
// the last four at every grid time.
struct WingBoundReport {
    double xi = 0.0;
    double y = 0.0;
    double T = 0.0;
    double f = 0.0;  // at T
    double g = 0.0;  // at T
    WingBoundConstants bounds;
    double y0 = 0.0;
    bool below_y0 = false;  // outside the range where the bounds are claimed

    bool f_upper = false;
    bool f_lower = false;
    bool g_upper = false;
    bool g_lower = false;
    bool g_nonneg = false;
    // Earliest grid time from which f <= -C1 y holds up to T (NaN if never).
    double f_upper_from = 0.0;
    std::vector<WingBoundViolation> violations;

    bool all_pass() const { return f_upper && f_lower && g_upper && g_lower && g_nonneg; }
};

struct WingBoundOptions {
    std::vector<double> xi_values;  // default {1, (1 + xi_max)/2, xi_max}
    int time_steps = 100;           // grid t_j = T j / time_steps
    std::optional<double> y0;       // default: smallest admissible y of the grid
    double step_control = 1e-11;
};

// Smallest y in y_grid with y^2/2 > (xi_max^2 - xi_max)/2 and
// C3 c^2 y^2 > |b + rho c xi_max|; +inf if none.
double default_wing_y0(const HestonParams& p, double xi_max, const std::vector<double>& y_grid,
                       double T);

std::vector<WingBoundReport> verify_wing_bounds(const ModelSpec& model, double xi_max,
                                                const std::vector<double>& y_grid, double T,
                                                const WingBoundOptions& opt = {});

}  // namespace dupire
