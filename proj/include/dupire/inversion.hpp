#pragma once

#include "dupire/models.hpp"
#include "dupire/saddle.hpp"

#include <cstddef>
#include <optional>

namespace dupire {

struct QuadratureConfig {
    // Re s of the vertical contour. Unset: the saddle point of the integrand
    // (clamped away from s = 0 and s = 1).
    std::optional<double> contour_re;
    // |Im s| cutoff; 0 extends panels until the tail is negligible.
    double truncation = 0.0;
    double rel_tol = 1e-9;
    // Relative to the integrand modulus where the contour crosses the real
    // axis, which is its maximum on the contour; scale free in the far wings.
    double abs_tol = 1e-12;
    std::size_t max_evals = 4'000'000;
    // Also integrate the lower half of the contour and report the imaginary
    // residual of the full integral.
    bool check_symmetry = false;
};

struct InversionResult {
    double value = 0.0;
    double error = 0.0;          // propagated quadrature error estimate
    double contour_re = 0.0;
    double upper = 0.0;          // |Im s| where integration stopped
    double imag_residual = 0.0;  // |Im| / |Re| of the full-line integral, if checked
    std::size_t evals = 0;
};

// Undiscounted call price E(S_T - K)^+ for strike K > 0. The contour must lie
// in (1, s_+). Throws ContourError otherwise, QuadratureError on failure.
InversionResult call_price(const ModelSpec& model, double K, double T,
                           const QuadratureConfig& cfg = {});

// Density of S_T at x > 0.
InversionResult density(const ModelSpec& model, double x, double T,
                        const QuadratureConfig& cfg = {});

// dC/dT at strike K. The integrand has no poles at s = 0, 1, so the default
// contour is the density one; an explicit contour_re must still lie in (1, s_+).
InversionResult dcall_dT(const ModelSpec& model, double K, double T,
                         const QuadratureConfig& cfg = {});

// Dupire local variance at log-strike k = log(K/S0) as a ratio of two contour
// integrals sharing one contour and one set of mgf evaluations.
VolEstimate local_vol_exact(const ModelSpec& model, double k, double T,
                            const QuadratureConfig& cfg = {});

// Contour abscissa used by default for the call-type integrals (call_price,
// dcall_dT) and the density-type ones (density, local_vol_exact).
double default_call_contour(const ModelSpec& model, double k, double T);
double default_density_contour(const ModelSpec& model, double k, double T);

}  // namespace dupire
