#pragma once

#include "dupire/models.hpp"

#include <cmath>

namespace fx {

using dupire::ModelSpec;

inline dupire::HestonParams fig1_params(double rho = -0.7571) {
    return {0.0428937, -0.6067, 0.2928, rho, 1.0, 0.0654};
}

inline ModelSpec heston_fig1() { return ModelSpec(fig1_params()); }
inline ModelSpec kou_fig2() { return ModelSpec(dupire::KouParams{0.2, 10.0, 0.3, 50.0, 25.0}); }
inline ModelSpec vg_fig3() {
    return ModelSpec(dupire::VarianceGammaParams{0.261652, -0.218033, 0.0552584});
}
inline ModelSpec nig_sample() { return ModelSpec(dupire::NigParams{10.0, 0.0, 0.1}); }
inline ModelSpec bs(double v = 0.04) { return ModelSpec(dupire::BsTimeDepParams{{0.0}, {v}}); }

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Black-Scholes call at zero rates, spot 1, total variance w.
inline double bs_call(double K, double w) {
    const double sd = std::sqrt(w);
    const double d1 = (-std::log(K) + 0.5 * w) / sd;
    return norm_cdf(d1) - K * norm_cdf(d1 - sd);
}

inline double lognormal_pdf(double x, double w) {
    const double z = (std::log(x) + 0.5 * w) / std::sqrt(w);
    return std::exp(-0.5 * z * z) / (x * std::sqrt(2.0 * M_PI * w));
}

}  // namespace fx
