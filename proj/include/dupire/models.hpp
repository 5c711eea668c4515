#pragma once

#include <complex>
#include <limits>
#include <string_view>
#include <variant>
#include <vector>

namespace dupire {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Heston: dS = S sqrt(V) dW, dV = (a + bV) dt + c sqrt(V) dZ, d<W,Z> = rho dt.
struct HestonParams {
    double a = 0.0;    // rate level, >= 0
    double b = 0.0;    // mean reversion, <= 0
    double c = 0.0;    // vol of vol, > 0
    double rho = 0.0;  // correlation, in (-1, 0]
    double s0 = 1.0;   // spot
    double v0 = 0.0;   // initial variance
};

// Black-Scholes with piecewise-constant variance: v(t) = variances[i] on
// [start_times[i], start_times[i+1]), last piece extends to infinity.
struct BsTimeDepParams {
    std::vector<double> start_times{0.0};
    std::vector<double> variances{0.04};
};

// Double exponential (Kou) jump diffusion.
struct KouParams {
    double sigma = 0.0;
    double lambda = 0.0;
    double p = 0.5;
    double lambda_plus = 0.0;
    double lambda_minus = 0.0;
};

struct VarianceGammaParams {
    double sigma = 0.0;
    double theta = 0.0;
    double nu = 0.0;
};

struct NigParams {
    double alpha = 0.0;
    double beta = 0.0;
    double delta = 0.0;
};

enum class Family { Heston, BsTimeDep, Kou, VarianceGamma, Nig };

std::string_view family_name(Family f);

// Validated model. Levy families are drift-normalized on construction so that
// m(0,T) = m(1,T) = 0 (forward measure, spot normalized to one).
class ModelSpec {
public:
    using Params = std::variant<HestonParams, BsTimeDepParams, KouParams,
                                VarianceGammaParams, NigParams>;

    explicit ModelSpec(Params params);

    const Params& params() const noexcept { return params_; }
    Family family() const noexcept;

    template <class P>
    const P& as() const { return std::get<P>(params_); }

    // Martingale drift per unit time added to the Levy exponent (0 otherwise).
    double drift() const noexcept { return drift_; }
    double spot() const noexcept;

    bool is_levy() const noexcept;

private:
    Params params_;
    double drift_ = 0.0;
};

struct MgfValue {
    cplx m;
    cplx dm_ds;
    cplx dm_dT;
};

struct Strip {
    double lower = -kInf;
    double upper = kInf;

    bool contains(double x) const noexcept { return lower < x && x < upper; }
};

// log E exp(s X_T) with both partials. Throws DomainError when Re(s) is not
// strictly inside the finiteness strip at T.
MgfValue mgf_log(const ModelSpec& model, cplx s, double T);

// Finiteness strip (s_-(T), s_+(T)); infinite ends for Black-Scholes.
Strip finiteness_strip(const ModelSpec& model, double T);

// Integrated variance of the Black-Scholes model over [0, T].
double integrated_variance(const BsTimeDepParams& p, double T);
double variance_at(const BsTimeDepParams& p, double T);

// Cross-check route: dm_ds by complex-step differentiation of m at real s
// (step 1e-20), dm_dT by central differences in T.
MgfValue mgf_log_complex_step(const ModelSpec& model, double s, double T);

// d^2 m / ds^2 at real s, by complex step on the analytic dm_ds.
double mgf_curvature(const ModelSpec& model, double s, double T);

namespace detail {

// Same as mgf_log without the strip check; callers must have validated Re(s).
MgfValue mgf_log_unchecked(const ModelSpec& model, cplx s, double T);

// Levy exponent kappa(s) = m(s,1) (drift included) and its derivative.
struct LevyExponent {
    cplx kappa;
    cplx dkappa;
};
LevyExponent levy_exponent(const ModelSpec& model, cplx s);

}  // namespace detail

}  // namespace dupire
