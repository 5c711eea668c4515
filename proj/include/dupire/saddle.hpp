#pragma once

#include "dupire/models.hpp"

#include <map>
#include <string>
#include <string_view>

namespace dupire {

// Central covers the zone between the wings where the root of dm_ds = k lies
// in (0, 1); it is only used by local_vol_saddle, never as an asymptotic claim.
enum class Wing { Right, Left, Central };

struct SaddleSolution {
    double s_hat = 0.0;
    Wing wing = Wing::Right;
    double residual = 0.0;  // |dm_ds(s_hat) - k|
    int iterations = 0;
};

enum class VolMethod { Exact, Saddle, Asymptote };

std::string_view method_name(VolMethod m);

// Local variance estimate in variance units per year.
struct VolEstimate {
    double sigma_loc_sq = 0.0;
    VolMethod method = VolMethod::Exact;
    double k = 0.0;
    double T = 0.0;
    std::map<std::string, double> diagnostics;
};

// Distance kept from s = 0 and s = 1 where s(s-1) vanishes.
inline constexpr double kWingMargin = 1e-4;

// Root of dm_ds(s, T) = k on the requested wing. Throws NoBlowupError for NIG
// and KTooSmallError when k lies below the wing threshold.
SaddleSolution solve_saddle(const ModelSpec& model, double k, double T, Wing wing);

// Root of dm_ds(s, T) = k anywhere in the finiteness strip; when k is outside
// the range of dm_ds (bounded blow-up) the nearest admissible end is returned.
double strip_saddle(const ModelSpec& model, double k, double T, const Strip& strip);

// 2 dm_dT(s,T) / (s(s-1)) at the saddle point; wing picked from k.
VolEstimate local_vol_saddle(const ModelSpec& model, double k, double T);

VolEstimate heston_asymptote(const ModelSpec& model, double T, double k);
VolEstimate kou_asymptote(const ModelSpec& model, double T, double k);
VolEstimate karamata_asymptote(double c1, double c2, double c2_dot, double s_plus, double k);
VolEstimate vg_asymptote(const ModelSpec& model, double T, double k);
VolEstimate nig_limit(const ModelSpec& model, double T);

// Closed-form leading-order wing for the model family (nig_limit for NIG,
// v(T) for Black-Scholes).
VolEstimate model_asymptote(const ModelSpec& model, double T, double k);

}  // namespace dupire
