#include "dupire/riccati.hpp"

#include "dupire/errors.hpp"

#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace dupire {

namespace {

namespace odeint = boost::numeric::odeint;

using State = std::array<double, 4>;  // Re phi, Im phi, Re psi, Im psi

struct System {
    cplx half_q;
    cplx linear;
    double half_c2;
    double a;

    void operator()(const State& x, State& dx, double /*t*/) const {
        const cplx psi(x[2], x[3]);
        const cplx dpsi = half_q + half_c2 * psi * psi + linear * psi;
        const cplx dphi = a * psi;
        dx = {dphi.real(), dphi.imag(), dpsi.real(), dpsi.imag()};
    }
};

const HestonParams& heston_of(const ModelSpec& model, const char* what) {
    if (model.family() != Family::Heston) {
        throw ParameterError(std::string(what) + ": only defined for the Heston model");
    }
    return model.as<HestonParams>();
}

class Integrator {
public:
    Integrator(const HestonParams& p, cplx s, double tol)
        : sys_{0.5 * (s * s - s), p.b + s * p.rho * p.c, 0.5 * p.c * p.c, p.a},
          stepper_(odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>())) {
        if (!(tol > 0.0)) throw ParameterError("step_control must be > 0");
    }

    // Advances (x, t) to t_end. `on_step(t, x)` runs after every accepted
    // step; returning false stops early (and advance returns false).
    template <class OnStep>
    bool advance(State& x, double& t, double t_end, OnStep on_step) {
        int rejected = 0;
        while (t < t_end) {
            const double remaining = t_end - t;
            double h = std::min(dt_, remaining);
            const bool last = h >= remaining;
            if (stepper_.try_step(sys_, x, t, h) == odeint::fail) {
                if (++rejected > 1000 || h < 1e-15 * std::max(1.0, std::abs(t))) {
                    throw IntegrationError("riccati: step size control failed at t = " +
                                           std::to_string(t));
                }
                dt_ = h;
                continue;
            }
            rejected = 0;
            if (last) t = t_end;
            dt_ = h;
            for (const double v : x) {
                if (!std::isfinite(v)) {
                    throw IntegrationError("riccati: non-finite state at t = " + std::to_string(t));
                }
            }
            if (!on_step(t, x)) return false;
        }
        return true;
    }

private:
    System sys_;
    odeint::controlled_runge_kutta<odeint::runge_kutta_dopri5<State>> stepper_;
    double dt_ = 1e-3;
};

RiccatiState to_state(const State& x, double t) {
    return {cplx(x[0], x[1]), cplx(x[2], x[3]), t};
}

bool blowup_guard(double t, const State& x) {
    if (std::hypot(x[2], x[3]) > kBlowupThreshold) {
        throw BlowupEncountered(t, "riccati: |psi| exceeded 1e8 at t = " + std::to_string(t));
    }
    return true;
}

}  // namespace

RiccatiState integrate_riccati(const ModelSpec& model, cplx s, double T, double step_control) {
    const HestonParams& p = heston_of(model, "integrate_riccati");
    if (!(T >= 0.0) || !std::isfinite(T)) throw ParameterError("maturity T must be >= 0");
    Integrator integ(p, s, step_control);
    State x{0.0, 0.0, 0.0, 0.0};
    double t = 0.0;
    integ.advance(x, t, T, blowup_guard);
    return to_state(x, T);
}

std::vector<RiccatiState> riccati_path(const ModelSpec& model, cplx s,
                                       const std::vector<double>& times, double step_control) {
    const HestonParams& p = heston_of(model, "riccati_path");
    if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0.0)) {
        throw ParameterError("riccati_path: times must be ascending and >= 0");
    }
    Integrator integ(p, s, step_control);
    State x{0.0, 0.0, 0.0, 0.0};
    double t = 0.0;
    std::vector<RiccatiState> out;
    out.reserve(times.size());
    for (const double target : times) {
        integ.advance(x, t, target, blowup_guard);
        out.push_back(to_state(x, target));
    }
    return out;
}

NumericExplosion explosion_time_numeric(const ModelSpec& model, double s, double horizon,
                                        double step_control) {
    const HestonParams& p = heston_of(model, "explosion_time_numeric");
    Integrator integ(p, cplx(s, 0.0), step_control);
    State x{0.0, 0.0, 0.0, 0.0};
    double t = 0.0;
    NumericExplosion out;
    bool seen6 = false;
    bool seen8 = false;
    integ.advance(x, t, horizon, [&](double tt, const State& st) {
        const double psi = st[2];
        if (!seen6 && psi >= 1e6) {
            seen6 = true;
            out.t6 = tt;
            out.psi6 = psi;
        }
        if (psi >= 1e8) {
            seen8 = true;
            out.t8 = tt;
            out.psi8 = psi;
            return false;
        }
        return true;
    });
    if (seen6 && seen8) {
        // psi (T* - t) is constant to leading order at a simple pole.
        out.t_star = (out.psi8 * out.t8 - out.psi6 * out.t6) / (out.psi8 - out.psi6);
    }
    return out;
}

WingBoundConstants wing_bound_constants(const HestonParams& p, double xi_max, double T) {
    WingBoundConstants k;
    const double c2 = p.c * p.c;
    k.c1 = 1.0 / (3.0 * p.c);
    k.c2 = 0.5 * (2.0 * xi_max - 1.0) * T;
    k.c3 = T * (1.0 + 0.5 * c2 * k.c2 * k.c2);
    k.c4 = 2.0 * k.c3 * T * c2 * k.c2;
    return k;
}

double default_wing_y0(const HestonParams& p, double xi_max, const std::vector<double>& y_grid,
                       double T) {
    const WingBoundConstants k = wing_bound_constants(p, xi_max, T);
    const double gamma = std::abs(p.b + p.rho * p.c * xi_max);
    std::vector<double> ys = y_grid;
    std::sort(ys.begin(), ys.end());
    for (const double y : ys) {
        if (0.5 * y * y > 0.5 * (xi_max * xi_max - xi_max) && k.c3 * p.c * p.c * y * y > gamma) {
            return y;
        }
    }
    return kInf;
}

std::vector<WingBoundReport> verify_wing_bounds(const ModelSpec& model, double xi_max,
                                                const std::vector<double>& y_grid, double T,
                                                const WingBoundOptions& opt) {
    const HestonParams& p = heston_of(model, "verify_wing_bounds");
    if (!(xi_max >= 1.0) || !std::isfinite(xi_max)) {
        throw ParameterError("verify_wing_bounds: xi_max must be >= 1");
    }
    if (!(T > 0.0) || !std::isfinite(T)) throw ParameterError("maturity T must be > 0");
    if (opt.time_steps < 1) throw ParameterError("verify_wing_bounds: time_steps must be >= 1");
    std::vector<double> xis = opt.xi_values;
    if (xis.empty()) xis = {1.0, 0.5 * (1.0 + xi_max), xi_max};
    for (const double xi : xis) {
        if (!(xi >= 1.0 && xi <= xi_max)) {
            throw ParameterError("verify_wing_bounds: xi values must lie in [1, xi_max]");
        }
    }
    for (const double y : y_grid) {
        if (!(y > 0.0) || !std::isfinite(y)) {
            throw ParameterError("verify_wing_bounds: y values must be > 0");
        }
    }
    const WingBoundConstants k = wing_bound_constants(p, xi_max, T);
    const double y0 = opt.y0 ? *opt.y0 : default_wing_y0(p, xi_max, y_grid, T);

    std::vector<double> times(static_cast<std::size_t>(opt.time_steps) + 1);
    for (std::size_t j = 0; j < times.size(); ++j) {
        times[j] = T * static_cast<double>(j) / opt.time_steps;
    }
    times.back() = T;

    std::vector<WingBoundReport> reports;
    for (const double xi : xis) {
        for (const double y : y_grid) {
            std::vector<RiccatiState> path;
            try {
                path = riccati_path(model, cplx(xi, y), times, opt.step_control);
            } catch (const BlowupEncountered& e) {
                throw IntegrationError(std::string("verify_wing_bounds: ") + e.what());
            }
            WingBoundReport r;
            r.xi = xi;
            r.y = y;
            r.T = T;
            r.bounds = k;
            r.y0 = y0;
            r.below_y0 = y < y0;
            r.f = path.back().psi.real();
            r.g = path.back().psi.imag();
            r.f_upper = r.f <= -k.c1 * y;
            r.f_lower = r.g_upper = r.g_lower = r.g_nonneg = true;
            auto check = [&](bool ok, bool& flag, double t, const char* name, double value,
                             double bound) {
                if (ok) return;
                flag = false;
                r.violations.push_back({t, name, value, bound});
            };
            for (const RiccatiState& st : path) {
                const double f = st.psi.real();
                const double g = st.psi.imag();
                check(f >= -k.c3 * y * y, r.f_lower, st.t, "f_lower", f, -k.c3 * y * y);
                check(g <= k.c2 * y, r.g_upper, st.t, "g_upper", g, k.c2 * y);
                check(g >= -k.c4 * y * y * y, r.g_lower, st.t, "g_lower", g, -k.c4 * y * y * y);
                check(g >= 0.0, r.g_nonneg, st.t, "g_nonneg", g, 0.0);
            }
            r.f_upper_from = std::numeric_limits<double>::quiet_NaN();
            for (std::size_t j = path.size(); j-- > 0;) {
                if (!(path[j].psi.real() <= -k.c1 * y)) break;
                r.f_upper_from = path[j].t;
            }
            reports.push_back(std::move(r));
        }
    }
    return reports;
}

}  // namespace dupire
