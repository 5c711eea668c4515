#include "dupire/errors.hpp"
#include "dupire/models.hpp"
#include "dupire/riccati.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <vector>

using namespace dupire;

namespace {

std::vector<ModelSpec> all_models() {
    return {fx::heston_fig1(), fx::kou_fig2(), fx::vg_fig3(), fx::nig_sample(), fx::bs(),
            ModelSpec(BsTimeDepParams{{0.0, 0.5, 1.5}, {0.04, 0.09, 0.02}})};
}

// Real s values strictly inside the strip, kept away from its ends.
std::vector<double> inner_grid(const ModelSpec& m, double T) {
    const Strip st = finiteness_strip(m, T);
    const double lo = std::isfinite(st.lower) ? st.lower : -10.0;
    const double hi = std::isfinite(st.upper) ? st.upper : 10.0;
    std::vector<double> out;
    for (int i = 1; i < 12; ++i) out.push_back(lo + (hi - lo) * (0.04 + 0.92 * i / 12.0));
    return out;
}

}  // namespace

TEST_CASE("black-scholes log-mgf is the Gaussian exponent") {
    const ModelSpec m = fx::bs(0.04);
    const cplx s(1.7, -2.3);
    const MgfValue v = mgf_log(m, s, 2.0);
    const cplx q = s * s - s;
    CHECK(std::abs(v.m - 0.5 * 0.08 * q) < 1e-15);
    CHECK(std::abs(v.dm_ds - 0.08 * (s - 0.5)) < 1e-15);
    CHECK(std::abs(v.dm_dT - 0.02 * q) < 1e-15);
}

TEST_CASE("piecewise variance integrates and is right-continuous") {
    const BsTimeDepParams p{{0.0, 0.5, 1.5}, {0.04, 0.09, 0.02}};
    CHECK(integrated_variance(p, 0.25) == doctest::Approx(0.01));
    CHECK(integrated_variance(p, 1.0) == doctest::Approx(0.02 + 0.045));
    CHECK(integrated_variance(p, 2.0) == doctest::Approx(0.02 + 0.09 + 0.01));
    CHECK(variance_at(p, 0.5) == 0.09);
    CHECK(variance_at(p, 0.49) == 0.04);
    CHECK(variance_at(p, 9.0) == 0.02);
}

TEST_CASE("martingale normalization m(0) = m(1) = 0") {
    for (const ModelSpec& m : all_models()) {
        for (double T : {0.5, 1.0, 2.0}) {
            CAPTURE(family_name(m.family()));
            CHECK(std::abs(mgf_log(m, 0.0, T).m) < 1e-13);
            CHECK(std::abs(mgf_log(m, 1.0, T).m) < 1e-13);
        }
    }
}

TEST_CASE("analytic partials agree with central finite differences") {
    for (const ModelSpec& m : all_models()) {
        // maturities away from the variance knots of the piecewise model
        for (double T : {0.4, 1.0, 2.0}) {
            for (double s : inner_grid(m, T)) {
                CAPTURE(family_name(m.family()));
                CAPTURE(T);
                CAPTURE(s);
                const MgfValue v = mgf_log(m, s, T);
                const double hs = 1e-5 * std::max(1.0, std::abs(s));
                const double fd_s =
                    (mgf_log(m, s + hs, T).m.real() - mgf_log(m, s - hs, T).m.real()) / (2 * hs);
                const double ht = 1e-5;
                const double fd_t =
                    (mgf_log(m, s, T + ht).m.real() - mgf_log(m, s, T - ht).m.real()) / (2 * ht);
                CHECK(std::abs(v.dm_ds.real() - fd_s) < 1e-6 * std::max(std::abs(fd_s), 1.0));
                CHECK(std::abs(v.dm_dT.real() - fd_t) < 1e-6 * std::max(std::abs(fd_t), 1.0));
            }
        }
    }
}

TEST_CASE("complex-step cross-check matches the analytic partials") {
    for (const ModelSpec& m : all_models()) {
        for (double s : inner_grid(m, 1.0)) {
            CAPTURE(family_name(m.family()));
            CAPTURE(s);
            const MgfValue a = mgf_log(m, s, 1.0);
            const MgfValue c = mgf_log_complex_step(m, s, 1.0);
            CHECK(fx::rel_err(c.dm_ds.real(), a.dm_ds.real()) < 1e-10);
            CHECK(std::abs(c.dm_dT.real() - a.dm_dT.real()) < 1e-6 * std::max(1.0, std::abs(a.dm_dT.real())));
        }
    }
}

TEST_CASE("log-mgf is convex on the real strip") {
    for (const ModelSpec& m : all_models()) {
        for (double s : inner_grid(m, 1.0)) {
            CAPTURE(family_name(m.family()));
            CAPTURE(s);
            CHECK(mgf_curvature(m, s, 1.0) > 0.0);
        }
    }
}

TEST_CASE("conjugate symmetry and modulus bound on vertical lines") {
    for (const ModelSpec& m : all_models()) {
        const Strip st = finiteness_strip(m, 1.0);
        const double c = std::isfinite(st.upper) ? 0.5 * (1.0 + st.upper) : 3.0;
        const double mc = mgf_log(m, c, 1.0).m.real();
        for (double y : {0.1, 1.0, 7.0, 40.0}) {
            CAPTURE(family_name(m.family()));
            CAPTURE(y);
            const MgfValue up = mgf_log(m, cplx(c, y), 1.0);
            const MgfValue dn = mgf_log(m, cplx(c, -y), 1.0);
            CHECK(std::abs(up.m - std::conj(dn.m)) < 1e-12 * std::max(1.0, std::abs(up.m)));
            CHECK(up.m.real() <= mc + 1e-12);
        }
    }
}

TEST_CASE("heston closed form matches the Riccati integration at s = 2") {
    const ModelSpec m = fx::heston_fig1();
    for (cplx s : {cplx(2.0, 0.0), cplx(2.0, 3.0)}) {
        const MgfValue v = mgf_log(m, s, 1.0);
        const RiccatiState st = integrate_riccati(m, s, 1.0);
        const cplx ode = st.phi + 0.0654 * st.psi;
        CHECK(std::abs(v.m - ode) < 1e-8);
    }
}

TEST_CASE("heston evaluation past the first half-period of W") {
    // Large |Im s| drives W around the origin; the branch of log W must follow
    // continuously so that m stays equal to the ODE solution.
    const ModelSpec m = fx::heston_fig1();
    for (cplx s : {cplx(5.0, 60.0), cplx(20.0, 15.0), cplx(-3.0, 25.0), cplx(30.0, 2.0)}) {
        CAPTURE(s);
        const MgfValue v = mgf_log(m, s, 1.0);
        const RiccatiState st = integrate_riccati(m, s, 1.0);
        CHECK(std::abs(v.m - (st.phi + 0.0654 * st.psi)) < 1e-8 * (1.0 + std::abs(v.m)));
    }
}

TEST_CASE("finiteness strips") {
    const Strip kou = finiteness_strip(fx::kou_fig2(), 1.0);
    CHECK(kou.lower == -25.0);
    CHECK(kou.upper == 50.0);

    // Root of the variance gamma quadratic by bisection (independent oracle).
    const double sg = 0.261652, th = -0.218033, nu = 0.0552584;
    auto quad = [&](double s) { return 1.0 - th * nu * s - 0.5 * sg * sg * nu * s * s; };
    double lo = 1.0, hi = 100.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (quad(mid) > 0.0 ? lo : hi) = mid;
    }
    const Strip vg = finiteness_strip(fx::vg_fig3(), 1.0);
    CHECK(vg.upper == doctest::Approx(lo).epsilon(1e-13));
    CHECK(vg.upper == doctest::Approx(
                          (std::sqrt(2 * nu * sg * sg + nu * nu * th * th) - nu * th) / (nu * sg * sg))
                          .epsilon(1e-13));

    const Strip nig = finiteness_strip(fx::nig_sample(), 1.0);
    CHECK(nig.upper == 10.0);
    CHECK(nig.lower == -10.0);

    const Strip bs = finiteness_strip(fx::bs(), 1.0);
    CHECK(std::isinf(bs.upper));
    CHECK(std::isinf(bs.lower));
}

TEST_CASE("mgf outside the strip is a domain error") {
    CHECK_THROWS_AS(mgf_log(fx::heston_fig1(), 40.0, 1.0), DomainError);
    CHECK_THROWS_AS(mgf_log(fx::kou_fig2(), cplx(50.0, 1.0), 1.0), DomainError);
    CHECK_THROWS_AS(mgf_log(fx::kou_fig2(), -25.0, 1.0), DomainError);
    CHECK_THROWS_AS(mgf_log(fx::vg_fig3(), 27.0, 1.0), DomainError);
    CHECK_THROWS_AS(mgf_log(fx::nig_sample(), 10.0, 1.0), DomainError);
    CHECK_THROWS_AS(mgf_log(fx::bs(), 1.0, 0.0), ParameterError);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(ModelSpec(HestonParams{0.04, -0.6, 0.0, -0.5, 1.0, 0.06}), ParameterError);
    CHECK_THROWS_AS(ModelSpec(HestonParams{0.04, 0.1, 0.3, -0.5, 1.0, 0.06}), ParameterError);
    CHECK_THROWS_AS(ModelSpec(HestonParams{0.04, -0.6, 0.3, 0.5, 1.0, 0.06}), ParameterError);
    CHECK_THROWS_AS(ModelSpec(KouParams{0.2, 10.0, 0.3, 1.0, 25.0}), ParameterError);
    CHECK_THROWS_AS(ModelSpec(KouParams{0.2, 10.0, 1.3, 50.0, 25.0}), ParameterError);
    CHECK_THROWS_AS(ModelSpec(VarianceGammaParams{0.2, 0.0, -1.0}), ParameterError);
    CHECK_THROWS_AS(ModelSpec(NigParams{1.5, 1.0, 0.2}), ParameterError);
    CHECK_THROWS_AS(ModelSpec(BsTimeDepParams{{0.0, 1.0}, {0.04}}), ParameterError);
    CHECK_THROWS_AS(ModelSpec(BsTimeDepParams{{0.5}, {0.04}}), ParameterError);
}

TEST_CASE("heston spot enters only through the strike scaling") {
    HestonParams p = fx::fig1_params();
    p.s0 = 100.0;
    const ModelSpec m(p);
    const MgfValue a = mgf_log(m, cplx(2.0, 1.0), 1.0);
    const MgfValue b = mgf_log(fx::heston_fig1(), cplx(2.0, 1.0), 1.0);
    CHECK(std::abs(a.m - b.m) < 1e-15);
    CHECK(m.spot() == 100.0);
}
