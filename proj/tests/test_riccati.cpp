#include "dupire/critical.hpp"
#include "dupire/errors.hpp"
#include "dupire/riccati.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dupire;

TEST_CASE("riccati ODE matches the closed-form heston mgf on complex points") {
    const ModelSpec m = fx::heston_fig1();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> re(-3.0, 6.0), im(-40.0, 40.0);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const cplx s(re(rng), im(rng));
        for (double T : {0.5, 1.0, 2.0}) {
            const RiccatiState st = integrate_riccati(m, s, T);
            const cplx ode = st.phi + 0.0654 * st.psi;
            const cplx closed = mgf_log(m, s, T).m;
            worst = std::max(worst, std::abs(ode - closed) / (1.0 + std::abs(closed)));
        }
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("riccati path values") {
    const ModelSpec m = fx::heston_fig1();
    const auto path = riccati_path(m, cplx(0.4, 0.0), {0.0, 0.5, 1.0, 2.0});
    REQUIRE(path.size() == 4);
    CHECK(path[0].psi == cplx(0.0, 0.0));
    for (const auto& st : path) {
        CHECK(st.psi.imag() == 0.0);
        CHECK(st.phi.imag() == 0.0);
        CHECK(st.psi.real() <= 0.0);
    }
    CHECK(path[3].t == 2.0);
    const RiccatiState one = integrate_riccati(m, 1.0, 1.5);
    CHECK(std::abs(one.phi + 0.0654 * one.psi) < 1e-12);
    CHECK_THROWS_AS(riccati_path(m, 2.0, {1.0, 0.5}), ParameterError);
    CHECK_THROWS_AS(integrate_riccati(fx::kou_fig2(), 2.0, 1.0), ParameterError);
}

TEST_CASE("blow-up beyond the critical moment") {
    const ModelSpec m = fx::heston_fig1();
    const double sp = critical_moment(m, 1.0).s_plus;
    CHECK_THROWS_AS(integrate_riccati(m, sp + 1.0, 1.0), BlowupEncountered);
    CHECK_NOTHROW(integrate_riccati(m, sp - 1.0, 1.0));
    try {
        integrate_riccati(m, sp + 1.0, 1.0);
    } catch (const BlowupEncountered& e) {
        CHECK(e.t_blow() == doctest::Approx(explosion_time(m, sp + 1.0)).epsilon(1e-3));
    }
}

TEST_CASE("psi has a simple pole with residue -2/c^2") {
    const ModelSpec m = fx::heston_fig1();
    const double s = 40.0;
    const double t_star = explosion_time(m, s);
    const double c2 = 0.2928 * 0.2928;
    for (double gap : {1e-3, 1e-4}) {
        const RiccatiState st = integrate_riccati(m, s, t_star - gap);
        CHECK(std::abs(gap * st.psi.real() * 0.5 * c2 - 1.0) < 0.02);
    }
    const NumericExplosion ne = explosion_time_numeric(m, s);
    CHECK(ne.t_star == doctest::Approx(t_star).epsilon(1e-8));
    CHECK(ne.psi6 >= 1e6);
    CHECK(ne.psi8 >= 1e8);
    CHECK(explosion_time_numeric(m, 0.5).t_star == kInf);
}

TEST_CASE("dm_dT grows toward the critical moment") {
    const ModelSpec m = fx::heston_fig1();
    const double sp = critical_moment(m, 1.0).s_plus;
    double prev = 0.0;
    for (int j = 1; j <= 4; ++j) {
        const double s = sp - std::pow(10.0, -j);
        const double rate = mgf_log(m, s, 1.0).dm_dT.real();
        CHECK(rate > prev);
        prev = rate;
    }
}

TEST_CASE("wing bound constants") {
    const HestonParams p = fx::fig1_params(0.0);
    const WingBoundConstants k = wing_bound_constants(p, 2.0, 1.0);
    CHECK(k.c1 == doctest::Approx(1.0 / (3.0 * 0.2928)));
    CHECK(k.c2 == doctest::Approx(1.5));
    CHECK(k.c3 == doctest::Approx(1.0 + 0.5 * 0.2928 * 0.2928 * 2.25));
    CHECK(k.c4 == doctest::Approx(2.0 * k.c3 * 0.2928 * 0.2928 * 1.5));
    CHECK(default_wing_y0(p, 2.0, {0.5, 20.0, 50.0}, 1.0) == 20.0);
    CHECK(default_wing_y0(p, 2.0, {0.5}, 1.0) == kInf);
}

TEST_CASE("wing bounds hold for rho = 0") {
    const ModelSpec m(fx::fig1_params(0.0));
    const auto reports = verify_wing_bounds(m, 2.0, {20.0, 50.0, 100.0}, 1.0);
    REQUIRE(reports.size() == 9);
    for (const auto& r : reports) {
        CAPTURE(r.xi);
        CAPTURE(r.y);
        CHECK(r.all_pass());
        CHECK(r.violations.empty());
        CHECK_FALSE(r.below_y0);
        CHECK(r.f_upper_from > 0.0);
        CHECK(r.f_upper_from < 0.5);
        CHECK(r.g > 0.0);
    }
}

TEST_CASE("wing bound violations are reported for negative rho") {
    const ModelSpec m = fx::heston_fig1();
    const auto reports = verify_wing_bounds(m, 2.0, {20.0, 50.0, 100.0}, 1.0);
    std::size_t listed = 0;
    for (const auto& r : reports) {
        for (const auto& v : r.violations) {
            CHECK_FALSE(r.all_pass());
            CHECK(v.t >= 0.0);
            CHECK(v.t <= 1.0);
            ++listed;
        }
    }
    CHECK(listed > 0);
}

TEST_CASE("wing bound options and errors") {
    const ModelSpec m(fx::fig1_params(0.0));
    WingBoundOptions o;
    o.xi_values = {1.5};
    o.y0 = 60.0;
    const auto r = verify_wing_bounds(m, 2.0, {20.0, 100.0}, 1.0, o);
    REQUIRE(r.size() == 2);
    CHECK(r[0].below_y0);
    CHECK_FALSE(r[1].below_y0);
    CHECK(r[0].y0 == 60.0);
    o.xi_values = {3.0};
    CHECK_THROWS_AS(verify_wing_bounds(m, 2.0, {20.0}, 1.0, o), ParameterError);
    CHECK_THROWS_AS(verify_wing_bounds(m, 0.5, {20.0}, 1.0), ParameterError);
    CHECK_THROWS_AS(verify_wing_bounds(m, 2.0, {-1.0}, 1.0), ParameterError);
}
