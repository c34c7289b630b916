#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dsmreg/ode.hpp"
#include "dsmreg/problems.hpp"

using namespace dsmreg;

TEST_CASE("tableau rows sum to their c nodes") {
    for (int s = 0; s < 7; ++s) {
        double row = 0.0;
        for (int j = 0; j < 6; ++j) row += dopri::a[s][j];
        CHECK(row == Catch::Approx(dopri::c[s]).margin(1e-15));
    }
    double s5 = 0.0, s4 = 0.0;
    for (int j = 0; j < 7; ++j) {
        s5 += dopri::b5[j];
        s4 += dopri::b4[j];
    }
    CHECK(s5 == Catch::Approx(1.0).margin(1e-15));
    CHECK(s4 == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("dsm_rhs is zero at the instantaneous equilibrium and affine in u") {
    const ProblemInstance inst =
        make_instance(hilbert(6), exact_profile(Profile::Sqrt, 6), {0.01, 4});
    RegContext ctx = new_context(inst.a, inst.f_delta);
    const double a0 = 0.01;

    const long n0 = ctx.n_linsol;
    const Vector ustar = solve_reg(ctx, a0 / (1.0 + 0.3));
    const Vector r = dsm_rhs(ctx, a0, 0.3, ustar);
    CHECK(norm2(r) <= 1e-12 * norm2(ustar));
    CHECK(ctx.n_linsol == n0 + 2);  // one solve per rhs call

    // slope -1 in u at fixed t
    const Vector r0 = dsm_rhs(ctx, a0, 0.3, Vector(6, 0.0));
    Vector shift(6, 1.0);
    const Vector r1 = dsm_rhs(ctx, a0, 0.3, shift);
    for (int i = 0; i < 6; ++i) CHECK(r1[i] == Catch::Approx(r0[i] - 1.0).margin(1e-12));
}

TEST_CASE("fixed-step convergence order on u' = -u is 5") {
    auto rhs = [](double, const Vector& u) { return Vector{-u[0]}; };

    auto integrate = [&](double h) {
        Vector u{1.0};
        double t = 0.0;
        Vector u5, u4, klast;
        Vector k1 = rhs(t, u);
        const int steps = static_cast<int>(std::lround(1.0 / h));
        for (int i = 0; i < steps; ++i) {
            dopri45_step(rhs, t, u, h, k1, u5, u4, klast);
            u = u5;
            k1 = klast;
            t += h;
        }
        return std::abs(u[0] - std::exp(-1.0));
    };

    const double e1 = integrate(0.1);
    const double e2 = integrate(0.05);
    const double order = std::log2(e1 / e2);
    CHECK(order > 4.8);
    CHECK(order < 5.2);
}

TEST_CASE("embedded error estimate shrinks at 5th order per step") {
    auto rhs = [](double, const Vector& u) { return Vector{-u[0]}; };
    auto embedded_diff = [&](double h) {
        const Vector u{1.0};
        Vector u5, u4, klast;
        const Vector k1 = rhs(0.0, u);
        dopri45_step(rhs, 0.0, u, h, k1, u5, u4, klast);
        return std::abs(u5[0] - u4[0]);
    };
    const double d1 = embedded_diff(0.1);
    const double d2 = embedded_diff(0.05);
    CHECK(std::log2(d1 / d2) >= 4.8);
}

TEST_CASE("adaptive integration of u' = -u meets the default tolerance") {
    // Exercises the controller through dopri45_step directly.
    auto rhs = [](double, const Vector& u) { return Vector{-u[0]}; };
    OdeConfig cfg;
    Vector u{1.0};
    double t = 0.0, h = cfg.h_init;
    Vector u5, u4, klast;
    Vector k1 = rhs(t, u);
    while (t < 1.0) {
        if (t + h > 1.0) h = 1.0 - t;
        dopri45_step(rhs, t, u, h, k1, u5, u4, klast);
        const double err = error_norm(u5, u4, u, cfg);
        if (err <= 1.0) {
            t += h;
            u = u5;
            k1 = klast;
        }
        double f = err > 0.0 ? cfg.safety * std::pow(err, -0.2) : cfg.h_factor_max;
        f = std::clamp(f, cfg.h_factor_min, cfg.h_factor_max);
        h *= f;
    }
    CHECK(std::abs(u[0] - std::exp(-1.0)) < 1e-6);
}

TEST_CASE("dopri45_dsm converges into the band and costs 6 solves per step") {
    const ProblemInstance inst =
        make_instance(hilbert(30), exact_profile(Profile::Sqrt, 30), {0.01, 7});
    RegContext ctx = new_context(inst.a, inst.f_delta);
    const A0Result a0res = find_a0(ctx, inst.delta, inst.delta_rel);

    RegContext run = ctx.fresh_counter();
    const SolverResult res = dopri45_dsm(run, inst.delta, a0res.a0);
    REQUIRE(res.status == SolveStatus::ConvergedInBand);
    CHECK(in_band(res.residual, inst.delta));
    // initial solve + initial rhs eval + 6 per attempted step
    CHECK((res.n_linsol - 2) % 6 == 0);
    CHECK(res.n_linsol > 12);
}

TEST_CASE("dopri45_dsm matches iterative DSM accuracy at much higher cost") {
    const ProblemInstance inst =
        make_instance(hilbert(50), exact_profile(Profile::Sqrt, 50), {0.01, 3});
    RegContext ctx = new_context(inst.a, inst.f_delta);
    const A0Result a0res = find_a0(ctx, inst.delta, inst.delta_rel);

    RegContext run_it = ctx.fresh_counter();
    const SolverResult it = dsm_solve(run_it, inst.delta, a0res.a0);
    RegContext run_ode = ctx.fresh_counter();
    const SolverResult ode = dopri45_dsm(run_ode, inst.delta, a0res.a0);
    REQUIRE(it.status == SolveStatus::ConvergedInBand);
    REQUIRE(ode.status == SolveStatus::ConvergedInBand);

    auto rel = [&](const Vector& u) {
        Vector d = u;
        for (std::size_t i = 0; i < d.size(); ++i) d[i] -= inst.y[i];
        return norm2(d) / norm2(inst.y);
    };
    CHECK(std::abs(rel(ode.u) - rel(it.u)) <= 0.15 * rel(it.u));
    CHECK(ode.n_linsol >= 10 * it.n_linsol);
}
