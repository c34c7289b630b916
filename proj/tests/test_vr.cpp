#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>

#include "dsmreg/dsm.hpp"
#include "dsmreg/problems.hpp"
#include "dsmreg/vr.hpp"
#include "oracles.hpp"

using namespace dsmreg;

TEST_CASE("vr_i is a single counted solve equal to solve_reg") {
    const ProblemInstance inst =
        make_instance(hilbert(10), exact_profile(Profile::Sqrt, 10), {0.01, 6});
    RegContext ctx = new_context(inst.a, inst.f_delta);
    const VrResult res = vr_i(ctx, 0.01);
    CHECK(res.status == VrStatus::Ok);
    CHECK(res.n_linsol == 1);

    RegContext ctx2 = new_context(inst.a, inst.f_delta);
    CHECK(res.u == solve_reg(ctx2, 0.01));
}

TEST_CASE("vr_i scalar closed form") {
    RegContext ctx = new_context(Matrix::identity(1), Vector{1.0});
    const VrResult res = vr_i(ctx, 1.0);
    CHECK(res.u[0] == Catch::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("vr_n scalar closed form: a_M = delta/(||f||-delta)") {
    // A = I (scalar): phi(a) = a/(1+a) ||f||.
    const Vector f{2.0};
    RegContext ctx = new_context(Matrix::identity(1), f);
    const double delta = 0.02;
    const double a_exact = delta / (norm2(f) - delta);
    const VrResult res = vr_n(ctx, delta, 10.0 * a_exact);
    REQUIRE(res.status == VrStatus::Ok);
    CHECK(res.a_used == Catch::Approx(a_exact).epsilon(1e-6));
    CHECK(std::abs(res.residual - delta) <= 1e-3 * delta);
}

TEST_CASE("vr_n converges to the bisection root on generated instances") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const ProblemInstance inst =
            make_instance(hilbert(20), exact_profile(Profile::Sqrt, 20), {0.01, seed});
        RegContext ctx = new_context(inst.a, inst.f_delta);
        const A0Result a0res = find_a0(ctx, inst.delta, inst.delta_rel);

        RegContext run = ctx.fresh_counter();
        const VrResult res = vr_n(run, inst.delta, a0res.a0);
        REQUIRE(res.status == VrStatus::Ok);
        CHECK(res.residual >= inst.delta * (1.0 - 1e-3));
        CHECK(res.residual <= inst.delta * (1.0 + 1e-3));
        CHECK(res.n_linsol == static_cast<long>(res.trace.size()));

        RegContext oracle_ctx = ctx.fresh_counter();
        auto r = [&](double a) { return phi(oracle_ctx, a) - inst.delta; };
        const double a_bis = oracle::bisect(r, 1e-14 * a0res.a0, a0res.a0, 1e-10);
        CHECK(res.a_used == Catch::Approx(a_bis).epsilon(1e-6));

        CHECK(res.a_used <= a_m_upper_bound(ctx, inst.delta) * (1.0 + 1e-6));
    }
}

TEST_CASE("vr_n beats vr_i in accuracy for most seeds") {
    int wins = 0;
    const int n_seeds = 10;
    for (std::uint64_t seed = 1; seed <= n_seeds; ++seed) {
        const ProblemInstance inst =
            make_instance(hilbert(30), exact_profile(Profile::Sqrt, 30), {0.01, seed});
        RegContext ctx = new_context(inst.a, inst.f_delta);
        const A0Result a0res = find_a0(ctx, inst.delta, inst.delta_rel);

        RegContext ci = ctx.fresh_counter();
        RegContext cn = ctx.fresh_counter();
        const VrResult ri = vr_i(ci, a0res.a0);
        const VrResult rn = vr_n(cn, inst.delta, a0res.a0);
        REQUIRE(ri.status == VrStatus::Ok);
        REQUIRE(rn.status == VrStatus::Ok);

        auto rel = [&](const Vector& u) {
            Vector d = u;
            for (std::size_t i = 0; i < d.size(); ++i) d[i] -= inst.y[i];
            return norm2(d) / norm2(inst.y);
        };
        if (rel(ri.u) >= rel(rn.u)) ++wins;
    }
    CHECK(wins >= 8);
}
