#pragma once

// DSM via adaptive Dormand-Prince 5(4) integration of
//   u' = -u + (T + a(t)I)⁻¹ g,   a(t) = a₀/(1+t),
// stopped by the same relaxed discrepancy band as the iterative scheme.

#include <array>
#include <cmath>

#include "dsmreg/dsm.hpp"
#include "dsmreg/regularize.hpp"

namespace dsmreg {

struct OdeConfig {
    double abs_tol = 1e-6;
    double rel_tol = 1e-6;
    double h_init = 0.1;
    double safety = 0.9;
    double h_factor_min = 0.2;
    double h_factor_max = 5.0;
    int max_steps = 10000;
};

namespace dopri {

// Standard Dormand-Prince 5(4) tableau. b5 are the 5th-order weights
// (b5[6] = 0, the last stage is the FSAL stage), b4 the embedded 4th-order
// weights. Each a-row sums to its c node; a test pins that checksum.
inline constexpr std::array<double, 7> c = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5,
                                            8.0 / 9, 1.0, 1.0};
inline constexpr std::array<std::array<double, 6>, 7> a = {{
    {0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
    {1.0 / 5, 0.0, 0.0, 0.0, 0.0, 0.0},
    {3.0 / 40, 9.0 / 40, 0.0, 0.0, 0.0, 0.0},
    {44.0 / 45, -56.0 / 15, 32.0 / 9, 0.0, 0.0, 0.0},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0.0, 0.0},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0.0},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
}};
inline constexpr std::array<double, 7> b5 = {35.0 / 384,      0.0,
                                             500.0 / 1113,    125.0 / 192,
                                             -2187.0 / 6784,  11.0 / 84,
                                             0.0};
inline constexpr std::array<double, 7> b4 = {5179.0 / 57600,   0.0,
                                             7571.0 / 16695,   393.0 / 640,
                                             -92097.0 / 339200, 187.0 / 2100,
                                             1.0 / 40};

}  // namespace dopri

/// One embedded 5(4) step. `k1` must hold f(t, u); on return `k_last` holds
/// f(t+h, u5) so the caller can reuse it as the next step's k1 (FSAL). Six
/// new rhs evaluations per call.
template <class Rhs>
void dopri45_step(Rhs&& rhs, double t, const Vector& u, double h, const Vector& k1,
                  Vector& u5, Vector& u4, Vector& k_last) {
    const std::size_t n = u.size();
    std::array<Vector, 7> k;
    k[0] = k1;
    Vector stage(n);
    for (int s = 1; s < 7; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
            double acc = u[i];
            for (int j = 0; j < s; ++j) acc += h * dopri::a[s][j] * k[j][i];
            stage[i] = acc;
        }
        k[s] = rhs(t + dopri::c[s] * h, stage);
    }
    u5.assign(n, 0.0);
    u4.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s5 = 0.0, s4 = 0.0;
        for (int s = 0; s < 7; ++s) {
            s5 += dopri::b5[s] * k[s][i];
            s4 += dopri::b4[s] * k[s][i];
        }
        u5[i] = u[i] + h * s5;
        u4[i] = u[i] + h * s4;
    }
    k_last = std::move(k[6]);
}

/// Weighted RMS of the embedded error, scale_i = abs_tol + rel_tol |u_i|.
inline double error_norm(const Vector& u5, const Vector& u4, const Vector& u,
                         const OdeConfig& cfg) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double scale = cfg.abs_tol + cfg.rel_tol * std::abs(u[i]);
        const double e = (u5[i] - u4[i]) / scale;
        s += static_cast<long double>(e) * e;
    }
    return std::sqrt(static_cast<double>(s) / static_cast<double>(u.size()));
}

/// Right-hand side of the DSM flow; one counted solve per call.
inline Vector dsm_rhs(RegContext& ctx, double a0, double t, const Vector& u) {
    if (t < 0.0) throw std::invalid_argument("dsm_rhs: t must be >= 0");
    Vector v = solve_reg(ctx, a0 / (1.0 + t));
    for (std::size_t i = 0; i < u.size(); ++i) v[i] -= u[i];
    return v;
}

/// DSM-DOPRI45. Starts from u(0) = (T + a₀I)⁻¹g like the iterative scheme.
/// Error control is the standard h·safety·err^{-1/5} formula clamped by the
/// factor bounds; after each accepted step the discrepancy band is checked,
/// and a step that undershoots 0.9δ is rejected with h halved.
inline SolverResult dopri45_dsm(RegContext& ctx, double delta, double a0,
                                const OdeConfig& cfg = {}) {
    if (!(delta > 0.0)) throw std::invalid_argument("dopri45_dsm: delta must be > 0");
    if (!(a0 > 0.0)) throw std::invalid_argument("dopri45_dsm: a0 must be > 0");

    SolverResult res;
    const long n0 = ctx.n_linsol;
    try {
        Vector u = solve_reg(ctx, a0);
        double residual = detail::residual_norm(ctx, u);
        double t = 0.0;
        double h = cfg.h_init;
        auto rhs = [&ctx, a0](double tt, const Vector& uu) { return dsm_rhs(ctx, a0, tt, uu); };
        Vector k1 = rhs(t, u);
        Vector u5, u4, k_last;
        int steps = 0;
        double a_last = a0;
        while (1.001 * delta < residual && steps < cfg.max_steps) {
            ++steps;
            dopri45_step(rhs, t, u, h, k1, u5, u4, k_last);
            const double err = error_norm(u5, u4, u, cfg);
            double factor = err > 0.0 ? cfg.safety * std::pow(err, -0.2) : cfg.h_factor_max;
            if (err <= 1.0) {
                const double r_new = detail::residual_norm(ctx, u5);
                if (r_new < 0.9 * delta) {
                    // Band overshoot: retry from the same state with half the step.
                    h *= 0.5;
                    continue;
                }
                t += h;
                u = u5;
                k1 = std::move(k_last);
                residual = r_new;
                a_last = a0 / (1.0 + t);
                if (factor < cfg.h_factor_min) factor = cfg.h_factor_min;
                if (factor > cfg.h_factor_max) factor = cfg.h_factor_max;
                h *= factor;
            } else {
                if (factor < cfg.h_factor_min) factor = cfg.h_factor_min;
                if (factor > 1.0) factor = 1.0;
                h *= factor;
            }
        }
        res.u = std::move(u);
        res.residual = residual;
        res.a_final = a_last;
        res.status = residual <= 1.001 * delta ? SolveStatus::ConvergedInBand
                                               : SolveStatus::ItermaxExhausted;
    } catch (const RegSolveError& e) {
        res.status = SolveStatus::Failed;
        res.a_final = e.a;
        res.message = e.what();
    }
    res.n_linsol = ctx.n_linsol - n0;
    return res;
}

}  // namespace dsmreg
