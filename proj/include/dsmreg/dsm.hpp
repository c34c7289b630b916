#pragma once

// Iterative DSM: geometric step growth h_n = q^n, relaxed discrepancy band
// stopping, and one-shot step-halving on overshoot.

#include <cmath>
#include <optional>
#include <string>

#include "dsmreg/regularize.hpp"

namespace dsmreg {

enum class SolveStatus { ConvergedInBand, ItermaxExhausted, Failed };

inline std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::ConvergedInBand: return "converged-in-band";
        case SolveStatus::ItermaxExhausted: return "itermax-exhausted";
        default: return "failed";
    }
}

struct SolverResult {
    Vector u;
    double residual = 0.0;  ///< ||A u - f_δ||
    SolveStatus status = SolveStatus::Failed;
    long n_linsol = 0;      ///< solves consumed by this call
    Schedule schedule;
    std::optional<double> rel_error;  ///< filled by the harness when y is known
    double a_final = 0.0;
    std::string message;
};

/// Relaxed discrepancy band, both edges inclusive.
inline bool in_band(double residual, double delta) {
    return 0.9 * delta <= residual && residual <= 1.001 * delta;
}

namespace detail {

inline double residual_norm(const RegContext& ctx, const Vector& u) {
    Vector r = mat_vec(ctx.a_mat, u);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= ctx.f_delta[i];
    return norm2(r);
}

}  // namespace detail

/// The iterative DSM. Starts from u = (T + a₀I)⁻¹g at t = 1 and runs
///   t += h; a = a₀/t; v = (T + aI)⁻¹g; ũ = e^{-h}u + (1-e^{-h})v
/// accepting ũ while its residual stays above 0.9δ; on overshoot the step is
/// rejected, t rewound, h halved, and h never grows again. Stops when the
/// residual of the committed iterate drops to 1.001δ or itermax passes ran.
inline SolverResult dsm_solve(RegContext& ctx, double delta, double a0,
                              double q = 2.0, int itermax = 30) {
    if (!(delta > 0.0)) throw std::invalid_argument("dsm_solve: delta must be > 0");
    if (!(a0 > 0.0)) throw std::invalid_argument("dsm_solve: a0 must be > 0");
    if (q < 1.0 || q > 2.0) throw std::invalid_argument("dsm_solve: q must be in [1, 2]");

    SolverResult res;
    const long n0 = ctx.n_linsol;
    try {
        Vector u = solve_reg(ctx, a0);
        double residual = detail::residual_norm(ctx, u);
        double t = 1.0;
        double h = 1.0;
        bool halve = false;
        double a_last = a0;
        int i = 0;
        while (1.001 * delta < residual && i < itermax) {
            ++i;
            t += h;
            const double a = a0 / t;
            const Vector v = solve_reg(ctx, a);
            const Vector u_trial = step_update(u, v, h);
            const double r_trial = detail::residual_norm(ctx, u_trial);
            if (r_trial > 0.9 * delta) {
                u = u_trial;
                residual = r_trial;
                a_last = a;
                res.schedule.times.push_back(t - 1.0);
                res.schedule.a_values.push_back(a);
                res.schedule.h_values.push_back(h);
                if (!halve) h *= q;
            } else {
                t -= h;
                h /= 2.0;
                halve = true;
                ++res.schedule.rejected;
            }
        }
        res.schedule.halved = halve;
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
