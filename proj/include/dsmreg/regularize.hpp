#pragma once

// Shared regularization context: T = AᵀA, g = Aᵀf_δ, counted regularized
// solves, the discrepancy function φ(a), the a_M upper bound, and the
// find-a₀ search.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "dsmreg/dense.hpp"

namespace dsmreg {

/// Thrown when a regularized solve fails because a sits below the rounding
/// floor of T; carries the offending parameter.
class RegSolveError : public std::runtime_error {
public:
    RegSolveError(double a_value, int pivot)
        : std::runtime_error("regularized solve failed at a = " + std::to_string(a_value) +
                             " (pivot " + std::to_string(pivot) + " not positive)"),
          a(a_value) {}
    double a;
};

class FindA0Error : public std::runtime_error {
public:
    FindA0Error(std::string msg, std::vector<std::pair<double, double>> trace_in)
        : std::runtime_error(std::move(msg)), trace(std::move(trace_in)) {}
    std::vector<std::pair<double, double>> trace;  ///< (a, c) per evaluation
};

struct RegContext {
    Matrix a_mat;
    Matrix t;            ///< AᵀA
    Vector g;            ///< Aᵀ f_δ
    Vector f_delta;
    double norm_a_sq = 0.0;  ///< max eigenvalue of AᵀA
    bool norm_converged = true;
    long n_linsol = 0;   ///< monotone count of regularized solves

    /// Copy with the solve counter reset; used to give each method its own
    /// accounting while reusing the cached T, g and norm estimate.
    RegContext fresh_counter() const {
        RegContext c = *this;
        c.n_linsol = 0;
        return c;
    }
};

inline RegContext new_context(const Matrix& a, const Vector& f_delta) {
    if (static_cast<int>(f_delta.size()) != a.rows())
        throw DimensionMismatch("new_context: dimension mismatch");
    RegContext ctx;
    ctx.a_mat = a;
    ctx.t = ata(a);
    ctx.g = mat_tvec(a, f_delta);
    ctx.f_delta = f_delta;
    const EigenEstimate est = max_eigenvalue(ctx.t);
    ctx.norm_a_sq = est.value;
    ctx.norm_converged = est.converged;
    return ctx;
}

/// u_a = (T + aI)⁻¹ g. Each call factors afresh and increments n_linsol.
inline Vector solve_reg(RegContext& ctx, double a) {
    if (!(a > 0.0)) throw std::invalid_argument("solve_reg: a must be > 0");
    Matrix ta = ctx.t;
    for (int i = 0; i < ta.rows(); ++i) ta(i, i) += a;
    ++ctx.n_linsol;
    try {
        return spd_solve(ta, ctx.g);
    } catch (const NotPositiveDefinite& e) {
        throw RegSolveError(a, e.pivot);
    }
}

/// φ(a) = ||A u_a - f_δ||; costs one counted solve.
inline double phi(RegContext& ctx, double a) {
    const Vector u = solve_reg(ctx, a);
    Vector r = mat_vec(ctx.a_mat, u);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= ctx.f_delta[i];
    return norm2(r);
}

/// a_M <= δ ||A||² / (||f_δ|| - δ).
inline double a_m_upper_bound(const RegContext& ctx, double delta) {
    const double nf = norm2(ctx.f_delta);
    if (!(nf > delta))
        throw std::invalid_argument("a_m_upper_bound: noise dominates data");
    return delta * ctx.norm_a_sq / (nf - delta);
}

struct A0Result {
    double a0 = 0.0;
    double c = 0.0;      ///< φ(a0)/δ at acceptance, in [1, 2]
    int iterations = 0;  ///< loop passes beyond the initial evaluation
};

/// find-a₀: starting from a = ||A||² δ_rel / 3, drive c = φ(a)/δ into [1, 2].
/// Update rules: c > 3 → a := 0.5 a/(c-1); 2 < c <= 3 → a := a/3;
/// c < 1 → a := 3a. One counted solve per evaluation; hard cap 100 passes.
inline A0Result find_a0(RegContext& ctx, double delta, double delta_rel) {
    if (!(delta > 0.0)) throw std::invalid_argument("find_a0: delta must be > 0");
    if (!(norm2(ctx.f_delta) > delta))
        throw std::invalid_argument("find_a0: noise dominates data");

    double a = ctx.norm_a_sq * delta_rel / 3.0;
    double c = phi(ctx, a) / delta;
    std::vector<std::pair<double, double>> trace{{a, c}};
    int iters = 0;
    while (c > 2.0 || c < 1.0) {
        if (iters >= 100)
            throw FindA0Error("find_a0: iteration cap reached", std::move(trace));
        if (c > 3.0)
            a = 0.5 * a / (c - 1.0);
        else if (c > 2.0)
            a = a / 3.0;
        else
            a = 3.0 * a;
        c = phi(ctx, a) / delta;
        trace.emplace_back(a, c);
        ++iters;
    }
    return {a, c, iters};
}

/// One damping step: u⁺ = e^{-h} u + (1 - e^{-h}) v. The weight on v uses
/// expm1 so tiny h does not cancel.
inline Vector step_update(const Vector& u, const Vector& v, double h) {
    if (u.size() != v.size()) throw DimensionMismatch("step_update: size mismatch");
    if (!(h > 0.0)) throw std::invalid_argument("step_update: h must be > 0");
    const double w = std::exp(-h);
    const double wv = -std::expm1(-h);
    Vector out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = w * u[i] + wv * v[i];
    return out;
}

/// The damping schedule actually executed by a solver run: elapsed times
/// after each accepted step, the a and h used on that step, and whether a
/// rejection ever forced step-halving.
struct Schedule {
    std::vector<double> times;     ///< cumulative elapsed time, strictly increasing
    std::vector<double> a_values;  ///< a used on each accepted step
    std::vector<double> h_values;  ///< executed step sizes
    bool halved = false;
    int rejected = 0;              ///< rejected passes (each still cost one solve)
};

/// Closed-form partial sum
///   u_n = u₀ e^{-t_n} + Σ_i (e^{t_i - t_n} - e^{t_{i-1} - t_n}) (T + a_{i-1}I)⁻¹ g
/// with t₀ = 0; the independent cross-check for the step recursion.
inline Vector closed_form_u(RegContext& ctx, const Vector& u0, const Schedule& schedule) {
    const std::size_t m = schedule.times.size();
    if (m == 0) throw std::invalid_argument("closed_form_u: empty schedule");
    if (schedule.a_values.size() != m)
        throw std::invalid_argument("closed_form_u: times/a_values length mismatch");
    const double tn = schedule.times.back();
    Vector u(u0.size(), 0.0);
    const double w0 = std::exp(-tn);
    for (std::size_t i = 0; i < u0.size(); ++i) u[i] = w0 * u0[i];
    double t_prev = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double ti = schedule.times[k];
        if (!(ti > t_prev) && k > 0)
            throw std::invalid_argument("closed_form_u: times must be strictly increasing");
        const double w = std::exp(ti - tn) - std::exp(t_prev - tn);
        const Vector v = solve_reg(ctx, schedule.a_values[k]);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] += w * v[i];
        t_prev = ti;
    }
    return u;
}

}  // namespace dsmreg
