#pragma once

// Test-only oracles, deliberately independent of the library's solve paths:
// Gaussian elimination with partial pivoting and a bisection root finder.

#include <cmath>
#include <functional>
#include <stdexcept>

#include "dsmreg/dense.hpp"

namespace oracle {

/// Solve M x = b by Gaussian elimination with partial pivoting.
inline dsmreg::Vector gauss_solve(dsmreg::Matrix m, dsmreg::Vector b) {
    const int n = m.rows();
    if (m.cols() != n || static_cast<int>(b.size()) != n)
        throw std::invalid_argument("gauss_solve: dimension mismatch");
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
        if (m(piv, k) == 0.0) throw std::runtime_error("gauss_solve: singular matrix");
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double l = m(i, k) / m(k, k);
            if (l == 0.0) continue;
            for (int j = k; j < n; ++j) m(i, j) -= l * m(k, j);
            b[i] -= l * b[k];
        }
    }
    dsmreg::Vector x(n);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= m(i, j) * x[j];
        x[i] = s / m(i, i);
    }
    return x;
}

/// Bisection on [lo, hi] for f(x) = 0; f(lo) and f(hi) must bracket a root.
inline double bisect(const std::function<double(double)>& f, double lo, double hi,
                     double rel_tol = 1e-9, int max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw std::invalid_argument("bisect: interval does not bracket a root");
    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm == 0.0 || (hi - lo) <= rel_tol * std::abs(mid)) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Same as bisect but the bracket is searched on a log grid first; used for
/// discrepancy roots where only an upper endpoint is known.
inline double bisect_log(const std::function<double(double)>& f, double lo, double hi,
                         double rel_tol = 1e-9) {
    return bisect(f, lo, hi, rel_tol);
}

}  // namespace oracle
