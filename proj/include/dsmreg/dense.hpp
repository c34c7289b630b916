#pragma once

// Dense real linear algebra: column-major matrices, SPD Cholesky solve,
// and dominant-eigenvalue estimation by power iteration.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsmreg {

using Vector = std::vector<double>;

/// Thrown by spd_solve when a pivot is not strictly positive. Callers that
/// sweep the regularization parameter treat this as "a below rounding floor",
/// not as a crash.
class NotPositiveDefinite : public std::runtime_error {
public:
    explicit NotPositiveDefinite(int pivot_index)
        : std::runtime_error("matrix is not positive definite (pivot " +
                             std::to_string(pivot_index) + ")"),
          pivot(pivot_index) {}
    int pivot;
};

class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Column-major dense real matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {
        if (rows <= 0 || cols <= 0)
            throw std::invalid_argument("Matrix dimensions must be positive");
    }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return data_[static_cast<std::size_t>(j) * rows_ + i]; }
    double operator()(int i, int j) const { return data_[static_cast<std::size_t>(j) * rows_ + i]; }

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    bool is_symmetric(double tol = 1e-12) const {
        if (rows_ != cols_) return false;
        for (int j = 0; j < cols_; ++j)
            for (int i = 0; i < j; ++i)
                if (std::abs((*this)(i, j) - (*this)(j, i)) >
                    tol * (1.0 + std::abs((*this)(i, j))))
                    return false;
        return true;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

inline double dot(const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw DimensionMismatch("dot: size mismatch");
    long double s = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<long double>(x[i]) * y[i];
    return static_cast<double>(s);
}

inline double norm2(const Vector& x) {
    long double s = 0.0L;
    for (double v : x) s += static_cast<long double>(v) * v;
    // the sum of squares can exceed double range even when the norm does not
    return static_cast<double>(sqrtl(s));
}

inline Vector mat_vec(const Matrix& m, const Vector& x) {
    if (static_cast<int>(x.size()) != m.cols())
        throw DimensionMismatch("mat_vec: dimension mismatch");
    Vector y(m.rows(), 0.0);
    for (int j = 0; j < m.cols(); ++j) {
        const double xj = x[j];
        for (int i = 0; i < m.rows(); ++i) y[i] += m(i, j) * xj;
    }
    return y;
}

/// y = Mᵀx.
inline Vector mat_tvec(const Matrix& m, const Vector& x) {
    if (static_cast<int>(x.size()) != m.rows())
        throw DimensionMismatch("mat_tvec: dimension mismatch");
    Vector y(m.cols(), 0.0);
    for (int j = 0; j < m.cols(); ++j) {
        long double s = 0.0L;
        for (int i = 0; i < m.rows(); ++i) s += static_cast<long double>(m(i, j)) * x[i];
        y[j] = static_cast<double>(s);
    }
    return y;
}

/// T = AᵀA, accumulated in extended precision and symmetrized exactly.
inline Matrix ata(const Matrix& a) {
    Matrix t(a.cols(), a.cols());
    for (int j = 0; j < a.cols(); ++j) {
        for (int i = 0; i <= j; ++i) {
            long double s = 0.0L;
            for (int k = 0; k < a.rows(); ++k)
                s += static_cast<long double>(a(k, i)) * a(k, j);
            const double v = static_cast<double>(s);
            t(i, j) = v;
            t(j, i) = v;
        }
    }
    return t;
}

/// Solves M u = b for symmetric positive definite M via Cholesky. The
/// factorization is recomputed on every call; failure (non-positive pivot)
/// throws NotPositiveDefinite.
inline Vector spd_solve(const Matrix& m, const Vector& b) {
    const int n = m.rows();
    if (m.cols() != n || static_cast<int>(b.size()) != n)
        throw DimensionMismatch("spd_solve: dimension mismatch");

    // Lower Cholesky factor, column-major workspace.
    Matrix l = m;
    for (int j = 0; j < n; ++j) {
        long double d = l(j, j);
        for (int k = 0; k < j; ++k) d -= static_cast<long double>(l(j, k)) * l(j, k);
        if (!(d > 0.0L)) throw NotPositiveDefinite(j);
        const double ljj = std::sqrt(static_cast<double>(d));
        l(j, j) = ljj;
        for (int i = j + 1; i < n; ++i) {
            long double s = l(i, j);
            for (int k = 0; k < j; ++k) s -= static_cast<long double>(l(i, k)) * l(j, k);
            l(i, j) = static_cast<double>(s) / ljj;
        }
    }

    // Forward then backward substitution.
    Vector x = b;
    for (int i = 0; i < n; ++i) {
        long double s = x[i];
        for (int k = 0; k < i; ++k) s -= static_cast<long double>(l(i, k)) * x[k];
        x[i] = static_cast<double>(s) / l(i, i);
    }
    for (int i = n - 1; i >= 0; --i) {
        long double s = x[i];
        for (int k = i + 1; k < n; ++k) s -= static_cast<long double>(l(k, i)) * x[k];
        x[i] = static_cast<double>(s) / l(i, i);
    }
    return x;
}

struct EigenEstimate {
    double value = 0.0;
    bool converged = false;  ///< false means the 10000-iteration cap was hit
    int iterations = 0;
};

/// Dominant eigenvalue of a symmetric PSD matrix by power iteration.
/// Start vector is all-ones normalized, so results are reproducible.
inline EigenEstimate max_eigenvalue(const Matrix& m, double rel_tol = 1e-8,
                                    int max_iter = 10000) {
    const int n = m.rows();
    if (m.cols() != n) throw DimensionMismatch("max_eigenvalue: square matrix required");

    Vector x(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double lambda = 0.0;
    EigenEstimate est;
    for (int it = 1; it <= max_iter; ++it) {
        Vector y = mat_vec(m, x);
        const double rayleigh = dot(x, y);
        const double ny = norm2(y);
        est.iterations = it;
        if (ny == 0.0) {  // M x == 0: dominant eigenvalue of the PSD matrix is 0
            est.value = 0.0;
            est.converged = true;
            return est;
        }
        for (int i = 0; i < n; ++i) x[i] = y[i] / ny;
        if (it > 1 && std::abs(rayleigh - lambda) < rel_tol * std::abs(rayleigh)) {
            est.value = rayleigh;
            est.converged = true;
            return est;
        }
        lambda = rayleigh;
    }
    est.value = lambda;
    est.converged = false;
    return est;
}

}  // namespace dsmreg
