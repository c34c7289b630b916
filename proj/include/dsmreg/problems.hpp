#pragma once

// Test-problem generators: Hilbert systems with their analytic inverse and
// condition numbers, the inverse heat equation (Volterra kernel), and the
// second-derivative (deriv2) Green's-function systems. Noisy right-hand
// sides are produced by the frozen generator in noise.hpp.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "dsmreg/dense.hpp"
#include "dsmreg/noise.hpp"

namespace dsmreg {

// ---------------------------------------------------------------------------
// Hilbert matrices
// ---------------------------------------------------------------------------

inline Matrix hilbert(int n) {
    if (n < 1) throw std::invalid_argument("hilbert: n must be >= 1");
    Matrix h(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            h(i, j) = 1.0 / static_cast<double>(i + j + 1);
    return h;
}

namespace detail {

/// Binomial coefficient as a double, accumulated multiplicatively so the
/// partial products never exceed the final value.
inline double binom(int a, int b) {
    if (b < 0 || b > a) return 0.0;
    if (b > a - b) b = a - b;
    double r = 1.0;
    for (int k = 1; k <= b; ++k) r *= static_cast<double>(a - b + k) / k;
    return r;
}

}  // namespace detail

/// Analytic inverse of hilbert(n):
///   h_ij = (-1)^{i+j} (i+j-1) C(n+i-1, n-j) C(n+j-1, n-i) C(i+j-2, i-1)^2
/// (1-based i, j). Entries stay within double range up to n = 120.
inline Matrix inv_hilbert(int n) {
    if (n < 1) throw std::invalid_argument("inv_hilbert: n must be >= 1");
    if (n > 120) throw std::out_of_range("inv_hilbert: entries overflow double for n > 120");
    Matrix h(n, n);
    for (int j = 1; j <= n; ++j) {
        for (int i = 1; i <= n; ++i) {
            const double c1 = detail::binom(n + i - 1, n - j);
            const double c2 = detail::binom(n + j - 1, n - i);
            const double c3 = detail::binom(i + j - 2, i - 1);
            double v = static_cast<double>(i + j - 1) * c1 * c2 * c3 * c3;
            if ((i + j) % 2 != 0) v = -v;
            h(i - 1, j - 1) = v;
        }
    }
    return h;
}

/// cond(H_n) = ||H_n|| ||H_n^{-1}|| with both norms taken as dominant
/// eigenvalues (H_n is symmetric positive definite).
inline double cond_hilbert(int n) {
    const double lo = max_eigenvalue(hilbert(n)).value;
    const double hi = max_eigenvalue(inv_hilbert(n)).value;
    return lo * hi;
}

// ---------------------------------------------------------------------------
// Inverse heat equation (Volterra kernel of the first kind on [0,1])
// ---------------------------------------------------------------------------

/// k(t) = t^{-3/2} / (2 kappa sqrt(pi)) * exp(-1 / (4 kappa^2 t)), t > 0.
inline double heat_kernel(double t, double kappa = 1.0) {
    return std::pow(t, -1.5) / (2.0 * kappa * std::sqrt(M_PI)) *
           std::exp(-1.0 / (4.0 * kappa * kappa * t));
}

struct HeatSystem {
    Matrix a;
    Vector y;
};

/// Default exact solution: the standard test profile for this problem, a
/// quadratic ramp into a parabolic hump with an exponential tail, supported
/// on the first half of the indices. Sampled at midpoints ti = 20(i-1/2)/n,
/// consistent with the midpoint quadrature of the kernel.
inline Vector heat_profile(int n) {
    Vector x(n, 0.0);
    for (int i = 1; i <= n / 2; ++i) {
        const double ti = (i - 0.5) * 20.0 / n;
        if (ti < 2.0)
            x[i - 1] = 0.75 * ti * ti / 4.0;
        else if (ti < 3.0)
            x[i - 1] = 0.75 + (ti - 2.0) * (3.0 - ti);
        else
            x[i - 1] = 0.75 * std::exp(-(ti - 3.0) * 2.0);
    }
    return x;
}

/// Midpoint-rule collocation of the convolution kernel K(s,t) = k(s-t).
/// Quadrature nodes t_j = (j-1/2)h, collocation points s_i = i h, h = 1/n,
/// so A is lower-triangular Toeplitz. The exact solution defaults to
/// heat_profile(n); pass `profile` to override.
inline HeatSystem heat_system(int n, double kappa = 1.0, const Vector* profile = nullptr) {
    if (n < 2) throw std::invalid_argument("heat_system: n must be >= 2");
    if (!(kappa > 0.0)) throw std::invalid_argument("heat_system: kappa must be > 0");
    const double h = 1.0 / n;
    Matrix a(n, n);
    // Toeplitz: the value depends only on i - j.
    std::vector<double> band(n);
    for (int d = 0; d < n; ++d) band[d] = h * heat_kernel((d + 0.5) * h, kappa);
    for (int j = 0; j < n; ++j)
        for (int i = j; i < n; ++i) a(i, j) = band[i - j];

    Vector y(n);
    if (profile) {
        if (static_cast<int>(profile->size()) != n)
            throw DimensionMismatch("heat_system: profile length mismatch");
        y = *profile;
    } else {
        y = heat_profile(n);
    }
    return {std::move(a), std::move(y)};
}

// ---------------------------------------------------------------------------
// deriv2: second-derivative Green's-function systems, cases 1..3
// ---------------------------------------------------------------------------

/// Green's function K(s,t) = s(t-1) for s < t, t(s-1) for s >= t.
inline double deriv2_kernel(double s, double t) {
    return s < t ? s * (t - 1.0) : t * (s - 1.0);
}

struct Deriv2System {
    Matrix a;
    Vector y;
    Vector f_analytic;  ///< f(s_i) of the continuous problem, diagnostics only
};

inline Deriv2System deriv2_system(int n, int case_id) {
    if (n < 2) throw std::invalid_argument("deriv2_system: n must be >= 2");
    if (case_id < 1 || case_id > 3)
        throw std::invalid_argument("deriv2_system: case must be 1, 2 or 3");
    const double h = 1.0 / n;
    Matrix a(n, n);
    for (int j = 0; j < n; ++j) {
        const double t = (j + 0.5) * h;
        for (int i = 0; i < n; ++i) {
            const double s = (i + 0.5) * h;
            a(i, j) = h * deriv2_kernel(s, t);
        }
    }
    Vector y(n), f(n);
    for (int i = 0; i < n; ++i) {
        const double t = (i + 0.5) * h;
        const double s = t;
        switch (case_id) {
            case 1:
                y[i] = t;
                f[i] = (s * s * s - s) / 6.0;
                break;
            case 2:
                y[i] = std::exp(t);
                f[i] = std::exp(s) + (1.0 - M_E) * s - 1.0;
                break;
            default:
                y[i] = t < 0.5 ? t : 1.0 - t;
                f[i] = s < 0.5 ? (4.0 * s * s * s - 3.0 * s) / 24.0
                               : (-4.0 * s * s * s + 12.0 * s * s - 9.0 * s + 1.0) / 24.0;
                break;
        }
    }
    return {std::move(a), std::move(y), std::move(f)};
}

// ---------------------------------------------------------------------------
// Exact-solution profiles for the Hilbert experiments
// ---------------------------------------------------------------------------

enum class Profile { Sqrt, Square, Sine };

inline Profile profile_from_string(const std::string& s) {
    if (s == "sqrt") return Profile::Sqrt;
    if (s == "square") return Profile::Square;
    if (s == "sine") return Profile::Sine;
    throw std::invalid_argument("unknown profile: " + s);
}

inline std::string to_string(Profile p) {
    switch (p) {
        case Profile::Sqrt: return "sqrt";
        case Profile::Square: return "square";
        default: return "sine";
    }
}

/// x_i = sqrt(2 pi (i-1)/n), ((i-1)/n)^2 or sin(2 pi (i-1)/n), 1-based i.
inline Vector exact_profile(Profile kind, int n) {
    if (n < 1) throw std::invalid_argument("exact_profile: n must be >= 1");
    Vector x(n);
    for (int i = 0; i < n; ++i) {
        const double r = static_cast<double>(i) / n;
        switch (kind) {
            case Profile::Sqrt: x[i] = std::sqrt(2.0 * r * M_PI); break;
            case Profile::Square: x[i] = r * r; break;
            case Profile::Sine: x[i] = std::sin(2.0 * r * M_PI); break;
        }
    }
    return x;
}

// ---------------------------------------------------------------------------
// Noisy instances
// ---------------------------------------------------------------------------

struct NoiseSpec {
    double delta_rel = 0.0;
    std::uint64_t seed = 0;
};

struct ProblemInstance {
    Matrix a;
    Vector y;        ///< exact solution
    Vector f;        ///< exact data, always A y
    Vector f_delta;  ///< noisy data
    double delta = 0.0;      ///< ||f_delta - f||, stored as computed
    double delta_rel = 0.0;
    std::uint64_t seed = 0;
    std::string label;
};

/// f = A y; e is drawn from the frozen counter generator, rescaled so that
/// ||e|| = delta_rel ||f||, and added to f. Pure in (A, y, noise).
inline ProblemInstance make_instance(const Matrix& a, const Vector& y,
                                     const NoiseSpec& noise, std::string label = "") {
    if (static_cast<int>(y.size()) != a.cols())
        throw DimensionMismatch("make_instance: dimension mismatch");
    ProblemInstance inst;
    inst.a = a;
    inst.y = y;
    inst.f = mat_vec(a, y);
    inst.delta_rel = noise.delta_rel;
    inst.seed = noise.seed;
    inst.label = std::move(label);

    if (noise.delta_rel == 0.0) {
        inst.f_delta = inst.f;
        inst.delta = 0.0;
        return inst;
    }
    const double nf = norm2(inst.f);
    if (nf == 0.0)
        throw std::invalid_argument("make_instance: zero exact data with delta_rel > 0");

    Vector e = normal_vector(noise.seed, inst.f.size());
    const double scale = noise.delta_rel * nf / norm2(e);
    for (double& v : e) v *= scale;
    inst.f_delta = inst.f;
    for (std::size_t i = 0; i < e.size(); ++i) inst.f_delta[i] += e[i];
    inst.delta = norm2(e);
    return inst;
}

// ---------------------------------------------------------------------------
// JSON persistence (matrix stored row-major)
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const ProblemInstance& inst) {
    const int n = inst.a.rows();
    std::vector<double> rowmajor;
    rowmajor.reserve(static_cast<std::size_t>(n) * inst.a.cols());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < inst.a.cols(); ++j) rowmajor.push_back(inst.a(i, j));
    return nlohmann::json{{"n", n},
                          {"label", inst.label},
                          {"seed", inst.seed},
                          {"delta_rel", inst.delta_rel},
                          {"delta", inst.delta},
                          {"matrix", rowmajor},
                          {"y", inst.y},
                          {"f", inst.f},
                          {"f_delta", inst.f_delta}};
}

inline ProblemInstance instance_from_json(const nlohmann::json& j) {
    ProblemInstance inst;
    const int n = j.at("n").get<int>();
    const auto rowmajor = j.at("matrix").get<std::vector<double>>();
    if (rowmajor.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("instance_from_json: matrix size mismatch");
    inst.a = Matrix(n, n);
    for (int i = 0; i < n; ++i)
        for (int jj = 0; jj < n; ++jj)
            inst.a(i, jj) = rowmajor[static_cast<std::size_t>(i) * n + jj];
    inst.label = j.at("label").get<std::string>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    inst.delta_rel = j.at("delta_rel").get<double>();
    inst.delta = j.at("delta").get<double>();
    inst.y = j.at("y").get<Vector>();
    inst.f = j.at("f").get<Vector>();
    inst.f_delta = j.at("f_delta").get<Vector>();
    return inst;
}

inline void save_instance(const ProblemInstance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << to_json(inst).dump(2) << "\n";
}

inline ProblemInstance load_instance(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    nlohmann::json j;
    in >> j;
    return instance_from_json(j);
}

}  // namespace dsmreg
