#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "polynomial.hpp"
#include "potential.hpp"

namespace isospec {

// Fundamental solutions of y_{n+1} = (lambda - q_n) y_n - y_{n-1}.
// phi[0..N+2] with phi_0 = 0, phi_1 = 1; theta[0..N+1] with theta_0 = 1, theta_1 = 0.
struct fundamental_solutions {
    std::vector<double> phi;
    std::vector<double> theta;
};

inline fundamental_solutions eval_fundamental(double lambda, const potential& q) {
    const int p = q.period();
    fundamental_solutions s;
    s.phi.resize(p + 2);
    s.theta.resize(p + 1);
    s.phi[0] = 0;
    s.phi[1] = 1;
    s.theta[0] = 1;
    s.theta[1] = 0;
    for (int n = 1; n <= p; ++n) {
        const double a = lambda - q[(n - 1) % p];
        s.phi[n + 1] = a * s.phi[n] - s.phi[n - 1];
        if (n + 1 <= p) s.theta[n + 1] = a * s.theta[n] - s.theta[n - 1];
    }
    return s;
}

inline double eval_delta(double lambda, const potential& q) {
    const auto s = eval_fundamental(lambda, q);
    return s.phi.back() + s.theta.back();
}

// Same recurrence on coefficient sequences. T = double, or an integer type for exact results.
template <typename T>
std::vector<polynomial<T>> fundamental_polys(std::span<const T> q, int count, bool theta) {
    std::vector<polynomial<T>> y(count + 1);
    y[0] = polynomial<T>::constant(theta ? T(1) : T(0));
    if (count >= 1) y[1] = polynomial<T>::constant(theta ? T(0) : T(1));
    for (int n = 1; n < count; ++n) {
        const T qn = q[(n - 1) % q.size()];
        y[n + 1] = polynomial<T>::linear(qn) * y[n] - y[n - 1];
    }
    return y;
}

template <typename T>
polynomial<T> delta_poly_of(std::span<const T> q) {
    const int p = static_cast<int>(q.size());
    return fundamental_polys<T>(q, p + 1, false)[p + 1] + fundamental_polys<T>(q, p, true)[p];
}

// Monic degree-(N+1) polynomial holding Delta(., q).
class discriminant_poly {
public:
    explicit discriminant_poly(polynomial<double> p) : p_(std::move(p)) {
        if (p_.degree() < 1 || std::abs(p_.coeffs().back() - 1.0) > 1e-10)
            throw domain_error("discriminant_poly: polynomial is not monic");
    }

    const polynomial<double>& poly() const noexcept { return p_; }
    const std::vector<double>& coeffs() const noexcept { return p_.coeffs(); }
    int degree() const noexcept { return p_.degree(); }
    double operator()(double x) const { return p_(x); }

private:
    polynomial<double> p_;
};

inline discriminant_poly delta_poly(const potential& q) {
    const auto& v = q.values();
    return discriminant_poly(delta_poly_of<double>(std::span<const double>(v.data(), v.size())));
}

// d/de Delta(., q + e*dir), by differentiating the coefficient recurrence.
inline polynomial<double> delta_poly_directional(const potential& q, const vector& dir) {
    const int p = q.period();
    using poly = polynomial<double>;
    auto run = [&](bool theta, int count) {
        poly y0 = poly::constant(theta ? 1.0 : 0.0), y1 = poly::constant(theta ? 0.0 : 1.0);
        poly d0, d1;
        for (int n = 1; n < count; ++n) {
            const poly a = poly::linear(q[(n - 1) % p]);
            poly y2 = a * y1 - y0;
            poly d2 = a * d1 - d0 - dir[(n - 1) % p] * y1;
            y0 = std::move(y1);
            y1 = std::move(y2);
            d0 = std::move(d1);
            d1 = std::move(d2);
        }
        return d1;
    };
    return run(false, p + 1) + run(true, p);
}

// (phi_1, phi_3, .., phi_{2k-1}): coefficients of lambda^{2k-2}, .., lambda^0.
using phi_vector = vector;

inline vector odd_index_coeffs(const polynomial<double>& p, int k) {
    vector out(k);
    for (int n = 1; n <= k; ++n) out[n - 1] = p[2 * k - 2 * n];
    return out;
}

inline phi_vector phi_map(const odd_potential& q) { return odd_index_coeffs(delta_poly(q).poly(), q.k()); }

// d phi_{2n-1} / d q_m in the free chart q_1..q_k (q_{2k+1-m} = -q_m moves along).
inline matrix jacobian_phi(const odd_potential& q) {
    const int k = q.k();
    matrix j(k, k);
    for (int m = 0; m < k; ++m) {
        vector dir = vector::Zero(2 * k);
        dir[m] = 1;
        dir[2 * k - 1 - m] = -1;
        j.col(m) = odd_index_coeffs(delta_poly_directional(q, dir), k);
    }
    return j;
}

// Same Jacobian in the sine-coordinate chart.
inline matrix jacobian_phi_qhat(const odd_potential& q) {
    return jacobian_phi(q) * basis_matrix(q.k()).topRows(q.k());
}

// -2 cos(pi n / 2k): critical points (and collapsed edges) of Delta(., 0).
inline double rest_critical(int k, int n) { return -2.0 * std::cos(std::numbers::pi * n / (2.0 * k)); }

// Delta''(rest_critical(k, n), 0) in closed form.
inline double rest_second_derivative(int k, int n) {
    const double s = std::sin(std::numbers::pi * n / (2.0 * k));
    return -2.0 * k * k * (n % 2 == 0 ? 1.0 : -1.0) / (s * s);
}

// (lambda^{2k-2}, .., lambda^2, 1)
inline vector lambda_powers(int k, double lambda) {
    vector v(k);
    double x = 1;
    for (int i = k - 1; i >= 0; --i) {
        v[i] = x;
        x *= lambda * lambda;
    }
    return v;
}

struct expansion_matrices {
    matrix A;                    // column m: even coefficients of phi0_m * phi0_{2k-m}, top degree first
    vector Phi0;                 // phi_map(0)
    std::vector<std::int64_t> R; // R[m], m = 0..k: |coefficient of lambda^{2m}| in Delta(., 0)
    // Linear map from (f_1..f_k) to the quadratic part of phi_map. The last form f_k pairs each
    // site with its antipode and so counts every product twice; its column carries a factor 1/2.
    matrix forms_to_phi;
};

inline expansion_matrices make_expansion_matrices(int k) {
    if (k < 1) throw invalid_range("expansion_matrices: k must be positive");
    std::vector<double> zeros(2 * k, 0.0);
    const auto phi0 = fundamental_polys<double>(std::span<const double>(zeros), 2 * k, false);

    expansion_matrices e;
    e.A.resize(k, k);
    for (int m = 1; m <= k; ++m) {
        const auto prod = phi0[m] * phi0[2 * k - m];
        for (int n = 1; n <= k; ++n) e.A(n - 1, m - 1) = prod[2 * k - 2 * n];
    }

    e.R.resize(k + 1);
    for (int m = 0; m <= k; ++m) {
        // 2k/(k+m) * binom(k+m, 2m), exact
        std::int64_t b = 1;
        for (int i = 1; i <= 2 * m; ++i) b = b * (k + m - 2 * m + i) / i;
        e.R[m] = 2 * k * b / (k + m);
    }
    e.Phi0.resize(k);
    for (int n = 1; n <= k; ++n) e.Phi0[n - 1] = (n % 2 == 0 ? 1.0 : -1.0) * double(e.R[k - n]);

    vector d = vector::Ones(k);
    d[k - 1] = 0.5;
    e.forms_to_phi = e.A * d.asDiagonal();
    return e;
}

} // namespace isospec
