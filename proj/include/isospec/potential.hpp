#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "errors.hpp"

namespace isospec {

using vector = Eigen::VectorXd;
using matrix = Eigen::MatrixXd;

namespace detail {
inline double input_tolerance(const vector& v) { return 1e-12 * std::max(1.0, v.norm()); }
} // namespace detail

// One period q_1..q_{N+1} of a zero-mean periodic potential, stored 0-based.
class potential {
public:
    explicit potential(vector values) : v_(std::move(values)) {
        if (v_.size() < 2) throw invalid_range("potential: period must be at least 2");
        if (std::abs(v_.sum()) > detail::input_tolerance(v_))
            throw not_zero_mean("potential: values do not sum to zero (sum = " +
                                std::to_string(v_.sum()) + ")");
    }

    static potential zero(int period) { return potential(vector::Zero(period)); }

    const vector& values() const noexcept { return v_; }
    int period() const noexcept { return static_cast<int>(v_.size()); }
    double operator[](int i) const { return v_[i]; }
    double norm() const { return v_.norm(); }

private:
    vector v_;
};

// e_m-hat, m = 1..k: unit vector of the sine basis of the odd subspace of period 2k.
inline vector basis_vector(int k, int m) {
    if (k < 1 || m < 1 || m > k) throw invalid_range("basis_vector: need 1 <= m <= k");
    const double c = (m == k ? std::sqrt(0.5) : 1.0) / std::sqrt(double(k));
    vector e(2 * k);
    for (int n = 1; n <= 2 * k; ++n)
        e[n - 1] = c * std::sin((2 * n - 1) * m * std::numbers::pi / (2.0 * k));
    return e;
}

// Columns are e_1-hat .. e_k-hat (2k x k).
inline matrix basis_matrix(int k) {
    matrix b(2 * k, k);
    for (int m = 1; m <= k; ++m) b.col(m - 1) = basis_vector(k, m);
    return b;
}

// Potential in the odd subspace q_{2k+1-n} = -q_n, together with its sine coordinates.
class odd_potential {
public:
    int k() const noexcept { return static_cast<int>(qhat_.size()); }
    const vector& values() const noexcept { return p_.values(); }
    const vector& qhat() const noexcept { return qhat_; }
    // independent components q_1..q_k
    vector free() const { return p_.values().head(k()); }
    const potential& base() const noexcept { return p_; }
    operator const potential&() const noexcept { return p_; }
    double norm() const { return p_.norm(); }

    friend odd_potential odd_from_coords(int k, const vector& qhat);
    friend odd_potential odd_from_values(const vector& values);

private:
    odd_potential(potential p, vector qhat) : p_(std::move(p)), qhat_(std::move(qhat)) {}

    potential p_;
    vector qhat_;
};

// Antisymmetry residual max |q_{2k+1-n} + q_n|.
inline double odd_residual(const vector& v) {
    const auto n = v.size();
    double r = 0;
    for (Eigen::Index i = 0; i < n; ++i) r = std::max(r, std::abs(v[i] + v[n - 1 - i]));
    return r;
}

inline vector coords_from_values(const vector& values) {
    if (values.size() < 2 || values.size() % 2 != 0)
        throw not_odd("coords_from_values: odd potentials have even period");
    const double res = odd_residual(values);
    if (res > detail::input_tolerance(values))
        throw not_odd("coords_from_values: antisymmetry residual " + std::to_string(res));
    const int k = static_cast<int>(values.size() / 2);
    return basis_matrix(k).transpose() * values;
}

inline odd_potential odd_from_coords(int k, const vector& qhat) {
    if (k < 1 || qhat.size() != k) throw invalid_range("odd_from_coords: qhat must have k entries");
    vector v = basis_matrix(k) * qhat;
    // exact antisymmetry; the sine sums only agree to roundoff
    for (int i = 0; i < k; ++i) v[2 * k - 1 - i] = -v[i];
    return odd_potential(potential(std::move(v)), qhat);
}

inline odd_potential odd_from_values(const vector& values) {
    vector qhat = coords_from_values(values);
    return odd_potential(potential(values), std::move(qhat));
}

// Odd potential from its independent components q_1..q_k.
inline odd_potential odd_from_free(const vector& free) {
    const auto k = free.size();
    if (k < 1) throw invalid_range("odd_from_free: need at least one component");
    vector v(2 * k);
    v.head(k) = free;
    v.tail(k) = -free.reverse();
    return odd_from_values(v);
}

// Componentwise sign flip of the sine coordinates.
inline odd_potential flip(const odd_potential& q, const vector& signs) {
    return odd_from_coords(q.k(), q.qhat().cwiseProduct(signs));
}

// Cyclic rotation (q_2, .., q_{N+1}, q_1).
inline potential shift(const potential& q) {
    const int n = q.period();
    vector v(n);
    for (int i = 0; i < n; ++i) v[i] = q[(i + 1) % n];
    return potential(std::move(v));
}

// Order reversal (q_{N+1}, .., q_1).
inline potential reflect(const potential& q) { return potential(q.values().reverse()); }

// (q, shift^s q); s is taken modulo the period.
inline double quad_form(const potential& q, int s) {
    const int n = q.period();
    s = ((s % n) + n) % n;
    double acc = 0;
    for (int i = 0; i < n; ++i) acc += q[i] * q[(i + s) % n];
    return acc;
}

// (f_1, .., f_k) for a potential of period 2k.
inline vector quad_forms(const odd_potential& q) {
    vector f(q.k());
    for (int s = 1; s <= q.k(); ++s) f[s - 1] = quad_form(q, s);
    return f;
}

// W[n][m] = cos(pi n m / k), n, m = 1..k.
inline matrix w_matrix(int k) {
    matrix w(k, k);
    for (int n = 1; n <= k; ++n)
        for (int m = 1; m <= k; ++m) w(n - 1, m - 1) = std::cos(std::numbers::pi * n * m / k);
    return w;
}

// U[m][j] = (e_m - e_{2k+1-m}, e_j-hat) = 2 e_j-hat[m]: derivative of q-hat_j with respect to the
// free component q_m.
inline matrix u_matrix(int k) { return 2.0 * basis_matrix(k).topRows(k); }

} // namespace isospec
