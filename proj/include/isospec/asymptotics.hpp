#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "band_structure.hpp"
#include "errors.hpp"
#include "lyapunov.hpp"
#include "potential.hpp"

namespace isospec {

// Leading small-potential behaviour at gap n = 1..k.
struct asymptotic_prediction {
    int n;
    double edge_shift_sq; // (lambda_n^{+-}(q) - lambda_n^{+-}(0))^2
    double height_sq;     // h_n(q)^2
};

namespace detail {
inline double middle_weight(int k, int n) { return n == k ? 2.0 : 1.0; }
} // namespace detail

// Row n of the map q-hat^2 -> edge shifts: (-2 / Delta''(lambda_n^0, 0)) Lambda(lambda_n^0)^T A' W,
// where A' is forms_to_phi. Equals middle_weight/(4k) times the n-th unit row.
inline vector edge_shift_row(int k, int n, const expansion_matrices& e) {
    const double lam = rest_critical(k, n);
    vector row = (lambda_powers(k, lam).transpose() * e.forms_to_phi * w_matrix(k)).transpose();
    return row * (-2.0 / rest_second_derivative(k, n));
}

inline std::vector<asymptotic_prediction> predict(const odd_potential& q) {
    const int k = q.k();
    std::vector<asymptotic_prediction> out;
    for (int n = 1; n <= k; ++n) {
        const double c = detail::middle_weight(k, n), s = std::sin(std::numbers::pi * n / (2.0 * k));
        const double x = q.qhat()[n - 1] * q.qhat()[n - 1];
        out.push_back({n, c / (4.0 * k) * x, c * k / (4.0 * s * s) * x});
    }
    return out;
}

// Delta with the quartic remainder dropped: Delta(lambda, 0) + (A' f(q), Lambda(lambda)).
inline double model_delta(double lambda, const odd_potential& q, const expansion_matrices& e) {
    const double base = eval_delta(lambda, potential::zero(2 * q.k()));
    return base + (e.forms_to_phi * quad_forms(q)).dot(lambda_powers(q.k(), lambda));
}

inline double model_delta(double lambda, const odd_potential& q) {
    return model_delta(lambda, q, make_expansion_matrices(q.k()));
}

// Chebyshev points of the first kind on [-half_width, half_width], ascending.
inline std::vector<double> lambda_grid(int count = 257, double half_width = 2.5) {
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) g[i] = -half_width * std::cos((2 * i + 1) * std::numbers::pi / (2.0 * count));
    return g;
}

// Largest change of the model over the grid when q-hat is flipped componentwise.
inline double sign_flip_model_invariance(const odd_potential& q, const vector& nu) {
    const auto e = make_expansion_matrices(q.k());
    const auto p = flip(q, nu);
    double m = 0;
    for (double x : lambda_grid()) m = std::max(m, std::abs(model_delta(x, p, e) - model_delta(x, q, e)));
    return m;
}

// Same for the exact Delta.
inline double sign_flip_delta_change(const odd_potential& q, const vector& nu) {
    const auto p = flip(q, nu);
    double m = 0;
    for (double x : lambda_grid()) m = std::max(m, std::abs(eval_delta(x, p) - eval_delta(x, q)));
    return m;
}

// Leading term of jacobian_phi: 2 A' W diag(q-hat) U^T.
inline matrix jacobian_phi_leading(const odd_potential& q, const expansion_matrices& e) {
    const int k = q.k();
    return 2.0 * e.forms_to_phi * w_matrix(k) * q.qhat().asDiagonal() * u_matrix(k).transpose();
}

// Geometric grid from a down to b with n points.
inline std::vector<double> geometric_grid(double a, double b, int n) {
    if (!(a > 0 && b > 0) || n < 1) throw invalid_range("geometric_grid: need a, b > 0 and n >= 1");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = n == 1 ? a : a * std::pow(b / a, double(i) / (n - 1));
    return g;
}

inline std::vector<double> default_t_grid() { return geometric_grid(1e-1, 1e-3, 9); }

// Least-squares slope of log10(err) against log10(t), ignoring errors below the noise floor.
inline double fit_order(const std::vector<double>& t, const std::vector<double>& err, double floor = 1e-13) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(err[i] >= floor) || !std::isfinite(err[i])) continue;
        const double x = std::log10(t[i]), y = std::log10(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    const double den = n * sxx - sx * sx;
    return den == 0 ? std::numeric_limits<double>::quiet_NaN() : (n * sxy - sx * sy) / den;
}

struct convergence_sample {
    double t;
    std::string quantity;
    double exact;
    double predicted;
    double error; // relative for the squared-shift quantities, absolute for residuals
};

struct convergence_report {
    std::vector<double> t_grid;
    std::vector<std::string> quantities;
    std::vector<bool> relative;
    matrix errors; // one row per t, one column per quantity
    std::vector<double> fitted_order;
    std::vector<convergence_sample> samples;

    double order(const std::string& name) const {
        for (std::size_t i = 0; i < quantities.size(); ++i)
            if (quantities[i] == name) return fitted_order[i];
        throw invalid_range("convergence_report: unknown quantity " + name);
    }
};

// Compares exact spectral data of t*q with the leading-order predictions over a t-grid.
//   height_sq, edge_shift_sq: max relative error over gaps 1..k
//   critical_value: max |Delta(lambda_n^0, tq) - (-1)^n (2 + predicted height_sq)|
//   model_delta: max over the lambda grid of |Delta - model|
//   jacobian_factorization: max entry of |jacobian_phi(tq) - leading term|
inline convergence_report convergence_study(const odd_potential& q, const std::vector<double>& t_grid,
                                            const root_options& opt = {}) {
    const int k = q.k();
    if (t_grid.empty()) throw invalid_range("convergence_study: empty t grid");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0 && t_grid[i] <= 0.3)) throw invalid_range("convergence_study: t must lie in (0, 0.3]");
        if (i > 0 && !(t_grid[i] < t_grid[i - 1]))
            throw invalid_range("convergence_study: t grid must be strictly decreasing");
    }
    const double qscale = q.qhat().norm();
    for (int n = 0; n < k; ++n)
        if (std::abs(q.qhat()[n]) <= 1e-14 * qscale || qscale == 0)
            throw prediction_degenerate("convergence_study: q-hat component " + std::to_string(n + 1) + " vanishes");

    const auto e = make_expansion_matrices(k);
    const auto grid = lambda_grid();

    convergence_report r;
    r.t_grid = t_grid;
    r.quantities = {"height_sq", "edge_shift_sq", "critical_value", "model_delta", "jacobian_factorization"};
    r.relative = {true, true, false, false, false};
    r.errors.resize(t_grid.size(), r.quantities.size());

    for (std::size_t it = 0; it < t_grid.size(); ++it) {
        const double t = t_grid[it];
        const auto tq = odd_from_coords(k, t * q.qhat());
        const auto pred = predict(tq);
        const auto bs = compute_band_structure(tq.base(), opt);

        double e_h = 0, e_edge = 0, e_crit = 0;
        for (int n = 1; n <= k; ++n) {
            const auto& pr = pred[n - 1];
            const double h = bs.heights[n - 1];
            const double rel_h = std::abs(h * h - pr.height_sq) / pr.height_sq;
            r.samples.push_back({t, "height_sq_" + std::to_string(n), h * h, pr.height_sq, rel_h});
            e_h = std::max(e_h, rel_h);

            const double lam0 = rest_critical(k, n);
            for (int side = 0; side < 2; ++side) {
                const double edge = side == 0 ? bs.edges_minus[n - 1] : bs.edges_plus[n - 1];
                const double ex = (edge - lam0) * (edge - lam0);
                const double rel = std::abs(ex - pr.edge_shift_sq) / pr.edge_shift_sq;
                r.samples.push_back(
                    {t, std::string(side == 0 ? "edge_shift_sq_minus_" : "edge_shift_sq_plus_") + std::to_string(n),
                     ex, pr.edge_shift_sq, rel});
                e_edge = std::max(e_edge, rel);
            }

            const double sgn = n % 2 == 0 ? 1.0 : -1.0;
            const double dv = eval_delta(lam0, tq), pv = sgn * (2 + pr.height_sq);
            r.samples.push_back({t, "critical_value_" + std::to_string(n), dv, pv, std::abs(dv - pv)});
            e_crit = std::max(e_crit, std::abs(dv - pv));
        }

        double e_model = 0, worst_exact = 0, worst_model = 0;
        for (double x : grid) {
            const double ex = eval_delta(x, tq), mo = model_delta(x, tq, e);
            if (std::abs(ex - mo) >= e_model) {
                e_model = std::abs(ex - mo);
                worst_exact = ex;
                worst_model = mo;
            }
        }
        r.samples.push_back({t, "model_delta", worst_exact, worst_model, e_model});

        const matrix jx = jacobian_phi(tq), jp = jacobian_phi_leading(tq, e);
        const double e_jac = (jx - jp).cwiseAbs().maxCoeff();
        r.samples.push_back({t, "jacobian_factorization", jx.cwiseAbs().maxCoeff(), jp.cwiseAbs().maxCoeff(), e_jac});

        r.errors(it, 0) = e_h;
        r.errors(it, 1) = e_edge;
        r.errors(it, 2) = e_crit;
        r.errors(it, 3) = e_model;
        r.errors(it, 4) = e_jac;
    }

    for (Eigen::Index c = 0; c < r.errors.cols(); ++c) {
        std::vector<double> col(r.errors.rows());
        for (Eigen::Index i = 0; i < r.errors.rows(); ++i) col[i] = r.errors(i, c);
        r.fitted_order.push_back(fit_order(t_grid, col));
    }
    return r;
}

} // namespace isospec
