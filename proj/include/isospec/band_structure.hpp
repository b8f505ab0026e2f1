#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "lyapunov.hpp"
#include "polynomial.hpp"
#include "potential.hpp"

namespace isospec {

struct root_options {
    double tol = 1e-12; // bracket width relative to 1 + |x|
    int max_iter = 200;
};

// Edges closer than this are one double root: the gap is closed.
inline constexpr double gap_cluster_tol = 1e-8;
// Heights at or below this count as closed gaps.
inline constexpr double height_tol = 1e-8;

namespace detail {

inline int sign_of(double x) { return (x > 0) - (x < 0); }

// Root of p - level on [a, b] where p is monotone and changes sign: bisection to the
// requested width, then a few Newton steps kept inside the final bracket.
inline double monotone_root(const polynomial<double>& p, const polynomial<double>& dp, double level,
                            double a, double b, const root_options& opt) {
    double fa = p(a) - level, fb = p(b) - level;
    if (fa == 0) return a;
    if (fb == 0) return b;
    if (sign_of(fa) == sign_of(fb)) throw root_count_mismatch("bisection: bracket has no sign change");
    int it = 0;
    for (;; ++it) {
        const double mid = 0.5 * (a + b);
        if (b - a <= opt.tol * (1 + std::abs(mid)) || mid == a || mid == b) break;
        if (it >= opt.max_iter) throw no_convergence("bisection: iteration limit reached");
        const double fm = p(mid) - level;
        if (fm == 0) return mid;
        if (sign_of(fm) == sign_of(fa)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    double x = 0.5 * (a + b), fx = p(x) - level;
    for (int i = 0; i < 3 && fx != 0; ++i) {
        const double d = dp(x);
        if (d == 0) break;
        const double y = x - fx / d;
        if (!(y >= a && y <= b)) break;
        const double fy = p(y) - level;
        if (std::abs(fy) >= std::abs(fx)) break;
        x = y;
        fx = fy;
    }
    return x;
}

// 1 + max |c_i / c_d| over the coefficients of p - level: every real root lies inside.
inline double root_bound(const polynomial<double>& p, double level) {
    const auto& c = p.coeffs();
    const double lead = std::abs(c.back());
    double m = std::abs(c[0] - level);
    for (std::size_t i = 1; i + 1 < c.size(); ++i) m = std::max(m, std::abs(c[i]));
    return 1 + m / lead;
}

} // namespace detail

// All real roots of a real-rooted polynomial, ascending. Roots of p' split the line into
// monotone pieces; each piece is searched by bisection. Recurses down to the linear case.
inline std::vector<double> real_roots(const polynomial<double>& p, const root_options& opt = {}) {
    const int d = p.degree();
    if (d < 1) return {};
    const auto& c = p.coeffs();
    if (d == 1) return {-c[0] / c[1]};

    const auto dp = p.derivative();
    const auto crit = real_roots(dp, opt);
    const double bound = detail::root_bound(p, 0.0);
    std::vector<double> knots;
    knots.push_back(std::min(-bound, crit.front() - 1));
    knots.insert(knots.end(), crit.begin(), crit.end());
    knots.push_back(std::max(bound, crit.back() + 1));

    std::vector<double> roots;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double fa = p(knots[i]), fb = p(knots[i + 1]);
        if (fa == 0) {
            if (roots.empty() || roots.back() != knots[i]) roots.push_back(knots[i]);
        } else if (fb != 0 && detail::sign_of(fa) != detail::sign_of(fb)) {
            roots.push_back(detail::monotone_root(p, dp, 0.0, knots[i], knots[i + 1], opt));
        }
    }
    if (static_cast<int>(roots.size()) != d)
        throw root_count_mismatch("real_roots: found " + std::to_string(roots.size()) + " real roots, expected " +
                                  std::to_string(d));
    return roots;
}

// lambda_1 < .. < lambda_N: zeros of Delta'.
inline std::vector<double> critical_points(const discriminant_poly& p, const root_options& opt = {}) {
    return real_roots(p.poly().derivative(), opt);
}

struct interval {
    double lo;
    double hi;
};

struct band_edges_result {
    // gap edges lambda_n^-, lambda_n^+ for n = 1..N (0-based storage)
    std::vector<double> minus;
    std::vector<double> plus;
    double outer_left;  // lambda_0^+
    double outer_right; // lambda_{N+1}^-
};

namespace detail {

// (-1)^{N+1-n}
inline double gap_sign(int period, int n) { return ((period - n) % 2 == 0) ? 1.0 : -1.0; }

// Rounding error bound for Horner evaluation of p at x.
inline double eval_error_bound(const polynomial<double>& p, double x) {
    double acc = 0;
    for (auto it = p.coeffs().rbegin(); it != p.coeffs().rend(); ++it) acc = acc * std::abs(x) + std::abs(*it);
    return 4.0 * (p.degree() + 1) * std::numeric_limits<double>::epsilon() * acc;
}

// s H - 2 is indistinguishable from zero at working precision.
inline bool critical_closed(const polynomial<double>& p, double x, double s, double H) {
    return s * H - 2 <= eval_error_bound(p, x);
}

inline void check_sign_pattern(double s, double H, int n) {
    if (s * H < 2 - 1e-6)
        throw sign_pattern_violated("critical value " + std::to_string(n) + " has the wrong sign or size (" +
                                    std::to_string(H) + ")");
}

} // namespace detail

// Band edges, using that Delta is monotone between consecutive critical points and the
// critical values alternate in sign with modulus >= 2.
inline band_edges_result band_edges(const discriminant_poly& p, const std::vector<double>& crit,
                                     const root_options& opt = {}) {
    const int period = p.degree();
    const int N = period - 1;
    if (static_cast<int>(crit.size()) != N) throw root_count_mismatch("band_edges: expected N critical points");
    const auto& poly = p.poly();
    const auto dp = poly.derivative();
    const double bound = std::max(detail::root_bound(poly, 2.0), detail::root_bound(poly, -2.0));

    std::vector<double> knots{-bound};
    knots.insert(knots.end(), crit.begin(), crit.end());
    knots.push_back(bound);

    std::vector<bool> closed(N + 2, false);
    for (int n = 1; n <= N; ++n) {
        const double s = detail::gap_sign(period, n), H = poly(crit[n - 1]);
        detail::check_sign_pattern(s, H, n);
        closed[n] = detail::critical_closed(poly, crit[n - 1], s, H);
    }

    band_edges_result r;
    r.minus.assign(N, 0);
    r.plus.assign(N, 0);
    // piece i runs from knot i to knot i+1 and holds lambda_i^+ and lambda_{i+1}^-
    for (int i = 0; i <= N; ++i) {
        const double a = knots[i], b = knots[i + 1];
        const double left = closed[i] ? a : detail::monotone_root(poly, dp, 2 * detail::gap_sign(period, i), a, b, opt);
        const double right =
            closed[i + 1] ? b : detail::monotone_root(poly, dp, 2 * detail::gap_sign(period, i + 1), a, b, opt);
        if (i == 0) r.outer_left = left;
        else r.plus[i - 1] = left;
        if (i == N) r.outer_right = right;
        else r.minus[i] = right;
    }
    for (int n = 0; n < N; ++n) {
        if (r.plus[n] - r.minus[n] < gap_cluster_tol) r.minus[n] = r.plus[n] = crit[n];
    }
    return r;
}

// arccosh(x) for x >= 1 without cancellation near 1.
inline double stable_arccosh(double x) {
    const double u = std::max(0.0, x - 1);
    return std::log1p(u + std::sqrt(u * u + 2 * u));
}

struct heights_result {
    std::vector<double> h;
    std::vector<double> H;
};

inline heights_result heights(const discriminant_poly& p, const std::vector<double>& crit) {
    const int period = p.degree();
    heights_result r;
    for (std::size_t i = 0; i < crit.size(); ++i) {
        const int n = static_cast<int>(i) + 1;
        const double s = detail::gap_sign(period, n), H = p(crit[i]);
        detail::check_sign_pattern(s, H, n);
        r.H.push_back(H);
        r.h.push_back(detail::critical_closed(p.poly(), crit[i], s, H) ? 0.0 : stable_arccosh(s * H / 2));
    }
    return r;
}

struct band_structure {
    std::vector<double> edges_minus; // lambda_n^-, n = 1..N
    std::vector<double> edges_plus;  // lambda_n^+, n = 1..N
    double outer_left = 0;
    double outer_right = 0;
    std::vector<double> critical;
    std::vector<double> heights;
    std::vector<double> H;
    std::vector<interval> bands; // N+1 closed intervals
    std::vector<interval> gaps;  // N open intervals, empty when lo == hi

    bool gap_open(int n) const { return edges_plus[n - 1] > edges_minus[n - 1]; }
};

inline band_structure compute_band_structure(const discriminant_poly& p, const root_options& opt = {}) {
    band_structure b;
    b.critical = critical_points(p, opt);
    auto e = band_edges(p, b.critical, opt);
    auto hh = heights(p, b.critical);
    b.edges_minus = std::move(e.minus);
    b.edges_plus = std::move(e.plus);
    b.outer_left = e.outer_left;
    b.outer_right = e.outer_right;
    b.heights = std::move(hh.h);
    b.H = std::move(hh.H);
    const int N = static_cast<int>(b.critical.size());
    for (int n = 0; n < N; ++n) {
        if (b.edges_minus[n] == b.edges_plus[n]) b.heights[n] = 0;
        b.gaps.push_back({b.edges_minus[n], b.edges_plus[n]});
    }
    for (int i = 0; i <= N; ++i)
        b.bands.push_back({i == 0 ? b.outer_left : b.edges_plus[i - 1], i == N ? b.outer_right : b.edges_minus[i]});
    return b;
}

inline band_structure compute_band_structure(const potential& q, const root_options& opt = {}) {
    return compute_band_structure(delta_poly(q), opt);
}

// Rows (a_n^{2(k-1)}, .., a_n^2, 1).
inline matrix vandermonde(const vector& a) {
    const auto k = a.size();
    matrix v(k, k);
    for (Eigen::Index n = 0; n < k; ++n) v.row(n) = lambda_powers(static_cast<int>(k), a[n]).transpose();
    return v;
}

// d H_n / d q_m, n, m = 1..k, in the free chart. The lambda_n dependence drops out since
// Delta'(lambda_n) = 0.
inline matrix jacobian_H(const odd_potential& q, const root_options& opt = {}) {
    const int k = q.k();
    const auto p = delta_poly(q);
    const auto crit = critical_points(p, opt);
    const auto d2 = p.poly().derivative().derivative();
    double scale = 1;
    for (double c : d2.coeffs()) scale = std::max(scale, std::abs(c));
    vector lam(k);
    for (int n = 0; n < k; ++n) {
        if (std::abs(d2(crit[n])) <= 1e-12 * scale)
            throw degenerate_critical("jacobian_H: Delta'' vanishes at critical point " + std::to_string(n + 1));
        lam[n] = crit[n];
    }
    return vandermonde(lam) * jacobian_phi(q);
}

// H_n = Delta(lambda_n), n = 1..k.
inline vector critical_values(const odd_potential& q, const root_options& opt = {}) {
    const auto p = delta_poly(q);
    const auto crit = critical_points(p, opt);
    vector H(q.k());
    for (int n = 0; n < q.k(); ++n) H[n] = p(crit[n]);
    return H;
}

} // namespace isospec
