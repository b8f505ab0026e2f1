#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "lyapunov.hpp"
#include "polynomial.hpp"

namespace isospec {

// Strictly increasing 1-based tuples with odd gaps between neighbours.
//   T(j, n): 1 <= a_1 < .. < a_j <= n, odd gaps, and n+1-a_j odd
//   D(j, n): as T without the condition on n+1-a_j
//   S(r, m, n): interior points of chains m = a_0 < a_1 < .. < a_r < a_{r+1} = n, all gaps odd
struct index_set {
    enum class kind { T, D, S };
    kind type;
    int j = 0; // j for T and D, r for S
    int n = 0;
    int m = 0; // S only
    std::vector<std::vector<int>> tuples;

    std::size_t size() const noexcept { return tuples.size(); }
};

namespace detail {

constexpr int enumeration_budget = 20;

// Depth-first extension in increasing order, so the output is lexicographically sorted.
inline void extend(std::vector<int>& cur, int remaining, int hi, bool first_free, int end,
                   std::vector<std::vector<int>>& out) {
    if (remaining == 0) {
        if (end < 0 || cur.empty() || (end - cur.back()) % 2 == 1) out.push_back(cur);
        return;
    }
    const int lo = cur.empty() ? 1 : cur.back() + 1;
    const int step = (cur.empty() && first_free) ? 1 : 2;
    for (int a = lo; a <= hi - remaining + 1; a += step) {
        cur.push_back(a);
        extend(cur, remaining - 1, hi, first_free, end, out);
        cur.pop_back();
    }
}

inline void check_tuple_params(int j, int n) {
    if (n > enumeration_budget) throw budget_exceeded("index set: n exceeds enumeration budget 20");
    if (j < 0 || j > n) throw invalid_range("index set: need 0 <= j <= n");
}

} // namespace detail

inline index_set enumerate_T(int j, int n) {
    detail::check_tuple_params(j, n);
    index_set s{index_set::kind::T, j, n, 0, {}};
    std::vector<int> cur;
    if (j == 0) s.tuples.push_back({});
    else detail::extend(cur, j, n, true, n + 1, s.tuples);
    return s;
}

inline index_set enumerate_D(int j, int n) {
    detail::check_tuple_params(j, n);
    index_set s{index_set::kind::D, j, n, 0, {}};
    std::vector<int> cur;
    if (j == 0) s.tuples.push_back({});
    else detail::extend(cur, j, n, true, -1, s.tuples);
    return s;
}

inline index_set enumerate_S(int r, int m, int n) {
    if (r < 0 || r >= n - m) throw invalid_range("S set: need 0 <= r < n - m");
    if (n - m > detail::enumeration_budget) throw budget_exceeded("S set: n - m exceeds budget 20");
    index_set s{index_set::kind::S, r, n, m, {}};
    // enumerate in shifted coordinates b = a - m so the first point obeys the odd-gap rule too
    std::vector<std::vector<int>> raw;
    std::vector<int> cur;
    if (r == 0) {
        if ((n - m) % 2 == 1) raw.push_back({});
    } else {
        detail::extend(cur, r, n - m - 1, false, n - m, raw);
    }
    for (auto& t : raw) {
        for (auto& a : t) a += m;
        s.tuples.push_back(std::move(t));
    }
    return s;
}

inline std::int64_t count_S(int m, int n, int r) { return static_cast<std::int64_t>(enumerate_S(r, m, n).size()); }

namespace detail {

template <typename T>
polynomial<T> sum_of_products(const index_set& s, std::span<const T> q) {
    if (static_cast<int>(q.size()) < s.n) throw invalid_range("index polynomial: q has fewer than n entries");
    polynomial<T> acc;
    for (const auto& t : s.tuples) {
        auto term = polynomial<T>::constant(T(1));
        for (int a : t) term = term * polynomial<T>::linear(q[a - 1]);
        acc += term;
    }
    return acc;
}

} // namespace detail

// Sum over T(j, n) of prod (lambda - q_a).
template <typename T>
polynomial<T> poly_F(int j, int n, std::span<const T> q) {
    return detail::sum_of_products(enumerate_T(j, n), q);
}

// Sum over D(j, n) of prod (lambda - q_a); G_0 = 2.
template <typename T>
polynomial<T> poly_G(int j, int n, std::span<const T> q) {
    if (j == 0) {
        detail::check_tuple_params(j, n);
        return polynomial<T>::constant(T(2));
    }
    return detail::sum_of_products(enumerate_D(j, n), q);
}

// Delta as a signed sum of G polynomials over one period.
template <typename T>
polynomial<T> delta_combinatorial_of(std::span<const T> q) {
    const int p = static_cast<int>(q.size());
    if (p > 16) throw budget_exceeded("delta_combinatorial: period exceeds 16");
    if (p < 2) throw invalid_range("delta_combinatorial: period must be at least 2");
    polynomial<T> acc;
    if (p % 2 == 0) {
        for (int j = 0; 2 * j <= p; ++j) {
            const T sign = ((j + p / 2) % 2 == 0) ? T(1) : T(-1);
            acc += sign * poly_G<T>(2 * j, p, q);
        }
    } else {
        const int half = (p - 1) / 2;
        for (int j = 0; 2 * j + 1 <= p; ++j) {
            const T sign = ((j + half) % 2 == 0) ? T(1) : T(-1);
            acc += sign * poly_G<T>(2 * j + 1, p, q);
        }
    }
    return acc;
}

inline discriminant_poly delta_combinatorial(const potential& q) {
    const auto& v = q.values();
    return discriminant_poly(delta_combinatorial_of<double>(std::span<const double>(v.data(), v.size())));
}

// (phi_{n+1}, theta_{n+1}) as alternating sums of F polynomials, n >= 1.
template <typename T>
std::pair<polynomial<T>, polynomial<T>> fundamental_combinatorial(int n, std::span<const T> q) {
    if (n > 15) throw budget_exceeded("fundamental_combinatorial: n exceeds 15");
    if (n < 1) throw invalid_range("fundamental_combinatorial: n must be positive");
    auto alt = [](int j) { return j % 2 == 0 ? T(1) : T(-1); };
    polynomial<T> phi, theta;
    if (n % 2 == 0) {
        const int h = n / 2;
        for (int j = 0; j <= h; ++j) phi += alt(j) * poly_F<T>(2 * j, n, q);
        for (int j = 0; j <= h - 1; ++j) theta += alt(j) * poly_F<T>(2 * j + 1, n, q);
        phi *= alt(h);
        theta *= alt(h);
    } else {
        const int h = (n - 1) / 2;
        for (int j = 0; j <= h; ++j) {
            phi += alt(j) * poly_F<T>(2 * j + 1, n, q);
            theta += alt(j) * poly_F<T>(2 * j, n, q);
        }
        phi *= alt(h);
        theta *= alt(h + 1);
    }
    return {phi, theta};
}

} // namespace isospec
