#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace isospec {

// Dense univariate polynomial, coefficients stored from degree 0 upward.
// T is double for numerics or a wide integer type for exact counting.
template <typename T>
class polynomial {
public:
    polynomial() = default;
    explicit polynomial(std::vector<T> c) : c_(std::move(c)) { trim(); }
    polynomial(std::initializer_list<T> c) : c_(c) { trim(); }

    static polynomial constant(T v) { return polynomial(std::vector<T>{v}); }
    // lambda - a
    static polynomial linear(T a) { return polynomial(std::vector<T>{T(-a), T(1)}); }

    const std::vector<T>& coeffs() const noexcept { return c_; }
    bool is_zero() const noexcept { return c_.empty(); }
    int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }

    T operator[](std::size_t i) const noexcept { return i < c_.size() ? c_[i] : T(0); }

    // Coefficients padded with zeros to `n` entries.
    std::vector<T> padded(std::size_t n) const {
        std::vector<T> out(std::max(n, c_.size()), T(0));
        std::copy(c_.begin(), c_.end(), out.begin());
        return out;
    }

    template <typename X>
    X operator()(X x) const {
        X acc = X(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + X(*it);
        return acc;
    }

    polynomial derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<T> d(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = T(i) * c_[i];
        return polynomial(std::move(d));
    }

    polynomial& operator+=(const polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
        trim();
        return *this;
    }
    polynomial& operator-=(const polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
        for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
        trim();
        return *this;
    }
    polynomial& operator*=(T s) {
        for (auto& v : c_) v *= s;
        trim();
        return *this;
    }

    friend polynomial operator+(polynomial a, const polynomial& b) { return a += b; }
    friend polynomial operator-(polynomial a, const polynomial& b) { return a -= b; }
    friend polynomial operator-(polynomial a) { return a *= T(-1); }
    friend polynomial operator*(polynomial a, T s) { return a *= s; }
    friend polynomial operator*(T s, polynomial a) { return a *= s; }

    friend polynomial operator*(const polynomial& a, const polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<T> r(a.c_.size() + b.c_.size() - 1, T(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return polynomial(std::move(r));
    }

    friend bool operator==(const polynomial& a, const polynomial& b) { return a.c_ == b.c_; }

private:
    // exact zeros only; float noise in high degrees is kept on purpose
    void trim() {
        while (!c_.empty() && c_.back() == T(0)) c_.pop_back();
    }

    std::vector<T> c_;
};

// Largest coefficientwise difference, relative to max(1, largest magnitude).
template <typename T>
double max_coeff_diff(const polynomial<T>& a, const polynomial<T>& b, bool relative = false) {
    const std::size_t n = std::max(a.coeffs().size(), b.coeffs().size());
    double diff = 0, scale = 1;
    for (std::size_t i = 0; i < n; ++i) {
        diff = std::max(diff, std::abs(double(a[i]) - double(b[i])));
        scale = std::max({scale, std::abs(double(a[i])), std::abs(double(b[i]))});
    }
    return relative ? diff / scale : diff;
}

} // namespace isospec
