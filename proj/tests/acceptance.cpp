// Acceptance gate: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <isospec/isospec.hpp>

#include "oracles.hpp"

using namespace isospec;

namespace {

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
    std::printf("%s  criterion %d: %s | %s\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

odd_potential pair(double t) {
    vector v(2);
    v << t, -t;
    return odd_from_values(v);
}

std::vector<double> sorted_edges(const band_structure& b) {
    std::vector<double> e{b.outer_left, b.outer_right};
    e.insert(e.end(), b.edges_minus.begin(), b.edges_minus.end());
    e.insert(e.end(), b.edges_plus.begin(), b.edges_plus.end());
    std::sort(e.begin(), e.end());
    return e;
}

void exact_forms() {
    double ce = 0, ee = 0, he = 0;
    for (double t : {0.1, 1.0}) {
        const auto q = pair(t);
        const auto p = delta_poly(q);
        const double want[] = {-t * t - 2, 0, 1};
        for (int i = 0; i < 3; ++i) ce = std::max(ce, std::abs(p.poly()[i] - want[i]));
        const auto e = sorted_edges(compute_band_structure(p));
        const double s = std::sqrt(t * t + 4);
        const double we[] = {-s, -t, t, s};
        for (int i = 0; i < 4; ++i) ee = std::max(ee, std::abs(e[i] - we[i]));
        he = std::max(he, std::abs(compute_band_structure(p).heights[0] - std::acosh(1 + t * t / 2)));
    }
    report(1, "k=1 exact forms", ce <= 1e-14 && ee <= 1e-12 && he <= 1e-12,
           fmt("coeff err %.2e", ce) + fmt(", edge err %.2e", ee) + fmt(", height err %.2e", he));
}

void chebyshev_baseline() {
    long long int_err = 0;
    double cos_err = 0;
    for (int k = 1; k <= 10; ++k) {
        const std::vector<long long> zero(2 * k, 0);
        const auto p = delta_poly_of<long long>(std::span<const long long>(zero));
        for (int m = 0; m <= k; ++m) {
            long double b = 1;
            for (int i = 0; i < 2 * m; ++i) b = b * (k + m - i) / (i + 1);
            const long long r = std::llround(2.0L * k * b / (k + m));
            int_err = std::max(int_err, std::llabs(p[2 * m] - ((m + k) % 2 == 0 ? r : -r)));
            if (m < k) int_err = std::max(int_err, std::llabs(p[2 * m + 1]));
        }
        int_err = std::max<long long>(int_err, p.degree() != 2 * k);
        const auto z = potential::zero(2 * k);
        for (int i = 0; i < 257; ++i) {
            const double x = -2 * std::cos((i + 0.5) * std::numbers::pi / 257);
            cos_err = std::max(cos_err, std::abs(eval_delta(x, z) - 2 * std::cos(2 * k * std::acos(x / 2))));
        }
    }
    report(2, "Chebyshev baseline", int_err == 0 && cos_err <= 1e-10,
           fmt("integer mismatch %.0f", double(int_err)) + fmt(", cosine err %.2e", cos_err));
}

void identity_suite() {
    double det = 0, row = 0, fw = 0, d2 = 0;
    for (int k = 1; k <= 10; ++k) det = std::max(det, std::abs(make_expansion_matrices(k).A.determinant() - 1));
    std::mt19937_64 rng(101);
    for (int k = 1; k <= 8; ++k) {
        const auto e = make_expansion_matrices(k);
        const auto dd = delta_poly(potential::zero(2 * k)).poly().derivative().derivative();
        for (int n = 1; n <= k; ++n) {
            vector want = vector::Zero(k);
            want[n - 1] = (n == k ? 2.0 : 1.0) / (4.0 * k);
            row = std::max(row, (edge_shift_row(k, n, e) - want).cwiseAbs().maxCoeff());
            const double s = std::sin(std::numbers::pi * n / (2.0 * k));
            const double closed = -2.0 * k * k * std::pow(-1.0, n) / (s * s);
            d2 = std::max(d2, std::abs(dd(-2 * std::cos(std::numbers::pi * n / (2.0 * k))) - closed) / std::abs(closed));
        }
        const matrix w = w_matrix(k);
        for (int c = 0; c < 50; ++c) {
            const auto q = odd_from_coords(k, oracle::random_qhat(rng, k, 0, 2));
            // f_s computed directly from the values
            vector f(k);
            for (int s = 1; s <= k; ++s) {
                double acc = 0;
                for (int i = 0; i < 2 * k; ++i) acc += q.values()[i] * q.values()[(i + s) % (2 * k)];
                f[s - 1] = acc;
            }
            fw = std::max(fw, (f - w * q.qhat().cwiseAbs2()).cwiseAbs().maxCoeff());
        }
    }
    report(3, "identity suite", det <= 1e-9 && row <= 1e-9 && fw <= 1e-10 && d2 <= 1e-9,
           fmt("det A err %.2e", det) + fmt(", edge-row identity err %.2e", row) + fmt(", f = W qhat^2 err %.2e", fw) +
               fmt(", Delta'' rel err %.2e", d2));
}

void oracle_equivalence() {
    std::mt19937_64 rng(102);
    double delta_err = 0, fund_err = 0, rec_err = 0;
    bool counts = true;
    for (int p = 2; p <= 8; ++p)
        for (int c = 0; c < 100; ++c) {
            const potential q(oracle::random_zero_mean(rng, p));
            delta_err = std::max(delta_err, max_coeff_diff(delta_combinatorial(q).poly(), delta_poly(q).poly(), true));
        }
    std::vector<double> v(16);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (auto& x : v) x = u(rng);
    const std::span<const double> s(v);
    const auto phi = fundamental_polys<double>(s, 16, false), theta = fundamental_polys<double>(s, 16, true);
    for (int n = 1; n <= 10; ++n) {
        const auto [f, t] = fundamental_combinatorial<double>(n, s);
        fund_err = std::max({fund_err, max_coeff_diff(f, phi[n + 1], true), max_coeff_diff(t, theta[n + 1], true)});
    }
    auto lin = [&](int i) { return polynomial<double>::linear(v[i - 1]); };
    for (int n = 1; n <= 12; ++n) {
        for (int j = 1; j <= n - 1; ++j)
            rec_err = std::max(rec_err, max_coeff_diff(poly_F<double>(j + 1, n + 2, s),
                                                       lin(n + 2) * poly_F<double>(j, n + 1, s) + poly_F<double>(j + 1, n, s)));
        rec_err = std::max(rec_err, max_coeff_diff(poly_F<double>(n + 1, n + 1, s), lin(n + 1) * poly_F<double>(n, n, s)));
        if (n >= 2)
            rec_err = std::max(rec_err, max_coeff_diff(poly_F<double>(n, n + 1, s), lin(n + 1) * poly_F<double>(n - 1, n, s)));
    }
    for (int n = 1; n <= 15; ++n)
        for (int m = 0; m < n; ++m)
            for (int r = 0; r < n - m; ++r) {
                const auto c = count_S(m, n, r);
                const std::int64_t want = (n - m - r) % 2 == 1 ? std::int64_t(enumerate_T(r, n - m - 1).size()) : 0;
                counts = counts && c == want;
            }
    report(4, "oracle equivalence", delta_err <= 1e-9 && fund_err <= 1e-9 && rec_err <= 1e-10 && counts,
           fmt("Delta rel err %.2e", delta_err) + fmt(", phi/theta rel err %.2e", fund_err) +
               fmt(", F recurrences err %.2e", rec_err) + (counts ? ", counts exact" : ", count mismatch"));
}

void symmetry_suite() {
    std::mt19937_64 rng(103);
    double worst = 0;
    for (int c = 0; c < 100; ++c) {
        const potential q(oracle::random_zero_mean(rng, 2 + c % 9));
        const int k = 1 + c % 6;
        const auto o = odd_from_coords(k, oracle::random_qhat(rng, k, 0, 1));
        const potential neg(-o.values());
        for (double x : {-2.3, -1.1, -0.2, 0.5, 1.4, 2.6}) {
            const double d = eval_delta(x, q), sd = std::max(1.0, std::abs(d));
            worst = std::max({worst, std::abs(eval_delta(x, shift(q)) - d) / sd, std::abs(eval_delta(x, reflect(q)) - d) / sd});
            const double e = eval_delta(x, o), se = std::max(1.0, std::abs(e));
            worst = std::max({worst, std::abs(eval_delta(-x, o) - e) / se, std::abs(eval_delta(x, neg) - e) / se});
        }
    }
    report(5, "symmetry suite", worst <= 1e-12, fmt("max scaled residual %.2e", worst));
}

void theorem_orders() {
    std::mt19937_64 rng(104);
    double h = 1e9, e = 1e9, m = 1e9, j = 1e9;
    for (int c = 0; c < 5; ++c) {
        const auto q = odd_from_coords(3, oracle::random_qhat(rng, 3, 0.3, 1));
        const auto rep = convergence_study(q, geometric_grid(1e-1, 1e-3, 9));
        h = std::min(h, rep.order("height_sq"));
        e = std::min(e, rep.order("edge_shift_sq"));
        m = std::min(m, rep.order("model_delta"));
        j = std::min(j, rep.order("jacobian_factorization"));
    }
    report(6, "small-potential orders (k=3, min over 5 draws)", h >= 1.8 && e >= 0.8 && m >= 3.8 && j >= 2.8,
           fmt("height %.3f", h) + fmt(", edge %.3f", e) + fmt(", model %.3f", m) + fmt(", jacobian %.3f", j));
}

struct count_run {
    bool count_ok = true;
    bool verified = true;
    double slowest = 0;
    bool nonsingular = true;
    double min_height = 1e9;
    int cases = 0;
};

count_run isospectral_counts() {
    std::mt19937_64 rng(105);
    count_run r;
    for (int k : {2, 3})
        for (int c = 0; c < 20; ++c) {
            const auto q = odd_from_coords(k, 0.05 * oracle::random_qhat(rng, k, 0.3, 1));
            const auto t0 = std::chrono::steady_clock::now();
            const auto set = isospectral_set(q);
            bool ok = true;
            for (const auto& m : set.members) ok = ok && verify_isospectral(m, q, 1e-8).all();
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            r.slowest = std::max(r.slowest, secs);
            r.count_ok = r.count_ok && set.count() == (1 << k);
            r.verified = r.verified && ok;
            r.nonsingular = r.nonsingular && !singularity(q).is_singular;
            for (double x : compute_band_structure(q.base()).heights) r.min_height = std::min(r.min_height, x);
            ++r.cases;
        }
    report(7, "isospectral count 2^k (k=2,3; t=0.05; 20 cases each)", r.count_ok && r.verified && r.slowest <= 2.0,
           std::string(r.count_ok ? "all counts 2^k" : "count mismatch") + (r.verified ? ", all verified" : ", verification failed") +
               fmt(", slowest case %.3f s", r.slowest));
    return r;
}

void jacobian_identities() {
    std::mt19937_64 rng(106);
    double fd = 0, chain = 0;
    for (int k = 1; k <= 5; ++k)
        for (int c = 0; c < 6; ++c) {
            const double scale = c % 2 ? 0.05 : 1.0;
            const auto q = odd_from_coords(k, scale * oracle::random_qhat(rng, k, 0.3, 1));
            fd = std::max(fd, oracle::rel_err(jacobian_phi(q), oracle::fd_jacobian_phi(q)));
            chain = std::max(chain, oracle::rel_err(jacobian_H(q), oracle::fd_jacobian_H(q)));
        }
    bool zero_ok = true;
    for (int k = 1; k <= 6; ++k) {
        const auto z = odd_from_coords(k, vector::Zero(k));
        zero_ok = zero_ok && jacobian_phi(z).cwiseAbs().maxCoeff() == 0 && singularity(z).is_singular;
    }
    report(8, "Jacobian identities", fd <= 1e-7 && chain <= 1e-6 && zero_ok,
           fmt("analytic vs FD %.2e", fd) + fmt(", chain rule vs FD %.2e", chain) +
               (zero_ok ? ", zero potential singular" : ", zero potential check failed"));
}

void open_gaps(const count_run& r) {
    report(9, "all gaps open for the criterion 7 cases", r.nonsingular && r.min_height > 1e-4,
           std::string(r.nonsingular ? "all nonsingular" : "singular case found") + fmt(", min h_n %.3e", r.min_height));
}

} // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    exact_forms();
    chebyshev_baseline();
    identity_suite();
    oracle_equivalence();
    symmetry_suite();
    theorem_orders();
    const auto counts = isospectral_counts();
    jacobian_identities();
    open_gaps(counts);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d of 9 criteria failed (%.2f s)\n", failures, secs);
    return failures == 0 ? 0 : 1;
}
