#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include <isospec/asymptotics.hpp>

#include "oracles.hpp"

using namespace isospec;

namespace {

odd_potential pair(double t) {
    vector v(2);
    v << t, -t;
    return odd_from_values(v);
}

vector vec2(double a, double b) {
    vector v(2);
    v << a, b;
    return v;
}

} // namespace

TEST(Predict, Examples) {
    const double t = 0.07;
    const auto p1 = predict(pair(t));
    ASSERT_EQ(p1.size(), 1u);
    EXPECT_NEAR(p1[0].edge_shift_sq, t * t, 1e-16);
    EXPECT_NEAR(p1[0].height_sq, t * t, 1e-16);

    const auto p2 = predict(odd_from_coords(2, vec2(0.3, 0)));
    EXPECT_NEAR(p2[0].height_sq, 0.09, 1e-15);
    EXPECT_EQ(p2[1].height_sq, 0);
    EXPECT_EQ(p2[1].edge_shift_sq, 0);
}

// Row n of (-2/Delta''(lambda_n^0, 0)) Lambda(lambda_n^0)^T A' W is a multiple of the n-th unit row.
TEST(Predict, EdgeShiftRowsAreDiagonal) {
    for (int k = 1; k <= 8; ++k) {
        const auto e = make_expansion_matrices(k);
        for (int n = 1; n <= k; ++n) {
            vector want = vector::Zero(k);
            want[n - 1] = (n == k ? 2.0 : 1.0) / (4.0 * k);
            EXPECT_LT((edge_shift_row(k, n, e) - want).cwiseAbs().maxCoeff(), 1e-9) << k << "," << n;
        }
    }
}

TEST(Predict, BackboneAgreesWithMatrixProduct) {
    std::mt19937_64 rng(51);
    for (int k = 1; k <= 8; ++k) {
        const auto e = make_expansion_matrices(k);
        const auto q = odd_from_coords(k, oracle::random_qhat(rng, k, 0, 1));
        const auto pr = predict(q);
        const vector sq = q.qhat().cwiseAbs2();
        for (int n = 1; n <= k; ++n) {
            const double edge = edge_shift_row(k, n, e).dot(sq);
            const double height = std::abs(rest_second_derivative(k, n)) / 2 * edge;
            EXPECT_NEAR(pr[n - 1].edge_shift_sq, edge, 1e-10 * std::max(1.0, edge));
            EXPECT_NEAR(pr[n - 1].height_sq, height, 1e-10 * std::max(1.0, height));
            EXPECT_GE(pr[n - 1].edge_shift_sq, 0);
        }
    }
}

TEST(ModelDelta, Examples) {
    const auto z = odd_from_coords(3, vector::Zero(3));
    for (double x : {-2.1, -0.5, 0.3, 1.9}) EXPECT_NEAR(model_delta(x, z), eval_delta(x, z), 1e-12);
    for (double t : {0.05, 0.5, 2.0}) {
        const auto q = pair(t);
        EXPECT_NEAR(model_delta(0, q), -2 - t * t, 1e-13);
        for (double x : {-1.0, 0.7}) EXPECT_NEAR(model_delta(x, q), eval_delta(x, q), 1e-12);
    }
}

TEST(ModelDelta, RemainderIsQuartic) {
    std::mt19937_64 rng(52);
    for (int k = 2; k <= 5; ++k) {
        const vector dir = oracle::random_qhat(rng, k, 0.3, 1);
        const auto e = make_expansion_matrices(k);
        std::vector<double> ts, errs;
        for (double t : default_t_grid()) {
            const auto q = odd_from_coords(k, t * dir);
            double m = 0;
            for (double x : lambda_grid()) m = std::max(m, std::abs(eval_delta(x, q) - model_delta(x, q, e)));
            ts.push_back(t);
            errs.push_back(m);
        }
        EXPECT_GE(oracle::loglog_slope(ts, errs), 3.8) << "k=" << k;
    }
}

TEST(SignFlip, ModelIsInvariant) {
    const auto q = odd_from_coords(2, vec2(0.3, 0.4));
    EXPECT_EQ(sign_flip_model_invariance(q, vec2(1, 1)), 0);
    EXPECT_LE(sign_flip_model_invariance(q, vec2(-1, 1)), 1e-12);
    std::mt19937_64 rng(53);
    for (int k = 1; k <= 6; ++k) {
        const auto r = odd_from_coords(k, oracle::random_qhat(rng, k, 0, 1));
        for (unsigned mask = 0; mask < (1u << k); ++mask) {
            vector nu(k);
            for (int m = 0; m < k; ++m) nu[m] = (mask >> m) & 1u ? -1 : 1;
            EXPECT_LE(sign_flip_model_invariance(r, nu), 1e-12 * std::pow(2.5, 2 * k));
        }
    }
}

TEST(SignFlip, ExactDeltaChangesAtFourthOrder) {
    vector dir(3);
    dir << 0.3, 0.4, 0.5;
    vector nu(3);
    nu << -1, 1, 1;
    std::vector<double> ts, errs;
    for (double t : geometric_grid(0.1, 0.01, 5)) {
        ts.push_back(t);
        errs.push_back(sign_flip_delta_change(odd_from_coords(3, t * dir), nu));
    }
    EXPECT_GT(errs.back(), 1e-11);
    EXPECT_GE(oracle::loglog_slope(ts, errs), 3.8);
}

TEST(SignFlip, PeriodFourFlipsAreSymmetries) {
    // at k = 2 each flip is a shift or reflection of q
    for (unsigned mask = 1; mask < 4; ++mask) {
        vector nu(2);
        nu << (mask & 1u ? -1 : 1), (mask & 2u ? -1 : 1);
        EXPECT_LE(sign_flip_delta_change(odd_from_coords(2, vec2(0.7, -1.1)), nu), 1e-12);
    }
}

TEST(LambdaGrid, Shape) {
    const auto g = lambda_grid();
    ASSERT_EQ(g.size(), 257u);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i - 1], g[i]);
    EXPECT_GT(g.front(), -2.5);
    EXPECT_LT(g.back(), 2.5);
    EXPECT_NEAR(g[128], 0, 1e-15);
}

TEST(FitOrder, SyntheticPowerLaw) {
    std::vector<double> t, e;
    for (double x : default_t_grid()) {
        t.push_back(x);
        e.push_back(3 * x * x * x);
    }
    EXPECT_NEAR(fit_order(t, e), 3, 1e-12);
    e.back() = 1e-15; // below the noise floor: ignored
    EXPECT_NEAR(fit_order(t, e), 3, 1e-12);
    EXPECT_TRUE(std::isnan(fit_order({0.1}, {1.0})));
}

TEST(GeometricGrid, Default) {
    const auto g = default_t_grid();
    ASSERT_EQ(g.size(), 9u);
    EXPECT_DOUBLE_EQ(g.front(), 1e-1);
    EXPECT_NEAR(g.back(), 1e-3, 1e-18);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_NEAR(g[i] / g[i - 1], std::pow(10.0, -0.25), 1e-12);
}

TEST(ConvergenceStudy, PairPotentialHeightIsFourthOrderAbsolute) {
    const auto rep = convergence_study(pair(1.0), default_t_grid());
    std::vector<double> t, abs_err;
    for (const auto& s : rep.samples)
        if (s.quantity == "height_sq_1") {
            t.push_back(s.t);
            abs_err.push_back(std::abs(s.exact - s.predicted));
            EXPECT_NEAR(s.exact, std::pow(std::acosh(1 + s.t * s.t / 2), 2), 1e-15);
        }
    ASSERT_EQ(t.size(), 9u);
    EXPECT_GE(oracle::loglog_slope(t, abs_err), 3.8);
}

TEST(ConvergenceStudy, TheoremOrders) {
    std::mt19937_64 rng(54);
    for (int c = 0; c < 3; ++c) {
        const auto q = odd_from_coords(3, oracle::random_qhat(rng, 3, 0.3, 1));
        const auto rep = convergence_study(q, default_t_grid());
        EXPECT_GE(rep.order("height_sq"), 1.8);
        EXPECT_GE(rep.order("edge_shift_sq"), 0.8);
        EXPECT_GE(rep.order("critical_value"), 3.8);
        EXPECT_GE(rep.order("model_delta"), 3.8);
        EXPECT_GE(rep.order("jacobian_factorization"), 2.8);
        EXPECT_EQ(rep.errors.rows(), 9);
        EXPECT_EQ(rep.errors.cols(), 5);
    }
}

TEST(ConvergenceStudy, Deterministic) {
    const auto q = odd_from_coords(2, vec2(0.6, -0.8));
    const auto a = convergence_study(q, default_t_grid()), b = convergence_study(q, default_t_grid());
    EXPECT_EQ(a.errors, b.errors);
    EXPECT_EQ(a.fitted_order, b.fitted_order);
}

TEST(ConvergenceStudy, Errors) {
    EXPECT_THROW(convergence_study(odd_from_coords(2, vec2(0.5, 0)), default_t_grid()), prediction_degenerate);
    const auto q = odd_from_coords(2, vec2(0.5, 0.5));
    EXPECT_THROW(convergence_study(q, {0.5}), invalid_range);
    EXPECT_THROW(convergence_study(q, {0.01, 0.1}), invalid_range);
    EXPECT_THROW(convergence_study(q, {}), invalid_range);
}

TEST(JacobianFactorization, LeadingTermWithCoordinateGradient) {
    std::mt19937_64 rng(55);
    for (int k = 1; k <= 5; ++k) {
        const vector dir = oracle::random_qhat(rng, k, 0.3, 1);
        const auto e = make_expansion_matrices(k);
        std::vector<double> ts, errs;
        for (double t : default_t_grid()) {
            const auto q = odd_from_coords(k, t * dir);
            ts.push_back(t);
            errs.push_back((jacobian_phi(q) - jacobian_phi_leading(q, e)).cwiseAbs().maxCoeff());
        }
        if (k == 1) {
            for (double x : errs) EXPECT_LT(x, 1e-14);
            continue;
        }
        EXPECT_GE(oracle::loglog_slope(ts, errs), 2.8) << "k=" << k;
    }
}
