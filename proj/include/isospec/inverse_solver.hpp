#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "asymptotics.hpp"
#include "band_structure.hpp"
#include "errors.hpp"
#include "lyapunov.hpp"
#include "potential.hpp"

namespace isospec {

struct newton_options {
    double tol_residual = 1e-12;
    int max_iter = 100;
    int max_halvings = 20;
    double singular_threshold = 1e-10;
};

struct newton_result {
    odd_potential solution;
    int iterations;
    double residual; // max |phi_map(solution) - target|
};

// Damped Newton on phi_map in the free chart q_1..q_k.
inline newton_result newton_solve(const phi_vector& target, const odd_potential& seed, const newton_options& opt = {}) {
    const int k = seed.k();
    if (target.size() != k) throw invalid_range("newton_solve: target has the wrong length");
    const double tol = opt.tol_residual * std::max(1.0, target.cwiseAbs().maxCoeff());

    vector x = seed.free();
    auto cur = seed;
    vector r = phi_map(cur) - target;
    double rn = r.cwiseAbs().maxCoeff();
    for (int it = 0;; ++it) {
        if (rn <= tol) return {cur, it, rn};
        if (it >= opt.max_iter) throw no_convergence("newton_solve: no convergence after " + std::to_string(it) + " iterations");

        const matrix j = jacobian_phi(cur);
        const Eigen::PartialPivLU<matrix> lu(j);
        if (std::abs(lu.determinant()) < opt.singular_threshold)
            throw singular_jacobian("newton_solve: |det| = " + std::to_string(std::abs(lu.determinant())) +
                                    " at iteration " + std::to_string(it));
        const vector step = lu.solve(-r);

        double alpha = 1;
        bool accepted = false;
        for (int h = 0; h <= opt.max_halvings; ++h, alpha *= 0.5) {
            auto trial = odd_from_free(x + alpha * step);
            vector tr = phi_map(trial) - target;
            const double tn = tr.cwiseAbs().maxCoeff();
            if (tn < rn) {
                x += alpha * step;
                cur = std::move(trial);
                r = std::move(tr);
                rn = tn;
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw no_convergence("newton_solve: residual stalled at " + std::to_string(rn) + " after " +
                                 std::to_string(it) + " iterations");
    }
}

enum class seed_status { converged, singular, no_convergence };

inline const char* to_string(seed_status s) {
    switch (s) {
    case seed_status::converged: return "converged";
    case seed_status::singular: return "singular";
    case seed_status::no_convergence: return "no_convergence";
    }
    return "unknown";
}

struct seed_outcome {
    vector seed_qhat;
    seed_status status;
    int iterations = 0;
    double residual = 0;
    std::string message;
};

struct iso_set {
    std::optional<odd_potential> source;
    phi_vector target;
    std::vector<odd_potential> members; // sorted lexicographically by q-hat
    std::vector<double> residuals;
    std::vector<seed_outcome> seeds;

    int count() const { return static_cast<int>(members.size()); }
};

namespace detail {

inline bool lex_less(const vector& a, const vector& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

} // namespace detail

// Newton from every seed, then merge. Candidates are sorted before the greedy merge, so the
// result does not depend on the seed order.
inline iso_set solve_from_seeds(const phi_vector& target, const std::vector<odd_potential>& seeds, double dedup_tol,
                                const newton_options& opt = {}) {
    iso_set out;
    out.target = target;
    std::vector<newton_result> found;
    for (const auto& s : seeds) {
        seed_outcome o{s.qhat(), seed_status::converged, 0, 0, {}};
        try {
            auto res = newton_solve(target, s, opt);
            o.iterations = res.iterations;
            o.residual = res.residual;
            found.push_back(std::move(res));
        } catch (const singular_jacobian& e) {
            o.status = seed_status::singular;
            o.message = e.what();
        } catch (const no_convergence& e) {
            o.status = seed_status::no_convergence;
            o.message = e.what();
        }
        out.seeds.push_back(std::move(o));
    }
    std::sort(found.begin(), found.end(), [](const newton_result& a, const newton_result& b) {
        return detail::lex_less(a.solution.qhat(), b.solution.qhat());
    });
    for (auto& f : found) {
        const bool dup = std::any_of(out.members.begin(), out.members.end(), [&](const odd_potential& m) {
            return (m.values() - f.solution.values()).cwiseAbs().maxCoeff() <= dedup_tol;
        });
        if (dup) continue;
        out.residuals.push_back(f.residual);
        out.members.push_back(std::move(f.solution));
    }
    return out;
}

// The 2^k seeds (nu_1 qhat_1, .., nu_k qhat_k); bit m of the seed index flips component m.
inline std::vector<odd_potential> sign_flip_seeds(const odd_potential& q) {
    const int k = q.k();
    std::vector<odd_potential> seeds;
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
        vector nu(k);
        for (int m = 0; m < k; ++m) nu[m] = (mask >> m) & 1u ? -1.0 : 1.0;
        seeds.push_back(flip(q, nu));
    }
    return seeds;
}

inline double dedup_tolerance(double norm) { return 1e-6 * std::max(1.0, norm); }

inline iso_set isospectral_set(const odd_potential& q, const newton_options& opt = {}) {
    const double scale = q.qhat().cwiseAbs().maxCoeff();
    for (int n = 0; n < q.k(); ++n)
        if (!(std::abs(q.qhat()[n]) > 1e-14 * scale))
            throw invalid_range("isospectral_set: q-hat component " + std::to_string(n + 1) + " vanishes");
    auto out = solve_from_seeds(phi_map(q), sign_flip_seeds(q), dedup_tolerance(q.norm()), opt);
    out.source = q;
    return out;
}

// Seed for a bare target: invert the quadratic part of the expansion for q-hat^2 and take
// nonnegative square roots.
inline odd_potential linearized_seed(const phi_vector& target) {
    const int k = static_cast<int>(target.size());
    if (k < 1) throw invalid_range("linearized_seed: empty target");
    const auto e = make_expansion_matrices(k);
    const vector sq = (e.forms_to_phi * w_matrix(k)).lu().solve(target - e.Phi0);
    vector qhat(k);
    for (int n = 0; n < k; ++n) qhat[n] = std::sqrt(std::max(0.0, sq[n]));
    return odd_from_coords(k, qhat);
}

inline iso_set isospectral_set_from_target(const phi_vector& target, const newton_options& opt = {}) {
    const auto seed = linearized_seed(target);
    return solve_from_seeds(target, sign_flip_seeds(seed), dedup_tolerance(seed.norm()), opt);
}

struct isospectral_report {
    double coefficient_residual; // max |coefficient difference| of Delta
    double edge_residual;        // max |band edge difference|
    double height_residual;      // max |h_n difference|
    double tol;

    bool coefficients_match() const { return coefficient_residual <= tol; }
    bool edges_match() const { return edge_residual <= tol; }
    bool heights_match() const { return height_residual <= tol; }
    bool all() const { return coefficients_match() && edges_match() && heights_match(); }
};

inline isospectral_report verify_isospectral(const odd_potential& p, const odd_potential& q, double tol,
                                             const root_options& opt = {}) {
    if (p.k() != q.k()) throw invalid_range("verify_isospectral: periods differ");
    const auto dp = delta_poly(p), dq = delta_poly(q);
    isospectral_report r{max_coeff_diff(dp.poly(), dq.poly()), 0, 0, tol};
    const auto bp = compute_band_structure(dp, opt), bq = compute_band_structure(dq, opt);
    r.edge_residual = std::max(std::abs(bp.outer_left - bq.outer_left), std::abs(bp.outer_right - bq.outer_right));
    for (std::size_t n = 0; n < bp.critical.size(); ++n) {
        r.edge_residual = std::max({r.edge_residual, std::abs(bp.edges_minus[n] - bq.edges_minus[n]),
                                    std::abs(bp.edges_plus[n] - bq.edges_plus[n])});
        r.height_residual = std::max(r.height_residual, std::abs(bp.heights[n] - bq.heights[n]));
    }
    return r;
}

struct singularity_report {
    double det_value;
    bool is_singular;
};

inline singularity_report singularity(const odd_potential& q, double threshold = 1e-10) {
    const double d = jacobian_phi(q).determinant();
    return {d, std::abs(d) < threshold};
}

struct height_map_result {
    vector h;                       // h_1..h_k
    std::optional<matrix> jacobian; // d h_n / d q_m in the free chart, when every gap is open
};

// d h / d q from H_n = 2 (-1)^n cosh h_n.
inline matrix height_jacobian(const odd_potential& q, const root_options& opt = {}) {
    const int k = q.k();
    const auto bs = compute_band_structure(q.base(), opt);
    const matrix jh = jacobian_H(q, opt);
    matrix out(k, k);
    for (int n = 1; n <= k; ++n) {
        const double h = bs.heights[n - 1];
        if (h <= height_tol) throw closed_gap("height_jacobian: gap " + std::to_string(n) + " is closed");
        const double s = n % 2 == 0 ? 1.0 : -1.0;
        out.row(n - 1) = jh.row(n - 1) / (2 * s * std::sinh(h));
    }
    return out;
}

inline height_map_result height_map(const odd_potential& q, const root_options& opt = {}) {
    const auto bs = compute_band_structure(q.base(), opt);
    height_map_result r;
    r.h.resize(q.k());
    bool open = true;
    for (int n = 0; n < q.k(); ++n) {
        r.h[n] = bs.heights[n];
        open = open && r.h[n] > height_tol;
    }
    if (open) r.jacobian = height_jacobian(q, opt);
    return r;
}

} // namespace isospec
