// Isospectral search at a large scale: for k = 2 and t = 50, Newton started from permuted
// and sign-flipped copies of the free components lands on more than 2^k distinct potentials.

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <vector>

#include <isospec/isospec.hpp>

int main() {
    using namespace isospec;
    const int k = 2;
    const double t = 50;
    vector base(k);
    base << 1.0, -0.37;
    const auto q = odd_from_free(t * base);
    const phi_vector target = phi_map(q);

    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<odd_potential> seeds;
    do {
        for (unsigned mask = 0; mask < (1u << k); ++mask) {
            vector f(k);
            for (int m = 0; m < k; ++m) f[m] = ((mask >> m) & 1u ? -1.0 : 1.0) * q.free()[perm[m]];
            seeds.push_back(odd_from_free(f));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    newton_options opt;
    opt.singular_threshold = 1e-12;
    const auto set = solve_from_seeds(target, seeds, dedup_tolerance(q.norm()), opt);

    std::printf("k = %d, t = %g, seeds = %zu\n", k, t, seeds.size());
    for (const auto& s : set.seeds) std::printf("  seed (%+.4f, %+.4f): %s\n", s.seed_qhat[0], s.seed_qhat[1], to_string(s.status));
    std::printf("distinct isospectral potentials: %d (2^k = %d, 2^k k! = %d)\n", set.count(), 1 << k, (1 << k) * 2);
    for (std::size_t i = 0; i < set.members.size(); ++i) {
        const auto& m = set.members[i];
        std::printf("  free (%+.6f, %+.6f)  residual %.2e\n", m.free()[0], m.free()[1], set.residuals[i]);
    }
    return 0;
}
