#pragma once

#include <stdexcept>
#include <string>

namespace isospec {

// Raised when an input is outside the mathematical domain of an operation.
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct not_zero_mean : domain_error { using domain_error::domain_error; };
struct not_odd : domain_error { using domain_error::domain_error; };
struct root_count_mismatch : domain_error { using domain_error::domain_error; };
struct sign_pattern_violated : domain_error { using domain_error::domain_error; };
struct degenerate_critical : domain_error { using domain_error::domain_error; };
struct singular_jacobian : domain_error { using domain_error::domain_error; };
struct no_convergence : domain_error { using domain_error::domain_error; };
struct closed_gap : domain_error { using domain_error::domain_error; };
struct prediction_degenerate : domain_error { using domain_error::domain_error; };
struct budget_exceeded : domain_error { using domain_error::domain_error; };
struct invalid_range : domain_error { using domain_error::domain_error; };

} // namespace isospec
