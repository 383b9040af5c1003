#pragma once

#include <stdexcept>
#include <string>

namespace homoglab {

// Validation problems (bad input, bad config) map to CLI exit code 1.
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failures (instability, divergence, embedding failure) map to
// CLI exit code 2.
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct embedding_error : numerical_error {
    using numerical_error::numerical_error;
};

struct instability_error : numerical_error {
    using numerical_error::numerical_error;
};

struct convergence_error : numerical_error {
    using numerical_error::numerical_error;
};

struct non_integrable_error : validation_error {
    using validation_error::validation_error;
};

}  // namespace homoglab
