#pragma once

#include <stdexcept>
#include <string>

namespace tgk {

// A correlation (or projected correlation) matrix failed to factor.
// Ill-conditioning is a diagnostic of bad hyperparameters here, so it is
// surfaced with the offending pivot instead of being regularized away.
class IllConditionedError : public std::runtime_error {
public:
    IllConditionedError(const std::string& what, double min_pivot)
        : std::runtime_error(what), min_pivot_(min_pivot) {}

    double min_pivot() const noexcept { return min_pivot_; }

private:
    double min_pivot_;
};

// The Fisher information matrix is numerically singular: some correlation
// length direction carries no information and the prior is undefined there.
class SingularPriorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tgk
