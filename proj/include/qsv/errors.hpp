#pragma once

#include <stdexcept>
#include <string>

namespace qsv {

// Thrown when a Schmidt coefficient lies outside [0, 1/2].
struct OutOfRangeLambda : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a mixing probability lies outside [0, 1].
struct OutOfRangeP : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a damping parameter lies outside its admissible interval.
struct OutOfRangeDelta : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when an operator expected to be Hermitian has |A - A^dagger| above tolerance.
struct NonHermitianInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a matrix fails the density-operator requirements (unit trace, positivity).
struct InvalidDensityOperator : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when 1 - delta + lambda*delta underflows to zero (only at lambda=0, delta=1).
struct SingularDenominator : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a measurement-direction distribution violates E[T] = 1/2.
struct MeanConstraintViolated : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when the second eigenvalue reaches 1 and no finite test count exists.
struct DegenerateStrategy : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when an operator does not fix the target state.
struct NotPsiPassing : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when an operator is not in the twirled, swap-symmetric block form.
struct NotSymmetrizedForm : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a sweep or search interval is empty or reversed.
struct InvalidRange : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Thrown when a strategy name is not in the catalog.
struct UnknownStrategy : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Raised (as an exit condition) when an optimality certificate fails its tolerance.
struct CertificationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qsv
