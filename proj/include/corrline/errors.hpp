#pragma once

#include <stdexcept>
#include <string>

namespace corrline {

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Ill-formed input data (files, CLI parameters, sample ingestion).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Design matrix too close to singular for a stable solve.
struct SingularDesign : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace corrline
