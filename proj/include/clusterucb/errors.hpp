#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cucb {

// Error families map to CLI exit codes: ValidationError -> 1, IoError -> 2,
// anything else -> 3.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ZeroRowError : public ValidationError {
public:
    explicit ZeroRowError(std::size_t row)
        : ValidationError("row " + std::to_string(row) + " has (near-)zero norm"),
          row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

class DimensionMismatchError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class EmptySubtaskError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class LengthMismatchError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class EmptyListError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class IndexOutOfRangeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class KTooLargeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NotNormalizedError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class BudgetExceedsPoolError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class EmptyHistoryError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class EmptyGroundTruthError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ZeroDenominatorError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class IdMismatchError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InvalidConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class InconsistentInputsError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace cucb
