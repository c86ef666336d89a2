#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ergo {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input is structurally or numerically invalid (maps to CLI exit code 2).
struct ValidationError : Error {
    using Error::Error;
};

struct ShapeError : ValidationError {
    using ValidationError::ValidationError;
};

struct RowSumError : ValidationError {
    using ValidationError::ValidationError;
};

struct NegativeEntryError : ValidationError {
    using ValidationError::ValidationError;
};

struct RewardRangeError : ValidationError {
    using ValidationError::ValidationError;
};

struct UnknownActionError : ValidationError {
    using ValidationError::ValidationError;
};

struct UnknownSymbolError : ValidationError {
    using ValidationError::ValidationError;
};

struct ParseError : ValidationError {
    using ValidationError::ValidationError;
};

struct DomainError : ValidationError {
    using ValidationError::ValidationError;
};

struct DegenerateInputError : ValidationError {
    using ValidationError::ValidationError;
};

struct OverflowError : Error {
    using Error::Error;
};

struct NotSinglePlayerError : Error {
    using Error::Error;
};

// A requested property does not hold (maps to CLI exit code 1).
// Carries the witness sequence of flattened action-pair indices.
struct NotErgodicError : Error {
    std::vector<int> counterexample;
    explicit NotErgodicError(std::string msg, std::vector<int> witness = {})
        : Error(std::move(msg)), counterexample(std::move(witness)) {}
};

// A configured search budget ran out before the answer was decided.
// Never downgraded to a silent "unknown" verdict (maps to CLI exit code 3).
struct BudgetExceededError : Error {
    using Error::Error;
};

}  // namespace ergo
