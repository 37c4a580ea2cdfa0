#pragma once

#include <stdexcept>
#include <string>

namespace biaslens {

// Base for everything this library throws on bad input or bad state.
// The CLI maps InputError -> exit 1 and InvariantError -> exit 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputError : Error {
    using Error::Error;
};

// A condition the code promises can never happen on valid inputs.
struct InvariantError : Error {
    using Error::Error;
};

struct IoError : InputError {
    using InputError::InputError;
};

struct ParseError : InputError {
    using InputError::InputError;
};

struct DuplicateIdError : InputError {
    using InputError::InputError;
};

struct DomainError : InputError {
    using InputError::InputError;
};

struct LexiconError : InputError {
    using InputError::InputError;
};

struct UnknownCategoryError : InputError {
    using InputError::InputError;
};

struct DimensionMismatchError : InputError {
    using InputError::InputError;
};

struct EmptyReferenceError : InputError {
    using InputError::InputError;
};

struct EmptyInputError : InputError {
    using InputError::InputError;
};

struct EmptyCohortError : InputError {
    using InputError::InputError;
};

struct RankDeficientError : InputError {
    using InputError::InputError;
};

struct UnknownUserError : InputError {
    using InputError::InputError;
};

struct ConfigError : InputError {
    using InputError::InputError;
};

struct CoverageError : InputError {
    using InputError::InputError;
};

}  // namespace biaslens
