#pragma once

#include <stdexcept>
#include <string>

namespace tailbound {

// An argument lies outside the mathematical domain of the function
// (negative h argument, t outside [0,1], point masses outside [0,1], ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A bound was requested under conditions its derivation does not cover
// (p > 1/2 for the p <= 1/2 Gaussian lower bound, sigma^2 < lambda/2, ...).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The spec lacks information the bound needs (no n for a moments-only spec).
class UnsupportedSpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Bound asked for the wrong tail.
class SideMismatchError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// The deviation lies outside the window where the bound is proven.
class ValidityError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// The moment generating function handed to the optimizer is not convex.
class NonConvexError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A bounded search ran out of budget.
class NotFoundError : public std::runtime_error {
public:
    NotFoundError(const std::string& what, std::string log)
        : std::runtime_error(what), log_(std::move(log)) {}
    const std::string& log() const noexcept { return log_; }

private:
    std::string log_;
};

}  // namespace tailbound
