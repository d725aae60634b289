#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace ftac {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SingularInertia : public Error {
public:
    using Error::Error;
};

/// The integrated state left the finite reals (blow-up or bad gains).
class NonFiniteState : public Error {
public:
    NonFiniteState(const std::string& what, std::size_t step)
        : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// D·Ê³·Dᵀ is singular: the bank is not fully actuated under the estimate.
class RankDeficient : public Error {
public:
    using Error::Error;
};

class BudgetViolation : public Error {
public:
    using Error::Error;
};

class EmptyTail : public Error {
public:
    using Error::Error;
};

class GainConditionViolated : public Error {
public:
    using Error::Error;
};

class NotContractive : public Error {
public:
    using Error::Error;
};

class NotActivated : public Error {
public:
    using Error::Error;
};

/// A simulated steady-state error exceeded its predicted bound.
class BoundViolated : public Error {
public:
    BoundViolated(const std::string& what, std::size_t instance, std::string quantity)
        : Error(what), instance_(instance), quantity_(std::move(quantity)) {}
    [[nodiscard]] std::size_t instance() const noexcept { return instance_; }
    [[nodiscard]] const std::string& quantity() const noexcept { return quantity_; }

private:
    std::size_t instance_;
    std::string quantity_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace ftac
