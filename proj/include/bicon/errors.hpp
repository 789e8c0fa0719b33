#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bicon {

// Malformed input text; carries the 1-based line number.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Well-formed input that violates a domain invariant (self-loop, duplicate edge, ...).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A caller or strategy broke an operation's precondition.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Non-finite values appeared during integration.
class NumericError : public std::runtime_error {
public:
    NumericError(std::size_t step, const std::string& what)
        : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace bicon
