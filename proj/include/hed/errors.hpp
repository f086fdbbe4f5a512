#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace hed {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A step counter or value escaped the concrete regime where exact
/// addition is defined.
struct NotExactError : Error {
    NotExactError() : Error("operand is not exact") {}
};

struct ParseError : Error {
    std::size_t position;
    ParseError(std::size_t pos, const std::string& what)
        : Error("parse error at " + std::to_string(pos) + ": " + what), position(pos) {}
};

/// An iterate produced a value that cannot be fed back as a concrete input.
struct IterateOverflowError : Error {
    std::uint64_t step;
    explicit IterateOverflowError(std::uint64_t s)
        : Error("iterate overflow at step " + std::to_string(s)), step(s) {}
};

struct BudgetExhaustedError : Error {
    std::uint64_t nodes;
    explicit BudgetExhaustedError(std::uint64_t n, const std::string& what = "recursion nodes")
        : Error("iteration budget exhausted (" + what + ", " + std::to_string(n) + ")"), nodes(n) {}
};

/// A concrete program was still running at the experiment cap while its
/// budget allowed more. Loud by design: raise the cap, do not guess.
struct CapExceededError : Error {
    std::string machine;
    std::uint64_t input;
    CapExceededError(std::string e, std::uint64_t n)
        : Error("cap exceeded running machine " + e + " on input " + std::to_string(n)),
          machine(std::move(e)), input(n) {}
};

struct GammaDivergedError : Error {
    std::uint64_t input;
    explicit GammaDivergedError(std::uint64_t l)
        : Error("gamma diverges at " + std::to_string(l)), input(l) {}
};

struct EvaluationDivergedError : Error {
    std::uint64_t input;
    explicit EvaluationDivergedError(std::uint64_t n)
        : Error("evaluation diverged (still running) at " + std::to_string(n)), input(n) {}
};

struct NotSLimError : Error {
    NotSLimError() : Error("ordinal is not of the form w^b with b > 0") {}
};

}  // namespace hed
