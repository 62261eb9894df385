#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace p2pbot {

/// Malformed input text. `line()` is 1-based; 0 when no line applies.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_{line} {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Well-formed input that violates a domain invariant (e.g. src == dst).
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::size_t line, const std::string& what)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_{line} {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Quantity undefined on its input (empty contact set, edgeless modularity).
class DegenerateInputError : public std::domain_error {
    using std::domain_error::domain_error;
};

class GenerationError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Error raised inside a pipeline stage, tagged with the stage name.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_{std::move(stage)} {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

}  // namespace p2pbot
