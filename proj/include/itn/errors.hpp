#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace itn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), source_(source), line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string source_;
    std::size_t line_;
};

/// Well-formed input that violates a structural invariant (duplicate id, bad index, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Constraints that no finite parameter vector can reproduce.
class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, std::vector<std::size_t> nodes)
        : Error(what), nodes_(std::move(nodes)) {}

    const std::vector<std::size_t>& nodes() const noexcept { return nodes_; }

private:
    std::vector<std::size_t> nodes_;
};

}  // namespace itn
