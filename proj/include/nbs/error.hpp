#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nbs {

// Base for every error raised by the toolkit. `detail` carries structured
// context (file:line, offending id) separately from the human message.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message, std::string detail = {})
        : std::runtime_error(message), detail_(std::move(detail)) {}
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string detail_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& file, std::size_t line, const std::string& field,
               const std::string& message)
        : Error(file + ":" + std::to_string(line) + ": field '" + field + "': " + message,
                file + ":" + std::to_string(line)),
          line_(line), field_(field) {}
    std::size_t line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

// A loaded dataset breaks a structural invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

class NotFoundError : public Error {
public:
    using Error::Error;
};

// Inputs are well-formed but outside the operation's contract.
class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace nbs
