#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gcl {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (e.g. u not in (0,1)).
class DomainError : public Error {
public:
    using Error::Error;
};

class IndexError : public Error {
public:
    using Error::Error;
};

/// All observations equal, so no scale exists.
class DegenerateSampleError : public Error {
public:
    explicit DegenerateSampleError(const std::string& what, std::string variable_id = {})
        : Error(variable_id.empty() ? what : variable_id + ": " + what),
          variable_id_(std::move(variable_id)) {}

    const std::string& variable_id() const noexcept { return variable_id_; }

private:
    std::string variable_id_;
};

class InsufficientSampleError : public Error {
public:
    using Error::Error;
};

class ZeroScaleError : public Error {
public:
    using Error::Error;
};

class NonConvergenceError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column = 0)
        : Error(format(what, line, column)), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string format(const std::string& what, std::size_t line, std::size_t column) {
        std::string out = "line " + std::to_string(line);
        if (column > 0) out += ", column " + std::to_string(column);
        return out + ": " + what;
    }

    std::size_t line_;
    std::size_t column_;
};

class DuplicateIdError : public Error {
public:
    explicit DuplicateIdError(const std::string& id)
        : Error("duplicate identifier '" + id + "'"), id_(id) {}

    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class EmptyInputError : public Error {
public:
    using Error::Error;
};

}  // namespace gcl
