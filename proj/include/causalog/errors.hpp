#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace causalog {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
          line_(line),
          column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Semantic problems in theories and structure files (unknown symbols, bad arity, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

class BudgetExceeded : public Error {
public:
    enum class Kind { Creation, ChoiceSpace, Steps, Branches, Elements };

    BudgetExceeded(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}

    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

}  // namespace causalog
