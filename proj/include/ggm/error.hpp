#pragma once

#include <stdexcept>
#include <string>

namespace ggm {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when a matrix or vector does not have the shape an operation needs.
class DimensionError : public Error {
public:
    using Error::Error;
};

class HomogeneityError : public Error {
public:
    using Error::Error;
};

// A weight outside the validated local-finiteness window was requested.
class WindowError : public Error {
public:
    WindowError(const std::string& what, int weight) : Error(what), weight_(weight) {}
    int weight() const { return weight_; }

private:
    int weight_;
};

class LocalFinitenessError : public Error {
public:
    LocalFinitenessError(const std::string& what, int weight) : Error(what), weight_(weight) {}
    int weight() const { return weight_; }

private:
    int weight_;
};

class DegenerateGradingError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0) : Error(what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class ComplexError : public Error {
public:
    ComplexError(const std::string& what, int degree) : Error(what), degree_(degree) {}
    int degree() const { return degree_; }

private:
    int degree_;
};

// A kernel chain or colimit did not become stationary within its budget.
class StabilizationError : public Error {
public:
    using Error::Error;
};

class MembershipError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

}  // namespace ggm
