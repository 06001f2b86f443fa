#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace spatsign {

// Base class for all library errors, so callers can catch the whole family.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& msg) : Error(msg) {}
};

// Requested operation needs a positive definite matrix and the smallest
// eigenvalue fell below the relative SPD floor.
class NotPositiveDefinite : public Error {
public:
    explicit NotPositiveDefinite(const std::string& msg) : Error(msg) {}
};

// Scatter estimation with n <= p.
class Underdetermined : public Error {
public:
    explicit Underdetermined(const std::string& msg) : Error(msg) {}
};

// A covariance estimate required by a test statistic is singular.
class DegenerateCovariance : public Error {
public:
    explicit DegenerateCovariance(const std::string& msg) : Error(msg) {}
};

// A Walsh average is exactly zero where an inverse radius is required.
class DegenerateWalshAverage : public Error {
public:
    DegenerateWalshAverage(const std::string& msg, std::int64_t i, std::int64_t j)
        : Error(msg), pair_i(i), pair_j(j) {}
    std::int64_t pair_i;
    std::int64_t pair_j;
};

class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::int64_t line_number)
        : Error(msg), line(line_number) {}
    std::int64_t line;
};

}  // namespace spatsign
