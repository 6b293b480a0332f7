#pragma once

#include <stdexcept>
#include <string>

namespace chainset {

/// Exit-code categories used by the CLI (see tools/chainset_cli.cpp).
enum class ErrorKind {
    Parse,       // malformed input files / invalid arguments -> exit 2
    Numerical,   // convergence, overflow, tolerance failures -> exit 3
    Empty,       // unreachable targets / empty results       -> exit 4
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct NonFinite : Error {
    explicit NonFinite(const std::string& what) : Error(ErrorKind::Numerical, "non-finite value: " + what) {}
};
struct SchurFailure : Error {
    explicit SchurFailure(const std::string& what) : Error(ErrorKind::Numerical, "Schur decomposition failed: " + what) {}
};
struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error(ErrorKind::Parse, "dimension mismatch: " + what) {}
};
struct NotIdempotent : Error {
    explicit NotIdempotent(const std::string& what) : Error(ErrorKind::Parse, "matrix is not a projection: " + what) {}
};
struct QuadratureFailure : Error {
    explicit QuadratureFailure(const std::string& what) : Error(ErrorKind::Numerical, "quadrature failed: " + what) {}
};
struct NotHyperbolic : Error {
    explicit NotHyperbolic(const std::string& what) : Error(ErrorKind::Numerical, "induced block is not hyperbolic: " + what) {}
};
struct WindowTooSmall : Error {
    explicit WindowTooSmall(const std::string& what) : Error(ErrorKind::Numerical, "integration window too small: " + what) {}
};
struct GridTooLarge : Error {
    explicit GridTooLarge(const std::string& what) : Error(ErrorKind::Parse, "grid too large: " + what) {}
};
struct EpsilonTooSmall : Error {
    explicit EpsilonTooSmall(const std::string& what) : Error(ErrorKind::Parse, "epsilon too small: " + what) {}
};
struct Unreachable : Error {
    explicit Unreachable(const std::string& what) : Error(ErrorKind::Empty, "unreachable: " + what) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(ErrorKind::Parse, "parse error: " + what) {}
};
struct NotPlottable : Error {
    explicit NotPlottable(const std::string& what) : Error(ErrorKind::Parse, "not plottable: " + what) {}
};

}  // namespace chainset
