#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset` is the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t offset, std::vector<std::string> expected)
        : Error(std::move(message)), offset_(offset), expected_(std::move(expected)) {}

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
    [[nodiscard]] const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

/// Evaluation left the real domain (ln of non-positive, division by zero, ...).
/// `node` is the printed sub-expression that failed.
class DomainError : public Error {
public:
    DomainError(std::string message, std::string node)
        : Error(std::move(message)), node_(std::move(node)) {}

    [[nodiscard]] const std::string& node() const noexcept { return node_; }

private:
    std::string node_;
};

class UnboundParameter : public Error {
public:
    explicit UnboundParameter(std::string name)
        : Error("unbound parameter '" + name + "'"), name_(std::move(name)) {}

    [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// Grid or sampled-field precondition violated (bad grid, too many invalid points, ...).
class NumericsError : public Error {
public:
    using Error::Error;
};

/// A quadrature or integration overflowed. `index` is the last finite grid index.
class DivergenceError : public NumericsError {
public:
    DivergenceError(std::string message, std::size_t index)
        : NumericsError(std::move(message)), index_(index) {}

    [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// A solution family could not be constructed from the given inputs.
class ConstructionError : public Error {
public:
    using Error::Error;
};

}  // namespace pdm
