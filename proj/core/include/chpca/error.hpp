#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace chpca {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input record. `row()` is the 1-based line number in the source file.
class ParseError : public Error {
public:
    ParseError(std::size_t row, const std::string& what)
        : Error("row " + std::to_string(row) + ": " + what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

/// Failure inside one pipeline stage; `stage()` names it for diagnostics.
class StageError : public Error {
public:
    StageError(std::string stage, const std::string& what)
        : Error(stage + ": " + what), stage_(std::move(stage)) {}

    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

} // namespace chpca
