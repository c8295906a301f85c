#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace symred {

enum class ErrorKind {
    NonFinite,
    DegenerateInput,
    NotSPD,
    OddDimension,
    DimensionMismatch,
    UnsupportedNonabelian,
    NoConvergence,
    NotRegularValue,
    NotOnLevel,
    ActionNotFree,
    SectionNotOnLevel,
    RankDeficientLift,
    NotStandardStructure,
    UnknownScenario,
    ParseError,
    ValidationError,
};

std::string_view to_string(ErrorKind kind);

class GeometryError : public std::runtime_error {
public:
    GeometryError(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Position-carrying error for scenario text. Lines and columns are 1-based.
class SourceError : public GeometryError {
public:
    SourceError(ErrorKind kind, std::size_t line, std::size_t column, const std::string& message,
                std::vector<std::string> expected = {});

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& message() const noexcept { return message_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string message_;
    std::vector<std::string> expected_;
};

} // namespace symred
