#include "symred/errors.hpp"

namespace symred {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::DegenerateInput: return "DegenerateInput";
        case ErrorKind::NotSPD: return "NotSPD";
        case ErrorKind::OddDimension: return "OddDimension";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::UnsupportedNonabelian: return "UnsupportedNonabelian";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::NotRegularValue: return "NotRegularValue";
        case ErrorKind::NotOnLevel: return "NotOnLevel";
        case ErrorKind::ActionNotFree: return "ActionNotFree";
        case ErrorKind::SectionNotOnLevel: return "SectionNotOnLevel";
        case ErrorKind::RankDeficientLift: return "RankDeficientLift";
        case ErrorKind::NotStandardStructure: return "NotStandardStructure";
        case ErrorKind::UnknownScenario: return "UnknownScenario";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
    }
    return "Unknown";
}

namespace {

std::string format_source_error(std::size_t line, std::size_t column, const std::string& message,
                                const std::vector<std::string>& expected) {
    std::string out = "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
    if (!expected.empty()) {
        out += " (expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) out += i + 1 == expected.size() ? " or " : ", ";
            out += expected[i];
        }
        out += ")";
    }
    return out;
}

} // namespace

SourceError::SourceError(ErrorKind kind, std::size_t line, std::size_t column, const std::string& message,
                         std::vector<std::string> expected)
    : GeometryError(kind, format_source_error(line, column, message, expected)),
      line_(line),
      column_(column),
      message_(message),
      expected_(std::move(expected)) {}

} // namespace symred
