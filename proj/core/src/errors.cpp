#include <chaos/errors.hpp>

#include <fmt/format.h>

namespace chaos {

FileNotFound::FileNotFound(std::string path)
    : DataError(fmt::format("file not found: {}", path)), path_(std::move(path)) {}

ParseError::ParseError(std::size_t line, const std::string& what)
    : DataError(fmt::format("parse error at row {}: {}", line, what)), line_(line) {}

FormatError::FormatError(std::size_t line, const std::string& what)
    : DataError(fmt::format("format error at line {}: {}", line, what)), line_(line) {}

NonMonotonicTimestamps::NonMonotonicTimestamps(std::size_t row)
    : DataError(fmt::format("timestamps not strictly increasing at row {}", row)), row_(row) {}

InvalidParameter::InvalidParameter(std::string name, const std::string& why)
    : ValidationError(fmt::format("invalid parameter '{}': {}", name, why)), name_(std::move(name)) {}

SeriesTooShort::SeriesTooShort(std::size_t needed, std::size_t got)
    : ValidationError(fmt::format("series too short: needed {}, got {}", needed, got)), needed_(needed), got_(got) {}

TooFewSamples::TooFewSamples(std::size_t needed, std::size_t got)
    : ValidationError(fmt::format("too few samples: needed {}, got {}", needed, got)) {}

LengthMismatch::LengthMismatch(std::size_t a, std::size_t b)
    : ValidationError(fmt::format("length mismatch: {} vs {}", a, b)) {}

UnknownSymbol::UnknownSymbol(const std::string& symbol) : ValidationError(fmt::format("unknown symbol: {}", symbol)) {}

InfeasibleFloor::InfeasibleFloor(double floor, std::size_t count)
    : ValidationError(fmt::format("floor {} infeasible for {} records", floor, count)) {}

MissingConversionRate::MissingConversionRate(const std::string& symbol)
    : ValidationError(fmt::format("no quote->USD conversion rate for {}", symbol)) {}

InsufficientMargin::InsufficientMargin(double required, double available)
    : ValidationError(fmt::format("insufficient margin: required {:.2f}, free {:.2f}", required, available)) {}

}  // namespace chaos
