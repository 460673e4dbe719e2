#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgqa {

// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A malformed record in a triple file.
class IngestError : public Error {
public:
    IngestError(std::size_t line_no, std::string raw_line, const std::string& reason)
        : Error("line " + std::to_string(line_no) + ": " + reason),
          line_no_(line_no),
          raw_line_(std::move(raw_line)) {}

    std::size_t line_no() const { return line_no_; }
    const std::string& raw_line() const { return raw_line_; }

private:
    std::size_t line_no_;
    std::string raw_line_;
};

// Syntax error while parsing a query. `position` is a byte offset into the input.
class ParseError : public Error {
public:
    ParseError(std::size_t position, const std::string& expected, const std::string& found)
        : Error("parse error at offset " + std::to_string(position) + ": expected " + expected +
                ", found " + found),
          position_(position),
          expected_(expected) {}

    std::size_t position() const { return position_; }
    const std::string& expected() const { return expected_; }

private:
    std::size_t position_;
    std::string expected_;
};

// The query uses a construct outside the supported grammar.
class UnsupportedFeatureError : public ParseError {
public:
    UnsupportedFeatureError(std::size_t position, std::string feature)
        : ParseError(position, "supported construct", "unsupported feature: " + feature),
          feature_(std::move(feature)) {}

    const std::string& feature() const { return feature_; }

private:
    std::string feature_;
};

// A requested mention occurrence does not exist in the query text.
class SubstitutionError : public Error {
public:
    SubstitutionError(const std::string& kind, std::string mention, std::size_t occurrence)
        : Error("no occurrence " + std::to_string(occurrence) + " of " + kind + " mention \"" +
                mention + "\""),
          kind_(kind),
          mention_(std::move(mention)),
          occurrence_(occurrence) {}

    const std::string& kind() const { return kind_; }
    const std::string& mention() const { return mention_; }
    std::size_t occurrence() const { return occurrence_; }

private:
    std::string kind_;
    std::string mention_;
    std::size_t occurrence_;
};

// A query references a variable or property the executor cannot resolve.
class ExecutionError : public Error {
public:
    using Error::Error;
};

// The entity selector was invoked with nothing to choose from.
class SelectionError : public Error {
public:
    using Error::Error;
};

// Transport or protocol failure while talking to a model backend.
class GatewayError : public Error {
public:
    GatewayError(const std::string& what, int attempts, bool retryable)
        : Error(what), attempts_(attempts), retryable_(retryable) {}

    int attempts() const { return attempts_; }
    bool retryable() const { return retryable_; }

private:
    int attempts_ = 0;
    bool retryable_ = false;
};

// The backend answered, but not in the shape the wire protocol promises.
class MalformedResponseError : public Error {
public:
    using Error::Error;
};

// The retrieval workflow failed (as opposed to legitimately finding nothing).
class RetrievalError : public Error {
public:
    using Error::Error;
};

// A malformed line in a dataset file.
class DatasetError : public Error {
public:
    DatasetError(std::size_t line_no, const std::string& reason)
        : Error("line " + std::to_string(line_no) + ": " + reason), line_no_(line_no) {}

    std::size_t line_no() const { return line_no_; }

private:
    std::size_t line_no_;
};

// Invalid or unresolvable pipeline configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace kgqa
