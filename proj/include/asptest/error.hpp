#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace asptest {

/// Base class of every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ParseErrorKind { lexical, syntactic, annotation, safety, duplicate_name, dangling_reference };

inline const char* to_string(ParseErrorKind k) {
    switch (k) {
        case ParseErrorKind::lexical:            return "lexical";
        case ParseErrorKind::syntactic:          return "syntactic";
        case ParseErrorKind::annotation:         return "annotation";
        case ParseErrorKind::safety:             return "safety";
        case ParseErrorKind::duplicate_name:     return "duplicate-name";
        case ParseErrorKind::dangling_reference: return "dangling-reference";
    }
    return "unknown";
}

struct ParseError {
    std::string    message;
    int            line   = 1;
    int            column = 1;
    ParseErrorKind kind   = ParseErrorKind::syntactic;
};

/// Thrown by the parser once a unit has been scanned completely; carries every error found.
class ParseFailure : public Error {
public:
    ParseFailure(std::string path, std::vector<ParseError> errors)
        : Error(describe(path, errors)), path_(std::move(path)), errors_(std::move(errors)) {}

    [[nodiscard]] const std::string&             path() const { return path_; }
    [[nodiscard]] const std::vector<ParseError>& errors() const { return errors_; }

private:
    static std::string describe(const std::string& path, const std::vector<ParseError>& errors) {
        std::string out;
        for (const auto& e : errors) {
            if (!out.empty()) out += '\n';
            out += (path.empty() ? std::string("<input>") : path) + ':' + std::to_string(e.line) + ':' +
                   std::to_string(e.column) + ": " + to_string(e.kind) + ": " + e.message;
        }
        return out;
    }
    std::string             path_;
    std::vector<ParseError> errors_;
};

class DanglingReference : public Error {
public:
    explicit DanglingReference(const std::string& name)
        : Error("unknown rule or block '" + name + "' in test scope"), name_(name) {}
    [[nodiscard]] const std::string& name() const { return name_; }

private:
    std::string name_;
};

class IoFailure : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

/// The ground program is too large for exhaustive enumeration.
class CapacityExceeded : public Error {
public:
    CapacityExceeded(std::size_t atoms, std::size_t rules, std::size_t max_atoms, std::size_t max_rules)
        : Error("ground program exceeds oracle capacity: " + std::to_string(atoms) + " open atoms (max " +
                std::to_string(max_atoms) + "), " + std::to_string(rules) + " ground rules (max " +
                std::to_string(max_rules) + ")"),
          atoms(atoms), rules(rules) {}
    std::size_t atoms;
    std::size_t rules;
};

class UnsupportedAggregate : public Error {
public:
    using Error::Error;
};

class SpawnFailure : public Error {
public:
    using Error::Error;
};

class BackendError : public Error {
public:
    using Error::Error;
};

class FormatError : public Error {
public:
    FormatError(const std::string& msg, int line) : Error("line " + std::to_string(line) + ": " + msg), line(line) {}
    int line;
};

} // namespace asptest
