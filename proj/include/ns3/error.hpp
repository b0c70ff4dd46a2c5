#pragma once

#include <stdexcept>
#include <string>

namespace ns3 {

/// Broad failure classes. The CLI maps each onto a distinct exit code.
enum class ErrorKind {
    config,    // invalid option, flag, or config file
    data,      // malformed or inconsistent input files
    resource,  // a size guard tripped (brute force, enumeration, sampling caps)
    logic,     // violated precondition of a library call
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config: return "config";
        case ErrorKind::data: return "data";
        case ErrorKind::resource: return "resource";
        case ErrorKind::logic: return "logic";
    }
    return "unknown";
}

class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

   private:
    ErrorKind kind_;
};

/// Thrown by the query parser; carries a 1-based source position.
class ParseError : public Error {
   public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error(ErrorKind::data, std::to_string(line) + ":" + std::to_string(column) + ": " + what),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

   private:
    std::size_t line_;
    std::size_t column_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, const std::string& what) {
    if (!condition) throw Error(ErrorKind::logic, what);
}

}  // namespace ns3
