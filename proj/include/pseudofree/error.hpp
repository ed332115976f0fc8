#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pseudofree {

enum class ErrorKind {
  OrderCapExceeded,
  InvalidPermutation,
  InvalidParameters,
  InternalContradiction,
  ResourceBound,
  InvalidCoefficients,
  InfiniteEntry,
  NotUnimodular,
  SearchBound,
  DegreeOutOfRange,
  NotPeriodic,
  SyntaxError,
  SemanticError,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OrderCapExceeded: return "OrderCapExceeded";
    case ErrorKind::InvalidPermutation: return "InvalidPermutation";
    case ErrorKind::InvalidParameters: return "InvalidParameters";
    case ErrorKind::InternalContradiction: return "InternalContradiction";
    case ErrorKind::ResourceBound: return "ResourceBound";
    case ErrorKind::InvalidCoefficients: return "InvalidCoefficients";
    case ErrorKind::InfiniteEntry: return "InfiniteEntry";
    case ErrorKind::NotUnimodular: return "NotUnimodular";
    case ErrorKind::SearchBound: return "SearchBound";
    case ErrorKind::DegreeOutOfRange: return "DegreeOutOfRange";
    case ErrorKind::NotPeriodic: return "NotPeriodic";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::SemanticError: return "SemanticError";
  }
  return "Unknown";
}

/// Every failure raised by the library. The kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failures carry the byte offset into the source text.
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, std::size_t offset, const std::string& what)
      : Error(kind, what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace pseudofree
