#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rgraph {

enum class ErrorCode {
  CyclicOrArrowIntoPast,
  WrongEdgeKindForBlock,
  DuplicateEdge,
  DoubleEdgeNotAllowed,
  SelfLoop,
  UnknownNode,
  DuplicateLabel,
  InvalidOrder,
  TooManyNodes,
  NodeSetMismatch,
  SubclassMismatch,
  InvalidQuery,
  InvalidTransform,
  ConditioningPresent,
  EdgeAbsent,
  SingularConditioningBlock,
  SingularMarginalizedBlock,
  PreconditionDependenceTooWeak,
  SyntaxError,
};

constexpr std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::CyclicOrArrowIntoPast: return "CyclicOrArrowIntoPast";
    case ErrorCode::WrongEdgeKindForBlock: return "WrongEdgeKindForBlock";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::DoubleEdgeNotAllowed: return "DoubleEdgeNotAllowed";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::InvalidOrder: return "InvalidOrder";
    case ErrorCode::TooManyNodes: return "TooManyNodes";
    case ErrorCode::NodeSetMismatch: return "NodeSetMismatch";
    case ErrorCode::SubclassMismatch: return "SubclassMismatch";
    case ErrorCode::InvalidQuery: return "InvalidQuery";
    case ErrorCode::InvalidTransform: return "InvalidTransform";
    case ErrorCode::ConditioningPresent: return "ConditioningPresent";
    case ErrorCode::EdgeAbsent: return "EdgeAbsent";
    case ErrorCode::SingularConditioningBlock: return "SingularConditioningBlock";
    case ErrorCode::SingularMarginalizedBlock: return "SingularMarginalizedBlock";
    case ErrorCode::PreconditionDependenceTooWeak: return "PreconditionDependenceTooWeak";
    case ErrorCode::SyntaxError: return "SyntaxError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }
  std::string_view name() const { return error_name(code_); }

 private:
  ErrorCode code_;
};

/// Parse failures carry a 1-based line and column.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t col, const std::string& msg)
      : Error(ErrorCode::SyntaxError,
              "line " + std::to_string(line) + ", col " + std::to_string(col) + ": " + msg),
        line_(line),
        col_(col) {}
  std::size_t line() const { return line_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t line_;
  std::size_t col_;
};

}  // namespace rgraph
