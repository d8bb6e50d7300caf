#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clinscreen {

// Base for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- corpus ----

class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t line_no, const std::string& detail)
      : Error("malformed record at line " + std::to_string(line_no) + ": " + detail),
        line_no(line_no) {}
  std::size_t line_no;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(const std::string& id)
      : Error("duplicate record id: " + id), id(id) {}
  std::string id;
};

class HoldoutTooLarge : public Error {
 public:
  HoldoutTooLarge(std::size_t requested, std::size_t available)
      : Error("holdout of " + std::to_string(requested) + " records requested but corpus has only " +
              std::to_string(available)) {}
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

// ---- textprep ----

class InvalidPattern : public Error {
 public:
  InvalidPattern(std::size_t rule_index, const std::string& detail)
      : Error("invalid scrub pattern at rule " + std::to_string(rule_index) + ": " + detail),
        rule_index(rule_index) {}
  std::size_t rule_index;
};

// ---- features ----

class EmptyCorpus : public Error {
 public:
  EmptyCorpus() : Error("cannot fit a vocabulary on an empty document set") {}
};

class DimMismatch : public Error {
 public:
  using Error::Error;
  DimMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) + ", got " +
              std::to_string(got)) {}
};

// ---- learners ----

class EmptyDataset : public Error {
 public:
  EmptyDataset() : Error("dataset has no rows") {}
};

class SingleClassData : public Error {
 public:
  using Error::Error;
  SingleClassData() : Error("training data contains a single class") {}
};

class WrongKind : public Error {
 public:
  using Error::Error;
};

// ---- multilabel / eval ----

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class BadOrder : public Error {
 public:
  using Error::Error;
};

// ---- summarize ----

class EmptyDocument : public Error {
 public:
  EmptyDocument() : Error("document has no sentences") {}
};

// ---- llm ----

class MissingSlot : public Error {
 public:
  explicit MissingSlot(const std::string& name)
      : Error("prompt template slot {" + name + "} has no binding"), name(name) {}
  std::string name;
};

class BadTemplate : public Error {
 public:
  using Error::Error;
};

class BackendTimeout : public Error {
 public:
  using Error::Error;
  BackendTimeout() : Error("completion backend timed out or is unreachable") {}
};

class BackendError : public Error {
 public:
  BackendError(int status, const std::string& detail)
      : Error("completion backend error (status " + std::to_string(status) + "): " + detail),
        status(status) {}
  explicit BackendError(const std::string& detail) : Error("completion backend error: " + detail), status(0) {}
  int status;
};

// ---- cli / pipeline ----

class GuardRejection : public Error {
 public:
  explicit GuardRejection(const std::string& message) : Error(message) {}
};

class ArtifactError : public Error {
 public:
  using Error::Error;
};

}  // namespace clinscreen
