#pragma once

#include <stdexcept>
#include <string>

namespace wavefill {

enum class ErrorKind {
  Parse,             // malformed input row or file
  Parameter,         // argument outside its documented domain
  EmptyDataset,      // ingestion produced no usable rows
  EmptyObservation,  // solver input has no observed cell
  Numerical,         // non-finite values or decomposition failure
  Capacity,          // not enough eligible cells for a request
  Config,            // run configuration failed validation
  Io,                // filesystem failure
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace wavefill
