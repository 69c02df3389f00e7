#include "wavefill/error.hpp"

namespace wavefill {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::EmptyDataset: return "empty dataset";
    case ErrorKind::EmptyObservation: return "empty observation set";
    case ErrorKind::Numerical: return "numerical error";
    case ErrorKind::Capacity: return "capacity error";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Io: return "io error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace wavefill
