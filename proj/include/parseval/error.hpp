#pragma once

#include <stdexcept>
#include <string>

namespace parseval {

/// Shape or arity mismatch between operands.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A parameter is outside its admissible set (non-orthogonal matrix, bad step size, ...).
class ValueError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The PnP iteration left its stability region.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FormatErrc {
  io = 1,
  bad_magic,
  version_mismatch,
  kind_mismatch,
  truncated,
  length_mismatch,
  crc_mismatch,
  parse,
};

/// Container or text-format decoding failure, tagged with a distinct code.
class FormatError : public std::runtime_error {
 public:
  FormatError(FormatErrc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  FormatErrc code() const noexcept { return code_; }

 private:
  FormatErrc code_;
};

}  // namespace parseval
