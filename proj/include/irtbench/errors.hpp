#pragma once

#include <stdexcept>
#include <string>

namespace irtbench {

// Error taxonomy shared by all modules. The CLI maps these onto exit codes:
// ValidationError -> 2, IoError -> 3, NumericalError -> 4.
enum class errc {
  ragged_rows,
  non_binary_cell,
  duplicate_id,
  empty_matrix,
  empty_labels,
  length_mismatch,
  too_small,
  empty_item_list,
  empty_profiles,
  missing_score,
  fewer_than_two_players,
  id_mismatch,
  volatility_non_convergence,
  bad_config,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  errc code() const { return code_; }

 private:
  errc code_;
};

// Contract violations in inputs (bad files, bad shapes, bad ids).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Filesystem problems: missing files, unwritable outputs.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical procedures that failed to converge where the contract demands it.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace irtbench
