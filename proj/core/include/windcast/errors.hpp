#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace windcast {

// Broad failure classes. The CLI maps each class to its own exit status
// (config -> 2, data -> 3, runtime -> 4) so scripts can react without
// parsing messages.
enum class ErrorClass { config, data, runtime };

enum class ErrorCode {
  // configuration and argument problems
  bad_params,
  bad_config,
  bad_k,
  empty_grid,
  empty_budget,
  out_of_range_genome,
  mismatched_repetitions,
  // data problems
  file_not_found,
  missing_column,
  malformed_row,
  non_uniform_timestep,
  constant_series,
  series_too_short,
  too_few_samples,
  empty_set,
  empty_input,
  length_mismatch,
  near_zero_observation,
  constant_sequence,
  degenerate_table,
  incompatible_checkpoint,
  io_error,
  // numeric problems at run time
  shape_mismatch,
  dimension_mismatch,
  non_finite_loss,
  non_finite_fitness,
};

ErrorClass error_class(ErrorCode code);
std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }
  ErrorClass category() const { return error_class(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace windcast
