#include "windcast/errors.hpp"

namespace windcast {

ErrorClass error_class(ErrorCode code) {
  switch (code) {
    case ErrorCode::bad_params:
    case ErrorCode::bad_config:
    case ErrorCode::bad_k:
    case ErrorCode::empty_grid:
    case ErrorCode::empty_budget:
    case ErrorCode::out_of_range_genome:
    case ErrorCode::mismatched_repetitions:
      return ErrorClass::config;
    case ErrorCode::file_not_found:
    case ErrorCode::missing_column:
    case ErrorCode::malformed_row:
    case ErrorCode::non_uniform_timestep:
    case ErrorCode::constant_series:
    case ErrorCode::series_too_short:
    case ErrorCode::too_few_samples:
    case ErrorCode::empty_set:
    case ErrorCode::empty_input:
    case ErrorCode::length_mismatch:
    case ErrorCode::near_zero_observation:
    case ErrorCode::constant_sequence:
    case ErrorCode::degenerate_table:
    case ErrorCode::incompatible_checkpoint:
    case ErrorCode::io_error:
      return ErrorClass::data;
    case ErrorCode::shape_mismatch:
    case ErrorCode::dimension_mismatch:
    case ErrorCode::non_finite_loss:
    case ErrorCode::non_finite_fitness:
      return ErrorClass::runtime;
  }
  return ErrorClass::runtime;
}

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::bad_params: return "BadParams";
    case ErrorCode::bad_config: return "BadConfig";
    case ErrorCode::bad_k: return "BadK";
    case ErrorCode::empty_grid: return "EmptyGrid";
    case ErrorCode::empty_budget: return "EmptyBudget";
    case ErrorCode::out_of_range_genome: return "OutOfRangeGenome";
    case ErrorCode::mismatched_repetitions: return "MismatchedRepetitions";
    case ErrorCode::file_not_found: return "FileNotFound";
    case ErrorCode::missing_column: return "MissingColumn";
    case ErrorCode::malformed_row: return "MalformedRow";
    case ErrorCode::non_uniform_timestep: return "NonUniformTimestep";
    case ErrorCode::constant_series: return "ConstantSeries";
    case ErrorCode::series_too_short: return "SeriesTooShort";
    case ErrorCode::too_few_samples: return "TooFewSamples";
    case ErrorCode::empty_set: return "EmptySet";
    case ErrorCode::empty_input: return "EmptyInput";
    case ErrorCode::length_mismatch: return "LengthMismatch";
    case ErrorCode::near_zero_observation: return "NearZeroObservation";
    case ErrorCode::constant_sequence: return "ConstantSequence";
    case ErrorCode::degenerate_table: return "DegenerateTable";
    case ErrorCode::incompatible_checkpoint: return "IncompatibleCheckpoint";
    case ErrorCode::io_error: return "IoError";
    case ErrorCode::shape_mismatch: return "ShapeMismatch";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::non_finite_loss: return "NonFiniteLoss";
    case ErrorCode::non_finite_fitness: return "NonFiniteFitness";
  }
  return "Error";
}

}  // namespace windcast
