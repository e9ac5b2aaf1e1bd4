#pragma once

#include "relu/config.hpp"

namespace relu {

enum class RunMode { Invariants, Verify, Dimension, Transform, Report };

const char* run_mode_name(RunMode mode);

struct AnalysisOutcome {
  nlohmann::json report;  // deterministic given (config, seed)
  bool all_hold = true;   // false when any verification verdict fails
};

// Runs the pipeline sections selected by the mode: constraint construction,
// randomized-exact verification, Jacobian dimension analysis and the dataset
// transform. Report mode runs everything that applies.
AnalysisOutcome run_analysis(const AnalysisConfig& config, RunMode mode);

}  // namespace relu
