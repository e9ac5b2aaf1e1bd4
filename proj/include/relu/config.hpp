#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relu/model.hpp"
#include "relu/verify.hpp"

namespace relu {

// Configuration problems carry the offending field path in the message and
// map to exit code 2 in the CLI.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LayoutSpec {
  std::vector<std::vector<long>> lambdas;
  std::vector<std::vector<std::size_t>> layout;
};

struct SearchConfig {
  long coeff_bound = 2;
  std::optional<std::size_t> max_support;  // defaults to the first hidden width
  std::vector<LayoutSpec> block_layouts;
  bool enumerate_layouts = true;
  std::size_t max_layouts = 8;
};

struct LimitsConfig {
  std::size_t max_minors = kDefaultMinorCap;
};

struct AnalysisConfig {
  Architecture architecture;
  BlockPattern blocks;
  std::optional<std::vector<Mat>> dataset;  // per-block column matrices
  std::optional<ParamAssignment> params;    // explicit weights (region scans)
  SampleSpec verify;                        // constraint verification stream
  std::size_t rank_samples = 8;             // generic-rank / dimension stream
  SearchConfig search;
  LimitsConfig limits;
  std::optional<SliceSpec> regions;
  nlohmann::json echo;  // parsed source, echoed into reports

  SampleSpec rank_spec() const { return verify.with_samples(rank_samples); }
  void validate() const;
};

AnalysisConfig config_from_json(const nlohmann::json& source);
AnalysisConfig config_from_file(const std::string& path);

}  // namespace relu
