#include "relu/pipeline.hpp"

#include <algorithm>

#include "relu/dimension.hpp"
#include "relu/invariants.hpp"
#include "relu/transform.hpp"
#include "relu/verify.hpp"

namespace relu {

const char* run_mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::Invariants:
      return "invariants";
    case RunMode::Verify:
      return "verify";
    case RunMode::Dimension:
      return "dimension";
    case RunMode::Transform:
      return "transform";
    case RunMode::Report:
      return "report";
  }
  return "unknown";
}

namespace {

constexpr const char* kToolName = "relu-invariants";
constexpr const char* kToolVersion = "0.1.0";

struct PipelineState {
  const AnalysisConfig& config;
  RunMode mode;
  EvalContext ctx;
  nlohmann::json report;
  std::vector<std::string> warnings;
  bool all_hold = true;

  PipelineState(const AnalysisConfig& config_in, RunMode mode_in)
      : config(config_in), mode(mode_in) {}

  bool wants(RunMode section) const {
    if (mode == RunMode::Report) return true;
    if (section == RunMode::Invariants) {
      // Verification and the transform both start from the constraint set.
      return mode == RunMode::Invariants || mode == RunMode::Verify ||
             mode == RunMode::Transform;
    }
    return mode == section;
  }
  bool verifying() const { return mode != RunMode::Invariants && mode != RunMode::Dimension; }
};

nlohmann::json lambda_to_json(const std::vector<long>& lambda) {
  nlohmann::json j = nlohmann::json::array();
  for (long x : lambda) j.push_back(x);
  return j;
}

void record_verdict(PipelineState& state, nlohmann::json& entry, const Verdict& verdict) {
  entry["verdict"] = to_json(verdict);
  if (!verdict.holds) state.all_hold = false;
}

nlohmann::json constraint_entry(PipelineState& state, const ConstraintInfo& info) {
  nlohmann::json entry = to_json(info);
  if (state.verifying()) {
    record_verdict(state, entry, check_constraint(info.constraint, state.ctx, state.config.verify));
  }
  return entry;
}

nlohmann::json relations_entry(PipelineState& state,
                               const std::vector<LinearRelation>& relations) {
  nlohmann::json list = nlohmann::json::array();
  for (const LinearRelation& rel : relations) list.push_back(to_json(rel));
  nlohmann::json entry;
  entry["count"] = relations.size();
  entry["relations"] = std::move(list);
  if (state.verifying() && !relations.empty()) {
    record_verdict(state, entry, check_vanishing(relations, state.ctx, state.config.verify));
  }
  return entry;
}

void run_single_block(PipelineState& state, nlohmann::json& analysis) {
  const AnalysisConfig& config = state.config;
  analysis["kind"] = "single-block";
  const Pattern& pattern = config.blocks.blocks.front();

  nlohmann::json single;
  single["rank"] = generic_masked_rank(config.architecture, pattern);
  nlohmann::json widths = nlohmann::json::array();
  for (std::size_t w : effective_widths(config.architecture, pattern)) widths.push_back(w);
  single["effective_widths"] = std::move(widths);

  nlohmann::json constraints = nlohmann::json::array();
  if (config.dataset) {
    const Mat& data = config.dataset->front();
    SingleBlockResult result = single_block_constraints(
        config.architecture, pattern, data, config.architecture.has_bias);
    single["general_position"] = result.general_position;
    single["general_position_checked"] = result.general_position_checked;
    if (!result.general_position) {
      state.warnings.push_back(
          "data block 1 is not in general position; relations stay exact but the "
          "minor family may be incomplete");
    }
    if (!result.general_position_checked) {
      state.warnings.push_back(
          "general-position subset sweep skipped (too many column subsets); only the "
          "full rank was checked");
    }
    const std::size_t n0 = config.architecture.input_dim();
    const std::size_t slack = config.architecture.has_bias ? n0 + 1 : n0;
    if (data.cols() > slack) {
      state.warnings.push_back(
          "linear relation count uses max(m - n0" +
          std::string(config.architecture.has_bias ? " - 1" : "") +
          ", 0) per output row");
    }
    single["dimension_formula"] = single_block_dimension(
        config.architecture, pattern, data.cols(), config.architecture.has_bias);
    analysis["linear_relations"] = relations_entry(state, result.linear);
    if (result.minors) constraints.push_back(constraint_entry(state, *result.minors));
  } else {
    ConstraintInfo info;
    info.constraint = single_cell_constraint(
        Cell::of_terms(config.architecture.output_dim(), config.architecture.input_dim(),
                       {CellTerm{}}),
        std::min({generic_masked_rank(config.architecture, pattern),
                  config.architecture.output_dim(), config.architecture.input_dim()}),
        "single-block-rank");
    if (!info.constraint.vacuous()) constraints.push_back(constraint_entry(state, info));
  }
  analysis["constraints"] = std::move(constraints);
  analysis["single_block"] = std::move(single);
}

void run_two_block(PipelineState& state, nlohmann::json& analysis,
                   std::vector<ConstraintInfo>& emitted) {
  const AnalysisConfig& config = state.config;
  const bool shallow = config.architecture.depth() == 2;
  analysis["kind"] = shallow ? "two-block-shallow" : "two-block-deep";

  TwoBlockResult result =
      shallow ? two_block_shallow(config.architecture, config.blocks.blocks[0],
                                  config.blocks.blocks[1])
              : two_block_deep(config.architecture, config.blocks.blocks[0],
                               config.blocks.blocks[1], config.rank_spec());
  analysis["stats"] = to_json(result.stats);

  nlohmann::json constraints = nlohmann::json::array();
  for (ConstraintInfo& info : result.constraints) {
    constraints.push_back(constraint_entry(state, info));
    if (info.emitted()) emitted.push_back(std::move(info));
  }
  analysis["constraints"] = std::move(constraints);
}

void run_multi_block(PipelineState& state, nlohmann::json& analysis,
                     std::vector<ConstraintInfo>& emitted) {
  const AnalysisConfig& config = state.config;
  const bool shallow = config.architecture.depth() == 2;
  analysis["kind"] = shallow ? "multi-block-shallow" : "multi-block-deep";

  const std::size_t max_support =
      config.search.max_support.value_or(config.architecture.widths[1]);
  const auto lambdas = search_sparse_lambdas(config.architecture, config.blocks,
                                             config.search.coeff_bound, max_support);
  nlohmann::json search;
  search["coeff_bound"] = config.search.coeff_bound;
  search["max_support"] = max_support;
  nlohmann::json lambda_list = nlohmann::json::array();
  for (const auto& lambda : lambdas) lambda_list.push_back(lambda_to_json(lambda));
  search["lambdas"] = std::move(lambda_list);
  analysis["lambda_search"] = std::move(search);

  nlohmann::json constraints = nlohmann::json::array();
  for (const auto& lambda : lambdas) {
    ConstraintInfo info = shallow
                              ? lin_comb_constraint(config.architecture, config.blocks, lambda)
                              : deep_lin_comb_constraint(config.architecture, config.blocks, lambda);
    constraints.push_back(constraint_entry(state, info));
    if (info.emitted()) emitted.push_back(std::move(info));
  }

  if (shallow) {
    std::vector<LayoutSpec> layouts = config.search.block_layouts;
    if (layouts.empty() && config.search.enumerate_layouts) {
      for (const auto& layout : default_block_layouts(lambdas, config.search.max_layouts)) {
        layouts.push_back(LayoutSpec{lambdas, layout});
      }
    }
    for (const LayoutSpec& spec : layouts) {
      ConstraintInfo info =
          block_matrix_constraint(config.architecture, config.blocks, spec.lambdas, spec.layout);
      constraints.push_back(constraint_entry(state, info));
      if (info.emitted()) emitted.push_back(std::move(info));
    }
  }
  analysis["constraints"] = std::move(constraints);
}

void run_dimension(PipelineState& state) {
  const AnalysisConfig& config = state.config;
  if (config.architecture.has_bias) {
    state.warnings.push_back("dimension analysis skipped: it covers bias-free networks");
    return;
  }
  DimensionReport report =
      functional_dimension(config.architecture, config.blocks, config.rank_spec());
  nlohmann::json j = to_json(report);
  if (config.architecture.depth() == 2 && config.blocks.size() == 2) {
    const TwoBlockDims dims = expected_dimension_two_block(
        config.architecture, config.blocks.blocks[0], config.blocks.blocks[1]);
    j["d_a"] = dims.d_a;
    j["d_b"] = dims.d_b;
    j["d_c"] = dims.d_c;
    state.warnings.push_back(
        "dimension lower bound computed as max(r1-model + d_b, r2-model + d_a)");
  }
  state.report["dimension"] = std::move(j);
}

void run_transform(PipelineState& state, const std::vector<ConstraintInfo>& emitted) {
  const AnalysisConfig& config = state.config;
  if (!config.dataset) {
    if (state.mode == RunMode::Transform) {
      throw ConfigError("config error at dataset: the transform needs data blocks");
    }
    return;
  }
  if (config.architecture.has_bias && config.blocks.size() > 1) {
    state.warnings.push_back("transform skipped: it covers bias-free networks");
    return;
  }

  DatasetBlocks data = classify_blocks(*config.dataset);
  nlohmann::json transform;
  nlohmann::json block_list = nlohmann::json::array();
  for (std::size_t i = 0; i < data.size(); ++i) {
    nlohmann::json entry;
    entry["status"] = block_status_name(data.status[i]);
    entry["columns"] = data.blocks[i].cols();
    entry["core_columns"] = data.core_columns[i];
    block_list.push_back(std::move(entry));
  }
  transform["blocks"] = std::move(block_list);

  // Column dependencies of the oversized / deficient blocks.
  nlohmann::json dependencies = nlohmann::json::array();
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto relations = dependency_rows(data.blocks[i], i, config.architecture.output_dim(),
                                     config.architecture.has_bias);
    if (relations.empty()) continue;
    nlohmann::json entry = relations_entry(state, relations);
    entry["block"] = i;
    dependencies.push_back(std::move(entry));
  }
  transform["dependency_relations"] = std::move(dependencies);

  const bool transformable =
      std::all_of(data.status.begin(), data.status.end(),
                  [](BlockStatus s) { return s != BlockStatus::Deficient; });
  nlohmann::json transformed = nlohmann::json::array();
  if (transformable && config.blocks.size() > 1) {
    for (const ConstraintInfo& info : emitted) {
      RankConstraint output_constraint = psi_inverse(info.constraint, data);
      nlohmann::json entry = to_json(output_constraint);
      if (state.verifying()) {
        record_verdict(state, entry,
                       check_constraint(output_constraint, state.ctx, config.verify));
      }
      // Expanded minor certificates for small families.
      const Int count = output_constraint.minor_count();
      if (output_constraint.minor_size() <= 3 && count <= 24) {
        nlohmann::json certificates = nlohmann::json::array();
        const auto minors = enumerate_minors(output_constraint.total_rows(),
                                             output_constraint.total_cols(),
                                             output_constraint.minor_size(),
                                             config.limits.max_minors);
        for (const MinorIndex& index : minors.minors) {
          Poly poly = expand_minor(output_constraint, index);
          nlohmann::json certificate;
          certificate["rows"] = index.row_subset;
          certificate["cols"] = index.col_subset;
          certificate["polynomial"] = to_json(poly);
          if (state.verifying() && !poly.is_zero()) {
            record_verdict(state, certificate,
                           check_vanishing(poly, state.ctx, config.verify));
          }
          certificates.push_back(std::move(certificate));
        }
        entry["certificates"] = std::move(certificates);
      }
      transformed.push_back(std::move(entry));
    }
  } else if (!transformable) {
    state.warnings.push_back(
        "transform restricted to dependency relations: some data block is deficient");
  }
  transform["constraints"] = std::move(transformed);
  state.report["transform"] = std::move(transform);
}

}  // namespace

AnalysisOutcome run_analysis(const AnalysisConfig& config, RunMode mode) {
  config.validate();
  PipelineState state(config, mode);
  state.ctx.arch = &config.architecture;
  state.ctx.patterns = &config.blocks;
  if (config.dataset) state.ctx.dataset = &*config.dataset;

  state.report["schema"] = "report-v1";
  state.report["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  state.report["mode"] = run_mode_name(mode);
  state.report["config"] = config.echo;

  std::vector<ConstraintInfo> emitted;
  if (state.wants(RunMode::Invariants)) {
    nlohmann::json analysis;
    if (config.blocks.size() == 1) {
      run_single_block(state, analysis);
    } else if (config.blocks.size() == 2) {
      run_two_block(state, analysis, emitted);
    } else {
      run_multi_block(state, analysis, emitted);
    }
    state.report["analysis"] = std::move(analysis);
  }
  if (state.wants(RunMode::Dimension)) run_dimension(state);
  if (state.wants(RunMode::Transform)) run_transform(state, emitted);

  state.report["verification"] = {{"master_seed", config.verify.master_seed},
                                  {"num_samples", config.verify.num_samples},
                                  {"coeff_bound", config.verify.coeff_bound},
                                  {"rank_samples", config.rank_samples},
                                  {"all_hold", state.all_hold}};
  std::sort(state.warnings.begin(), state.warnings.end());
  state.report["warnings"] = state.warnings;

  AnalysisOutcome outcome;
  outcome.report = std::move(state.report);
  outcome.all_hold = state.all_hold;
  return outcome;
}

}  // namespace relu
