#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "relu/constraints.hpp"
#include "relu/model.hpp"

namespace relu {

inline constexpr std::uint64_t kDefaultMasterSeed = 42;

// Deterministic integer sampling plan: sample #i is a pure function of
// (master_seed, i), entries uniform in [-coeff_bound, coeff_bound].
struct SampleSpec {
  std::uint64_t master_seed = kDefaultMasterSeed;
  std::size_t num_samples = 64;
  long coeff_bound = 100;

  void validate() const;
  SampleSpec with_samples(std::size_t n) const {
    SampleSpec s = *this;
    s.num_samples = n;
    return s;
  }
};

struct Verdict {
  bool holds = true;
  std::size_t max_rank_observed = 0;
  std::size_t bound = 0;
  bool tight = false;  // max_rank_observed == bound
  std::size_t samples_used = 0;
  std::size_t violations = 0;
  std::optional<std::size_t> first_violation_seed;  // failing sample index

  friend bool operator==(const Verdict& a, const Verdict& b) = default;
};

nlohmann::json to_json(const Verdict& v);

ParamAssignment sample_params(const Architecture& arch, const SampleSpec& spec,
                              std::size_t index);

// Everything needed to evaluate a constraint's symbols at a parameter point.
// The dataset is required only when Y symbols occur.
struct EvalContext {
  const Architecture* arch = nullptr;
  const BlockPattern* patterns = nullptr;
  const std::vector<Mat>* dataset = nullptr;
};

// Substitutes the sampled block matrices into the grid and assembles the full
// block matrix. Throws on shape inconsistencies or missing dataset.
Mat eval_constraint_matrix(const RankConstraint& c, const EvalContext& ctx,
                           const ParamAssignment& theta);

// Hard refutation check: the bound must hold on every sample.
Verdict check_constraint(const RankConstraint& c, const EvalContext& ctx,
                         const SampleSpec& spec);

// Maximum exact rank over the sample stream.
std::size_t generic_rank(const RankConstraint& c, const EvalContext& ctx,
                         const SampleSpec& spec);
std::size_t generic_path_rank(const Architecture& arch, const PathSet& paths,
                              const SampleSpec& spec);
std::size_t generic_rank_of(const Architecture& arch,
                            const std::function<Mat(const ParamAssignment&)>& matrix_fn,
                            const SampleSpec& spec);

// Exact-zero checks of linear relations / polynomials against the sampled
// block outputs Y_i = M_i X_i + B_i.
Verdict check_vanishing(const std::vector<LinearRelation>& relations,
                        const EvalContext& ctx, const SampleSpec& spec);
Verdict check_vanishing(const Poly& poly, const EvalContext& ctx,
                        const SampleSpec& spec);

// Symbolic twin of eval_constraint_matrix: entries of the assembled expression
// as linear forms in the block-entry variables.
std::vector<std::vector<Poly>> symbolic_constraint_matrix(const RankConstraint& c);

// Expands one minor of the expression into a polynomial. Guarded to small
// minors (cofactor expansion; size <= 5).
Poly expand_minor(const RankConstraint& c, const MinorIndex& index);

}  // namespace relu
