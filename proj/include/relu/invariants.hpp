#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relu/constraints.hpp"
#include "relu/model.hpp"
#include "relu/verify.hpp"

namespace relu {

struct SingleBlockResult {
  std::vector<LinearRelation> linear;
  std::optional<ConstraintInfo> minors;
  std::size_t rank_bound = 0;  // generic rank r of the block
  bool general_position = true;
  bool general_position_checked = true;  // false when the subset sweep was too large
};

// Linear dependencies of the data columns (one relation per kernel vector per
// output row) plus the minor family on the independent column core. With
// biases the core is ones-augmented and the minor size grows by one.
SingleBlockResult single_block_constraints(const Architecture& arch,
                                           const Pattern& pattern, const Mat& data,
                                           bool bias);

// Closed-form dimension of the single-block output variety.
long single_block_dimension(const Architecture& arch, const Pattern& pattern,
                            std::size_t num_columns, bool bias);

struct TwoBlockResult {
  TwoBlockStats stats;
  // All candidate families with flags; inventory filters on emitted().
  std::vector<ConstraintInfo> constraints;
};

// Generic-rank statistics of a two-block pattern, any depth. The exclusive
// path-network ranks and the shared rank are estimated by exact sampling.
TwoBlockStats two_block_stats(const Architecture& arch, const Pattern& a1,
                              const Pattern& a2, const SampleSpec& rank_spec);

TwoBlockResult two_block_shallow(const Architecture& arch, const Pattern& a1,
                                 const Pattern& a2);
TwoBlockResult two_block_deep(const Architecture& arch, const Pattern& a1,
                              const Pattern& a2, const SampleSpec& rank_spec);

// Minors of sum_i lambda_i M_i, bound by the support of sum_i lambda_i A_i
// (single hidden layer).
ConstraintInfo lin_comb_constraint(const Architecture& arch,
                                   const BlockPattern& patterns,
                                   const std::vector<long>& lambda);

// Same bound through path-indicator supports, any depth.
ConstraintInfo deep_lin_comb_constraint(const Architecture& arch,
                                        const BlockPattern& patterns,
                                        const std::vector<long>& lambda);

// Enumerates coefficient vectors in [-coeff_bound, coeff_bound]^k up to
// scaling and keeps the support-minimal ones. Deterministic order: support
// size, then lexicographic.
std::vector<std::vector<long>> search_sparse_lambdas(const Architecture& arch,
                                                     const BlockPattern& patterns,
                                                     long coeff_bound,
                                                     std::size_t max_support);

// Block matrix T over linear combinations T_j = sum_i lambda^(j)_i M_i.
// layout[r][c] indexes lambdas; entries at distinct rows and columns must
// differ. Bound: |common support| plus the per-combination exclusive supports.
ConstraintInfo block_matrix_constraint(const Architecture& arch,
                                       const BlockPattern& patterns,
                                       const std::vector<std::vector<long>>& lambdas,
                                       const std::vector<std::vector<std::size_t>>& layout);

// Canonical 2x2 layouts over the unit-vector combinations, deduplicated under
// row/column swaps and transposition.
std::vector<std::vector<std::vector<std::size_t>>> default_block_layouts(
    const std::vector<std::vector<long>>& lambdas, std::size_t max_layouts);

}  // namespace relu
