#pragma once

#include <optional>
#include <vector>

#include "relu/model.hpp"
#include "relu/verify.hpp"

namespace relu {

struct DimensionReport {
  std::size_t jacobian_rank = 0;
  std::size_t ambient_dim = 0;  // k * n_L * n_0
  std::size_t param_dim = 0;    // total weight count
  std::optional<long> expected;
  std::optional<long> lower_bound;
  std::optional<long> upper_bound;
  std::optional<bool> agrees;  // jacobian_rank == expected
  // Shallow networks: rank of each hidden neuron's row group.
  std::vector<std::size_t> row_group_ranks;
};

nlohmann::json to_json(const DimensionReport& report);

// Jacobian of theta -> [M_1(theta) | ... | M_k(theta)], rows indexed by weight
// entries (layer-major, then row-major within a layer), columns by block then
// column-major matrix entries. Entries are assembled from cached partial
// products on each side of the differentiated weight. Bias-free networks only.
Mat jacobian(const Architecture& arch, const BlockPattern& patterns,
             const ParamAssignment& theta);

// Maximum Jacobian rank over the sample stream, with the shallow closed-form
// expectations filled in when they apply.
DimensionReport functional_dimension(const Architecture& arch,
                                     const BlockPattern& patterns,
                                     const SampleSpec& spec);

struct TwoBlockDims {
  long d_a = 0, d_b = 0, d_c = 0;
  long expected = 0;  // min(d_a + d_b + d_c, ambient)
};

TwoBlockDims expected_dimension_two_block(const Architecture& arch,
                                          const Pattern& a1, const Pattern& a2);

// n_1 (n_0 + n_2) minus the squared sizes of the activation-signature classes.
long expected_dimension_multi_block(const Architecture& arch,
                                    const BlockPattern& patterns);

// {lower, upper} sandwich for the two-block shallow dimension.
std::pair<long, long> dimension_bounds(const Architecture& arch, const Pattern& a1,
                                       const Pattern& a2);

// Rank of the per-neuron row group of the Jacobian (shallow networks).
std::vector<std::size_t> shallow_row_group_ranks(const Architecture& arch,
                                                 const BlockPattern& patterns,
                                                 const ParamAssignment& theta);

}  // namespace relu
