#include "relu/dimension.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "relu/parallel.hpp"

namespace relu {

nlohmann::json to_json(const DimensionReport& report) {
  nlohmann::json j;
  j["jacobian_rank"] = report.jacobian_rank;
  j["ambient_dim"] = report.ambient_dim;
  j["param_dim"] = report.param_dim;
  if (report.expected) j["expected"] = *report.expected;
  if (report.lower_bound) j["lower_bound"] = *report.lower_bound;
  if (report.upper_bound) j["upper_bound"] = *report.upper_bound;
  if (report.agrees) j["agrees"] = *report.agrees;
  if (!report.row_group_ranks.empty()) j["row_group_ranks"] = report.row_group_ranks;
  return j;
}

namespace {

std::size_t weight_count(const Architecture& arch) {
  std::size_t total = 0;
  for (std::size_t l = 0; l < arch.depth(); ++l) total += arch.widths[l + 1] * arch.widths[l];
  return total;
}

std::size_t weight_row_offset(const Architecture& arch, std::size_t layer) {
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layer; ++l) offset += arch.widths[l + 1] * arch.widths[l];
  return offset;
}

Mat mask_columns(const Mat& m, const std::vector<std::uint8_t>& mask) {
  Mat out(m.rows(), m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (!mask[j]) continue;
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, j) = m(i, j);
  }
  return out;
}

Mat mask_rows(const Mat& m, const std::vector<std::uint8_t>& mask) {
  Mat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (!mask[i]) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(i, j);
  }
  return out;
}

}  // namespace

Mat jacobian(const Architecture& arch, const BlockPattern& patterns,
             const ParamAssignment& theta) {
  arch.validate();
  patterns.validate(arch);
  theta.validate(arch);
  if (arch.has_bias) {
    throw std::invalid_argument("dimension analysis covers bias-free networks");
  }

  const std::size_t L = arch.depth();
  const std::size_t n0 = arch.input_dim();
  const std::size_t n_out = arch.output_dim();
  const std::size_t rows = weight_count(arch);
  const std::size_t block_cols = n_out * n0;
  Mat jac(rows, patterns.size() * block_cols);

  for (std::size_t block = 0; block < patterns.size(); ++block) {
    const Pattern& pattern = patterns.blocks[block];
    // left[l]: map from layer-l pre-mask output to the network output;
    // right[l]: map from the input to the layer-(l-1) post-mask output.
    std::vector<Mat> left(L + 1), right(L + 1);
    left[L] = Mat::identity(n_out);
    for (std::size_t l = L - 1; l >= 1; --l) {
      left[l] = mask_columns(left[l + 1] * theta.weights[l], pattern.layers[l - 1]);
    }
    right[1] = Mat::identity(n0);
    for (std::size_t l = 2; l <= L; ++l) {
      right[l] = mask_rows(theta.weights[l - 2] * right[l - 1], pattern.layers[l - 2]);
    }

    for (std::size_t l = 1; l <= L; ++l) {
      const std::size_t rows_l = arch.widths[l];
      const std::size_t cols_l = arch.widths[l - 1];
      const std::size_t offset = weight_row_offset(arch, l - 1);
      for (std::size_t a = 0; a < rows_l; ++a) {
        for (std::size_t b = 0; b < cols_l; ++b) {
          const std::size_t row = offset + a * cols_l + b;
          for (std::size_t u = 0; u < n_out; ++u) {
            const Rat& lu = left[l](u, a);
            if (lu == 0) continue;
            for (std::size_t v = 0; v < n0; ++v) {
              const Rat& rv = right[l](b, v);
              if (rv == 0) continue;
              jac(row, block * block_cols + v * n_out + u) = lu * rv;
            }
          }
        }
      }
    }
  }
  return jac;
}

DimensionReport functional_dimension(const Architecture& arch,
                                     const BlockPattern& patterns,
                                     const SampleSpec& spec) {
  spec.validate();
  DimensionReport report;
  report.ambient_dim = patterns.size() * arch.output_dim() * arch.input_dim();
  report.param_dim = weight_count(arch);

  std::vector<std::size_t> ranks(spec.num_samples);
  parallel_for_index(spec.num_samples, [&](std::size_t i) {
    ranks[i] = rank_exact(jacobian(arch, patterns, sample_params(arch, spec, i)));
  });
  for (std::size_t r : ranks) report.jacobian_rank = std::max(report.jacobian_rank, r);

  if (patterns.size() == 1) {
    // One block: the closure is the rank-r matrix variety of the reduced
    // linear network.
    const long r = static_cast<long>(generic_masked_rank(arch, patterns.blocks[0]));
    const long n0 = static_cast<long>(arch.input_dim());
    const long n_out = static_cast<long>(arch.output_dim());
    report.expected = r * (n0 + n_out) - r * r;
  } else if (arch.depth() == 2) {
    if (patterns.size() == 2) {
      const TwoBlockDims dims =
          expected_dimension_two_block(arch, patterns.blocks[0], patterns.blocks[1]);
      const auto [lower, upper] = dimension_bounds(arch, patterns.blocks[0], patterns.blocks[1]);
      report.expected = dims.expected;
      report.lower_bound = lower;
      report.upper_bound = upper;
    } else {
      report.expected = expected_dimension_multi_block(arch, patterns);
    }
  }
  if (report.expected) {
    report.agrees = static_cast<long>(report.jacobian_rank) == *report.expected;
  }
  if (arch.depth() == 2) {
    report.row_group_ranks =
        shallow_row_group_ranks(arch, patterns, sample_params(arch, spec, 0));
  }
  return report;
}

TwoBlockDims expected_dimension_two_block(const Architecture& arch,
                                          const Pattern& a1, const Pattern& a2) {
  if (arch.depth() != 2) throw std::invalid_argument("two-block dimensions need a shallow network");
  a1.validate(arch);
  a2.validate(arch);
  const long n0 = static_cast<long>(arch.input_dim());
  const long n2 = static_cast<long>(arch.output_dim());
  const long r1 = static_cast<long>(a1.support(0));
  const long r2 = static_cast<long>(a2.support(0));
  const long s = static_cast<long>(pattern_and(a1, a2).support(0));

  auto model_dim = [&](long r) { return r * (n0 + n2) - r * r; };
  TwoBlockDims dims;
  dims.d_a = model_dim(r1 - s);
  dims.d_b = model_dim(r2 - s);
  dims.d_c = model_dim(s);
  dims.expected = std::min(dims.d_a + dims.d_b + dims.d_c, 2 * n0 * n2);
  return dims;
}

long expected_dimension_multi_block(const Architecture& arch,
                                    const BlockPattern& patterns) {
  if (arch.depth() != 2) throw std::invalid_argument("multi-block dimensions need a shallow network");
  patterns.validate(arch);
  const long n0 = static_cast<long>(arch.input_dim());
  const long n1 = static_cast<long>(arch.widths[1]);
  const long n2 = static_cast<long>(arch.output_dim());

  // Group hidden neurons by the set of blocks in which they are active; the
  // symmetry group is a product of general linear groups over these classes.
  std::map<std::vector<std::uint8_t>, long> classes;
  for (std::size_t j = 0; j < arch.widths[1]; ++j) {
    std::vector<std::uint8_t> signature(patterns.size());
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      signature[i] = patterns.blocks[i].layers[0][j];
    }
    ++classes[signature];
  }
  long symmetry = 0;
  for (const auto& [signature, count] : classes) symmetry += count * count;
  return n1 * (n0 + n2) - symmetry;
}

std::pair<long, long> dimension_bounds(const Architecture& arch, const Pattern& a1,
                                       const Pattern& a2) {
  const TwoBlockDims dims = expected_dimension_two_block(arch, a1, a2);
  const long n0 = static_cast<long>(arch.input_dim());
  const long n2 = static_cast<long>(arch.output_dim());
  const long r1 = static_cast<long>(a1.support(0));
  const long r2 = static_cast<long>(a2.support(0));
  auto model_dim = [&](long r) { return r * (n0 + n2) - r * r; };
  const long lower = std::max(model_dim(r1) + dims.d_b, model_dim(r2) + dims.d_a);
  const long upper = std::min(dims.d_a + dims.d_b + dims.d_c, 2 * n0 * n2);
  return {lower, upper};
}

std::vector<std::size_t> shallow_row_group_ranks(const Architecture& arch,
                                                 const BlockPattern& patterns,
                                                 const ParamAssignment& theta) {
  if (arch.depth() != 2) throw std::invalid_argument("row groups are defined for shallow networks");
  const Mat jac = jacobian(arch, patterns, theta);
  const std::size_t n0 = arch.input_dim();
  const std::size_t n1 = arch.widths[1];
  const std::size_t n2 = arch.output_dim();

  std::vector<std::size_t> ranks;
  ranks.reserve(n1);
  for (std::size_t neuron = 0; neuron < n1; ++neuron) {
    Mat group(n0 + n2, jac.cols());
    for (std::size_t b = 0; b < n0; ++b) {
      const std::size_t source = neuron * n0 + b;
      for (std::size_t c = 0; c < jac.cols(); ++c) group(b, c) = jac(source, c);
    }
    const std::size_t offset = n1 * n0;
    for (std::size_t a = 0; a < n2; ++a) {
      const std::size_t source = offset + a * n1 + neuron;
      for (std::size_t c = 0; c < jac.cols(); ++c) group(n0 + a, c) = jac(source, c);
    }
    ranks.push_back(rank_exact(group));
  }
  return ranks;
}

}  // namespace relu
