#include "relu/transform.hpp"

#include <numeric>
#include <stdexcept>

namespace relu {

const char* block_status_name(BlockStatus status) {
  switch (status) {
    case BlockStatus::Invertible:
      return "invertible";
    case BlockStatus::Oversized:
      return "oversized";
    case BlockStatus::Deficient:
      return "deficient";
  }
  return "unknown";
}

DatasetBlocks classify_blocks(std::vector<Mat> blocks) {
  DatasetBlocks out;
  out.blocks = std::move(blocks);
  for (const Mat& x : out.blocks) {
    const std::size_t n0 = x.rows();
    const std::size_t m = x.cols();
    if (m < n0 || rank_exact(x) < n0) {
      out.status.push_back(BlockStatus::Deficient);
      out.core_columns.emplace_back();
      continue;
    }
    if (m == n0) {
      out.status.push_back(BlockStatus::Invertible);
      std::vector<std::size_t> all(m);
      std::iota(all.begin(), all.end(), 0);
      out.core_columns.push_back(std::move(all));
      continue;
    }
    // Greedy earliest full-rank column subset.
    out.status.push_back(BlockStatus::Oversized);
    std::vector<std::size_t> core;
    Mat partial(n0, 0);
    for (std::size_t j = 0; j < m && core.size() < n0; ++j) {
      Mat candidate = hconcat(partial, x.columns({j}));
      if (rank_exact(candidate) == candidate.cols()) {
        partial = std::move(candidate);
        core.push_back(j);
      }
    }
    out.core_columns.push_back(std::move(core));
  }
  return out;
}

namespace {

Mat core_selector(std::size_t m, const std::vector<std::size_t>& columns) {
  Mat s(m, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) s(columns[j], j) = 1;
  return s;
}

}  // namespace

RankConstraint psi_inverse(const RankConstraint& c, const DatasetBlocks& data) {
  c.validate();
  RankConstraint out = c;
  out.label = c.label + "-psi";
  for (auto& row : out.grid) {
    for (Cell& cell : row) {
      for (CellTerm& term : cell.terms) {
        if (term.symbol != BlockSymbol::M) {
          throw std::invalid_argument("transform expects block-matrix constraints");
        }
        if (term.block >= data.size()) {
          throw std::invalid_argument("constraint references a missing data block");
        }
        if (data.status[term.block] == BlockStatus::Deficient) {
          throw std::invalid_argument(
              "data block " + std::to_string(term.block + 1) +
              " is deficient: its columns are linearly dependent, so block-matrix "
              "constraints do not transfer to the outputs");
        }
        const Mat& x = data.blocks[term.block];
        const Mat core_inverse = invert(x.columns(data.core_columns[term.block]));
        // M = Y S X_core^{-1}; the selector S keeps the core columns of Y.
        Mat substitution = core_selector(x.cols(), data.core_columns[term.block]) * core_inverse;
        term.symbol = BlockSymbol::Y;
        if (term.transpose) {
          // coeff_left * (Y S Xc^{-1})^T = (coeff_left * Xc^{-T} S^T) * Y^T
          Mat left = transpose(substitution);
          if (term.coeff_left) left = *term.coeff_left * left;
          term.coeff_left = std::move(left);
        } else {
          Mat right = substitution;
          if (term.coeff_right) right = right * *term.coeff_right;
          term.coeff_right = std::move(right);
        }
      }
    }
  }
  out.validate();
  return out;
}

std::vector<LinearRelation> dependency_rows(const Mat& data, std::size_t block_index,
                                            std::size_t output_dim, bool bias) {
  const Mat source = bias ? vconcat(Mat::ones(1, data.cols()), data) : data;
  std::vector<LinearRelation> relations;
  for (const auto& kernel_vec : kernel_basis(source)) {
    for (std::size_t row = 0; row < output_dim; ++row) {
      LinearRelation rel;
      rel.block = block_index;
      rel.row = row;
      rel.coeffs = kernel_vec;
      rel.validate();
      relations.push_back(std::move(rel));
    }
  }
  return relations;
}

}  // namespace relu
