#pragma once

#include <string>
#include <vector>

#include "relu/constraints.hpp"
#include "relu/model.hpp"

namespace relu {

enum class BlockStatus { Invertible, Oversized, Deficient };

const char* block_status_name(BlockStatus status);

struct DatasetBlocks {
  std::vector<Mat> blocks;
  std::vector<BlockStatus> status;
  // Earliest full-rank column subset, in column order; all columns for
  // invertible blocks.
  std::vector<std::vector<std::size_t>> core_columns;

  std::size_t size() const { return blocks.size(); }
};

// Marks each block invertible (square, full rank), oversized (extra columns,
// full row rank) or deficient.
DatasetBlocks classify_blocks(std::vector<Mat> blocks);

// Substitutes M_i -> Y_i X_i^{-1} (core columns for oversized blocks) in every
// cell term, turning dataset-free block constraints into output constraints.
// The rank bound is unchanged. Throws std::invalid_argument when a referenced
// block is deficient.
RankConstraint psi_inverse(const RankConstraint& c, const DatasetBlocks& data);

// Linear output relations from the column dependencies of one data block
// (ones-augmented in the bias case): one relation per kernel vector per
// output row.
std::vector<LinearRelation> dependency_rows(const Mat& data, std::size_t block_index,
                                            std::size_t output_dim, bool bias);

}  // namespace relu
