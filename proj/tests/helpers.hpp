#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "relu/model.hpp"

namespace relu::testing {

inline Architecture make_arch(std::vector<std::size_t> widths, bool bias = false) {
  Architecture arch;
  arch.widths = std::move(widths);
  arch.has_bias = bias;
  arch.validate();
  return arch;
}

inline Pattern make_pattern(std::vector<std::vector<int>> layers) {
  Pattern p;
  for (const auto& layer : layers) {
    p.layers.emplace_back(layer.begin(), layer.end());
  }
  return p;
}

inline BlockPattern make_blocks(std::vector<Pattern> patterns) {
  BlockPattern b;
  b.blocks = std::move(patterns);
  return b;
}

inline Mat mat_from(const std::vector<std::vector<long>>& rows) {
  Mat m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

// Engine output is pinned by the standard, so these generators are portable.
struct TestRng {
  std::mt19937_64 engine;
  explicit TestRng(std::uint64_t seed) : engine(seed) {}

  long pick(long lo, long hi) {
    return lo + static_cast<long>(engine() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  Mat matrix(std::size_t rows, std::size_t cols, long bound) {
    Mat m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) m(i, j) = pick(-bound, bound);
    return m;
  }
  ParamAssignment params(const Architecture& arch, long bound) {
    ParamAssignment theta;
    for (std::size_t l = 0; l < arch.depth(); ++l) {
      theta.weights.push_back(matrix(arch.widths[l + 1], arch.widths[l], bound));
    }
    if (arch.has_bias) {
      for (std::size_t l = 0; l < arch.depth(); ++l) {
        std::vector<Rat> b(arch.widths[l + 1]);
        for (Rat& x : b) x = pick(-bound, bound);
        theta.biases.push_back(std::move(b));
      }
    }
    return theta;
  }
  Pattern pattern(const Architecture& arch) {
    Pattern p;
    for (std::size_t l = 1; l + 1 < arch.widths.size(); ++l) {
      std::vector<std::uint8_t> bits(arch.widths[l]);
      for (auto& bit : bits) bit = static_cast<std::uint8_t>(engine() % 2);
      p.layers.push_back(std::move(bits));
    }
    return p;
  }
};

}  // namespace relu::testing
