#include <doctest.h>

#include "helpers.hpp"
#include "relu/dimension.hpp"
#include "relu/invariants.hpp"

using namespace relu;
using namespace relu::testing;

namespace {

// One-variable divided differences are exact for multilinear maps, so this is
// an exact independent oracle for every Jacobian entry.
Mat jacobian_divided_difference(const Architecture& arch, const BlockPattern& patterns,
                                const ParamAssignment& theta, const Rat& step) {
  const std::size_t n0 = arch.input_dim();
  const std::size_t n_out = arch.output_dim();
  const std::size_t block_cols = n_out * n0;
  std::size_t rows = 0;
  for (std::size_t l = 0; l < arch.depth(); ++l) rows += arch.widths[l + 1] * arch.widths[l];
  Mat jac(rows, patterns.size() * block_cols);

  std::size_t row = 0;
  for (std::size_t l = 0; l < arch.depth(); ++l) {
    for (std::size_t a = 0; a < arch.widths[l + 1]; ++a) {
      for (std::size_t b = 0; b < arch.widths[l]; ++b, ++row) {
        ParamAssignment shifted = theta;
        shifted.weights[l](a, b) += step;
        for (std::size_t i = 0; i < patterns.size(); ++i) {
          const Mat base = masked_matrix(arch, theta, patterns.blocks[i]).matrix;
          const Mat moved = masked_matrix(arch, shifted, patterns.blocks[i]).matrix;
          for (std::size_t u = 0; u < n_out; ++u) {
            for (std::size_t v = 0; v < n0; ++v) {
              jac(row, i * block_cols + v * n_out + u) =
                  (moved(u, v) - base(u, v)) / step;
            }
          }
        }
      }
    }
  }
  return jac;
}

}  // namespace

TEST_CASE("jacobian entries match exact divided differences") {
  TestRng rng(73);
  SUBCASE("pinned shallow network") {
    const Architecture arch = make_arch({2, 2, 2});
    const BlockPattern blocks = make_blocks({make_pattern({{1, 0}}), make_pattern({{1, 1}})});
    const ParamAssignment theta = rng.params(arch, 9);
    CHECK(jacobian(arch, blocks, theta) ==
          jacobian_divided_difference(arch, blocks, theta, Rat(3, 7)));
  }
  SUBCASE("random architectures") {
    for (int trial = 0; trial < 3; ++trial) {
      const std::size_t depth = 2 + rng.engine() % 3;
      std::vector<std::size_t> widths(depth + 1);
      for (auto& w : widths) w = 1 + rng.engine() % 3;
      const Architecture arch = make_arch(widths);
      Pattern p1 = rng.pattern(arch);
      Pattern p2 = rng.pattern(arch);
      BlockPattern blocks = make_blocks(p1 == p2 ? std::vector<Pattern>{p1}
                                                 : std::vector<Pattern>{p1, p2});
      const ParamAssignment theta = rng.params(arch, 9);
      CHECK(jacobian(arch, blocks, theta) ==
            jacobian_divided_difference(arch, blocks, theta, Rat(1)));
    }
  }
  SUBCASE("bias networks are rejected") {
    const Architecture arch = make_arch({2, 2, 2}, true);
    const BlockPattern blocks = make_blocks({make_pattern({{1, 0}})});
    CHECK_THROWS_AS(jacobian(arch, blocks, rng.params(arch, 5)), std::invalid_argument);
  }
}

TEST_CASE("single all-ones block hits the linear-model dimension") {
  const SampleSpec spec{kDefaultMasterSeed, 8, 100};
  for (std::size_t n1 : {1u, 2u, 3u}) {
    const Architecture arch = make_arch({3, n1, 3});
    const BlockPattern blocks = make_blocks({Pattern::all_ones(arch)});
    const auto report = functional_dimension(arch, blocks, spec);
    const long r = static_cast<long>(n1);
    CHECK(static_cast<long>(report.jacobian_rank) == r * 6 - r * r);
    REQUIRE(report.expected.has_value());
    CHECK(report.agrees == true);
  }
}

TEST_CASE("single-block output dimension matches the composed Jacobian rank") {
  // Oracle for the closed form: the image of theta -> M(theta) X has the
  // dimension of the Jacobian of the composed map, obtained by mixing the
  // columns of the plain Jacobian with the data matrix.
  const Architecture arch = make_arch({3, 2, 2});
  const Pattern pattern = make_pattern({{1, 0}});
  const Mat x = mat_from({{3, 1, 3, 0}, {0, 1, 5, 4}, {-1, -1, 5, 0}});
  const BlockPattern blocks = make_blocks({pattern});
  const SampleSpec spec{kDefaultMasterSeed, 6, 100};

  std::size_t best = 0;
  for (std::size_t index = 0; index < spec.num_samples; ++index) {
    const ParamAssignment theta = sample_params(arch, spec, index);
    const Mat jac = jacobian(arch, blocks, theta);
    const std::size_t n_out = arch.output_dim();
    Mat composed(jac.rows(), n_out * x.cols());
    for (std::size_t row = 0; row < jac.rows(); ++row) {
      for (std::size_t u = 0; u < n_out; ++u) {
        for (std::size_t v = 0; v < x.cols(); ++v) {
          Rat acc = 0;
          for (std::size_t j = 0; j < x.rows(); ++j) acc += jac(row, j * n_out + u) * x(j, v);
          composed(row, v * n_out + u) = acc;
        }
      }
    }
    best = std::max(best, rank_exact(composed));
  }
  CHECK(static_cast<long>(best) == single_block_dimension(arch, pattern, x.cols(), false));
}

TEST_CASE("degenerate equal patterns collapse the sandwich") {
  const Architecture arch = make_arch({3, 4, 3});
  const Pattern a = make_pattern({{1, 1, 0, 0}});
  const auto [lower, upper] = dimension_bounds(arch, a, a);
  CHECK(lower == upper);
  const auto dims = expected_dimension_two_block(arch, a, a);
  CHECK(dims.d_a == 0);
  CHECK(dims.d_b == 0);
  CHECK(upper == dims.d_c);
}

TEST_CASE("two-block expected dimensions and bounds") {
  SUBCASE("width-4 pair") {
    const Architecture arch = make_arch({4, 4, 4});
    const auto dims = expected_dimension_two_block(arch, make_pattern({{1, 1, 1, 0}}),
                                                   make_pattern({{0, 1, 1, 1}}));
    CHECK(dims.d_a == 7);
    CHECK(dims.d_b == 7);
    CHECK(dims.d_c == 12);
    CHECK(dims.expected == 26);
    const auto [lower, upper] = dimension_bounds(arch, make_pattern({{1, 1, 1, 0}}),
                                                 make_pattern({{0, 1, 1, 1}}));
    CHECK(lower == 22);
    CHECK(upper == 26);
  }
  SUBCASE("dropping pair") {
    const Architecture arch = make_arch({3, 4, 3});
    const auto dims = expected_dimension_two_block(arch, make_pattern({{1, 1, 1, 0}}),
                                                   make_pattern({{0, 1, 1, 1}}));
    CHECK(dims.d_a + dims.d_b + dims.d_c == 18);
    CHECK(dims.expected == 18);
  }
  SUBCASE("disjoint full blocks lose the shared part") {
    const Architecture arch = make_arch({4, 4, 4});
    const auto dims = expected_dimension_two_block(arch, make_pattern({{1, 1, 0, 0}}),
                                                   make_pattern({{0, 0, 1, 1}}));
    CHECK(dims.d_c == 0);
    CHECK(dims.expected == dims.d_a + dims.d_b);
  }
}

TEST_CASE("multi-block expected dimension") {
  SUBCASE("three blocks over five neurons") {
    const Architecture arch = make_arch({4, 5, 5});
    const BlockPattern blocks = make_blocks({make_pattern({{1, 0, 0, 1, 1}}),
                                             make_pattern({{0, 1, 0, 1, 1}}),
                                             make_pattern({{0, 0, 1, 0, 1}})});
    CHECK(expected_dimension_multi_block(arch, blocks) == 40);
  }
  SUBCASE("single all-ones block") {
    const Architecture arch = make_arch({3, 2, 4});
    CHECK(expected_dimension_multi_block(arch, make_blocks({Pattern::all_ones(arch)})) ==
          2 * 7 - 4);
  }
  SUBCASE("two covering blocks agree with the pairwise formula") {
    TestRng rng(79);
    int checked = 0;
    while (checked < 15) {
      const Architecture arch = make_arch({4, 1 + rng.engine() % 4, 4});
      Pattern a1 = rng.pattern(arch), a2 = rng.pattern(arch);
      // Cover every neuron so no class is empty.
      for (std::size_t j = 0; j < arch.widths[1]; ++j) {
        if (!a1.layers[0][j] && !a2.layers[0][j]) a1.layers[0][j] = 1;
      }
      if (a1 == a2) continue;
      const auto dims = expected_dimension_two_block(arch, a1, a2);
      CHECK(expected_dimension_multi_block(arch, make_blocks({a1, a2})) ==
            dims.d_a + dims.d_b + dims.d_c);
      ++checked;
    }
  }
}

TEST_CASE("functional dimension sandwich on random shallow pairs") {
  TestRng rng(83);
  const SampleSpec spec{kDefaultMasterSeed, 6, 100};
  int checked = 0;
  while (checked < 10) {
    const Architecture arch =
        make_arch({2 + rng.engine() % 3, 1 + rng.engine() % 4, 2 + rng.engine() % 3});
    Pattern a1 = rng.pattern(arch), a2 = rng.pattern(arch);
    if (a1 == a2) continue;
    const auto report = functional_dimension(arch, make_blocks({a1, a2}), spec);
    REQUIRE(report.lower_bound.has_value());
    REQUIRE(report.upper_bound.has_value());
    CHECK(*report.lower_bound <= static_cast<long>(report.jacobian_rank));
    CHECK(static_cast<long>(report.jacobian_rank) <= *report.upper_bound);
    ++checked;
  }
}

TEST_CASE("row groups of the wide three-block model") {
  const Architecture arch = make_arch({4, 5, 5});
  const BlockPattern blocks = make_blocks({make_pattern({{1, 0, 0, 1, 1}}),
                                           make_pattern({{0, 1, 0, 1, 1}}),
                                           make_pattern({{0, 0, 1, 0, 1}})});
  const SampleSpec spec{kDefaultMasterSeed, 4, 100};
  const auto report = functional_dimension(arch, blocks, spec);
  CHECK(report.jacobian_rank == 40);
  CHECK(report.ambient_dim == 60);
  CHECK(report.row_group_ranks == std::vector<std::size_t>{8, 8, 8, 8, 8});

  // Block sparsity: a neuron's rows touch exactly the blocks it is active in.
  const Mat jac = jacobian(arch, blocks, sample_params(arch, spec, 0));
  const std::size_t block_cols = 4 * 5;
  for (std::size_t neuron = 0; neuron < 5; ++neuron) {
    for (std::size_t block = 0; block < 3; ++block) {
      bool touched = false;
      auto scan_row = [&](std::size_t row) {
        for (std::size_t c = 0; c < block_cols; ++c) {
          if (jac(row, block * block_cols + c) != 0) touched = true;
        }
      };
      for (std::size_t b = 0; b < 4; ++b) scan_row(neuron * 4 + b);
      for (std::size_t a = 0; a < 5; ++a) scan_row(5 * 4 + a * 5 + neuron);
      CHECK(touched == (blocks.blocks[block].layers[0][neuron] == 1));
    }
  }
}
