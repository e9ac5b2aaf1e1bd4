// Acceptance suite: runs every headline claim end to end and prints one
// pass/fail line per criterion. Exits nonzero if any criterion fails.

#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "helpers.hpp"
#include "relu/dimension.hpp"
#include "relu/invariants.hpp"
#include "relu/pipeline.hpp"
#include "relu/presets.hpp"
#include "relu/transform.hpp"
#include "relu/verify.hpp"

using namespace relu;
using namespace relu::testing;

namespace {

struct Checker {
  bool ok = true;
  std::vector<std::string> notes;

  void expect(bool condition, const std::string& what) {
    if (!condition) {
      ok = false;
      notes.push_back(what);
    }
  }
  template <class A, class B>
  void equal(const A& actual, const B& expected, const std::string& what) {
    std::ostringstream msg;
    msg << what << ": expected " << expected << ", got " << actual;
    expect(actual == expected, msg.str());
  }
};

const ConstraintInfo* find_label(const std::vector<ConstraintInfo>& list,
                                 const std::string& label) {
  for (const ConstraintInfo& info : list) {
    if (info.constraint.label == label) return &info;
  }
  return nullptr;
}

const SampleSpec kVerify{kDefaultMasterSeed, 64, 100};
const SampleSpec kRank{kDefaultMasterSeed, 8, 100};

void criterion_single_block(Checker& check) {
  const Architecture arch = make_arch({3, 2, 2});
  const Pattern pattern = make_pattern({{1, 0}});
  const Mat data = mat_from({{3, 1, 3, 0}, {0, 1, 5, 4}, {-1, -1, 5, 0}});
  const auto result = single_block_constraints(arch, pattern, data, false);

  check.equal(result.linear.size(), std::size_t{2}, "linear relation count");
  for (const LinearRelation& rel : result.linear) {
    check.expect(rel.coeffs == std::vector<Rat>{8, -18, -2, 7},
                 "relation coefficients proportional to (8,-18,-2,7)");
  }
  check.expect(result.minors.has_value(), "minor family present");
  if (result.minors) {
    check.equal(result.minors->constraint.minor_size(), std::size_t{2}, "minor degree");
    check.expect(result.minors->constraint.minor_count() == 3, "three quadratic minors");
  }

  const BlockPattern blocks = make_blocks({pattern});
  const std::vector<Mat> dataset{data};
  EvalContext ctx{&arch, &blocks, &dataset};
  const Verdict linear_verdict = check_vanishing(result.linear, ctx, kVerify);
  check.equal(linear_verdict.samples_used, std::size_t{64}, "linear samples");
  check.equal(linear_verdict.violations, std::size_t{0}, "linear violations");
  if (result.minors) {
    const Verdict minor_verdict = check_constraint(result.minors->constraint, ctx, kVerify);
    check.equal(minor_verdict.violations, std::size_t{0}, "minor violations");
  }
}

void criterion_two_block_44(Checker& check) {
  const Architecture arch = make_arch({4, 4, 4});
  const Pattern a1 = make_pattern({{1, 1, 1, 0}});
  const Pattern a2 = make_pattern({{0, 1, 1, 1}});
  const auto result = two_block_shallow(arch, a1, a2);
  check.equal(result.stats.r1, std::size_t{3}, "r1");
  check.equal(result.stats.r2, std::size_t{3}, "r2");
  check.equal(result.stats.s, std::size_t{2}, "s");
  check.equal(result.stats.t, std::size_t{2}, "t");

  Int determinants = 0, cubics = 0;
  for (const ConstraintInfo& info : result.constraints) {
    if (!info.emitted()) continue;
    if (info.constraint.minor_size() == 4) determinants += info.constraint.minor_count();
    if (info.constraint.minor_size() == 3) cubics += info.constraint.minor_count();
  }
  check.expect(determinants == 2, "two determinant constraints");
  check.expect(cubics == 16, "sixteen cubic minors");
  const auto* type4 = find_label(result.constraints, "type4-shallow");
  check.expect(type4 != nullptr && type4->constraint.minor_count() == 16,
               "difference family carries the cubics");

  const BlockPattern blocks = make_blocks({a1, a2});
  const auto dims = functional_dimension(arch, blocks, kRank);
  check.equal(dims.jacobian_rank, std::size_t{26}, "functional dimension");
  check.equal(dims.ambient_dim, std::size_t{32}, "ambient dimension");
  check.expect(dims.expected == 26, "expected dimension");
  check.expect(dims.lower_bound == 22 && dims.upper_bound == 26, "bounds 22 <= 26 <= 26");
}

void criterion_two_block_434(Checker& check) {
  const Architecture arch = make_arch({4, 3, 4});
  const auto result =
      two_block_shallow(arch, make_pattern({{1, 1, 0}}), make_pattern({{0, 1, 1}}));
  Int cubics = 0, block_cubics = 0, difference_cubics = 0;
  for (const ConstraintInfo& info : result.constraints) {
    if (!info.emitted() || info.constraint.minor_size() != 3) continue;
    cubics += info.constraint.minor_count();
    if (info.constraint.label == "type4-shallow") {
      difference_cubics += info.constraint.minor_count();
    } else {
      block_cubics += info.constraint.minor_count();
    }
  }
  check.expect(cubics == 48, "48 cubic constraints");
  check.expect(block_cubics == 32, "32 per-block cubics");
  check.expect(difference_cubics == 16, "16 difference cubics");

  const auto dims = functional_dimension(
      arch, make_blocks({make_pattern({{1, 1, 0}}), make_pattern({{0, 1, 1}})}), kRank);
  check.equal(dims.jacobian_rank, std::size_t{21}, "functional dimension");
}

void criterion_dimension_drop(Checker& check) {
  const Architecture arch = make_arch({3, 4, 3});
  const Pattern a1 = make_pattern({{1, 1, 1, 0}});
  const Pattern a2 = make_pattern({{0, 1, 1, 1}});
  const BlockPattern blocks = make_blocks({a1, a2});

  const auto dims = functional_dimension(arch, blocks, kRank);
  check.expect(dims.expected == 18, "expected dimension 18");
  check.equal(dims.jacobian_rank, std::size_t{17}, "functional dimension 17");

  const auto result = two_block_shallow(arch, a1, a2);
  std::size_t emitted = 0;
  const ConstraintInfo* cubic = nullptr;
  for (const ConstraintInfo& info : result.constraints) {
    if (info.emitted()) {
      ++emitted;
      cubic = &info;
    }
  }
  check.equal(emitted, std::size_t{1}, "a single emitted family");
  check.expect(cubic != nullptr && cubic->constraint.label == "type4-shallow" &&
                   cubic->constraint.bound == 2 && cubic->constraint.minor_count() == 1,
               "the cubic difference constraint with bound 2");
  if (cubic) {
    EvalContext ctx{&arch, &blocks, nullptr};
    check.expect(check_constraint(cubic->constraint, ctx, kVerify).holds,
                 "difference constraint verifies");
  }
}

void criterion_deep_fig3(Checker& check) {
  const Architecture arch = make_arch({2, 2, 2, 2, 2});
  const Pattern a1 = make_pattern({{1, 1}, {0, 1}, {1, 1}});
  const Pattern a2 = make_pattern({{0, 1}, {1, 1}, {0, 1}});
  const auto result = two_block_deep(arch, a1, a2, kRank);
  check.equal(result.stats.r_a, std::size_t{2}, "r_a");
  check.equal(result.stats.r_b, std::size_t{1}, "r_b");
  check.equal(result.stats.s, std::size_t{1}, "s");
  check.equal(result.stats.t, std::size_t{3}, "t");
  for (const ConstraintInfo& info : result.constraints) {
    const bool per_block = info.constraint.label == "type1-deep" ||
                           info.constraint.label == "type2-deep";
    check.expect(info.emitted() == per_block,
                 "only the per-block families are emitted (" + info.constraint.label + ")");
  }
  const auto dims = functional_dimension(arch, make_blocks({a1, a2}), kRank);
  check.equal(dims.jacobian_rank, std::size_t{6}, "functional dimension");
  check.equal(dims.ambient_dim, std::size_t{8}, "ambient dimension");
}

void criterion_deep_ex68(Checker& check) {
  const Architecture arch = make_arch({3, 3, 2, 3, 3});
  const Pattern a1 = make_pattern({{1, 1, 1}, {1, 1}, {1, 1, 1}});
  const Pattern a2 = make_pattern({{0, 1, 1}, {1, 1}, {1, 1, 1}});
  const BlockPattern blocks = make_blocks({a1, a2});
  const auto result = two_block_deep(arch, a1, a2, kRank);
  check.equal(result.stats.r_a, std::size_t{1}, "r_a");
  check.equal(result.stats.r_b, std::size_t{0}, "r_b");
  check.equal(result.stats.s, std::size_t{2}, "s");
  check.equal(result.stats.t, std::size_t{1}, "t");

  const auto* type4 = find_label(result.constraints, "type4-deep");
  const auto* type3a = find_label(result.constraints, "type3a-deep");
  check.expect(type4 != nullptr && type4->constraint.minor_count() == 9,
               "nine rank-one difference constraints");
  check.expect(type3a != nullptr && type3a->constraint.minor_size() == 3,
               "concatenation family carries 3-minors");
  EvalContext ctx{&arch, &blocks, nullptr};
  for (const ConstraintInfo* info : {type4, type3a}) {
    if (info == nullptr) continue;
    check.expect(check_constraint(info->constraint, ctx, kVerify).holds,
                 info->constraint.label + " verifies");
  }
  const auto dims = functional_dimension(arch, blocks, kRank);
  check.equal(dims.jacobian_rank, std::size_t{12}, "functional dimension");
  check.equal(dims.ambient_dim, std::size_t{18}, "ambient dimension");
}

void criterion_tightness(Checker& check) {
  const Architecture arch = make_arch({4, 3, 3, 3, 4});
  const Pattern a1 = make_pattern({{1, 1, 0}, {0, 1, 1}, {1, 1, 0}});
  const Pattern a2 = make_pattern({{0, 1, 1}, {1, 1, 0}, {0, 1, 1}});
  const BlockPattern blocks = make_blocks({a1, a2});
  const auto result = two_block_deep(arch, a1, a2, kRank);
  check.equal(result.stats.t, std::size_t{4}, "difference bound");

  const auto* type4 = find_label(result.constraints, "type4-deep");
  check.expect(type4 != nullptr, "difference family present");
  if (type4) {
    EvalContext ctx{&arch, &blocks, nullptr};
    const Verdict verdict = check_constraint(type4->constraint, ctx, kVerify);
    check.expect(verdict.holds, "bound holds on all samples");
    check.equal(verdict.max_rank_observed, std::size_t{3}, "max observed rank");
    check.expect(!verdict.tight, "bound is not tight");
  }
}

void criterion_three_block(Checker& check) {
  const Architecture arch = make_arch({3, 4, 3});
  const BlockPattern blocks = make_blocks({make_pattern({{1, 1, 0, 0}}),
                                           make_pattern({{1, 0, 1, 0}}),
                                           make_pattern({{1, 0, 0, 1}})});
  const auto lambdas = search_sparse_lambdas(arch, blocks, 1, 4);
  const std::set<std::vector<long>> found(lambdas.begin(), lambdas.end());
  const std::set<std::vector<long>> expected{{1, 0, 0}, {0, 1, 0}, {0, 0, 1},
                                             {1, -1, 0}, {1, 0, -1}, {0, 1, -1}};
  check.expect(found == expected, "search recovers the six sparse combinations");

  const std::vector<std::vector<long>> units{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  const auto block_t = block_matrix_constraint(arch, blocks, units, {{0, 1}, {2, 1}});
  check.equal(block_t.constraint.bound, std::size_t{4}, "block-matrix bound");
  EvalContext ctx{&arch, &blocks, nullptr};
  check.expect(check_constraint(block_t.constraint, ctx, kVerify).holds,
               "block-matrix family verifies");

  const auto dims = functional_dimension(arch, blocks, kRank);
  check.equal(dims.jacobian_rank, std::size_t{20}, "functional dimension");
  check.equal(dims.ambient_dim, std::size_t{27}, "ambient dimension");
}

void criterion_multi_block_455(Checker& check) {
  const Architecture arch = make_arch({4, 5, 5});
  const BlockPattern blocks = make_blocks({make_pattern({{1, 0, 0, 1, 1}}),
                                           make_pattern({{0, 1, 0, 1, 1}}),
                                           make_pattern({{0, 0, 1, 0, 1}})});
  check.expect(expected_dimension_multi_block(arch, blocks) == 40, "expected dimension 40");
  const auto dims = functional_dimension(arch, blocks, kRank);
  check.equal(dims.jacobian_rank, std::size_t{40}, "functional dimension 40");
  check.equal(dims.ambient_dim, std::size_t{60}, "ambient dimension 60");
  check.expect(dims.row_group_ranks == std::vector<std::size_t>{8, 8, 8, 8, 8},
               "five row groups of rank 8");
}

void criterion_psi(Checker& check) {
  const Architecture arch = make_arch({2, 1, 2, 2});
  const BlockPattern blocks =
      make_blocks({make_pattern({{1}, {1, 0}}), make_pattern({{1}, {0, 1}})});
  const std::vector<Mat> dataset{mat_from({{1, 2}, {1, 3}}), mat_from({{1, 3}, {2, 1}})};
  const DatasetBlocks data = classify_blocks(dataset);

  CellTerm first, second;
  first.block = 0;
  first.transpose = true;
  second.block = 1;
  second.transpose = true;
  RankConstraint mixed;
  mixed.grid = {{Cell::of_terms(2, 2, {first}), Cell::of_terms(2, 2, {second})}};
  mixed.bound = 1;
  mixed.label = "type3b-deep";

  const RankConstraint transformed = psi_inverse(mixed, data);
  const Poly g3 = expand_minor(transformed, MinorIndex{{0, 1}, {1, 3}});
  auto y = [](std::size_t block, std::size_t r, std::size_t c) {
    return Poly::variable({block, BlockSymbol::Y, r, c});
  };
  Poly expected = y(0, 1, 0) * y(1, 1, 0);
  expected *= Rat(7);
  expected += y(0, 1, 0) * y(1, 1, 1);
  Poly two = y(0, 1, 1) * y(1, 1, 0);
  two *= Rat(2);
  expected -= two;
  expected -= y(0, 1, 1) * y(1, 1, 1);
  check.expect(Poly::proportional(g3, expected),
               "transformed minor proportional to the pinned quadric");

  EvalContext ctx{&arch, &blocks, &dataset};
  const Verdict vanish = check_vanishing(g3, ctx, kVerify);
  check.equal(vanish.samples_used, std::size_t{64}, "vanishing samples");
  check.equal(vanish.violations, std::size_t{0}, "vanishing violations");

  const auto relations = dependency_rows(mat_from({{3, 1, 1}, {1, 1, 3}}), 0, 2, false);
  check.equal(relations.size(), std::size_t{2}, "dependency relation count");
  for (const LinearRelation& rel : relations) {
    check.expect(rel.coeffs == std::vector<Rat>{1, -4, 1},
                 "dependency coefficients (1,-4,1)");
  }
}

void criterion_property_suites(Checker& check) {
  // (a) path/mask agreement on random triples.
  {
    TestRng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t depth = 2 + rng.engine() % 3;
      std::vector<std::size_t> widths(depth + 1);
      for (auto& w : widths) w = 1 + rng.engine() % 4;
      const Architecture arch = make_arch(widths);
      const Pattern pattern = rng.pattern(arch);
      const ParamAssignment theta = rng.params(arch, 9);
      if (path_matrix(arch, theta, enumerate_active_paths(arch, pattern)) !=
          masked_matrix(arch, theta, pattern).matrix) {
        check.expect(false, "path/mask disagreement at trial " + std::to_string(trial));
        return;
      }
    }
  }
  // (b) narrow-hidden-layer shallow pairs attain the expected dimension.
  {
    TestRng rng(103);
    int checked = 0;
    while (checked < 50) {
      const std::size_t n1 = 1 + rng.engine() % 3;
      const std::size_t n0 = n1 + rng.engine() % 3;
      const std::size_t n2 = n1 + rng.engine() % 3;
      const Architecture arch = make_arch({n0, n1, n2});
      Pattern a1 = rng.pattern(arch), a2 = rng.pattern(arch);
      for (std::size_t j = 0; j < n1; ++j) {
        if (!a1.layers[0][j] && !a2.layers[0][j]) a1.layers[0][j] = 1;
      }
      if (a1 == a2) continue;
      ++checked;
      const auto dims = functional_dimension(arch, make_blocks({a1, a2}), kRank);
      if (static_cast<long>(dims.jacobian_rank) != dims.expected.value_or(-1)) {
        check.expect(false, "two-block expected dimension missed at trial " +
                                std::to_string(checked));
        return;
      }
    }
  }
  // (c) the multi-block formula in the same regime.
  {
    TestRng rng(107);
    int checked = 0;
    while (checked < 25) {
      const std::size_t n1 = 2 + rng.engine() % 2;
      const std::size_t n0 = n1 + rng.engine() % 3;
      const std::size_t n2 = n1 + rng.engine() % 3;
      const Architecture arch = make_arch({n0, n1, n2});
      const std::size_t k = 3 + rng.engine() % 2;
      std::vector<Pattern> patterns;
      for (std::size_t i = 0; i < k; ++i) patterns.push_back(rng.pattern(arch));
      for (std::size_t j = 0; j < n1; ++j) {
        bool covered = false;
        for (const Pattern& p : patterns) covered = covered || p.layers[0][j];
        if (!covered) patterns[rng.engine() % k].layers[0][j] = 1;
      }
      bool distinct = true;
      for (std::size_t i = 0; i < k && distinct; ++i) {
        for (std::size_t j = i + 1; j < k; ++j) {
          if (patterns[i] == patterns[j]) distinct = false;
        }
      }
      if (!distinct) continue;
      ++checked;
      const BlockPattern blocks = make_blocks(patterns);
      const auto dims = functional_dimension(arch, blocks, kRank);
      if (static_cast<long>(dims.jacobian_rank) !=
          expected_dimension_multi_block(arch, blocks)) {
        check.expect(false, "multi-block expected dimension missed at trial " +
                                std::to_string(checked));
        return;
      }
    }
  }
  // (d) every preset verifies with zero violations, within the time budget.
  for (const PresetEntry& entry : list_presets()) {
    const auto start = std::chrono::steady_clock::now();
    const AnalysisOutcome outcome = run_analysis(preset_config(entry.name), RunMode::Report);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.expect(outcome.all_hold, "preset " + entry.name + " has a violation");
    check.expect(seconds < 10.0, "preset " + entry.name + " exceeded 10 s");
  }
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    std::function<void(Checker&)> body;
  };
  const std::vector<Criterion> criteria{
      {"1: single-block generators and kernel relations", criterion_single_block},
      {"2: width-4 two-block stats, inventory and dimension 26/32", criterion_two_block_44},
      {"3: (4,3,4) 48 cubics and dimension 21", criterion_two_block_434},
      {"4: (3,4,3) dimension drop 17 below expected 18", criterion_dimension_drop},
      {"5: deep width-2 pair, path ranks and dimension 6/8", criterion_deep_fig3},
      {"6: deep bottleneck pair, nine quadrics and dimension 12/18", criterion_deep_ex68},
      {"7: difference bound 4 holds but is not attained", criterion_tightness},
      {"8: three-block search, block matrix bound 4, dimension 20/27", criterion_three_block},
      {"9: (4,5,5) three blocks at dimension 40 with rank-8 row groups",
       criterion_multi_block_455},
      {"10: output-variety transform and dependency rows", criterion_psi},
      {"11: property suites (paths, dimensions, preset soundness)",
       criterion_property_suites},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    Checker check;
    try {
      criterion.body(check);
    } catch (const std::exception& error) {
      check.expect(false, std::string("exception: ") + error.what());
    }
    std::cout << (check.ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion.name
              << "\n";
    for (const std::string& note : check.notes) std::cout << "       - " << note << "\n";
    failures += check.ok ? 0 : 1;
  }
  std::cout << (failures == 0 ? "ACCEPTANCE: all criteria passed"
                              : "ACCEPTANCE: " + std::to_string(failures) + " criteria failed")
            << "\n";
  return failures == 0 ? 0 : 1;
}
