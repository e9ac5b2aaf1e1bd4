#include "relu/invariants.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <set>
#include <stdexcept>

namespace relu {

namespace {

std::size_t clip(std::size_t bound, std::size_t rows, std::size_t cols) {
  return std::min(bound, std::min(rows, cols));
}

CellTerm m_term(std::size_t block) {
  CellTerm t;
  t.block = block;
  return t;
}

CellTerm m_term_scaled(std::size_t block, std::size_t rows, const Rat& scale) {
  CellTerm t;
  t.block = block;
  if (scale != 1) t.coeff_left = Mat::scalar(rows, scale);
  return t;
}

CellTerm m_term_transposed(std::size_t block) {
  CellTerm t;
  t.block = block;
  t.transpose = true;
  return t;
}

Mat column_selector(std::size_t m, const std::vector<std::size_t>& columns) {
  Mat s(m, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) s(columns[j], j) = 1;
  return s;
}

// Every `size`-subset of the columns has full rank. Enumeration is skipped
// (and reported unchecked) past the cap.
struct PositionCheck {
  bool general = true;
  bool checked = true;
};

PositionCheck in_general_position(const Mat& data, std::size_t size) {
  PositionCheck result;
  const std::size_t m = data.cols();
  if (m <= size) {
    result.general = rank_exact(data) == std::min(m, data.rows());
    return result;
  }
  if (binomial(m, size) > kDefaultMinorCap) {
    result.checked = false;
    result.general = rank_exact(data) == std::min(size, data.rows());
    return result;
  }
  std::vector<std::size_t> subset(size);
  std::iota(subset.begin(), subset.end(), 0);
  while (true) {
    if (rank_exact(data.columns(subset)) < size) {
      result.general = false;
      return result;
    }
    std::size_t i = size;
    bool advanced = false;
    while (i-- > 0) {
      if (subset[i] + (size - i) <= m - 1) {
        ++subset[i];
        for (std::size_t j = i + 1; j < size; ++j) subset[j] = subset[j - 1] + 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) return result;
  }
}

Mat ones_augmented(const Mat& data) {
  return vconcat(Mat::ones(1, data.cols()), data);
}

}  // namespace

SingleBlockResult single_block_constraints(const Architecture& arch,
                                           const Pattern& pattern, const Mat& data,
                                           bool bias) {
  arch.validate();
  pattern.validate(arch);
  if (data.rows() != arch.input_dim()) {
    throw std::invalid_argument("data rows must match the input dimension");
  }
  const std::size_t n0 = arch.input_dim();
  const std::size_t n_out = arch.output_dim();
  const std::size_t m = data.cols();

  SingleBlockResult result;
  result.rank_bound = generic_masked_rank(arch, pattern);
  const std::size_t r = result.rank_bound;

  const Mat relation_source = bias ? ones_augmented(data) : data;
  PositionCheck position = in_general_position(relation_source, std::min(relation_source.rows(), m));
  result.general_position = position.general;
  result.general_position_checked = position.checked;

  for (const auto& kernel_vec : kernel_basis(relation_source)) {
    for (std::size_t row = 0; row < n_out; ++row) {
      LinearRelation rel;
      rel.block = 0;
      rel.row = row;
      rel.coeffs = kernel_vec;
      rel.validate();
      result.linear.push_back(std::move(rel));
    }
  }

  // Minor family on the trailing independent column core.
  const std::size_t core = bias ? std::min(n0 + 1, m) : std::min(n0, m);
  std::vector<std::size_t> core_columns(core);
  std::iota(core_columns.begin(), core_columns.end(), m - core);

  CellTerm y_core;
  y_core.block = 0;
  y_core.symbol = BlockSymbol::Y;
  y_core.coeff_right = column_selector(m, core_columns);

  ConstraintInfo info;
  if (!bias) {
    info.constraint = single_cell_constraint(
        Cell::of_terms(n_out, core, {y_core}), clip(r, n_out, core), "single-block-linear");
  } else {
    RankConstraint c;
    c.grid = {{Cell::all_ones(1, core)}, {Cell::of_terms(n_out, core, {y_core})}};
    c.bound = clip(r + 1, n_out + 1, core);
    c.label = "single-block-affine";
    c.validate();
    info.constraint = std::move(c);
    info.generator_count =
        binomial(n_out, r + 1) * binomial(std::min(n0, m == 0 ? 0 : m - 1), r + 1);
  }
  if (!info.constraint.vacuous()) result.minors = std::move(info);
  return result;
}

long single_block_dimension(const Architecture& arch, const Pattern& pattern,
                            std::size_t num_columns, bool bias) {
  const long r = static_cast<long>(generic_masked_rank(arch, pattern));
  const long n_out = static_cast<long>(arch.output_dim());
  const long n0 = static_cast<long>(arch.input_dim());
  const long m = static_cast<long>(num_columns);
  if (!bias) return std::min(n0, m) * r + n_out * r - r * r;
  return std::min(n0, m - 1) * r + n_out * (r + 1) - r * r;
}

TwoBlockStats two_block_stats(const Architecture& arch, const Pattern& a1,
                              const Pattern& a2, const SampleSpec& rank_spec) {
  arch.validate();
  a1.validate(arch);
  a2.validate(arch);

  TwoBlockStats stats;
  stats.r1 = generic_masked_rank(arch, a1);
  stats.r2 = generic_masked_rank(arch, a2);

  const Pattern shared = pattern_and(a1, a2);
  stats.s = generic_rank_of(
      arch,
      [&](const ParamAssignment& theta) { return masked_matrix(arch, theta, shared).matrix; },
      rank_spec);

  const PathSet p1 = enumerate_active_paths(arch, a1);
  const PathSet p2 = enumerate_active_paths(arch, a2);
  const PathSet both = enumerate_active_paths(arch, shared);
  stats.r_a = generic_path_rank(arch, path_set_difference(p1, both), rank_spec);
  stats.r_b = generic_path_rank(arch, path_set_difference(p2, both), rank_spec);
  stats.t = stats.r_a + stats.r_b;

  stats.n_min = *std::min_element(arch.widths.begin() + 1, arch.widths.end() - 1);
  for (std::size_t l = 1; l < arch.widths.size() - 1; ++l) {
    if (arch.widths[l] != stats.n_min) continue;
    if (stats.lmin_lo == 0) stats.lmin_lo = l;
    stats.lmin_hi = l;
  }
  stats.gate3a = true;
  for (std::size_t l = stats.lmin_hi + 1; l <= arch.hidden_layers(); ++l) {
    if (a1.layers[l - 1] != a2.layers[l - 1]) stats.gate3a = false;
  }
  stats.gate3b = true;
  for (std::size_t l = 1; l < stats.lmin_lo; ++l) {
    if (a1.layers[l - 1] != a2.layers[l - 1]) stats.gate3b = false;
  }
  return stats;
}

namespace {

ConstraintInfo concat_family(const Architecture& arch, std::size_t bound,
                             bool transposed, const std::string& label) {
  const std::size_t n0 = arch.input_dim();
  const std::size_t n_out = arch.output_dim();
  const std::size_t rows = transposed ? n0 : n_out;
  const std::size_t cols = transposed ? n_out : n0;
  ConstraintInfo info;
  RankConstraint c;
  c.grid = {{Cell::of_terms(rows, cols, {transposed ? m_term_transposed(0) : m_term(0)}),
             Cell::of_terms(rows, cols, {transposed ? m_term_transposed(1) : m_term(1)})}};
  c.bound = clip(bound, rows, 2 * cols);
  c.label = label;
  c.validate();
  info.constraint = std::move(c);
  return info;
}

ConstraintInfo difference_family(const Architecture& arch, std::size_t bound,
                                 const std::string& label) {
  const std::size_t n0 = arch.input_dim();
  const std::size_t n_out = arch.output_dim();
  ConstraintInfo info;
  info.constraint = single_cell_constraint(
      Cell::of_terms(n_out, n0, {m_term(0), m_term_scaled(1, n_out, Rat(-1))}),
      clip(bound, n_out, n0), label);
  return info;
}

ConstraintInfo block_rank_family(const Architecture& arch, std::size_t block,
                                 std::size_t bound, const std::string& label) {
  ConstraintInfo info;
  info.constraint = single_cell_constraint(
      Cell::of_terms(arch.output_dim(), arch.input_dim(), {m_term(block)}),
      clip(bound, arch.output_dim(), arch.input_dim()), label);
  return info;
}

// Counts of concatenation minors that draw an admissible number of columns
// from each side, with the difference-family deductions. The surviving count
// is the algebraically independent contribution per side.
void add_balanced_bookkeeping(ConstraintInfo& info, std::size_t block_width,
                              std::size_t other_dim, std::size_t r1, std::size_t r2,
                              const Int& deductions) {
  const std::size_t size = info.constraint.minor_size();
  Int balanced = 0;
  for (std::size_t c1 = 0; c1 <= std::min(size, r1); ++c1) {
    const std::size_t c2 = size - c1;
    if (c2 > r2) continue;
    balanced += binomial(block_width, c1) * binomial(block_width, c2);
  }
  balanced *= binomial(other_dim, size);
  info.extra["balanced_minors"] = balanced;
  info.extra["dependency_deductions"] = deductions;
  info.extra["independent_minors"] = balanced - deductions < 0 ? Int(0) : balanced - deductions;
}

}  // namespace

TwoBlockResult two_block_shallow(const Architecture& arch, const Pattern& a1,
                                 const Pattern& a2) {
  arch.validate();
  if (arch.depth() != 2) throw std::invalid_argument("shallow analysis needs exactly one hidden layer");
  a1.validate(arch);
  a2.validate(arch);

  TwoBlockResult result;
  TwoBlockStats& stats = result.stats;
  stats.r1 = a1.support(0);
  stats.r2 = a2.support(0);
  stats.s = pattern_and(a1, a2).support(0);
  stats.r_a = stats.r1 - stats.s;
  stats.r_b = stats.r2 - stats.s;
  stats.t = stats.r_a + stats.r_b;
  stats.n_min = arch.widths[1];
  stats.lmin_lo = stats.lmin_hi = 1;
  stats.gate3a = stats.gate3b = true;

  const std::size_t n0 = arch.input_dim();
  const std::size_t n_out = arch.output_dim();
  // Bound for the concatenation families; equals the hidden width when every
  // neuron is active in some block.
  const std::size_t joint = stats.r1 + stats.r2 - stats.s;
  const bool disjoint = stats.s == 0;

  result.constraints.push_back(block_rank_family(arch, 0, stats.r1, "type1-shallow"));
  result.constraints.push_back(block_rank_family(arch, 1, stats.r2, "type2-shallow"));

  ConstraintInfo type3a = concat_family(arch, joint, false, "type3a-shallow");
  ConstraintInfo type3b = concat_family(arch, joint, true, "type3b-shallow");
  ConstraintInfo type4 = difference_family(arch, stats.t, "type4-shallow");
  type3a.redundant = type3b.redundant = type4.redundant = disjoint;
  if (!disjoint) {
    const Int deductions = type4.constraint.minor_count();
    if (!type3a.constraint.vacuous()) {
      add_balanced_bookkeeping(type3a, n0, n_out, stats.r1, stats.r2, deductions);
    }
    if (!type3b.constraint.vacuous()) {
      add_balanced_bookkeeping(type3b, n_out, n0, stats.r1, stats.r2, deductions);
    }
  }
  result.constraints.push_back(std::move(type3a));
  result.constraints.push_back(std::move(type3b));
  result.constraints.push_back(std::move(type4));
  return result;
}

TwoBlockResult two_block_deep(const Architecture& arch, const Pattern& a1,
                              const Pattern& a2, const SampleSpec& rank_spec) {
  arch.validate();
  if (arch.depth() < 3) throw std::invalid_argument("deep analysis needs at least two hidden layers");
  TwoBlockResult result;
  result.stats = two_block_stats(arch, a1, a2, rank_spec);
  const TwoBlockStats& stats = result.stats;

  result.constraints.push_back(block_rank_family(arch, 0, stats.r1, "type1-deep"));
  result.constraints.push_back(block_rank_family(arch, 1, stats.r2, "type2-deep"));
  if (stats.gate3a) {
    result.constraints.push_back(concat_family(arch, stats.n_min, false, "type3a-deep"));
  }
  if (stats.gate3b) {
    result.constraints.push_back(concat_family(arch, stats.n_min, true, "type3b-deep"));
  }
  result.constraints.push_back(difference_family(arch, stats.t, "type4-deep"));
  return result;
}

namespace {

// Hidden-layer support vector for shallow networks, path-indicator support for
// deep ones; linear combinations of blocks bound rank through these.
std::vector<std::vector<long>> support_vectors(const Architecture& arch,
                                               const BlockPattern& patterns) {
  std::vector<std::vector<long>> vectors;
  if (arch.depth() == 2) {
    for (const Pattern& p : patterns.blocks) {
      std::vector<long> v(p.layers[0].begin(), p.layers[0].end());
      vectors.push_back(std::move(v));
    }
    return vectors;
  }
  const Pattern full = Pattern::all_ones(arch);
  const PathSet all_paths = enumerate_active_paths(arch, full);
  for (const Pattern& p : patterns.blocks) {
    std::vector<long> q;
    q.reserve(all_paths.paths.size());
    for (const Path& path : all_paths.paths) {
      bool active = true;
      for (std::size_t l = 0; l < path.size(); ++l) {
        if (!p.layers[l][path[l]]) {
          active = false;
          break;
        }
      }
      q.push_back(active ? 1 : 0);
    }
    vectors.push_back(std::move(q));
  }
  return vectors;
}

std::vector<long> combined_support(const std::vector<std::vector<long>>& vectors,
                                   const std::vector<long>& lambda) {
  std::vector<long> acc(vectors.front().size(), 0);
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (lambda[i] == 0) continue;
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += lambda[i] * vectors[i][j];
  }
  return acc;
}

std::size_t support_size(const std::vector<long>& v) {
  std::size_t count = 0;
  for (long x : v) count += x != 0;
  return count;
}

Cell lin_comb_cell(const Architecture& arch, const std::vector<long>& lambda) {
  std::vector<CellTerm> terms;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (lambda[i] == 0) continue;
    terms.push_back(m_term_scaled(i, arch.output_dim(), Rat(lambda[i])));
  }
  return Cell::of_terms(arch.output_dim(), arch.input_dim(), std::move(terms));
}

ConstraintInfo lin_comb_impl(const Architecture& arch, const BlockPattern& patterns,
                             const std::vector<long>& lambda, const std::string& label) {
  arch.validate();
  patterns.validate(arch);
  if (lambda.size() != patterns.size()) {
    throw std::invalid_argument("lambda length must match the block count");
  }
  const auto vectors = support_vectors(arch, patterns);
  const std::size_t support = support_size(combined_support(vectors, lambda));

  ConstraintInfo info;
  info.constraint = single_cell_constraint(
      lin_comb_cell(arch, lambda),
      clip(support, arch.output_dim(), arch.input_dim()), label);
  info.extra["support"] = static_cast<long>(support);
  return info;
}

}  // namespace

ConstraintInfo lin_comb_constraint(const Architecture& arch,
                                   const BlockPattern& patterns,
                                   const std::vector<long>& lambda) {
  if (arch.depth() != 2) {
    throw std::invalid_argument("hidden-support combinations need a shallow network");
  }
  return lin_comb_impl(arch, patterns, lambda, "lincomb");
}

ConstraintInfo deep_lin_comb_constraint(const Architecture& arch,
                                        const BlockPattern& patterns,
                                        const std::vector<long>& lambda) {
  return lin_comb_impl(arch, patterns, lambda, "lincomb-deep");
}

std::vector<std::vector<long>> search_sparse_lambdas(const Architecture& arch,
                                                     const BlockPattern& patterns,
                                                     long coeff_bound,
                                                     std::size_t max_support) {
  arch.validate();
  patterns.validate(arch);
  if (coeff_bound < 1) throw std::invalid_argument("coefficient bound must be positive");
  const std::size_t k = patterns.size();
  const auto vectors = support_vectors(arch, patterns);

  auto canonicalize = [](std::vector<long> lambda) {
    long gcd = 0;
    for (long x : lambda) gcd = std::gcd(gcd, x);
    if (gcd > 1) {
      for (long& x : lambda) x /= gcd;
    }
    for (long x : lambda) {
      if (x == 0) continue;
      if (x < 0)
        for (long& y : lambda) y = -y;
      break;
    }
    return lambda;
  };

  struct Candidate {
    std::vector<long> lambda;
    std::set<std::size_t> support;
  };
  std::set<std::vector<long>> seen;
  std::vector<Candidate> candidates;

  std::vector<long> lambda(k, -coeff_bound);
  while (true) {
    if (std::any_of(lambda.begin(), lambda.end(), [](long x) { return x != 0; })) {
      std::vector<long> canon = canonicalize(lambda);
      if (seen.insert(canon).second) {
        const auto combo = combined_support(vectors, canon);
        std::set<std::size_t> support;
        for (std::size_t j = 0; j < combo.size(); ++j) {
          if (combo[j] != 0) support.insert(j);
        }
        if (support.size() <= max_support) {
          candidates.push_back({std::move(canon), std::move(support)});
        }
      }
    }
    std::size_t i = k;
    bool advanced = false;
    while (i-- > 0) {
      if (lambda[i] < coeff_bound) {
        ++lambda[i];
        std::fill(lambda.begin() + i + 1, lambda.end(), -coeff_bound);
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }

  // Keep support-minimal candidates: drop any whose support strictly contains
  // another candidate's support.
  std::vector<std::vector<long>> kept;
  for (const Candidate& c : candidates) {
    bool dominated = false;
    for (const Candidate& other : candidates) {
      if (other.support.size() >= c.support.size()) continue;
      if (std::includes(c.support.begin(), c.support.end(), other.support.begin(),
                        other.support.end())) {
        dominated = true;
        break;
      }
    }
    if (!dominated) kept.push_back(c.lambda);
  }
  std::sort(kept.begin(), kept.end(), [&](const auto& a, const auto& b) {
    const std::size_t sa = support_size(combined_support(vectors, a));
    const std::size_t sb = support_size(combined_support(vectors, b));
    if (sa != sb) return sa < sb;
    return a < b;
  });
  return kept;
}

ConstraintInfo block_matrix_constraint(const Architecture& arch,
                                       const BlockPattern& patterns,
                                       const std::vector<std::vector<long>>& lambdas,
                                       const std::vector<std::vector<std::size_t>>& layout) {
  arch.validate();
  patterns.validate(arch);
  if (arch.depth() != 2) {
    throw std::invalid_argument("block-matrix families need a shallow network");
  }
  if (layout.empty() || layout.front().empty()) {
    throw std::invalid_argument("layout must be non-empty");
  }
  const std::size_t alpha = layout.size();
  const std::size_t beta = layout.front().size();
  for (const auto& row : layout) {
    if (row.size() != beta) throw std::invalid_argument("ragged layout");
    for (std::size_t idx : row) {
      if (idx >= lambdas.size()) throw std::invalid_argument("layout index out of range");
    }
  }
  for (std::size_t r1 = 0; r1 < alpha; ++r1) {
    for (std::size_t c1 = 0; c1 < beta; ++c1) {
      for (std::size_t r2 = 0; r2 < alpha; ++r2) {
        for (std::size_t c2 = 0; c2 < beta; ++c2) {
          if (r1 != r2 && c1 != c2 && layout[r1][c1] == layout[r2][c2]) {
            throw std::invalid_argument(
                "layout repeats a combination across distinct rows and columns");
          }
        }
      }
    }
  }

  const auto vectors = support_vectors(arch, patterns);
  std::set<std::size_t> used;
  for (const auto& row : layout)
    for (std::size_t idx : row) used.insert(idx);

  std::vector<std::set<std::size_t>> supports;
  for (std::size_t idx : used) {
    const auto combo = combined_support(vectors, lambdas[idx]);
    std::set<std::size_t> s;
    for (std::size_t j = 0; j < combo.size(); ++j) {
      if (combo[j] != 0) s.insert(j);
    }
    supports.push_back(std::move(s));
  }
  std::set<std::size_t> common = supports.front();
  for (const auto& s : supports) {
    std::set<std::size_t> next;
    std::set_intersection(common.begin(), common.end(), s.begin(), s.end(),
                          std::inserter(next, next.begin()));
    common = std::move(next);
  }
  std::size_t t = common.size();
  for (const auto& s : supports) {
    std::size_t exclusive = 0;
    for (std::size_t j : s) exclusive += common.count(j) == 0;
    t += exclusive;
  }

  ConstraintInfo info;
  RankConstraint c;
  for (const auto& layout_row : layout) {
    std::vector<Cell> row;
    for (std::size_t idx : layout_row) row.push_back(lin_comb_cell(arch, lambdas[idx]));
    c.grid.push_back(std::move(row));
  }
  c.bound = clip(t, alpha * arch.output_dim(), beta * arch.input_dim());
  c.label = "block-T";
  c.validate();
  info.constraint = std::move(c);
  info.extra["t_raw"] = static_cast<long>(t);
  return info;
}

std::vector<std::vector<std::vector<std::size_t>>> default_block_layouts(
    const std::vector<std::vector<long>>& lambdas, std::size_t max_layouts) {
  std::vector<std::size_t> units;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    std::size_t nonzero = 0;
    bool unit = true;
    for (long x : lambdas[i]) {
      if (x == 0) continue;
      ++nonzero;
      if (x != 1) unit = false;
    }
    if (unit && nonzero == 1) units.push_back(i);
  }

  using Flat = std::array<std::size_t, 4>;  // [a b; c d] flattened
  auto orbit_min = [](Flat f) {
    const Flat variants[8] = {
        {f[0], f[1], f[2], f[3]}, {f[2], f[3], f[0], f[1]},
        {f[1], f[0], f[3], f[2]}, {f[3], f[2], f[1], f[0]},
        {f[0], f[2], f[1], f[3]}, {f[1], f[3], f[0], f[2]},
        {f[2], f[0], f[3], f[1]}, {f[3], f[1], f[2], f[0]}};
    return *std::min_element(std::begin(variants), std::end(variants));
  };

  std::vector<std::vector<std::vector<std::size_t>>> layouts;
  for (std::size_t a : units) {
    for (std::size_t b : units) {
      for (std::size_t c : units) {
        for (std::size_t d : units) {
          if (a == d || b == c) continue;
          const std::set<std::size_t> distinct{a, b, c, d};
          if (distinct.size() < 3) continue;
          const Flat f{a, b, c, d};
          if (f != orbit_min(f)) continue;
          layouts.push_back({{a, b}, {c, d}});
          if (layouts.size() >= max_layouts) return layouts;
        }
      }
    }
  }
  return layouts;
}

}  // namespace relu
