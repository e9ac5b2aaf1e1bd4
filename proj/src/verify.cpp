#include "relu/verify.hpp"

#include <stdexcept>

#include "relu/parallel.hpp"

namespace relu {

void SampleSpec::validate() const {
  if (num_samples == 0) throw std::invalid_argument("need at least one sample");
  if (coeff_bound < 1) throw std::invalid_argument("coefficient bound must be positive");
}

nlohmann::json to_json(const Verdict& v) {
  nlohmann::json j;
  j["holds"] = v.holds;
  j["max_rank_observed"] = v.max_rank_observed;
  j["bound"] = v.bound;
  j["tight"] = v.tight;
  j["samples_used"] = v.samples_used;
  j["violations"] = v.violations;
  if (v.first_violation_seed) j["first_violation_seed"] = *v.first_violation_seed;
  return j;
}

namespace {

// SplitMix64: tiny, portable, and stateless across platforms, unlike the
// standard distributions.
struct SplitMix64 {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

// Unbiased draw from [0, range) by rejection.
std::uint64_t uniform_below(SplitMix64& rng, std::uint64_t range) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t draw;
  do {
    draw = rng.next();
  } while (draw >= limit);
  return draw % range;
}

long uniform_int(SplitMix64& rng, long bound) {
  const std::uint64_t range = 2 * static_cast<std::uint64_t>(bound) + 1;
  return static_cast<long>(uniform_below(rng, range)) - bound;
}

}  // namespace

ParamAssignment sample_params(const Architecture& arch, const SampleSpec& spec,
                              std::size_t index) {
  spec.validate();
  arch.validate();
  SplitMix64 rng{spec.master_seed ^ (0xD1B54A32D192ED03ULL * (index + 1))};
  // A few warm-up steps decorrelate nearby (seed, index) pairs.
  rng.next();
  rng.next();

  ParamAssignment theta;
  for (std::size_t l = 0; l < arch.depth(); ++l) {
    Mat w(arch.widths[l + 1], arch.widths[l]);
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < w.cols(); ++j)
        w(i, j) = uniform_int(rng, spec.coeff_bound);
    theta.weights.push_back(std::move(w));
  }
  if (arch.has_bias) {
    for (std::size_t l = 0; l < arch.depth(); ++l) {
      std::vector<Rat> b(arch.widths[l + 1]);
      for (Rat& entry : b) entry = uniform_int(rng, spec.coeff_bound);
      theta.biases.push_back(std::move(b));
    }
  }
  return theta;
}

namespace {

// Output of one block on its data columns, bias included.
Mat output_block(const Architecture& arch, const MaskedAffine& affine, const Mat& data) {
  Mat y = affine.matrix * data;
  if (arch.has_bias) {
    for (std::size_t r = 0; r < y.rows(); ++r)
      for (std::size_t c = 0; c < y.cols(); ++c) y(r, c) += affine.bias[r];
  }
  return y;
}

Mat block_value(const CellTerm& term, const EvalContext& ctx,
                const std::vector<MaskedAffine>& masked) {
  if (term.block >= masked.size()) throw std::invalid_argument("term block out of range");
  if (term.symbol == BlockSymbol::M) return masked[term.block].matrix;
  if (ctx.dataset == nullptr || term.block >= ctx.dataset->size()) {
    throw std::invalid_argument("constraint references output blocks but no dataset given");
  }
  return output_block(*ctx.arch, masked[term.block], (*ctx.dataset)[term.block]);
}

}  // namespace

Mat eval_constraint_matrix(const RankConstraint& c, const EvalContext& ctx,
                           const ParamAssignment& theta) {
  c.validate();
  const Architecture& arch = *ctx.arch;
  const BlockPattern& patterns = *ctx.patterns;
  std::vector<MaskedAffine> masked(patterns.size());
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    masked[i] = masked_matrix(arch, theta, patterns.blocks[i]);
  }

  Mat assembled(0, 0);
  for (const auto& grid_row : c.grid) {
    Mat row_block(grid_row.front().rows, 0);
    for (const Cell& cell : grid_row) {
      Mat value(cell.rows, cell.cols);
      switch (cell.kind) {
        case Cell::Kind::Zero:
          break;
        case Cell::Kind::Ones:
          value = Mat::ones(cell.rows, cell.cols);
          break;
        case Cell::Kind::Terms:
          for (const CellTerm& term : cell.terms) {
            Mat v = block_value(term, ctx, masked);
            if (term.transpose) v = transpose(v);
            if (term.coeff_left) v = *term.coeff_left * v;
            if (term.coeff_right) v = v * *term.coeff_right;
            if (v.rows() != cell.rows || v.cols() != cell.cols) {
              throw std::invalid_argument("cell term shape mismatch");
            }
            value = value + v;
          }
          break;
      }
      row_block = row_block.cols() == 0 ? value : hconcat(row_block, value);
    }
    assembled = assembled.rows() == 0 ? row_block : vconcat(assembled, row_block);
  }
  return assembled;
}

Verdict check_constraint(const RankConstraint& c, const EvalContext& ctx,
                         const SampleSpec& spec) {
  spec.validate();
  Verdict verdict;
  verdict.bound = c.bound;
  verdict.samples_used = spec.num_samples;

  std::vector<std::size_t> ranks(spec.num_samples);
  parallel_for_index(spec.num_samples, [&](std::size_t i) {
    ParamAssignment theta = sample_params(*ctx.arch, spec, i);
    ranks[i] = rank_exact(eval_constraint_matrix(c, ctx, theta));
  });
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    verdict.max_rank_observed = std::max(verdict.max_rank_observed, ranks[i]);
    if (ranks[i] > c.bound) {
      ++verdict.violations;
      if (!verdict.first_violation_seed) verdict.first_violation_seed = i;
    }
  }
  verdict.holds = verdict.violations == 0;
  verdict.tight = verdict.max_rank_observed == verdict.bound;
  return verdict;
}

std::size_t generic_rank_of(const Architecture& arch,
                            const std::function<Mat(const ParamAssignment&)>& matrix_fn,
                            const SampleSpec& spec) {
  spec.validate();
  std::vector<std::size_t> ranks(spec.num_samples);
  parallel_for_index(spec.num_samples, [&](std::size_t i) {
    ranks[i] = rank_exact(matrix_fn(sample_params(arch, spec, i)));
  });
  std::size_t best = 0;
  for (std::size_t r : ranks) best = std::max(best, r);
  return best;
}

std::size_t generic_rank(const RankConstraint& c, const EvalContext& ctx,
                         const SampleSpec& spec) {
  return generic_rank_of(
      *ctx.arch,
      [&](const ParamAssignment& theta) { return eval_constraint_matrix(c, ctx, theta); },
      spec);
}

std::size_t generic_path_rank(const Architecture& arch, const PathSet& paths,
                              const SampleSpec& spec) {
  return generic_rank_of(
      arch, [&](const ParamAssignment& theta) { return path_matrix(arch, theta, paths); },
      spec);
}

namespace {

std::vector<Mat> sample_outputs(const EvalContext& ctx, const ParamAssignment& theta) {
  if (ctx.dataset == nullptr) {
    throw std::invalid_argument("vanishing checks need a dataset");
  }
  std::vector<Mat> outputs;
  outputs.reserve(ctx.patterns->size());
  for (std::size_t i = 0; i < ctx.patterns->size(); ++i) {
    outputs.push_back(output_block(*ctx.arch,
                                   masked_matrix(*ctx.arch, theta, ctx.patterns->blocks[i]),
                                   (*ctx.dataset)[i]));
  }
  return outputs;
}

Verdict run_vanishing(const EvalContext& ctx, const SampleSpec& spec,
                      const std::function<bool(const std::vector<Mat>&)>& vanishes) {
  spec.validate();
  Verdict verdict;
  verdict.samples_used = spec.num_samples;
  std::vector<std::uint8_t> ok(spec.num_samples);
  parallel_for_index(spec.num_samples, [&](std::size_t i) {
    ok[i] = vanishes(sample_outputs(ctx, sample_params(*ctx.arch, spec, i))) ? 1 : 0;
  });
  for (std::size_t i = 0; i < ok.size(); ++i) {
    if (!ok[i]) {
      ++verdict.violations;
      if (!verdict.first_violation_seed) verdict.first_violation_seed = i;
    }
  }
  verdict.holds = verdict.violations == 0;
  verdict.tight = verdict.holds;
  return verdict;
}

}  // namespace

Verdict check_vanishing(const std::vector<LinearRelation>& relations,
                        const EvalContext& ctx, const SampleSpec& spec) {
  for (const LinearRelation& rel : relations) rel.validate();
  return run_vanishing(ctx, spec, [&](const std::vector<Mat>& outputs) {
    for (const LinearRelation& rel : relations) {
      const Mat& y = outputs[rel.block];
      if (rel.coeffs.size() != y.cols()) {
        throw std::invalid_argument("relation length does not match block width");
      }
      Rat acc = 0;
      for (std::size_t j = 0; j < rel.coeffs.size(); ++j) acc += rel.coeffs[j] * y(rel.row, j);
      if (acc != 0) return false;
    }
    return true;
  });
}

Verdict check_vanishing(const Poly& poly, const EvalContext& ctx,
                        const SampleSpec& spec) {
  return run_vanishing(ctx, spec, [&](const std::vector<Mat>& outputs) {
    return poly.evaluate(outputs) == 0;
  });
}

std::vector<std::vector<Poly>> symbolic_constraint_matrix(const RankConstraint& c) {
  c.validate();
  const std::size_t rows = c.total_rows();
  const std::size_t cols = c.total_cols();
  std::vector<std::vector<Poly>> out(rows, std::vector<Poly>(cols));

  std::size_t row_offset = 0;
  for (const auto& grid_row : c.grid) {
    std::size_t col_offset = 0;
    for (const Cell& cell : grid_row) {
      if (cell.kind == Cell::Kind::Ones) {
        for (std::size_t i = 0; i < cell.rows; ++i)
          for (std::size_t j = 0; j < cell.cols; ++j)
            out[row_offset + i][col_offset + j] = Poly::constant(1);
      } else if (cell.kind == Cell::Kind::Terms) {
        for (const CellTerm& term : cell.terms) {
          // entry (i, j) of L * S^(T) * R as a linear form in the S variables
          for (std::size_t i = 0; i < cell.rows; ++i) {
            for (std::size_t j = 0; j < cell.cols; ++j) {
              const std::size_t left_dim =
                  term.coeff_left ? term.coeff_left->cols() : cell.rows;
              const std::size_t right_dim =
                  term.coeff_right ? term.coeff_right->rows() : cell.cols;
              Poly entry;
              for (std::size_t a = 0; a < left_dim; ++a) {
                Rat lcoef = term.coeff_left ? (*term.coeff_left)(i, a)
                                            : Rat(a == i ? 1 : 0);
                if (lcoef == 0) continue;
                for (std::size_t b = 0; b < right_dim; ++b) {
                  Rat rcoef = term.coeff_right ? (*term.coeff_right)(b, j)
                                               : Rat(b == j ? 1 : 0);
                  if (rcoef == 0) continue;
                  VarRef var;
                  var.block = term.block;
                  var.symbol = term.symbol;
                  var.row = term.transpose ? b : a;
                  var.col = term.transpose ? a : b;
                  Poly v = Poly::variable(var);
                  v *= lcoef * rcoef;
                  entry += v;
                }
              }
              out[row_offset + i][col_offset + j] += entry;
            }
          }
        }
      }
      col_offset += cell.cols;
    }
    row_offset += grid_row.front().rows;
  }
  return out;
}

namespace {

Poly poly_det(const std::vector<std::vector<Poly>>& m,
              const std::vector<std::size_t>& rows,
              const std::vector<std::size_t>& cols) {
  const std::size_t n = rows.size();
  if (n == 1) return m[rows[0]][cols[0]];
  Poly acc;
  std::vector<std::size_t> sub_rows(rows.begin() + 1, rows.end());
  for (std::size_t j = 0; j < n; ++j) {
    if (m[rows[0]][cols[j]].is_zero()) continue;
    std::vector<std::size_t> sub_cols;
    sub_cols.reserve(n - 1);
    for (std::size_t c = 0; c < n; ++c)
      if (c != j) sub_cols.push_back(cols[c]);
    Poly term = m[rows[0]][cols[j]] * poly_det(m, sub_rows, sub_cols);
    if (j % 2 == 1) term *= Rat(-1);
    acc += term;
  }
  return acc;
}

}  // namespace

Poly expand_minor(const RankConstraint& c, const MinorIndex& index) {
  if (index.row_subset.size() != index.col_subset.size()) {
    throw std::invalid_argument("minor index is not square");
  }
  if (index.row_subset.size() > 5) {
    throw std::invalid_argument("symbolic expansion is limited to minors of size <= 5");
  }
  auto symbolic = symbolic_constraint_matrix(c);
  for (std::size_t r : index.row_subset)
    if (r >= symbolic.size()) throw std::invalid_argument("minor row out of bounds");
  for (std::size_t col : index.col_subset)
    if (col >= symbolic.front().size()) throw std::invalid_argument("minor column out of bounds");
  if (index.row_subset.empty()) return Poly::constant(1);
  return poly_det(symbolic, index.row_subset, index.col_subset);
}

}  // namespace relu
