#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "relu/linalg.hpp"

namespace relu {

// Symbols a constraint can reference: the per-block masked matrices M_i or
// the per-block output matrices Y_i (dataset-specific).
enum class BlockSymbol { M, Y };

// One additive term of a cell: coeff_left * S^(T) * coeff_right where S is the
// referenced block symbol. Absent coefficients act as identities; scalar
// multiples are scalar matrices. The right coefficient carries column
// selections and data-inverse substitutions without expanding to monomials.
struct CellTerm {
  std::size_t block = 0;
  BlockSymbol symbol = BlockSymbol::M;
  bool transpose = false;
  std::optional<Mat> coeff_left;
  std::optional<Mat> coeff_right;

  friend bool operator==(const CellTerm& a, const CellTerm& b) = default;
};

struct Cell {
  enum class Kind { Zero, Ones, Terms };
  Kind kind = Kind::Zero;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<CellTerm> terms;

  static Cell zero(std::size_t rows, std::size_t cols);
  static Cell all_ones(std::size_t rows, std::size_t cols);
  static Cell of_terms(std::size_t rows, std::size_t cols, std::vector<CellTerm> terms);

  friend bool operator==(const Cell& a, const Cell& b) = default;
};

// "rank(expression) <= bound": all (bound+1)-minors of the assembled block
// matrix vanish on the parametrization.
struct RankConstraint {
  std::vector<std::vector<Cell>> grid;  // alpha x beta, shape-consistent
  std::size_t bound = 0;
  std::string label;

  std::size_t total_rows() const;
  std::size_t total_cols() const;
  std::size_t minor_size() const { return bound + 1; }
  // Full binomial count of minors of the expression at the bound.
  Int minor_count() const;
  bool vacuous() const { return minor_count() == 0; }
  void validate() const;

  friend bool operator==(const RankConstraint& a, const RankConstraint& b) = default;
};

RankConstraint single_cell_constraint(Cell cell, std::size_t bound, std::string label);

// Replaces every term's symbol kind (used when re-interpreting transformed
// constraints for round trips).
RankConstraint with_symbol(const RankConstraint& c, BlockSymbol symbol);

// A constraint together with its reporting metadata.
struct ConstraintInfo {
  RankConstraint constraint;
  // Generating-set size when it differs from the raw minor count (the
  // ones-augmented affine families).
  std::optional<Int> generator_count;
  bool redundant = false;
  // Small named integers surfaced in reports (supports, independence
  // bookkeeping for concatenation families, ...). Keys are sorted on output.
  std::map<std::string, Int> extra;

  Int emitted_count() const { return constraint.minor_count(); }
  bool emitted() const { return !redundant && !constraint.vacuous(); }
};

// One linear output invariant: sum_j coeffs[j] * Y_block[row][j] = 0.
struct LinearRelation {
  std::size_t block = 0;
  std::size_t row = 0;
  std::vector<Rat> coeffs;

  void validate() const;  // rejects the identically-zero relation
  friend bool operator==(const LinearRelation& a, const LinearRelation& b) = default;
};

// Variables of the output polynomial ring: one per block-matrix entry.
struct VarRef {
  std::size_t block = 0;
  BlockSymbol symbol = BlockSymbol::M;
  std::size_t row = 0;
  std::size_t col = 0;

  friend auto operator<=>(const VarRef& a, const VarRef& b) = default;
};

// Sparse multivariate polynomial over block-entry variables. Monomials are
// sorted variable lists (repeats allowed), so the term map is canonical.
class Poly {
 public:
  using Monomial = std::vector<VarRef>;

  Poly() = default;
  static Poly constant(const Rat& value);
  static Poly variable(const VarRef& var);

  bool is_zero() const { return terms_.empty(); }
  const std::map<Monomial, Rat>& terms() const { return terms_; }

  Poly& operator+=(const Poly& other);
  Poly& operator-=(const Poly& other);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly& operator*=(const Rat& scale);

  // Exact evaluation; values[i] supplies the matrix for block i.
  Rat evaluate(const std::vector<Mat>& values) const;

  // True when a != 0, b != 0 and a == c*b for a nonzero rational c.
  static bool proportional(const Poly& a, const Poly& b);

  // Deterministic display, e.g. "7*y1[2,1]*y2[2,1] - 2*y1[2,2]*y2[2,1]".
  std::string to_string() const;

 private:
  std::map<Monomial, Rat> terms_;
  void prune(const Monomial& key);
};

// Stats shared by the two-block constraint families.
struct TwoBlockStats {
  std::size_t r1 = 0, r2 = 0;  // generic block ranks
  std::size_t s = 0;           // rank of the shared (AND) sub-network
  std::size_t r_a = 0, r_b = 0;  // generic ranks of the exclusive path networks
  std::size_t t = 0;             // difference-rank bound
  std::size_t n_min = 0;         // smallest hidden width
  std::size_t lmin_lo = 0, lmin_hi = 0;  // 1-based extremes of the argmin set
  bool gate3a = false, gate3b = false;   // concatenation family gates
};

nlohmann::json to_json(const Mat& m);
Mat mat_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CellTerm& term);
nlohmann::json to_json(const Cell& cell);
nlohmann::json to_json(const RankConstraint& c);
nlohmann::json to_json(const ConstraintInfo& info);
nlohmann::json to_json(const LinearRelation& rel);
nlohmann::json to_json(const Poly& p);
nlohmann::json to_json(const TwoBlockStats& stats);
RankConstraint rank_constraint_from_json(const nlohmann::json& j);

}  // namespace relu
