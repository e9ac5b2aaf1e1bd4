#include "relu/constraints.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace relu {

Cell Cell::zero(std::size_t rows, std::size_t cols) {
  Cell c;
  c.kind = Kind::Zero;
  c.rows = rows;
  c.cols = cols;
  return c;
}

Cell Cell::all_ones(std::size_t rows, std::size_t cols) {
  Cell c;
  c.kind = Kind::Ones;
  c.rows = rows;
  c.cols = cols;
  return c;
}

Cell Cell::of_terms(std::size_t rows, std::size_t cols, std::vector<CellTerm> terms) {
  Cell c;
  c.kind = Kind::Terms;
  c.rows = rows;
  c.cols = cols;
  c.terms = std::move(terms);
  return c;
}

std::size_t RankConstraint::total_rows() const {
  std::size_t total = 0;
  for (const auto& row : grid) total += row.front().rows;
  return total;
}

std::size_t RankConstraint::total_cols() const {
  std::size_t total = 0;
  for (const Cell& cell : grid.front()) total += cell.cols;
  return total;
}

Int RankConstraint::minor_count() const {
  return binomial(total_rows(), minor_size()) * binomial(total_cols(), minor_size());
}

void RankConstraint::validate() const {
  if (grid.empty() || grid.front().empty()) {
    throw std::invalid_argument("constraint grid is empty");
  }
  const std::size_t beta = grid.front().size();
  for (const auto& row : grid) {
    if (row.size() != beta) throw std::invalid_argument("ragged constraint grid");
    for (const Cell& cell : row) {
      if (cell.rows != row.front().rows) {
        throw std::invalid_argument("grid row has inconsistent cell heights");
      }
    }
  }
  for (std::size_t col = 0; col < beta; ++col) {
    for (const auto& row : grid) {
      if (row[col].cols != grid.front()[col].cols) {
        throw std::invalid_argument("grid column has inconsistent cell widths");
      }
    }
  }
  if (bound > std::min(total_rows(), total_cols())) {
    throw std::invalid_argument("rank bound exceeds the matrix shape");
  }
}

RankConstraint single_cell_constraint(Cell cell, std::size_t bound, std::string label) {
  RankConstraint c;
  c.grid = {{std::move(cell)}};
  c.bound = bound;
  c.label = std::move(label);
  c.validate();
  return c;
}

RankConstraint with_symbol(const RankConstraint& c, BlockSymbol symbol) {
  RankConstraint out = c;
  for (auto& row : out.grid) {
    for (Cell& cell : row) {
      for (CellTerm& term : cell.terms) term.symbol = symbol;
    }
  }
  return out;
}

void LinearRelation::validate() const {
  for (const Rat& c : coeffs) {
    if (c != 0) return;
  }
  throw std::invalid_argument("linear relation is identically zero");
}

Poly Poly::constant(const Rat& value) {
  Poly p;
  if (value != 0) p.terms_[{}] = value;
  return p;
}

Poly Poly::variable(const VarRef& var) {
  Poly p;
  p.terms_[{var}] = 1;
  return p;
}

void Poly::prune(const Monomial& key) {
  auto it = terms_.find(key);
  if (it != terms_.end() && it->second == 0) terms_.erase(it);
}

Poly& Poly::operator+=(const Poly& other) {
  for (const auto& [mono, coeff] : other.terms_) {
    terms_[mono] += coeff;
    prune(mono);
  }
  return *this;
}

Poly& Poly::operator-=(const Poly& other) {
  for (const auto& [mono, coeff] : other.terms_) {
    terms_[mono] -= coeff;
    prune(mono);
  }
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Poly::Monomial mono;
      mono.reserve(ma.size() + mb.size());
      std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(mono));
      out.terms_[mono] += ca * cb;
      out.prune(mono);
    }
  }
  return out;
}

Poly& Poly::operator*=(const Rat& scale) {
  if (scale == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [mono, coeff] : terms_) coeff *= scale;
  return *this;
}

Rat Poly::evaluate(const std::vector<Mat>& values) const {
  Rat acc = 0;
  for (const auto& [mono, coeff] : terms_) {
    Rat term = coeff;
    for (const VarRef& var : mono) {
      if (var.block >= values.size()) throw std::invalid_argument("variable block out of range");
      term *= values[var.block](var.row, var.col);
    }
    acc += term;
  }
  return acc;
}

bool Poly::proportional(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return false;
  if (a.terms_.size() != b.terms_.size()) return false;
  Rat ratio = 0;
  auto ia = a.terms_.begin();
  auto ib = b.terms_.begin();
  for (; ia != a.terms_.end(); ++ia, ++ib) {
    if (ia->first != ib->first) return false;
    Rat r = ia->second / ib->second;
    if (ratio == 0) {
      ratio = r;
    } else if (r != ratio) {
      return false;
    }
  }
  return true;
}

std::string Poly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [mono, coeff] : terms_) {
    Rat abs_coeff = coeff < 0 ? Rat(-coeff) : coeff;
    if (first) {
      if (coeff < 0) out << "-";
      first = false;
    } else {
      out << (coeff < 0 ? " - " : " + ");
    }
    const bool unit = abs_coeff == 1 && !mono.empty();
    if (!unit) out << rat_to_string(abs_coeff);
    for (std::size_t i = 0; i < mono.size(); ++i) {
      if (i > 0 || !unit) out << "*";
      const VarRef& v = mono[i];
      out << (v.symbol == BlockSymbol::M ? 'm' : 'y') << (v.block + 1) << '['
          << (v.row + 1) << ',' << (v.col + 1) << ']';
    }
  }
  return out.str();
}

namespace {

nlohmann::json int_to_json(const Int& value) { return value.get_str(); }

const char* symbol_name(BlockSymbol s) { return s == BlockSymbol::M ? "M" : "Y"; }

BlockSymbol symbol_from_name(const std::string& name) {
  if (name == "M") return BlockSymbol::M;
  if (name == "Y") return BlockSymbol::Y;
  throw std::invalid_argument("unknown block symbol: " + name);
}

}  // namespace

nlohmann::json to_json(const Mat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(rat_to_string(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("matrix JSON must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows == 0 ? 0 : j.front().size();
  Mat m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (j[i].size() != cols) throw std::invalid_argument("ragged matrix JSON");
    for (std::size_t c = 0; c < cols; ++c) {
      m(i, c) = rat_from_string(j[i][c].get<std::string>());
    }
  }
  return m;
}

nlohmann::json to_json(const CellTerm& term) {
  nlohmann::json j;
  j["block"] = term.block;
  j["symbol"] = symbol_name(term.symbol);
  j["transpose"] = term.transpose;
  if (term.coeff_left) j["coeff_left"] = to_json(*term.coeff_left);
  if (term.coeff_right) j["coeff_right"] = to_json(*term.coeff_right);
  return j;
}

nlohmann::json to_json(const Cell& cell) {
  nlohmann::json j;
  j["rows"] = cell.rows;
  j["cols"] = cell.cols;
  switch (cell.kind) {
    case Cell::Kind::Zero:
      j["kind"] = "zero";
      break;
    case Cell::Kind::Ones:
      j["kind"] = "ones";
      break;
    case Cell::Kind::Terms: {
      j["kind"] = "terms";
      nlohmann::json terms = nlohmann::json::array();
      for (const CellTerm& t : cell.terms) terms.push_back(to_json(t));
      j["terms"] = std::move(terms);
      break;
    }
  }
  return j;
}

nlohmann::json to_json(const RankConstraint& c) {
  nlohmann::json j;
  j["label"] = c.label;
  j["bound"] = c.bound;
  j["minor_size"] = c.minor_size();
  j["rows"] = c.total_rows();
  j["cols"] = c.total_cols();
  j["minor_count"] = int_to_json(c.minor_count());
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& row : c.grid) {
    nlohmann::json jrow = nlohmann::json::array();
    for (const Cell& cell : row) jrow.push_back(to_json(cell));
    grid.push_back(std::move(jrow));
  }
  j["grid"] = std::move(grid);
  return j;
}

nlohmann::json to_json(const ConstraintInfo& info) {
  nlohmann::json j = to_json(info.constraint);
  j["redundant"] = info.redundant;
  j["vacuous"] = info.constraint.vacuous();
  j["emitted"] = info.emitted();
  if (info.generator_count) j["generator_count"] = int_to_json(*info.generator_count);
  for (const auto& [key, value] : info.extra) j[key] = int_to_json(value);
  return j;
}

nlohmann::json to_json(const LinearRelation& rel) {
  nlohmann::json j;
  j["block"] = rel.block;
  j["row"] = rel.row;
  nlohmann::json coeffs = nlohmann::json::array();
  for (const Rat& c : rel.coeffs) coeffs.push_back(rat_to_string(c));
  j["coeffs"] = std::move(coeffs);
  return j;
}

nlohmann::json to_json(const Poly& p) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [mono, coeff] : p.terms()) {
    nlohmann::json term;
    term["coeff"] = rat_to_string(coeff);
    nlohmann::json vars = nlohmann::json::array();
    for (const VarRef& v : mono) {
      vars.push_back({{"block", v.block},
                      {"symbol", symbol_name(v.symbol)},
                      {"row", v.row},
                      {"col", v.col}});
    }
    term["vars"] = std::move(vars);
    terms.push_back(std::move(term));
  }
  nlohmann::json j;
  j["terms"] = std::move(terms);
  j["display"] = p.to_string();
  return j;
}

nlohmann::json to_json(const TwoBlockStats& stats) {
  nlohmann::json j;
  j["r1"] = stats.r1;
  j["r2"] = stats.r2;
  j["s"] = stats.s;
  j["t"] = stats.t;
  j["r_a"] = stats.r_a;
  j["r_b"] = stats.r_b;
  j["n_min"] = stats.n_min;
  j["lmin_lo"] = stats.lmin_lo;
  j["lmin_hi"] = stats.lmin_hi;
  j["gate3a"] = stats.gate3a;
  j["gate3b"] = stats.gate3b;
  return j;
}

RankConstraint rank_constraint_from_json(const nlohmann::json& j) {
  RankConstraint c;
  c.label = j.at("label").get<std::string>();
  c.bound = j.at("bound").get<std::size_t>();
  for (const auto& jrow : j.at("grid")) {
    std::vector<Cell> row;
    for (const auto& jcell : jrow) {
      Cell cell;
      cell.rows = jcell.at("rows").get<std::size_t>();
      cell.cols = jcell.at("cols").get<std::size_t>();
      const std::string kind = jcell.at("kind").get<std::string>();
      if (kind == "zero") {
        cell.kind = Cell::Kind::Zero;
      } else if (kind == "ones") {
        cell.kind = Cell::Kind::Ones;
      } else if (kind == "terms") {
        cell.kind = Cell::Kind::Terms;
        for (const auto& jterm : jcell.at("terms")) {
          CellTerm term;
          term.block = jterm.at("block").get<std::size_t>();
          term.symbol = symbol_from_name(jterm.at("symbol").get<std::string>());
          term.transpose = jterm.at("transpose").get<bool>();
          if (jterm.contains("coeff_left")) term.coeff_left = mat_from_json(jterm["coeff_left"]);
          if (jterm.contains("coeff_right")) term.coeff_right = mat_from_json(jterm["coeff_right"]);
          cell.terms.push_back(std::move(term));
        }
      } else {
        throw std::invalid_argument("unknown cell kind: " + kind);
      }
      row.push_back(std::move(cell));
    }
    c.grid.push_back(std::move(row));
  }
  c.validate();
  return c;
}

}  // namespace relu
