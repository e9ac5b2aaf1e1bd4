#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "relu/linalg.hpp"

namespace relu {

// Layer widths n_0..n_L plus a bias flag. L = widths.size() - 1 affine layers,
// L - 1 hidden ReLU layers.
struct Architecture {
  std::vector<std::size_t> widths;
  bool has_bias = false;

  std::size_t depth() const { return widths.size() - 1; }  // L
  std::size_t hidden_layers() const { return depth() - 1; }
  std::size_t input_dim() const { return widths.front(); }
  std::size_t output_dim() const { return widths.back(); }
  // 1-based hidden layer index, matching the layer numbering of the weights.
  std::size_t hidden_width(std::size_t layer) const { return widths[layer]; }

  void validate() const;
};

// Per-hidden-layer binary activation vectors. layers[l] has length
// widths[l + 1] and entry 1 marks an active unit.
struct Pattern {
  std::vector<std::vector<std::uint8_t>> layers;

  static Pattern all_ones(const Architecture& arch);
  void validate(const Architecture& arch) const;
  std::size_t support(std::size_t layer_index) const;  // 0-based into layers
  bool any_layer_dead() const;

  friend bool operator==(const Pattern& a, const Pattern& b) = default;
};

Pattern pattern_and(const Pattern& a, const Pattern& b);

// Ordered list of k pairwise distinct patterns (the activation blocks).
struct BlockPattern {
  std::vector<Pattern> blocks;
  std::vector<std::size_t> multiplicities;  // optional per-block column counts

  void validate(const Architecture& arch) const;
  std::size_t size() const { return blocks.size(); }
};

// Exact-rational weights W^(l) (shape n_l x n_{l-1}) and optional biases.
struct ParamAssignment {
  std::vector<Mat> weights;
  std::vector<std::vector<Rat>> biases;

  void validate(const Architecture& arch) const;
};

struct EvalResult {
  std::vector<Rat> output;
  Pattern pattern;
  // True when some pre-activation is exactly zero; the pattern then sits on a
  // region boundary.
  bool on_boundary = false;
};

EvalResult forward_eval(const Architecture& arch, const ParamAssignment& theta,
                        const std::vector<Rat>& x);

struct MaskedAffine {
  Mat matrix;            // n_L x n_0
  std::vector<Rat> bias;  // n_L, zero when the architecture has no biases
};

// W^(L) diag(A^(L-1)) W^(L-1) ... diag(A^1) W^(1) and the accumulated bias.
MaskedAffine masked_matrix(const Architecture& arch, const ParamAssignment& theta,
                           const Pattern& pattern);

// A path picks one unit per hidden layer; indices are 0-based.
using Path = std::vector<std::size_t>;

struct PathSet {
  std::vector<Path> paths;  // lexicographically sorted, no duplicates

  void validate(const Architecture& arch) const;
};

// All paths active under the pattern, in lexicographic order.
PathSet enumerate_active_paths(const Architecture& arch, const Pattern& pattern);

PathSet path_set_difference(const PathSet& a, const PathSet& b);

// Path-sum matrix: entry (i, j) sums the weight products along each path from
// input j to output i. Equals masked_matrix when the set is the full active
// set of a pattern. Empty sets give the zero matrix.
Mat path_matrix(const Architecture& arch, const ParamAssignment& theta,
                const PathSet& paths);

// n_0, per-layer active counts, n_L.
std::vector<std::size_t> effective_widths(const Architecture& arch,
                                          const Pattern& pattern);

// Generic rank of the masked matrix: the minimum effective width.
std::size_t generic_masked_rank(const Architecture& arch, const Pattern& pattern);

// [M_1 X_1 + B_1 | ... | M_k X_k + B_k].
Mat block_output(const Architecture& arch, const ParamAssignment& theta,
                 const BlockPattern& blocks, const std::vector<Mat>& data_blocks);

// 2D affine slice of the input space, scanned on a width x height grid.
struct SliceSpec {
  std::vector<Rat> origin;
  std::vector<Rat> basis_u;
  std::vector<Rat> basis_v;
  Rat u_min = Rat(-1), u_max = Rat(1);
  Rat v_min = Rat(-1), v_max = Rat(1);
  std::size_t width = 64;
  std::size_t height = 64;

  void validate(const Architecture& arch) const;  // rejects degenerate slices
};

struct RegionScanResult {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Rat> u_coords;
  std::vector<Rat> v_coords;
  // ids[j * width + i] is the pattern id at (u_i, v_j); boundary points get
  // the distinct id "boundary".
  std::vector<std::string> ids;
  std::size_t distinct_regions = 0;  // excluding the boundary id
};

// Stable content hash of a pattern, independent of scan order.
std::string pattern_id(const Pattern& pattern);

RegionScanResult region_scan(const Architecture& arch, const ParamAssignment& theta,
                             const SliceSpec& slice);

// CSV with header "u,v,pattern_id", rationals as p/q strings, row-major rows.
void write_region_csv(const RegionScanResult& scan, std::ostream& out);

}  // namespace relu
