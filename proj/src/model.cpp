#include "relu/model.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <set>
#include <stdexcept>

#include "relu/parallel.hpp"

namespace relu {

void Architecture::validate() const {
  if (widths.size() < 2) throw std::invalid_argument("architecture needs at least two layers");
  for (std::size_t w : widths) {
    if (w == 0) throw std::invalid_argument("layer widths must be positive");
  }
}

Pattern Pattern::all_ones(const Architecture& arch) {
  Pattern p;
  for (std::size_t l = 1; l < arch.widths.size() - 1; ++l) {
    p.layers.emplace_back(arch.widths[l], std::uint8_t{1});
  }
  return p;
}

void Pattern::validate(const Architecture& arch) const {
  if (layers.size() != arch.hidden_layers()) {
    throw std::invalid_argument("pattern layer count mismatch");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (layers[l].size() != arch.widths[l + 1]) {
      throw std::invalid_argument("pattern width mismatch at hidden layer");
    }
    for (std::uint8_t bit : layers[l]) {
      if (bit > 1) throw std::invalid_argument("pattern entries must be 0 or 1");
    }
  }
}

std::size_t Pattern::support(std::size_t layer_index) const {
  std::size_t count = 0;
  for (std::uint8_t bit : layers[layer_index]) count += bit;
  return count;
}

bool Pattern::any_layer_dead() const {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (support(l) == 0) return true;
  }
  return false;
}

Pattern pattern_and(const Pattern& a, const Pattern& b) {
  if (a.layers.size() != b.layers.size()) {
    throw std::invalid_argument("pattern layer count mismatch");
  }
  Pattern out = a;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    if (a.layers[l].size() != b.layers[l].size()) {
      throw std::invalid_argument("pattern width mismatch");
    }
    for (std::size_t i = 0; i < a.layers[l].size(); ++i) {
      out.layers[l][i] = a.layers[l][i] & b.layers[l][i];
    }
  }
  return out;
}

void BlockPattern::validate(const Architecture& arch) const {
  if (blocks.empty()) throw std::invalid_argument("block pattern needs at least one block");
  for (const Pattern& p : blocks) p.validate(arch);
  if (blocks.size() > 1) {
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      for (std::size_t j = i + 1; j < blocks.size(); ++j) {
        if (blocks[i] == blocks[j]) {
          throw std::invalid_argument("block patterns must be pairwise distinct");
        }
      }
    }
  }
  if (!multiplicities.empty() && multiplicities.size() != blocks.size()) {
    throw std::invalid_argument("multiplicity count mismatch");
  }
}

void ParamAssignment::validate(const Architecture& arch) const {
  if (weights.size() != arch.depth()) throw std::invalid_argument("weight layer count mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    if (weights[l].rows() != arch.widths[l + 1] || weights[l].cols() != arch.widths[l]) {
      throw std::invalid_argument("weight shape mismatch");
    }
  }
  if (arch.has_bias) {
    if (biases.size() != arch.depth()) throw std::invalid_argument("bias layer count mismatch");
    for (std::size_t l = 0; l < biases.size(); ++l) {
      if (biases[l].size() != arch.widths[l + 1]) {
        throw std::invalid_argument("bias shape mismatch");
      }
    }
  } else if (!biases.empty()) {
    throw std::invalid_argument("biases supplied to a bias-free architecture");
  }
}

EvalResult forward_eval(const Architecture& arch, const ParamAssignment& theta,
                        const std::vector<Rat>& x) {
  if (x.size() != arch.input_dim()) throw std::invalid_argument("input dimension mismatch");
  theta.validate(arch);

  EvalResult result;
  std::vector<Rat> h = x;
  for (std::size_t l = 0; l < arch.depth(); ++l) {
    std::vector<Rat> pre = theta.weights[l] * h;
    if (arch.has_bias) {
      for (std::size_t i = 0; i < pre.size(); ++i) pre[i] += theta.biases[l][i];
    }
    if (l + 1 == arch.depth()) {
      result.output = std::move(pre);
      break;
    }
    std::vector<std::uint8_t> bits(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) {
      if (pre[i] > 0) {
        bits[i] = 1;
      } else {
        bits[i] = 0;
        if (pre[i] == 0) result.on_boundary = true;
        pre[i] = 0;
      }
    }
    result.pattern.layers.push_back(std::move(bits));
    h = std::move(pre);
  }
  return result;
}

MaskedAffine masked_matrix(const Architecture& arch, const ParamAssignment& theta,
                           const Pattern& pattern) {
  pattern.validate(arch);
  theta.validate(arch);

  MaskedAffine out;
  // Left-fold the masked product; acc is the map input -> current layer.
  Mat acc = theta.weights[0];
  std::vector<Rat> bias_acc(arch.widths[1], Rat(0));
  if (arch.has_bias) bias_acc = theta.biases[0];
  for (std::size_t l = 1; l < arch.depth(); ++l) {
    const auto& mask = pattern.layers[l - 1];
    Mat masked(acc.rows(), acc.cols());
    for (std::size_t i = 0; i < acc.rows(); ++i) {
      if (!mask[i]) continue;
      for (std::size_t j = 0; j < acc.cols(); ++j) masked(i, j) = acc(i, j);
    }
    std::vector<Rat> masked_bias(bias_acc.size(), Rat(0));
    for (std::size_t i = 0; i < bias_acc.size(); ++i) {
      if (mask[i]) masked_bias[i] = bias_acc[i];
    }
    acc = theta.weights[l] * masked;
    bias_acc = theta.weights[l] * masked_bias;
    if (arch.has_bias) {
      for (std::size_t i = 0; i < bias_acc.size(); ++i) bias_acc[i] += theta.biases[l][i];
    }
  }
  out.matrix = std::move(acc);
  out.bias = arch.has_bias ? std::move(bias_acc)
                           : std::vector<Rat>(arch.output_dim(), Rat(0));
  return out;
}

void PathSet::validate(const Architecture& arch) const {
  for (const Path& p : paths) {
    if (p.size() != arch.hidden_layers()) throw std::invalid_argument("path length mismatch");
    for (std::size_t l = 0; l < p.size(); ++l) {
      if (p[l] >= arch.widths[l + 1]) throw std::invalid_argument("path index out of range");
    }
  }
  for (std::size_t i = 1; i < paths.size(); ++i) {
    if (!(paths[i - 1] < paths[i])) throw std::invalid_argument("paths must be sorted and unique");
  }
}

PathSet enumerate_active_paths(const Architecture& arch, const Pattern& pattern) {
  pattern.validate(arch);
  std::vector<std::vector<std::size_t>> active(arch.hidden_layers());
  for (std::size_t l = 0; l < arch.hidden_layers(); ++l) {
    for (std::size_t i = 0; i < pattern.layers[l].size(); ++i) {
      if (pattern.layers[l][i]) active[l].push_back(i);
    }
    if (active[l].empty()) return {};
  }
  PathSet out;
  Path current(arch.hidden_layers());
  // Odometer over the active index lists; lexicographic by construction.
  std::vector<std::size_t> cursor(arch.hidden_layers(), 0);
  while (true) {
    for (std::size_t l = 0; l < current.size(); ++l) current[l] = active[l][cursor[l]];
    out.paths.push_back(current);
    std::size_t l = current.size();
    while (l-- > 0) {
      if (++cursor[l] < active[l].size()) break;
      cursor[l] = 0;
      if (l == 0) return out;
    }
    if (current.empty()) return out;
  }
}

PathSet path_set_difference(const PathSet& a, const PathSet& b) {
  PathSet out;
  std::set_difference(a.paths.begin(), a.paths.end(), b.paths.begin(),
                      b.paths.end(), std::back_inserter(out.paths));
  return out;
}

Mat path_matrix(const Architecture& arch, const ParamAssignment& theta,
                const PathSet& paths) {
  paths.validate(arch);
  theta.validate(arch);
  const std::size_t L = arch.depth();
  Mat out(arch.output_dim(), arch.input_dim());
  for (const Path& p : paths.paths) {
    if (p.empty()) {  // depth-1 network: the single empty path carries W^(1)
      out = out + theta.weights[0];
      continue;
    }
    // Product of the interior weights along the path; the first and last
    // factors spread over the input and output indices.
    Rat interior = 1;
    for (std::size_t l = 1; l + 1 < L; ++l) {
      interior *= theta.weights[l](p[l], p[l - 1]);
    }
    if (interior == 0) continue;
    const std::size_t first = p.front(), last = p.back();
    for (std::size_t i = 0; i < arch.output_dim(); ++i) {
      const Rat left = theta.weights[L - 1](i, last) * interior;
      if (left == 0) continue;
      for (std::size_t j = 0; j < arch.input_dim(); ++j) {
        out(i, j) += left * theta.weights[0](first, j);
      }
    }
  }
  return out;
}

std::vector<std::size_t> effective_widths(const Architecture& arch,
                                          const Pattern& pattern) {
  pattern.validate(arch);
  std::vector<std::size_t> widths;
  widths.push_back(arch.input_dim());
  for (std::size_t l = 0; l < arch.hidden_layers(); ++l) {
    widths.push_back(pattern.support(l));
  }
  widths.push_back(arch.output_dim());
  return widths;
}

std::size_t generic_masked_rank(const Architecture& arch, const Pattern& pattern) {
  const auto widths = effective_widths(arch, pattern);
  return *std::min_element(widths.begin(), widths.end());
}

Mat block_output(const Architecture& arch, const ParamAssignment& theta,
                 const BlockPattern& blocks, const std::vector<Mat>& data_blocks) {
  blocks.validate(arch);
  if (data_blocks.size() != blocks.size()) {
    throw std::invalid_argument("data block count mismatch");
  }
  Mat out(arch.output_dim(), 0);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (data_blocks[i].rows() != arch.input_dim()) {
      throw std::invalid_argument("data block row count mismatch");
    }
    MaskedAffine affine = masked_matrix(arch, theta, blocks.blocks[i]);
    Mat y = affine.matrix * data_blocks[i];
    if (arch.has_bias) {
      for (std::size_t r = 0; r < y.rows(); ++r)
        for (std::size_t c = 0; c < y.cols(); ++c) y(r, c) += affine.bias[r];
    }
    out = out.cols() == 0 ? y : hconcat(out, y);
  }
  return out;
}

void SliceSpec::validate(const Architecture& arch) const {
  const std::size_t n0 = arch.input_dim();
  if (origin.size() != n0 || basis_u.size() != n0 || basis_v.size() != n0) {
    throw std::invalid_argument("slice vectors must match the input dimension");
  }
  if (width == 0 || height == 0) throw std::invalid_argument("grid must be non-empty");
  Mat basis(n0, 2);
  for (std::size_t i = 0; i < n0; ++i) {
    basis(i, 0) = basis_u[i];
    basis(i, 1) = basis_v[i];
  }
  if (rank_exact(basis) < std::min<std::size_t>(2, n0)) {
    throw std::invalid_argument("degenerate slice: basis vectors are dependent");
  }
}

std::string pattern_id(const Pattern& pattern) {
  // FNV-1a over the layer contents, with a separator byte between layers.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 1099511628211ULL;
  };
  for (const auto& layer : pattern.layers) {
    for (std::uint8_t bit : layer) mix(bit ? 1 : 0);
    mix(0xFF);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

RegionScanResult region_scan(const Architecture& arch, const ParamAssignment& theta,
                             const SliceSpec& slice) {
  slice.validate(arch);
  theta.validate(arch);

  RegionScanResult result;
  result.width = slice.width;
  result.height = slice.height;
  auto axis = [](const Rat& lo, const Rat& hi, std::size_t count) {
    std::vector<Rat> out(count);
    for (std::size_t i = 0; i < count; ++i) {
      out[i] = count == 1 ? lo : lo + (hi - lo) * Rat(static_cast<long>(i)) /
                                          Rat(static_cast<long>(count - 1));
    }
    return out;
  };
  result.u_coords = axis(slice.u_min, slice.u_max, slice.width);
  result.v_coords = axis(slice.v_min, slice.v_max, slice.height);
  result.ids.resize(slice.width * slice.height);

  const std::size_t n0 = arch.input_dim();
  parallel_for_index(slice.height, [&](std::size_t j) {
    for (std::size_t i = 0; i < slice.width; ++i) {
      std::vector<Rat> x(n0);
      for (std::size_t d = 0; d < n0; ++d) {
        x[d] = slice.origin[d] + result.u_coords[i] * slice.basis_u[d] +
               result.v_coords[j] * slice.basis_v[d];
      }
      EvalResult eval = forward_eval(arch, theta, x);
      result.ids[j * slice.width + i] =
          eval.on_boundary ? "boundary" : pattern_id(eval.pattern);
    }
  });

  std::set<std::string> distinct(result.ids.begin(), result.ids.end());
  distinct.erase("boundary");
  result.distinct_regions = distinct.size();
  return result;
}

void write_region_csv(const RegionScanResult& scan, std::ostream& out) {
  out << "u,v,pattern_id\n";
  for (std::size_t j = 0; j < scan.height; ++j) {
    for (std::size_t i = 0; i < scan.width; ++i) {
      out << rat_to_string(scan.u_coords[i]) << ',' << rat_to_string(scan.v_coords[j])
          << ',' << scan.ids[j * scan.width + i] << '\n';
    }
  }
}

}  // namespace relu
