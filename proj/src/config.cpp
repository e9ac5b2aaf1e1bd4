#include "relu/config.hpp"

#include <fstream>
#include <sstream>

namespace relu {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config error at " + path + ": " + what);
}

const nlohmann::json& expect(const nlohmann::json& j, const std::string& key,
                             const std::string& path) {
  if (!j.is_object() || !j.contains(key)) fail(path + "." + key, "missing field");
  return j[key];
}

template <class T>
T number_at(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<T>();
}

Rat rational_at(const nlohmann::json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a rational as a \"p/q\" string");
  try {
    return rat_from_string(j.get<std::string>());
  } catch (const std::invalid_argument& error) {
    fail(path, error.what());
  }
}

std::vector<Rat> rational_vector(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of rationals");
  std::vector<Rat> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(rational_at(j[i], path + "[" + std::to_string(i) + "]"));
  }
  return out;
}

// Columns-as-lists layout: data[j] is the j-th column of the block.
Mat columns_matrix(const nlohmann::json& j, std::size_t input_dim,
                   const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of columns");
  Mat m(input_dim, j.size());
  for (std::size_t col = 0; col < j.size(); ++col) {
    const auto column = rational_vector(j[col], path + "[" + std::to_string(col) + "]");
    if (column.size() != input_dim) {
      fail(path + "[" + std::to_string(col) + "]",
           "column length must equal the input dimension");
    }
    for (std::size_t row = 0; row < input_dim; ++row) m(row, col) = column[row];
  }
  return m;
}

Mat rows_matrix(const nlohmann::json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Mat m(j.size(), cols);
  for (std::size_t row = 0; row < j.size(); ++row) {
    const auto entries = rational_vector(j[row], path + "[" + std::to_string(row) + "]");
    if (entries.size() != cols) fail(path, "ragged matrix rows");
    for (std::size_t col = 0; col < cols; ++col) m(row, col) = entries[col];
  }
  return m;
}

Pattern pattern_at(const nlohmann::json& j, const Architecture& arch,
                   const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of per-layer 0/1 vectors");
  Pattern p;
  for (std::size_t l = 0; l < j.size(); ++l) {
    const std::string layer_path = path + "[" + std::to_string(l) + "]";
    if (!j[l].is_array()) fail(layer_path, "expected a 0/1 vector");
    std::vector<std::uint8_t> bits;
    for (std::size_t i = 0; i < j[l].size(); ++i) {
      const auto& bit = j[l][i];
      if (!bit.is_number_integer() || (bit.get<int>() != 0 && bit.get<int>() != 1)) {
        fail(layer_path + "[" + std::to_string(i) + "]", "entries must be 0 or 1");
      }
      bits.push_back(static_cast<std::uint8_t>(bit.get<int>()));
    }
    p.layers.push_back(std::move(bits));
  }
  try {
    p.validate(arch);
  } catch (const std::invalid_argument& error) {
    fail(path, error.what());
  }
  return p;
}

}  // namespace

void AnalysisConfig::validate() const {
  try {
    architecture.validate();
    blocks.validate(architecture);
    if (params) params->validate(architecture);
    verify.validate();
  } catch (const std::invalid_argument& error) {
    throw ConfigError(std::string("config error: ") + error.what());
  }
  if (dataset && dataset->size() != blocks.size()) {
    throw ConfigError("config error at dataset.blocks: need one data block per pattern");
  }
  if (rank_samples == 0) throw ConfigError("config error at verify.rank_samples: must be positive");
}

AnalysisConfig config_from_json(const nlohmann::json& source) {
  if (!source.is_object()) throw ConfigError("config error: top level must be an object");
  AnalysisConfig config;
  config.echo = source;

  const auto& arch = expect(source, "architecture", "$");
  const auto& widths = expect(arch, "widths", "architecture");
  if (!widths.is_array() || widths.size() < 2) {
    fail("architecture.widths", "need at least two layer widths");
  }
  for (std::size_t i = 0; i < widths.size(); ++i) {
    const auto& w = widths[i];
    if (!w.is_number_integer() || w.get<long>() < 1) {
      fail("architecture.widths[" + std::to_string(i) + "]", "widths must be positive integers");
    }
    config.architecture.widths.push_back(w.get<std::size_t>());
  }
  if (arch.contains("has_bias")) {
    if (!arch["has_bias"].is_boolean()) fail("architecture.has_bias", "expected a boolean");
    config.architecture.has_bias = arch["has_bias"].get<bool>();
  }

  const auto& blocks = expect(source, "blocks", "$");
  if (!blocks.is_array() || blocks.empty()) fail("blocks", "need at least one pattern");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    config.blocks.blocks.push_back(
        pattern_at(blocks[i], config.architecture, "blocks[" + std::to_string(i) + "]"));
  }

  if (source.contains("dataset")) {
    const auto& data_blocks = expect(source["dataset"], "blocks", "dataset");
    if (!data_blocks.is_array()) fail("dataset.blocks", "expected an array of blocks");
    std::vector<Mat> dataset;
    for (std::size_t i = 0; i < data_blocks.size(); ++i) {
      dataset.push_back(columns_matrix(data_blocks[i], config.architecture.input_dim(),
                                       "dataset.blocks[" + std::to_string(i) + "]"));
    }
    config.dataset = std::move(dataset);
  }

  if (source.contains("params")) {
    const auto& params = source["params"];
    ParamAssignment theta;
    const auto& weights = expect(params, "weights", "params");
    if (!weights.is_array()) fail("params.weights", "expected an array of matrices");
    for (std::size_t l = 0; l < weights.size(); ++l) {
      theta.weights.push_back(rows_matrix(weights[l], "params.weights[" + std::to_string(l) + "]"));
    }
    if (params.contains("biases")) {
      const auto& biases = params["biases"];
      if (!biases.is_array()) fail("params.biases", "expected an array of vectors");
      for (std::size_t l = 0; l < biases.size(); ++l) {
        theta.biases.push_back(
            rational_vector(biases[l], "params.biases[" + std::to_string(l) + "]"));
      }
    }
    config.params = std::move(theta);
  }

  if (source.contains("verify")) {
    const auto& verify = source["verify"];
    if (verify.contains("master_seed")) {
      config.verify.master_seed = number_at<std::uint64_t>(verify["master_seed"], "verify.master_seed");
    }
    if (verify.contains("num_samples")) {
      config.verify.num_samples = number_at<std::size_t>(verify["num_samples"], "verify.num_samples");
    }
    if (verify.contains("coeff_bound")) {
      config.verify.coeff_bound = number_at<long>(verify["coeff_bound"], "verify.coeff_bound");
    }
    if (verify.contains("rank_samples")) {
      config.rank_samples = number_at<std::size_t>(verify["rank_samples"], "verify.rank_samples");
    }
  }

  if (source.contains("search")) {
    const auto& search = source["search"];
    if (search.contains("coeff_bound")) {
      config.search.coeff_bound = number_at<long>(search["coeff_bound"], "search.coeff_bound");
    }
    if (search.contains("max_support")) {
      config.search.max_support = number_at<std::size_t>(search["max_support"], "search.max_support");
    }
    if (search.contains("enumerate_layouts")) {
      if (!search["enumerate_layouts"].is_boolean()) {
        fail("search.enumerate_layouts", "expected a boolean");
      }
      config.search.enumerate_layouts = search["enumerate_layouts"].get<bool>();
    }
    if (search.contains("max_layouts")) {
      config.search.max_layouts = number_at<std::size_t>(search["max_layouts"], "search.max_layouts");
    }
    if (search.contains("block_layouts")) {
      const auto& layouts = search["block_layouts"];
      if (!layouts.is_array()) fail("search.block_layouts", "expected an array");
      for (std::size_t i = 0; i < layouts.size(); ++i) {
        const std::string path = "search.block_layouts[" + std::to_string(i) + "]";
        LayoutSpec spec;
        const auto& lambdas = expect(layouts[i], "lambdas", path);
        for (std::size_t a = 0; a < lambdas.size(); ++a) {
          std::vector<long> lambda;
          for (std::size_t b = 0; b < lambdas[a].size(); ++b) {
            lambda.push_back(number_at<long>(
                lambdas[a][b], path + ".lambdas[" + std::to_string(a) + "][" + std::to_string(b) + "]"));
          }
          spec.lambdas.push_back(std::move(lambda));
        }
        const auto& layout = expect(layouts[i], "layout", path);
        for (std::size_t a = 0; a < layout.size(); ++a) {
          std::vector<std::size_t> row;
          for (std::size_t b = 0; b < layout[a].size(); ++b) {
            row.push_back(number_at<std::size_t>(
                layout[a][b], path + ".layout[" + std::to_string(a) + "][" + std::to_string(b) + "]"));
          }
          spec.layout.push_back(std::move(row));
        }
        config.search.block_layouts.push_back(std::move(spec));
      }
    }
  }

  if (source.contains("limits") && source["limits"].contains("max_minors")) {
    config.limits.max_minors =
        number_at<std::size_t>(source["limits"]["max_minors"], "limits.max_minors");
  }

  if (source.contains("regions")) {
    const auto& regions = source["regions"];
    SliceSpec slice;
    slice.origin = rational_vector(expect(regions, "origin", "regions"), "regions.origin");
    slice.basis_u = rational_vector(expect(regions, "basis_u", "regions"), "regions.basis_u");
    slice.basis_v = rational_vector(expect(regions, "basis_v", "regions"), "regions.basis_v");
    if (regions.contains("u_min")) slice.u_min = rational_at(regions["u_min"], "regions.u_min");
    if (regions.contains("u_max")) slice.u_max = rational_at(regions["u_max"], "regions.u_max");
    if (regions.contains("v_min")) slice.v_min = rational_at(regions["v_min"], "regions.v_min");
    if (regions.contains("v_max")) slice.v_max = rational_at(regions["v_max"], "regions.v_max");
    if (regions.contains("width")) slice.width = number_at<std::size_t>(regions["width"], "regions.width");
    if (regions.contains("height")) slice.height = number_at<std::size_t>(regions["height"], "regions.height");
    try {
      slice.validate(config.architecture);
    } catch (const std::invalid_argument& error) {
      fail("regions", error.what());
    }
    config.regions = std::move(slice);
  }

  config.validate();
  return config;
}

AnalysisConfig config_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config error: cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& error) {
    throw ConfigError(std::string("config error: invalid JSON: ") + error.what());
  }
  return config_from_json(j);
}

}  // namespace relu
