#include "relu/presets.hpp"

namespace relu {

namespace {

using nlohmann::json;

constexpr const char* kDefaultVerify =
    R"({"master_seed": 42, "num_samples": 64, "coeff_bound": 100, "rank_samples": 8})";

json preset_json(const std::string& name) {
  json j;
  if (name == "single-block-324") {
    j = json::parse(R"({
      "architecture": {"widths": [3, 2, 2], "has_bias": false},
      "blocks": [[[1, 0]]],
      "dataset": {"blocks": [[["3", "0", "-1"], ["1", "1", "-1"], ["3", "5", "5"], ["0", "4", "0"]]]}
    })");
  } else if (name == "shallow-4x4-two-block") {
    j = json::parse(R"({
      "architecture": {"widths": [4, 4, 4], "has_bias": false},
      "blocks": [[[1, 1, 1, 0]], [[0, 1, 1, 1]]]
    })");
  } else if (name == "shallow-434-dimdrop") {
    j = json::parse(R"({
      "architecture": {"widths": [3, 4, 3], "has_bias": false},
      "blocks": [[[1, 1, 1, 0]], [[0, 1, 1, 1]]]
    })");
  } else if (name == "shallow-4x3x4-cubics") {
    j = json::parse(R"({
      "architecture": {"widths": [4, 3, 4], "has_bias": false},
      "blocks": [[[1, 1, 0]], [[0, 1, 1]]]
    })");
  } else if (name == "shallow-434-three-block") {
    j = json::parse(R"({
      "architecture": {"widths": [3, 4, 3], "has_bias": false},
      "blocks": [[[1, 1, 0, 0]], [[1, 0, 1, 0]], [[1, 0, 0, 1]]],
      "search": {
        "coeff_bound": 1,
        "block_layouts": [{
          "lambdas": [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
          "layout": [[0, 1], [2, 1]]
        }]
      }
    })");
  } else if (name == "deep-2222-fig3") {
    j = json::parse(R"({
      "architecture": {"widths": [2, 2, 2, 2, 2], "has_bias": false},
      "blocks": [[[1, 1], [0, 1], [1, 1]], [[0, 1], [1, 1], [0, 1]]]
    })");
  } else if (name == "deep-33233-ex68") {
    j = json::parse(R"({
      "architecture": {"widths": [3, 3, 2, 3, 3], "has_bias": false},
      "blocks": [[[1, 1, 1], [1, 1], [1, 1, 1]], [[0, 1, 1], [1, 1], [1, 1, 1]]]
    })");
  } else if (name == "deep-tightness-remark") {
    j = json::parse(R"({
      "architecture": {"widths": [4, 3, 3, 3, 4], "has_bias": false},
      "blocks": [[[1, 1, 0], [0, 1, 1], [1, 1, 0]], [[0, 1, 1], [1, 1, 0], [0, 1, 1]]]
    })");
  } else if (name == "multiblock-455-dim40") {
    j = json::parse(R"({
      "architecture": {"widths": [4, 5, 5], "has_bias": false},
      "blocks": [[[1, 0, 0, 1, 1]], [[0, 1, 0, 1, 1]], [[0, 0, 1, 0, 1]]]
    })");
  } else if (name == "psi-example-51") {
    j = json::parse(R"({
      "architecture": {"widths": [2, 1, 2, 2], "has_bias": false},
      "blocks": [[[1], [1, 0]], [[1], [0, 1]]],
      "dataset": {"blocks": [[["1", "1"], ["2", "3"]], [["1", "2"], ["3", "1"]]]}
    })");
  } else {
    throw ConfigError("config error: unknown preset '" + name + "'");
  }
  if (!j.contains("verify")) j["verify"] = json::parse(kDefaultVerify);
  return j;
}

}  // namespace

std::vector<PresetEntry> list_presets() {
  return {
      {"single-block-324", "single activation block on a (3,2,2) network with four data "
                           "points: one column dependency and three quadratic minors"},
      {"shallow-4x4-two-block", "(4,4,4) two overlapping blocks: two determinant "
                                "constraints, sixteen cubic difference minors, dimension 26"},
      {"shallow-434-dimdrop", "(3,4,3) two blocks whose variety drops below the expected "
                              "dimension (17 vs 18)"},
      {"shallow-4x3x4-cubics", "(4,3,4) two blocks: 48 cubic constraints, dimension 21"},
      {"shallow-434-three-block", "(3,4,3) three blocks: sparse-combination search and a "
                                  "2x2 block-matrix family of quintic minors"},
      {"deep-2222-fig3", "depth-4 width-2 pair with an exclusive path network of rank 2; "
                         "only the per-block determinants survive"},
      {"deep-33233-ex68", "(3,3,2,3,3) pair: nine rank-1 difference constraints plus "
                          "concatenation minors, dimension 12"},
      {"deep-tightness-remark", "(4,3,3,3,4) pair where the difference-rank bound 4 is "
                                "not attained (generic rank 3)"},
      {"multiblock-455-dim40", "(4,5,5) three blocks at the expected dimension 40 with "
                               "five rank-8 Jacobian row groups"},
      {"psi-example-51", "depth-3 bottleneck pair with invertible data blocks: output "
                         "constraints via the data-inverse substitution"},
  };
}

AnalysisConfig preset_config(const std::string& name) {
  return config_from_json(preset_json(name));
}

}  // namespace relu
