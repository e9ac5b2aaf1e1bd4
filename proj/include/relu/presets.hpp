#pragma once

#include <string>
#include <vector>

#include "relu/config.hpp"

namespace relu {

struct PresetEntry {
  std::string name;
  std::string description;
};

// Catalog of built-in configurations reproducing the worked examples.
std::vector<PresetEntry> list_presets();

// Throws ConfigError for unknown names.
AnalysisConfig preset_config(const std::string& name);

}  // namespace relu
