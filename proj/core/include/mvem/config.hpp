#ifndef MVEM_CONFIG_HPP_
#define MVEM_CONFIG_HPP_

#include <string>

#include "mvem/pipeline.hpp"

namespace mvem {

struct LoadedConfig {
  Scenario scenario;
  RunOptions run;
  std::string builtin;  // non-empty when the file delegates to a builtin
  // refinement for `convergence`: background cells per axis at level l = cells * 2^l
  bool refinable = false;
  int base_cells = 0;
};

// Parses a JSON run configuration (grammar in docs/config.md). Relative paths resolve
// against base_dir. Throws ConfigError with the offending key on bad input.
LoadedConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");
LoadedConfig load_config(const std::string& path);

// Same configuration with the box/grid background refined to `cells` per axis.
Scenario config_at_resolution(const std::string& json_text, const std::string& base_dir, int cells);

}  // namespace mvem

#endif
