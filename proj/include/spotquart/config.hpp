#pragma once

#include <string>

#include "spotquart/mc.hpp"

namespace spotquart {

struct EmitOptions {
  bool histogram = false;
  bool qq = false;
  bool samples = false;
};

// Fully validated run configuration: the Monte Carlo config plus the
// emission and ingestion options owned by the CLI layer.
struct RunConfig {
  McConfig mc;
  double alpha = 0.05;
  bool log_price = false;
  EmitOptions emit;
};

// Parse and validate the JSON configuration document. Unknown keys are
// rejected at every nesting level; violations name the offending field path.
// Defaults: kn = {theta 1, gamma 0.4}, substeps 10 for heston and 1
// otherwise, estimators = the full menu, alpha 0.05.
RunConfig parse_config(const std::string& text);

}  // namespace spotquart
