#pragma once

#include <iosfwd>

#include "gmfc/config.hpp"

namespace gmfc {

/// Executes the configured experiment and writes its artifacts under
/// cfg.output_dir. Diagnostics and warnings go to `diag`. Returns 0 on
/// success, nonzero after printing what failed.
int run(const RunConfig& cfg, std::ostream& diag);

}  // namespace gmfc
