#pragma once

#include "linkadapt/harness.hpp"

#include <string>

namespace linkadapt {

// Flat `section.key = value` experiment description. Unknown keys raise an
// error naming the offender; the same keys are echoed back into CSV headers
// so a run can be reproduced from its output.
ExperimentConfig parse_experiment_config(const std::string& text);
ExperimentConfig load_experiment_config(const std::string& path);

} // namespace linkadapt
