// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cyclosense/harness.hpp"

namespace cyclosense {

// Flat key-value experiment configs: one `key = value` per line, `#` starts
// a comment. Keys mirror ExperimentConfig field names. List values accept
// comma lists ("-20,-16,-12") and range sugar ("lo:step:hi", inclusive).

using KeyValues = std::map<std::string, std::string>;

KeyValues parse_config_text(std::string_view text);
KeyValues parse_config_file(const std::filesystem::path& path);

std::vector<double> parse_double_list(std::string_view text);

// Applies key-values on top of an existing config. Unknown keys are a
// ConfigError.
void apply_config(ExperimentConfig& config, const KeyValues& kv);

}  // namespace cyclosense
