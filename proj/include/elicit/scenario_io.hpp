#pragma once

#include <filesystem>
#include <string>

#include "elicit/scenario.hpp"

namespace elicit {

// Parses and fully validates a scenario file; every validation error names
// the offending path (e.g. "experts[1].technologies[0].support").
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text, const std::string& origin);

}  // namespace elicit
