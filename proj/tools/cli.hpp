#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "oil/settings.hpp"

namespace oil::cli {

// Entry point shared by the oil binary and the tests. Returns the process exit
// code; diagnostics go to `err` as a single line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Every recognised setting with its default value.
Settings default_settings();

}  // namespace oil::cli
