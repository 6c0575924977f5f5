#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "apcloud/core.hpp"

namespace apc {

// Shortest round-trip-safe decimal form (17 significant digits).
std::string fmt17(double x);

// Opens for writing with LF endings; throws IoError on failure.
std::ofstream open_csv(const std::string& path);

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace apc
