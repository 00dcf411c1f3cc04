#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nladv/errors.hpp"

namespace nladv::csv {

/// Open a CSV for writing with full double precision; throws ConfigError on failure.
std::ofstream open_out(const std::filesystem::path& path);

/// Read a numeric CSV, skipping non-numeric (header) lines. Returns rows of doubles.
std::vector<std::vector<double>> read_rows(const std::filesystem::path& path);

} // namespace nladv::csv
