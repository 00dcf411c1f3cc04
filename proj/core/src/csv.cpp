#include "nladv/csv.hpp"

#include <algorithm>
#include <sstream>

namespace nladv::csv {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path.string());
    out.precision(17);
    return out;
}

std::vector<std::vector<double>> read_rows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open: " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream s(line);
        std::vector<double> row;
        double v;
        while (s >> v) row.push_back(v);
        if (!row.empty() && s.eof()) rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace nladv::csv
