#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace dse::plot {

// Static SVG line chart: one polyline per input CSV, legend from the file
// stems, x = t. log_y switches the value axis to log10 (non-positive
// values are dropped from the polyline).
void plot_csvs(const std::vector<std::filesystem::path>& csv_paths,
               const std::string& metric_column,
               const std::filesystem::path& out_path, bool log_y = false);

}  // namespace dse::plot
