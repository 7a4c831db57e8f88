#pragma once

#include <string>
#include <vector>

#include "fingerkin/planners.hpp"
#include "fingerkin/plant.hpp"

namespace fingerkin {

/// Waypoints from `x_mm,y_mm,z_mm` CSV text.
std::vector<Vec3> parse_path_csv(const std::string& text, const std::string& origin = "<string>");
std::vector<Vec3> read_path_csv(const std::string& file);
std::string path_csv(const std::vector<Vec3>& waypoints);

/// `t_s,x_mm,y_mm,z_mm[,sigma_mm]`. fps comes from the sample spacing unless
/// given; a sigma column must hold one value for the whole trial.
TrialTrace parse_trace_csv(const std::string& text, double fps = 0.0, const std::string& origin = "<string>");
TrialTrace read_trace_csv(const std::string& file, double fps = 0.0);
std::string trace_csv(const TrialTrace& trace);

void write_text(const std::string& file, const std::string& text);
std::string read_text(const std::string& file);

/// Fixed six-decimal formatting used by every emitted CSV.
std::string fmt6(double v);

}  // namespace fingerkin
