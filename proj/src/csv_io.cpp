#include "fingerkin/csv_io.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <sstream>

#include "fingerkin/errors.hpp"

namespace fingerkin {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return out;
}

double cell_number(const std::string& cell, const std::string& origin, int lineno) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != cell.size() || cell.empty() || !std::isfinite(v))
    throw FingerError(ErrorCode::InvalidInput, fmt::format("{}:{}: '{}' is not a number", origin, lineno, cell));
  return v;
}

// Rows after the header, skipping blank lines. Returns the header cells.
std::vector<std::string> read_rows(const std::string& text, const std::string& origin,
                                   std::vector<std::pair<int, std::vector<std::string>>>& rows) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (header.empty()) {
      header = split(line);
      continue;
    }
    rows.emplace_back(lineno, split(line));
  }
  if (header.empty()) throw FingerError(ErrorCode::EmptyInput, origin + ": no header line");
  return header;
}

}  // namespace

std::string fmt6(double v) {
  std::string s = fmt::format("{:.6f}", v);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::vector<Vec3> parse_path_csv(const std::string& text, const std::string& origin) {
  std::vector<std::pair<int, std::vector<std::string>>> rows;
  const auto header = read_rows(text, origin, rows);
  if (header != std::vector<std::string>{"x_mm", "y_mm", "z_mm"})
    throw FingerError(ErrorCode::InvalidInput, origin + ": path header must be x_mm,y_mm,z_mm");
  std::vector<Vec3> out;
  for (const auto& [lineno, cells] : rows) {
    if (cells.size() != 3)
      throw FingerError(ErrorCode::InvalidInput, fmt::format("{}:{}: expected 3 columns", origin, lineno));
    out.emplace_back(cell_number(cells[0], origin, lineno), cell_number(cells[1], origin, lineno),
                     cell_number(cells[2], origin, lineno));
  }
  if (out.empty()) throw FingerError(ErrorCode::EmptyInput, origin + ": path has no rows");
  return out;
}

std::vector<Vec3> read_path_csv(const std::string& file) { return parse_path_csv(read_text(file), file); }

std::string path_csv(const std::vector<Vec3>& waypoints) {
  std::string out = "x_mm,y_mm,z_mm\n";
  for (const auto& w : waypoints) out += fmt6(w.x()) + "," + fmt6(w.y()) + "," + fmt6(w.z()) + "\n";
  return out;
}

TrialTrace parse_trace_csv(const std::string& text, double fps, const std::string& origin) {
  std::vector<std::pair<int, std::vector<std::string>>> rows;
  const auto header = read_rows(text, origin, rows);
  const std::vector<std::string> base{"t_s", "x_mm", "y_mm", "z_mm"};
  const bool with_sigma = header.size() == 5 && header[4] == "sigma_mm";
  if (!(header.size() == 4 || with_sigma) || !std::equal(base.begin(), base.end(), header.begin()))
    throw FingerError(ErrorCode::InvalidInput, origin + ": trace header must be t_s,x_mm,y_mm,z_mm[,sigma_mm]");
  TrialTrace tr;
  for (const auto& [lineno, cells] : rows) {
    if (cells.size() != header.size())
      throw FingerError(ErrorCode::InvalidInput,
                        fmt::format("{}:{}: expected {} columns", origin, lineno, header.size()));
    tr.t.push_back(cell_number(cells[0], origin, lineno));
    tr.x.emplace_back(cell_number(cells[1], origin, lineno), cell_number(cells[2], origin, lineno),
                      cell_number(cells[3], origin, lineno));
    if (with_sigma) {
      const double s = cell_number(cells[4], origin, lineno);
      if (!(s > 0)) throw FingerError(ErrorCode::NonPositiveSigma, fmt::format("{}:{}: sigma must be positive", origin, lineno));
      if (tr.sigma_mm > 0 && s != tr.sigma_mm)
        throw FingerError(ErrorCode::InvalidInput, fmt::format("{}:{}: sigma differs within one trial", origin, lineno));
      tr.sigma_mm = s;
    }
  }
  if (tr.empty()) throw FingerError(ErrorCode::LengthMismatch, origin + ": trace has no samples");
  if (fps > 0) {
    tr.fps = fps;
  } else if (tr.size() >= 2) {
    const double span = tr.t.back() - tr.t.front();
    if (!(span > 0)) throw FingerError(ErrorCode::InvalidInput, origin + ": time column does not increase");
    tr.fps = double(tr.size() - 1) / span;
  }
  return tr;
}

TrialTrace read_trace_csv(const std::string& file, double fps) { return parse_trace_csv(read_text(file), fps, file); }

std::string trace_csv(const TrialTrace& trace) {
  const bool with_sigma = trace.sigma_mm > 0;
  std::string out = with_sigma ? "t_s,x_mm,y_mm,z_mm,sigma_mm\n" : "t_s,x_mm,y_mm,z_mm\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out += fmt6(trace.t[k]) + "," + fmt6(trace.x[k].x()) + "," + fmt6(trace.x[k].y()) + "," + fmt6(trace.x[k].z());
    if (with_sigma) out += "," + fmt6(trace.sigma_mm);
    out += "\n";
  }
  return out;
}

void write_text(const std::string& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw FingerError(ErrorCode::Io, "cannot write '" + file + "'");
  out << text;
  if (!out) throw FingerError(ErrorCode::Io, "write failed for '" + file + "'");
}

std::string read_text(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FingerError(ErrorCode::Io, "cannot open '" + file + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fingerkin
