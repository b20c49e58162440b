#include "rfol/trace.hpp"

#include "rfol/error.hpp"
#include "rfol/ast.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

namespace rfol {

Trace::Trace(std::vector<double> times,
             std::vector<std::pair<std::string, std::vector<double>>> columns)
    : times_(std::move(times)) {
  if (times_.size() < 2) throw Error(ErrorCode::TraceFormat, "a trace needs at least two samples");
  if (times_.front() != 0.0) throw Error(ErrorCode::TraceFormat, "first timestamp must be 0");
  for (std::size_t i = 0; i < times_.size(); ++i) {
    if (!std::isfinite(times_[i])) throw Error(ErrorCode::TraceFormat, "non-finite timestamp");
    if (i > 0 && !(times_[i] > times_[i - 1])) {
      throw Error(ErrorCode::TraceFormat,
                  "timestamps must be strictly increasing (row " + std::to_string(i) + ")");
    }
  }
  std::set<std::string> seen;
  for (auto& [name, values] : columns) {
    if (!seen.insert(name).second) throw Error(ErrorCode::TraceFormat, "duplicate signal " + name);
    if (values.size() != times_.size()) {
      throw Error(ErrorCode::TraceFormat, "signal " + name + " has wrong sample count");
    }
    for (double v : values) {
      if (!std::isfinite(v)) throw Error(ErrorCode::TraceFormat, "non-finite value in " + name);
    }
    names_.push_back(name);
    columns_.push_back(std::move(values));
  }
}

std::optional<std::size_t> Trace::signal_index(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

double Trace::sample(std::string_view signal, double t, Interpolation interpolation) const {
  auto idx = signal_index(signal);
  if (!idx) {
    throw Error(ErrorCode::UndefinedSignalValue, "signal " + std::string(signal) + " not in trace");
  }
  return sample(*idx, t, interpolation);
}

double Trace::sample(std::size_t column, double t, Interpolation interpolation) const {
  if (!(t >= 0.0 && t <= domain_end())) {
    throw Error(ErrorCode::UndefinedSignalValue,
                names_[column] + "(" + format_number(t) + ") lies outside [0, " +
                    format_number(domain_end()) + "]");
  }
  const auto& v = columns_[column];
  auto hi = std::lower_bound(times_.begin(), times_.end(), t);
  auto i = static_cast<std::size_t>(hi - times_.begin());
  if (times_[i] == t) return v[i];
  if (interpolation == Interpolation::HoldPrevious) return v[i - 1];
  return lerp_at(times_[i - 1], v[i - 1], times_[i], v[i], t);
}

namespace {

double interpolate_series(const std::vector<std::pair<double, double>>& pts, double t,
                          Interpolation interpolation) {
  auto it = std::lower_bound(pts.begin(), pts.end(), t,
                             [](const auto& p, double x) { return p.first < x; });
  if (it != pts.end() && it->first == t) return it->second;
  if (it == pts.begin()) return pts.front().second;
  if (it == pts.end()) return pts.back().second;
  auto prev = it - 1;
  if (interpolation == Interpolation::HoldPrevious) return prev->second;
  return lerp_at(prev->first, prev->second, it->first, it->second, t);
}

} // namespace

Trace Trace::resample(const std::map<std::string, std::vector<std::pair<double, double>>>& signals,
                      Interpolation interpolation) {
  std::set<double> grid;
  for (const auto& [name, pts] : signals) {
    if (pts.empty()) throw Error(ErrorCode::TraceFormat, "signal " + name + " has no samples");
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (!(pts[i].first > pts[i - 1].first)) {
        throw Error(ErrorCode::TraceFormat, "signal " + name + " timestamps not increasing");
      }
    }
    for (const auto& p : pts) grid.insert(p.first);
  }
  std::vector<double> times(grid.begin(), grid.end());
  std::vector<std::pair<std::string, std::vector<double>>> columns;
  for (const auto& [name, pts] : signals) {
    std::vector<double> values;
    values.reserve(times.size());
    for (double t : times) values.push_back(interpolate_series(pts, t, interpolation));
    columns.emplace_back(name, std::move(values));
  }
  return Trace(std::move(times), std::move(columns));
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& text, const std::string& where) {
  const char* begin = text.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    throw Error(ErrorCode::TraceFormat, where + ": not a finite number '" + text + "'");
  }
  return v;
}

} // namespace

Trace read_trace_csv(std::istream& in, const std::string& source_name) {
  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    header = split_csv_line(line);
    break;
  }
  if (header.empty() || header[0] != "time") {
    throw Error(ErrorCode::TraceFormat, source_name + ": header must start with 'time'");
  }
  const std::size_t ncols = header.size() - 1;
  std::vector<double> times;
  std::vector<std::vector<std::pair<double, double>>> points(ncols);
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    const std::string where = source_name + ":" + std::to_string(line_no);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::TraceFormat, where + ": expected " + std::to_string(header.size()) +
                                              " fields, got " + std::to_string(cells.size()));
    }
    double t = parse_double(cells[0], where);
    if (!times.empty() && !(t > times.back())) {
      throw Error(ErrorCode::TraceFormat, where + ": time must be strictly increasing");
    }
    if (times.empty() && t != 0.0) {
      throw Error(ErrorCode::TraceFormat, where + ": first row must have time 0");
    }
    times.push_back(t);
    for (std::size_t c = 0; c < ncols; ++c) {
      if (cells[c + 1].empty()) continue;
      points[c].emplace_back(t, parse_double(cells[c + 1], where));
    }
  }
  if (times.size() < 2) {
    throw Error(ErrorCode::TraceFormat, source_name + ": a trace needs at least two rows");
  }
  std::vector<std::pair<std::string, std::vector<double>>> columns;
  for (std::size_t c = 0; c < ncols; ++c) {
    if (points[c].empty()) {
      throw Error(ErrorCode::TraceFormat, source_name + ": column " + header[c + 1] + " is empty");
    }
    std::vector<double> values;
    values.reserve(times.size());
    for (double t : times) values.push_back(interpolate_series(points[c], t, Interpolation::Linear));
    columns.emplace_back(header[c + 1], std::move(values));
  }
  return Trace(std::move(times), std::move(columns));
}

Trace read_trace_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  return read_trace_csv(in, path);
}

void write_trace_csv(std::ostream& out, const Trace& trace) {
  out << "time";
  for (const auto& name : trace.signal_names()) out << ',' << name;
  out << '\n';
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << format_number(trace.times()[i]);
    for (std::size_t c = 0; c < trace.signal_names().size(); ++c) {
      out << ',' << format_number(trace.values(c)[i]);
    }
    out << '\n';
  }
}

} // namespace rfol
