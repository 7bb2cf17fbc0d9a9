#include "polsim/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "polsim/errors.hpp"

namespace polsim {
namespace {

constexpr const char* kHeader = "swept_name,swept_value,ideal_intensity,counts";

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

void write_scan_csv(std::ostream& out, const ScanResult& result,
                    const std::vector<std::string>& metadata) {
  for (const std::string& line : metadata) out << "# " << line << "\n";
  out << kHeader << "\n";
  for (const ScanPoint& p : result.points) {
    out << result.swept << ',' << fmt(p.swept_value) << ','
        << fmt(p.ideal_intensity) << ',';
    if (p.counts) out << fmt(*p.counts);
    out << "\n";
  }
}

void write_scan_csv(const std::string& path, const ScanResult& result,
                    const std::vector<std::string>& metadata) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw config_error("cannot open for writing: " + path);
  write_scan_csv(f, result, metadata);
}

ScanResult read_scan_csv(std::istream& in) {
  ScanResult result;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!saw_header) {
      if (line != kHeader) {
        throw config_error("scan CSV header mismatch: expected \"" +
                           std::string(kHeader) + "\", got \"" + line + "\"");
      }
      saw_header = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 4) {
      throw config_error("scan CSV row does not have 4 fields: " + line);
    }
    if (result.points.empty()) result.swept = fields[0];
    ScanPoint p;
    p.swept_value = std::stod(fields[1]);
    p.ideal_intensity = std::stod(fields[2]);
    if (!fields[3].empty()) p.counts = std::stod(fields[3]);
    result.points.push_back(p);
  }
  if (!saw_header) throw config_error("scan CSV has no header row");
  return result;
}

ScanResult read_scan_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw config_error("cannot open for reading: " + path);
  return read_scan_csv(f);
}

}  // namespace polsim
