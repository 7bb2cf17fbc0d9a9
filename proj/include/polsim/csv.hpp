#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "polsim/experiment.hpp"

namespace polsim {

// Scan CSV layout:
//   # <metadata line>          (one per entry, echoes the run configuration)
//   swept_name,swept_value,ideal_intensity,counts
//   translator_offset,0.001,0.49915...,512
// Numbers carry 17 significant digits so a read-back is bit-faithful; the
// counts field is empty for noiseless scans.
void write_scan_csv(std::ostream& out, const ScanResult& result,
                    const std::vector<std::string>& metadata = {});
void write_scan_csv(const std::string& path, const ScanResult& result,
                    const std::vector<std::string>& metadata = {});

// Parse a scan CSV produced by write_scan_csv; metadata lines are skipped.
ScanResult read_scan_csv(std::istream& in);
ScanResult read_scan_csv(const std::string& path);

}  // namespace polsim
