#pragma once

#include <iosfwd>
#include <string>

#include "fmd/experiment.hpp"

namespace fmd {

// Report CSV: `# FMDREPORT1` magic, provenance comments, then
// kind,length,zeta,mean_fmd,std_fmd,reps rows at 17 significant digits.
// write(read(x)) is byte-stable.
void write_report_csv(const ExperimentReport& report, std::ostream& out);
void save_report_csv(const ExperimentReport& report, const std::string& path);
ExperimentReport read_report_csv(std::istream& in);
ExperimentReport load_report_csv(const std::string& path);

std::string report_to_json(const ExperimentReport& report);
void save_report_json(const ExperimentReport& report, const std::string& path);

// Three panels (one per noise kind), one mean polyline per motion length
// with a +-1 std band behind it.
std::string report_to_svg(const ExperimentReport& report);
void save_report_svg(const ExperimentReport& report, const std::string& path);

}  // namespace fmd
