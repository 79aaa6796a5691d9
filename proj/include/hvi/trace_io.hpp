#ifndef HVI_TRACE_IO_HPP
#define HVI_TRACE_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "hvi/config.hpp"
#include "hvi/solvers.hpp"

namespace hvi {

// CSV schema v1, fixed column order; absent values are written as nan.
inline const char* kTraceHeader = "k,t,sigma,step_norm,feas_gap,opt_gap,dist,E,D,W,resid";

void write_trace_csv(std::ostream& os, const RunTrace& trace);
void write_trace_csv_file(const std::string& path, const RunTrace& trace);
std::vector<TraceRow> parse_trace_csv(std::istream& is);
std::vector<TraceRow> parse_trace_csv_file(const std::string& path);

struct ReportExtras {
  std::vector<std::pair<std::string, std::string>> lines;  // appended verbatim
};

// Plain-text report: config echo (re-parseable) plus run summary.
std::string render_report(const Config& cfg, const HierarchicalProblem& p,
                          const RunTrace& trace, const ReportExtras* extras = nullptr);

// Extracts the config echo block from a rendered report.
std::string report_config_echo(const std::string& report_text);

}  // namespace hvi

#endif
