#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "kalman/sim.hpp"

namespace kalman {

inline constexpr const char* kTraceHeader =
    "step,true_x,true_y,meas_x,meas_y,est_x,est_y,est_vx,est_vy,p00,p11,p22,p33,nees,nll";

/// One parsed line of a trace CSV.
struct TraceRow {
  std::size_t step = 0;
  double true_x = 0, true_y = 0;
  double meas_x = 0, meas_y = 0;
  double est_x = 0, est_y = 0, est_vx = 0, est_vy = 0;
  double p00 = 0, p11 = 0, p22 = 0, p33 = 0;
  double nees = 0, nll = 0;
};

TraceRow to_trace_row(const StepRecord& record);

/// Header plus one row per record, values in %.9g, LF line endings.
std::string format_trace_csv(const RunSummary& summary);
void emit_trace_csv(const RunSummary& summary, const std::filesystem::path& path);

/// Parses what format_trace_csv writes. Throws IoError on a malformed file.
std::vector<TraceRow> parse_trace_csv(std::istream& in);

/// 800 x 600 SVG with the true trajectory, the measurements and the filtered
/// estimates. Requires at least one record.
std::string format_plot_svg(const RunSummary& summary);
void emit_plot_svg(const RunSummary& summary, const std::filesystem::path& path);

std::string format_bench_report(const MonteCarloAggregate& aggregate);
void emit_bench_report(const MonteCarloAggregate& aggregate, const std::filesystem::path& path);

}  // namespace kalman
