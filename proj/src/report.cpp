#include "kalman/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "kalman/error.hpp"

namespace kalman {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string g9(double v) { return fmt("%.9g", v); }

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory for " + path.string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << contents;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

TraceRow to_trace_row(const StepRecord& r) {
  TraceRow row;
  row.step = r.step;
  row.true_x = r.true_state[0];
  row.true_y = r.true_state[1];
  row.meas_x = r.measurement[0];
  row.meas_y = r.measurement[1];
  row.est_x = r.posterior_mean[0];
  row.est_y = r.posterior_mean[1];
  row.est_vx = r.posterior_mean[2];
  row.est_vy = r.posterior_mean[3];
  row.p00 = r.posterior_cov_diag[0];
  row.p11 = r.posterior_cov_diag[1];
  row.p22 = r.posterior_cov_diag[2];
  row.p33 = r.posterior_cov_diag[3];
  row.nees = r.nees;
  row.nll = r.neg_log_likelihood;
  return row;
}

std::string format_trace_csv(const RunSummary& summary) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const auto& rec : summary.records) {
    const TraceRow r = to_trace_row(rec);
    out += std::to_string(r.step);
    for (double v : {r.true_x, r.true_y, r.meas_x, r.meas_y, r.est_x, r.est_y, r.est_vx, r.est_vy,
                     r.p00, r.p11, r.p22, r.p33, r.nees, r.nll}) {
      out += ',';
      out += g9(v);
    }
    out += '\n';
  }
  return out;
}

void emit_trace_csv(const RunSummary& summary, const std::filesystem::path& path) {
  write_file(path, format_trace_csv(summary));
}

std::vector<TraceRow> parse_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) {
    throw IoError("trace: missing or unexpected header");
  }
  std::vector<TraceRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 15) {
      throw IoError("trace: line " + std::to_string(line_no) + " has " +
                    std::to_string(cells.size()) + " fields, expected 15");
    }
    try {
      TraceRow r;
      r.step = std::stoul(cells[0]);
      double* fields[] = {&r.true_x, &r.true_y, &r.meas_x, &r.meas_y, &r.est_x,
                          &r.est_y,  &r.est_vx, &r.est_vy, &r.p00,    &r.p11,
                          &r.p22,    &r.p33,    &r.nees,   &r.nll};
      for (std::size_t i = 0; i < 14; ++i) *fields[i] = std::stod(cells[i + 1]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw IoError("trace: malformed number on line " + std::to_string(line_no));
    }
  }
  return rows;
}

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 600.0;
constexpr double kMarginX = 0.05 * kWidth;
constexpr double kMarginY = 0.05 * kHeight;
constexpr int kTicks = 5;

struct Bounds {
  double xmin = std::numeric_limits<double>::infinity();
  double xmax = -std::numeric_limits<double>::infinity();
  double ymin = std::numeric_limits<double>::infinity();
  double ymax = -std::numeric_limits<double>::infinity();

  void add(double x, double y) {
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, y);
    ymax = std::max(ymax, y);
  }

  void pad_degenerate() {
    if (xmax - xmin <= 0.0) {
      xmin -= 0.5;
      xmax += 0.5;
    }
    if (ymax - ymin <= 0.0) {
      ymin -= 0.5;
      ymax += 0.5;
    }
  }

  double px(double x) const { return kMarginX + (x - xmin) / (xmax - xmin) * (kWidth - 2 * kMarginX); }
  double py(double y) const {
    return kHeight - kMarginY - (y - ymin) / (ymax - ymin) * (kHeight - 2 * kMarginY);
  }
};

std::string coord(double v) { return fmt("%.2f", v); }

struct Series {
  const char* name;
  const char* color;
  std::vector<std::pair<double, double>> points;
  bool line;
  double marker_radius;
};

}  // namespace

std::string format_plot_svg(const RunSummary& summary) {
  if (summary.records.empty()) {
    throw DomainError("emit_plot_svg: summary has no records");
  }

  Series truth{"true trajectory", "#1f77b4", {}, true, 1.5};
  Series meas{"measurements", "#d62728", {}, false, 2.5};
  Series est{"filtered estimate", "#2ca02c", {}, true, 1.5};
  Bounds b;
  for (const auto& r : summary.records) {
    truth.points.emplace_back(r.true_state[0], r.true_state[1]);
    meas.points.emplace_back(r.measurement[0], r.measurement[1]);
    est.points.emplace_back(r.posterior_mean[0], r.posterior_mean[1]);
    b.add(r.true_state[0], r.true_state[1]);
    b.add(r.measurement[0], r.measurement[1]);
    b.add(r.posterior_mean[0], r.posterior_mean[1]);
  }
  b.pad_degenerate();

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
         "viewBox=\"0 0 800 600\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n"
      << "<rect x=\"" << coord(kMarginX) << "\" y=\"" << coord(kMarginY) << "\" width=\""
      << coord(kWidth - 2 * kMarginX) << "\" height=\"" << coord(kHeight - 2 * kMarginY)
      << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

  svg << "<g id=\"ticks\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#444444\">\n";
  for (int i = 0; i < kTicks; ++i) {
    const double t = static_cast<double>(i) / (kTicks - 1);
    const double xv = b.xmin + t * (b.xmax - b.xmin);
    const double yv = b.ymin + t * (b.ymax - b.ymin);
    const double x = b.px(xv);
    const double y = b.py(yv);
    svg << "<line x1=\"" << coord(x) << "\" y1=\"" << coord(kHeight - kMarginY) << "\" x2=\""
        << coord(x) << "\" y2=\"" << coord(kHeight - kMarginY + 4) << "\" stroke=\"#444444\"/>\n"
        << "<text x=\"" << coord(x) << "\" y=\"" << coord(kHeight - kMarginY + 15)
        << "\" text-anchor=\"middle\">" << fmt("%.3g", xv) << "</text>\n"
        << "<line x1=\"" << coord(kMarginX - 4) << "\" y1=\"" << coord(y) << "\" x2=\""
        << coord(kMarginX) << "\" y2=\"" << coord(y) << "\" stroke=\"#444444\"/>\n"
        << "<text x=\"" << coord(kMarginX - 6) << "\" y=\"" << coord(y + 3)
        << "\" text-anchor=\"end\">" << fmt("%.3g", yv) << "</text>\n";
  }
  svg << "</g>\n";

  for (const Series* s : {&truth, &meas, &est}) {
    svg << "<g id=\"" << (s == &truth ? "truth" : s == &meas ? "measurements" : "estimate")
        << "\">\n";
    if (s->line && s->points.size() >= 2) {
      svg << "<polyline fill=\"none\" stroke=\"" << s->color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s->points.size(); ++i) {
        if (i > 0) svg << ' ';
        svg << coord(b.px(s->points[i].first)) << ',' << coord(b.py(s->points[i].second));
      }
      svg << "\"/>\n";
    }
    for (const auto& [x, y] : s->points) {
      svg << "<circle cx=\"" << coord(b.px(x)) << "\" cy=\"" << coord(b.py(y)) << "\" r=\""
          << coord(s->marker_radius) << "\" fill=\"" << s->color << "\"/>\n";
    }
    svg << "</g>\n";
  }

  svg << "<g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  double ly = kMarginY + 18;
  for (const Series* s : {&truth, &meas, &est}) {
    const double lx = kWidth - kMarginX - 150;
    if (s->line) {
      svg << "<line x1=\"" << coord(lx) << "\" y1=\"" << coord(ly) << "\" x2=\"" << coord(lx + 20)
          << "\" y2=\"" << coord(ly) << "\" stroke=\"" << s->color << "\" stroke-width=\"1.5\"/>\n";
    }
    svg << "<circle cx=\"" << coord(lx + 10) << "\" cy=\"" << coord(ly) << "\" r=\"2.50\" fill=\""
        << s->color << "\"/>\n"
        << "<text x=\"" << coord(lx + 28) << "\" y=\"" << coord(ly + 4) << "\">" << s->name
        << "</text>\n";
    ly += 18;
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void emit_plot_svg(const RunSummary& summary, const std::filesystem::path& path) {
  write_file(path, format_plot_svg(summary));
}

std::string format_bench_report(const MonteCarloAggregate& agg) {
  char buf[160];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-20s %zu\n", "runs", agg.n_runs);
  out += buf;
  const std::pair<const char*, const MeanWithError*> rows[] = {
      {"rmse_measurement_m", &agg.rmse_measurement},
      {"rmse_filtered_m", &agg.rmse_filtered},
      {"mean_nees", &agg.mean_nees}};
  for (const auto& [name, m] : rows) {
    std::snprintf(buf, sizeof buf, "%-20s %.6g +/- %.6g\n", name, m->mean, m->standard_error);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%-20s %.6g\n", "improvement_ratio", agg.improvement_ratio());
  out += buf;
  return out;
}

void emit_bench_report(const MonteCarloAggregate& aggregate, const std::filesystem::path& path) {
  write_file(path, format_bench_report(aggregate));
}

}  // namespace kalman
