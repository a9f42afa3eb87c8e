#include "glyphmend/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "glyphmend/metrics.hpp"

namespace glyphmend {

EvalRow evaluate_pair(const GlyphSequence& input, const GlyphSequence& prediction,
                      const GlyphSequence& ground_truth, const std::string& style,
                      const std::string& mode, double rate) {
  EvalRow row;
  row.font_id = ground_truth.font_id;
  row.glyph = ground_truth.glyph_label;
  row.style = style;
  row.mode = mode;
  row.rate = rate;
  const RasterImage gt_raster = rasterize(ground_truth);
  row.l1_input = l1_distance(rasterize(input), gt_raster);
  row.l1_pred = l1_distance(rasterize(prediction), gt_raster);
  row.hausdorff_input = hausdorff(input, ground_truth);
  row.hausdorff_pred = hausdorff(prediction, ground_truth);
  return row;
}

namespace {

std::string format_rate(double rate) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << rate;
  return out.str();
}

struct Accumulator {
  std::vector<double> l1_input, l1_pred, hd_input, hd_pred;
};

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return sd / std::sqrt(static_cast<double>(v.size()));
}

template <typename KeyFn>
std::vector<EvalAggregate> aggregate(const EvalReport& report, KeyFn key_fn) {
  std::map<std::string, Accumulator> groups;
  for (const EvalRow& row : report.rows) {
    Accumulator& acc = groups[key_fn(row)];
    acc.l1_input.push_back(row.l1_input);
    acc.l1_pred.push_back(row.l1_pred);
    acc.hd_input.push_back(row.hausdorff_input);
    acc.hd_pred.push_back(row.hausdorff_pred);
  }
  std::vector<EvalAggregate> out;
  for (const auto& [key, acc] : groups) {
    EvalAggregate a;
    a.key = key;
    a.count = acc.l1_input.size();
    a.l1_input = mean_of(acc.l1_input);
    a.l1_pred = mean_of(acc.l1_pred);
    a.hausdorff_input = mean_of(acc.hd_input);
    a.hausdorff_pred = mean_of(acc.hd_pred);
    a.l1_input_stderr = stderr_of(acc.l1_input);
    a.l1_pred_stderr = stderr_of(acc.l1_pred);
    a.hausdorff_input_stderr = stderr_of(acc.hd_input);
    a.hausdorff_pred_stderr = stderr_of(acc.hd_pred);
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace

std::vector<EvalAggregate> aggregate_by_rate(const EvalReport& report) {
  // Rates are formatted to two decimals so they sort and group stably.
  return aggregate(report, [](const EvalRow& r) { return format_rate(r.rate); });
}

std::vector<EvalAggregate> aggregate_by_style(const EvalReport& report) {
  return aggregate(report, [](const EvalRow& r) { return r.style; });
}

std::vector<EvalAggregate> aggregate_by_glyph(const EvalReport& report) {
  return aggregate(report, [](const EvalRow& r) { return r.glyph; });
}

void write_report_tsv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open report file: " + path);
  }
  out << "font_id\tglyph\tstyle\tmode\trate\tl1_input\tl1_pred\t"
         "hausdorff_input\thausdorff_pred\n";
  out.setf(std::ios::fixed);
  for (const EvalRow& row : report.rows) {
    out.precision(2);
    out << row.font_id << '\t' << row.glyph << '\t' << row.style << '\t'
        << row.mode << '\t' << row.rate << '\t';
    out.precision(6);
    out << row.l1_input << '\t' << row.l1_pred << '\t' << row.hausdorff_input
        << '\t' << row.hausdorff_pred << '\n';
  }
  if (!out) {
    throw std::runtime_error("failed writing report: " + path);
  }
}

void write_curves_tsv(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open curves file: " + path);
  }
  out << "rate\tmetric\tmean\tstderr\n";
  out.setf(std::ios::fixed);
  out.precision(6);
  for (const EvalAggregate& a : aggregate_by_rate(report)) {
    out << a.key << "\tl1_input\t" << a.l1_input << '\t' << a.l1_input_stderr
        << '\n';
    out << a.key << "\tl1_pred\t" << a.l1_pred << '\t' << a.l1_pred_stderr
        << '\n';
    out << a.key << "\thausdorff_input\t" << a.hausdorff_input << '\t'
        << a.hausdorff_input_stderr << '\n';
    out << a.key << "\thausdorff_pred\t" << a.hausdorff_pred << '\t'
        << a.hausdorff_pred_stderr << '\n';
  }
  if (!out) {
    throw std::runtime_error("failed writing curves: " + path);
  }
}

std::string format_summary(const EvalReport& report) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(4);
  const auto section = [&](const char* title,
                           const std::vector<EvalAggregate>& aggs) {
    out << title << '\n';
    out << "  key           n     l1_input     l1_pred   hd_input    hd_pred\n";
    for (const EvalAggregate& a : aggs) {
      out << "  " << a.key;
      for (std::size_t pad = a.key.size(); pad < 12; ++pad) out << ' ';
      out << ' ' << a.count << "  " << a.l1_input << "  " << a.l1_pred << "  "
          << a.hausdorff_input << "  " << a.hausdorff_pred << '\n';
    }
  };
  out << "rows: " << report.rows.size() << '\n';
  section("by rate:", aggregate_by_rate(report));
  section("by style:", aggregate_by_style(report));
  section("by character:", aggregate_by_glyph(report));
  return out.str();
}

}  // namespace glyphmend
