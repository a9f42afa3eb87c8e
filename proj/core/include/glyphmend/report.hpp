// Evaluation reporting: per-glyph metric rows plus aggregate views by
// deletion rate, font style, and character.
#pragma once

#include <string>
#include <vector>

#include "glyphmend/contour.hpp"

namespace glyphmend {

struct EvalRow {
  std::string font_id;
  std::string glyph;
  std::string style;
  std::string mode;
  double rate = 0.0;
  double l1_input = 0.0;        // corrupted input vs ground truth
  double l1_pred = 0.0;         // completion vs ground truth
  double hausdorff_input = 0.0;
  double hausdorff_pred = 0.0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
};

// Metric means (and standard errors for the prediction metrics) over the
// rows sharing one key.  All aggregates are arithmetic means of their rows.
struct EvalAggregate {
  std::string key;
  std::size_t count = 0;
  double l1_input = 0.0;
  double l1_pred = 0.0;
  double hausdorff_input = 0.0;
  double hausdorff_pred = 0.0;
  double l1_input_stderr = 0.0;
  double l1_pred_stderr = 0.0;
  double hausdorff_input_stderr = 0.0;
  double hausdorff_pred_stderr = 0.0;
};

// Computes one report row: both metrics for input-vs-GT and
// prediction-vs-GT.
EvalRow evaluate_pair(const GlyphSequence& input, const GlyphSequence& prediction,
                      const GlyphSequence& ground_truth, const std::string& style,
                      const std::string& mode, double rate);

std::vector<EvalAggregate> aggregate_by_rate(const EvalReport& report);
std::vector<EvalAggregate> aggregate_by_style(const EvalReport& report);
std::vector<EvalAggregate> aggregate_by_glyph(const EvalReport& report);

// Tab-separated row table with a header line.
void write_report_tsv(const EvalReport& report, const std::string& path);

// Plot-ready curve table: {rate, metric, mean, stderr}, one line per
// (rate, metric) pair; metrics are l1_input, l1_pred, hausdorff_input,
// hausdorff_pred.
void write_curves_tsv(const EvalReport& report, const std::string& path);

// Human-readable aggregate summary (per rate, style, and character).
std::string format_summary(const EvalReport& report);

}  // namespace glyphmend
