#include "glyphmend/contour.hpp"

#include <stdexcept>
#include <utility>

namespace glyphmend {

const char* deletion_mode_name(DeletionMode mode) {
  return mode == DeletionMode::kRandom ? "random" : "burst";
}

std::optional<DeletionMode> parse_deletion_mode(const std::string& name) {
  if (name == "random") return DeletionMode::kRandom;
  if (name == "burst") return DeletionMode::kBurst;
  return std::nullopt;
}

std::vector<Violation> validate(const GlyphSequence& seq,
                                const SequenceLimits& limits) {
  std::vector<Violation> out;
  const auto& pts = seq.points;

  for (std::size_t i = 0; i < pts.size(); ++i) {
    const ControlPoint& p = pts[i];
    if (is_special(p.flag) || p.contour_id < 1 || p.point_id < 1) {
      out.push_back({"special-in-interior", i,
                     "interior points must carry positive IDs and an on/off-curve flag"});
    }
    if (p.x < 0.0 || p.x > 1.0 || p.y < 0.0 || p.y > 1.0) {
      out.push_back({"coord-range", i, "coordinate outside [0,1]"});
    }
  }

  // Walk contour runs: ascending contiguous contour IDs from 1, point IDs
  // contiguous from 1 inside each run, capacity caps, closure.
  int expected_contour = 1;
  std::size_t i = 0;
  while (i < pts.size()) {
    const int cid = pts[i].contour_id;
    std::size_t begin = i;
    while (i < pts.size() && pts[i].contour_id == cid) ++i;
    const std::size_t len = i - begin;

    if (cid != expected_contour) {
      out.push_back({"contour-order", begin,
                     "expected contour " + std::to_string(expected_contour) +
                         ", found " + std::to_string(cid)});
    }
    if (cid >= 1) ++expected_contour;

    for (std::size_t k = 0; k < len; ++k) {
      if (pts[begin + k].point_id != static_cast<int>(k) + 1) {
        out.push_back({"point-contiguity", begin + k,
                       "expected point ID " + std::to_string(k + 1) + ", found " +
                           std::to_string(pts[begin + k].point_id)});
      }
    }
    if (len > static_cast<std::size_t>(limits.max_points_per_contour)) {
      out.push_back({"point-capacity", begin,
                     "contour holds " + std::to_string(len) + " points, cap is " +
                         std::to_string(limits.max_points_per_contour)});
    }
    if (!seq.corrupted && len >= 1) {
      const ControlPoint& first = pts[begin];
      const ControlPoint& last = pts[i - 1];
      if (first.x != last.x || first.y != last.y) {
        out.push_back({"closure", begin,
                       "first and last coordinates of contour " +
                           std::to_string(cid) + " differ"});
      }
    }
  }
  if (expected_contour - 1 > limits.max_contours) {
    out.push_back({"contour-capacity", 0,
                   std::to_string(expected_contour - 1) + " contours, cap is " +
                       std::to_string(limits.max_contours)});
  }
  return out;
}

GlyphSequence renumber(GlyphSequence seq) {
  int next_contour = 0;
  int last_seen_id = 0;
  int next_point = 0;
  bool first = true;
  for (ControlPoint& p : seq.points) {
    if (first || p.contour_id != last_seen_id) {
      last_seen_id = p.contour_id;
      ++next_contour;
      next_point = 0;
      first = false;
    }
    p.contour_id = next_contour;
    p.point_id = ++next_point;
  }
  return seq;
}

TokenizedSequence tokenize(const GlyphSequence& seq,
                           const SequenceLimits& limits) {
  const std::size_t cap = static_cast<std::size_t>(limits.max_tokens()) - 2;
  if (seq.points.size() > cap) {
    throw std::length_error("tokenize: sequence of " +
                            std::to_string(seq.points.size()) +
                            " points exceeds cap of " + std::to_string(cap));
  }
  TokenizedSequence t;
  t.records.reserve(seq.points.size() + 2);
  t.records.push_back({0.0, 0.0, -1, -1, CurveFlag::kSos});
  t.records.insert(t.records.end(), seq.points.begin(), seq.points.end());
  t.records.push_back({0.0, 0.0, -1, -1, CurveFlag::kEos});
  return t;
}

GlyphSequence detokenize(const TokenizedSequence& tokens) {
  const auto& r = tokens.records;
  if (r.size() < 2 || r.front().flag != CurveFlag::kSos ||
      r.back().flag != CurveFlag::kEos) {
    throw std::invalid_argument("detokenize: records must be sos-led and eos-terminated");
  }
  GlyphSequence seq;
  seq.points.reserve(r.size() - 2);
  for (std::size_t i = 1; i + 1 < r.size(); ++i) {
    if (is_special(r[i].flag)) {
      throw std::invalid_argument("detokenize: special record at interior index " +
                                  std::to_string(i));
    }
    seq.points.push_back(r[i]);
  }
  return seq;
}

}  // namespace glyphmend
