#include <algorithm>
#include <vector>

#include "glyphmend/infer.hpp"

namespace glyphmend {

GlyphSequence assemble(const std::vector<TokenRecord>& records,
                       const std::string& font_id, const std::string& glyph_label,
                       bool unterminated, const SequenceLimits& limits) {
  GlyphSequence out;
  out.font_id = font_id;
  out.glyph_label = glyph_label;
  out.corrupted = true;  // closure is not guaranteed, so closure checks stay off
  CompletionMeta meta;
  meta.unterminated = unterminated;

  // Group records by predicted contour ID in emission order.  Contour class
  // 0 is the special (sos/eos) class and cannot start or label a contour; a
  // record carrying it continues the previous contour (or opens the first).
  struct Group {
    int raw_id = 0;
    std::vector<std::size_t> members;  // indices into `records`
  };
  std::vector<Group> groups;
  int previous_group = -1;  // index into groups, -1 before the first record
  for (std::size_t i = 0; i < records.size(); ++i) {
    meta.raw_contour_ids.push_back(records[i].contour);
    meta.raw_point_ids.push_back(records[i].point);
    const int raw = records[i].contour;
    int group_index = -1;
    if (raw == 0) {
      group_index = previous_group;  // continuation repair
    } else {
      for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].raw_id == raw) {
          group_index = static_cast<int>(g);
          break;
        }
      }
    }
    if (group_index < 0) {
      // Unseen ID (or leading class-0 record): open a new contour.  Use a
      // raw_id no real prediction can collide with when raw == 0.
      groups.push_back({raw > 0 ? raw : -static_cast<int>(groups.size()) - 1, {}});
      group_index = static_cast<int>(groups.size()) - 1;
    }
    groups[static_cast<std::size_t>(group_index)].members.push_back(i);
    previous_group = group_index;
  }

  // Emit contours in first-appearance order with contiguous IDs, splitting
  // any group that overflows the point cap and dropping whole contours past
  // the contour cap (flagged unterminated: the tail is unusable).
  int contour_id = 0;
  bool truncated = false;
  for (const Group& group : groups) {
    std::size_t taken = 0;
    while (taken < group.members.size()) {
      if (contour_id >= limits.max_contours) {
        truncated = true;
        break;
      }
      ++contour_id;
      const std::size_t room =
          static_cast<std::size_t>(limits.max_points_per_contour);
      const std::size_t count = std::min(group.members.size() - taken, room);
      for (std::size_t k = 0; k < count; ++k) {
        const TokenRecord& rec = records[group.members[taken + k]];
        ControlPoint p;
        p.x = std::clamp(rec.x, 0.0, 1.0);
        p.y = std::clamp(rec.y, 0.0, 1.0);
        p.contour_id = contour_id;
        p.point_id = static_cast<int>(k) + 1;
        p.flag = rec.flag == flag_class(CurveFlag::kOffCurve)
                     ? CurveFlag::kOffCurve
                     : CurveFlag::kOnCurve;
        out.points.push_back(p);
      }
      taken += count;
    }
    if (truncated) break;
  }
  if (truncated) meta.unterminated = true;
  out.completion = std::move(meta);
  return out;
}

}  // namespace glyphmend
