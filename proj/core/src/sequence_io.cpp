#include "glyphmend/sequence_io.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace glyphmend {

using nlohmann::json;

namespace {

json point_to_json(const ControlPoint& p) {
  return json{{"x", p.x},
              {"y", p.y},
              {"contour", p.contour_id},
              {"index", p.point_id},
              {"on_curve", p.flag == CurveFlag::kOnCurve}};
}

ControlPoint point_from_json(const json& j) {
  ControlPoint p;
  p.x = j.at("x").get<double>();
  p.y = j.at("y").get<double>();
  p.contour_id = j.at("contour").get<int>();
  p.point_id = j.at("index").get<int>();
  p.flag = j.at("on_curve").get<bool>() ? CurveFlag::kOnCurve : CurveFlag::kOffCurve;
  return p;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::string sequence_to_json_line(const GlyphSequence& seq) {
  json points = json::array();
  for (const ControlPoint& p : seq.points) points.push_back(point_to_json(p));
  json j{{"font_id", seq.font_id},
         {"glyph_label", seq.glyph_label},
         {"corrupted", seq.corrupted},
         {"points", std::move(points)}};
  if (seq.completion) {
    j["completion"] = json{{"unterminated", seq.completion->unterminated},
                           {"raw_contour_ids", seq.completion->raw_contour_ids},
                           {"raw_point_ids", seq.completion->raw_point_ids}};
  }
  return j.dump();
}

GlyphSequence sequence_from_json_line(const std::string& line) {
  const json j = json::parse(line);
  GlyphSequence seq;
  seq.font_id = j.at("font_id").get<std::string>();
  seq.glyph_label = j.at("glyph_label").get<std::string>();
  seq.corrupted = j.at("corrupted").get<bool>();
  for (const json& jp : j.at("points")) seq.points.push_back(point_from_json(jp));
  if (j.contains("completion")) {
    const json& jc = j["completion"];
    CompletionMeta meta;
    meta.unterminated = jc.at("unterminated").get<bool>();
    meta.raw_contour_ids = jc.at("raw_contour_ids").get<std::vector<int>>();
    meta.raw_point_ids = jc.at("raw_point_ids").get<std::vector<int>>();
    seq.completion = std::move(meta);
  }
  return seq;
}

void write_sequences(const std::filesystem::path& path,
                     const std::vector<GlyphSequence>& seqs) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  for (const GlyphSequence& s : seqs) out << sequence_to_json_line(s) << '\n';
}

std::vector<GlyphSequence> read_sequences(const std::filesystem::path& path) {
  std::vector<GlyphSequence> seqs;
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    try {
      seqs.push_back(sequence_from_json_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": " + e.what());
    }
  }
  return seqs;
}

std::string oracle_to_json_line(const GlyphSequence& corrupted) {
  if (!corrupted.corruption) {
    throw std::invalid_argument("oracle_to_json_line: sequence carries no corruption meta");
  }
  const CorruptionMeta& m = *corrupted.corruption;
  json deleted = json::array();
  for (const ControlPoint& p : m.deleted_points) deleted.push_back(point_to_json(p));
  json j{{"font_id", corrupted.font_id},
         {"glyph_label", corrupted.glyph_label},
         {"mode", deletion_mode_name(m.mode)},
         {"rate", m.rate},
         {"deleted_indices", m.deleted_indices},
         {"original_contour_sizes", m.original_contour_sizes},
         {"deleted_points", std::move(deleted)}};
  return j.dump();
}

OracleRecord oracle_from_json_line(const std::string& line) {
  const json j = json::parse(line);
  OracleRecord rec;
  rec.font_id = j.at("font_id").get<std::string>();
  rec.glyph_label = j.at("glyph_label").get<std::string>();
  const auto mode = parse_deletion_mode(j.at("mode").get<std::string>());
  if (!mode) {
    throw std::runtime_error("unknown deletion mode in oracle record");
  }
  rec.meta.mode = *mode;
  rec.meta.rate = j.at("rate").get<double>();
  rec.meta.deleted_indices = j.at("deleted_indices").get<std::vector<int>>();
  rec.meta.original_contour_sizes =
      j.at("original_contour_sizes").get<std::vector<int>>();
  for (const json& jp : j.at("deleted_points")) {
    rec.meta.deleted_points.push_back(point_from_json(jp));
  }
  return rec;
}

void write_oracle(const std::filesystem::path& path,
                  const std::vector<GlyphSequence>& corrupted_seqs) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  for (const GlyphSequence& s : corrupted_seqs) out << oracle_to_json_line(s) << '\n';
}

std::vector<OracleRecord> read_oracle(const std::filesystem::path& path) {
  std::vector<OracleRecord> recs;
  std::size_t lineno = 0;
  for (const std::string& line : read_lines(path)) {
    ++lineno;
    try {
      recs.push_back(oracle_from_json_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": " + e.what());
    }
  }
  return recs;
}

}  // namespace glyphmend
