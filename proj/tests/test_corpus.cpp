#include <doctest.h>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "glyphmend/corpus.hpp"
#include "glyphmend/synth.hpp"
#include "test_util.hpp"

namespace {

using glyphmend::CorpusSplit;
using glyphmend::FontRecord;
using glyphmend::FontStyle;
using glyphmend::ManifestEntry;
using glyphmend::SplitRatios;

std::vector<FontRecord> fonts(int n) { return glyphmend::synth_glyphs(n, 5); }

std::set<std::string> id_set(const std::vector<FontRecord>& fs) {
  std::set<std::string> out;
  for (const FontRecord& f : fs) out.insert(f.font_id);
  return out;
}

}  // namespace

TEST_CASE("font style names round-trip") {
  for (FontStyle s : {FontStyle::kSerif, FontStyle::kSansSerif,
                      FontStyle::kDisplay, FontStyle::kHandwriting}) {
    CHECK(glyphmend::parse_font_style(glyphmend::font_style_name(s)) == s);
  }
  CHECK(glyphmend::parse_font_style("Sans-Serif") == FontStyle::kSansSerif);
  CHECK(glyphmend::parse_font_style("sans_serif") == FontStyle::kSansSerif);
  CHECK(glyphmend::parse_font_style("SANSSERIF") == FontStyle::kSansSerif);
  CHECK_FALSE(glyphmend::parse_font_style("gothic").has_value());
}

TEST_CASE("split_fonts partitions fonts disjointly at the requested ratios") {
  const CorpusSplit split = glyphmend::split_fonts(fonts(20), {0.8, 0.1, 0.1}, 7);
  CHECK(split.train.size() == 16);
  CHECK(split.validation.size() == 2);
  CHECK(split.test.size() == 2);

  const auto train_ids = id_set(split.train);
  const auto val_ids = id_set(split.validation);
  const auto test_ids = id_set(split.test);
  CHECK(train_ids.size() == 16);
  for (const std::string& id : val_ids) {
    CHECK(train_ids.count(id) == 0);
    CHECK(test_ids.count(id) == 0);
  }
  for (const std::string& id : test_ids) CHECK(train_ids.count(id) == 0);
}

TEST_CASE("split_fonts is deterministic per seed and reshuffles across seeds") {
  const CorpusSplit a = glyphmend::split_fonts(fonts(30), {0.6, 0.2, 0.2}, 1);
  const CorpusSplit b = glyphmend::split_fonts(fonts(30), {0.6, 0.2, 0.2}, 1);
  const CorpusSplit c = glyphmend::split_fonts(fonts(30), {0.6, 0.2, 0.2}, 2);
  CHECK(id_set(a.train) == id_set(b.train));
  CHECK(id_set(a.validation) == id_set(b.validation));
  CHECK(id_set(a.train) != id_set(c.train));
}

TEST_CASE("split_fonts guarantees one font per positive-ratio split") {
  // 3 fonts at 0.98/0.01/0.01 would round to 3/0/0; the borrow rule must
  // still hand one font to validation and test.
  const CorpusSplit split = glyphmend::split_fonts(fonts(3), {0.98, 0.01, 0.01}, 4);
  CHECK(split.train.size() == 1);
  CHECK(split.validation.size() == 1);
  CHECK(split.test.size() == 1);

  // A zero ratio legitimately leaves a split empty.
  const CorpusSplit two_way = glyphmend::split_fonts(fonts(4), {0.5, 0.5, 0.0}, 4);
  CHECK(two_way.test.empty());
  CHECK(two_way.train.size() + two_way.validation.size() == 4);
}

TEST_CASE("split_fonts rejects bad ratio vectors and too few fonts") {
  CHECK_THROWS((void)glyphmend::split_fonts(fonts(10), {0.5, 0.2, 0.2}, 0));
  CHECK_THROWS((void)glyphmend::split_fonts(fonts(2), {0.4, 0.3, 0.3}, 0));
}

TEST_CASE("flatten_glyphs walks fonts in order and labels in order") {
  const auto fs = glyphmend::synth_glyphs(3, 8, {3});
  const auto flat = glyphmend::flatten_glyphs(fs);
  REQUIRE(flat.size() == 9);
  std::size_t k = 0;
  for (const FontRecord& f : fs) {
    std::vector<std::string> labels;
    for (const auto& [label, seq] : f.glyphs) labels.push_back(label);
    CHECK(std::is_sorted(labels.begin(), labels.end()));
    for (const std::string& label : labels) {
      CHECK(flat[k].font_id == f.font_id);
      CHECK(flat[k].glyph_label == label);
      ++k;
    }
  }
}

TEST_CASE("manifest round-trips through its file format") {
  testutil::TempDir dir;
  const CorpusSplit split = glyphmend::split_fonts(fonts(12), {0.5, 0.25, 0.25}, 9);
  const std::vector<ManifestEntry> entries = glyphmend::manifest_for_split(split);
  REQUIRE(entries.size() == 12);

  std::size_t train_entries = 0;
  for (const ManifestEntry& e : entries) {
    if (e.split == "train") ++train_entries;
    CHECK(e.glyph_count == 1);
  }
  CHECK(train_entries == split.train.size());

  const auto path = dir.path / "manifest.jsonl";
  glyphmend::write_manifest(path, entries);
  const std::vector<ManifestEntry> back = glyphmend::read_manifest(path);
  REQUIRE(back.size() == entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    CHECK(back[i].font_id == entries[i].font_id);
    CHECK(back[i].style == entries[i].style);
    CHECK(back[i].split == entries[i].split);
    CHECK(back[i].glyph_count == entries[i].glyph_count);
  }

  const auto styles = glyphmend::style_index(back);
  CHECK(styles.size() == 12);
  CHECK(styles.at(entries.front().font_id) == entries.front().style);
}
