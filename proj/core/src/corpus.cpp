#include "glyphmend/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "glyphmend/rng.hpp"

namespace glyphmend {

using nlohmann::json;

const char* font_style_name(FontStyle style) {
  switch (style) {
    case FontStyle::kSerif: return "serif";
    case FontStyle::kSansSerif: return "sans-serif";
    case FontStyle::kDisplay: return "display";
    case FontStyle::kHandwriting: return "handwriting";
  }
  return "unknown";
}

std::optional<FontStyle> parse_font_style(const std::string& name) {
  std::string canon;
  for (char c : name) {
    if (c == '-' || c == '_' || c == ' ') continue;
    canon.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (canon == "serif") return FontStyle::kSerif;
  if (canon == "sansserif" || canon == "sans") return FontStyle::kSansSerif;
  if (canon == "display") return FontStyle::kDisplay;
  if (canon == "handwriting") return FontStyle::kHandwriting;
  return std::nullopt;
}

CorpusSplit split_fonts(std::vector<FontRecord> fonts, const SplitRatios& ratios,
                        std::uint64_t seed) {
  const double sum = ratios.train + ratios.validation + ratios.test;
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("split ratios must sum to 1");
  }
  int positive = 0;
  for (double r : {ratios.train, ratios.validation, ratios.test}) {
    if (r < 0.0) throw std::invalid_argument("split ratios must be nonnegative");
    if (r > 0.0) ++positive;
  }
  const std::size_t n = fonts.size();
  if (n < static_cast<std::size_t>(positive)) {
    throw std::invalid_argument("fewer fonts than splits");
  }

  std::mt19937_64 rng(seed);
  const std::vector<std::size_t> order = shuffled_indices(rng, n);
  std::vector<FontRecord> shuffled;
  shuffled.reserve(n);
  for (std::size_t i : order) shuffled.push_back(std::move(fonts[i]));

  // Floor each count, hand leftovers to the largest fractional remainders,
  // then make sure no positive-ratio split ended up empty.
  const std::array<double, 3> rs{ratios.train, ratios.validation, ratios.test};
  std::array<std::size_t, 3> k{};
  std::array<double, 3> frac{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double exact = rs[i] * static_cast<double>(n);
    k[i] = static_cast<std::size_t>(std::floor(exact));
    frac[i] = exact - std::floor(exact);
    assigned += k[i];
  }
  while (assigned < n) {
    const int best = static_cast<int>(
        std::max_element(frac.begin(), frac.end()) - frac.begin());
    ++k[best];
    frac[best] = -1.0;
    ++assigned;
  }
  for (int i = 0; i < 3; ++i) {
    while (rs[i] > 0.0 && k[i] == 0) {
      const int donor = static_cast<int>(std::max_element(k.begin(), k.end()) - k.begin());
      --k[donor];
      ++k[i];
    }
  }

  CorpusSplit out;
  auto take = [&](std::size_t from, std::size_t count) {
    std::vector<FontRecord> part;
    part.assign(std::make_move_iterator(shuffled.begin() + from),
                std::make_move_iterator(shuffled.begin() + from + count));
    return part;
  };
  out.train = take(0, k[0]);
  out.validation = take(k[0], k[1]);
  out.test = take(k[0] + k[1], k[2]);
  return out;
}

std::vector<GlyphSequence> flatten_glyphs(const std::vector<FontRecord>& fonts) {
  std::vector<GlyphSequence> out;
  for (const FontRecord& f : fonts) {
    for (const auto& [label, glyph] : f.glyphs) out.push_back(glyph);
  }
  return out;
}

void write_manifest(const std::filesystem::path& path,
                    const std::vector<ManifestEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const ManifestEntry& e : entries) {
    out << json{{"font_id", e.font_id},
                {"style", font_style_name(e.style)},
                {"split", e.split},
                {"glyphs", e.glyph_count}}
               .dump()
        << '\n';
  }
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    ManifestEntry e;
    e.font_id = j.at("font_id").get<std::string>();
    const auto style = parse_font_style(j.at("style").get<std::string>());
    if (!style) throw std::runtime_error("unknown style in manifest: " + line);
    e.style = *style;
    e.split = j.at("split").get<std::string>();
    e.glyph_count = j.at("glyphs").get<int>();
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<ManifestEntry> manifest_for_split(const CorpusSplit& split) {
  std::vector<ManifestEntry> entries;
  auto add = [&](const std::vector<FontRecord>& fonts, const char* name) {
    for (const FontRecord& f : fonts) {
      entries.push_back({f.font_id, f.style, name, static_cast<int>(f.glyphs.size())});
    }
  };
  add(split.train, "train");
  add(split.validation, "validation");
  add(split.test, "test");
  return entries;
}

std::map<std::string, FontStyle> style_index(const std::vector<ManifestEntry>& entries) {
  std::map<std::string, FontStyle> idx;
  for (const ManifestEntry& e : entries) idx[e.font_id] = e.style;
  return idx;
}

}  // namespace glyphmend
