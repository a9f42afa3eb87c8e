// glyphmend: contour-completion workflow CLI.
//
// Subcommands mirror the experimental pipeline: ingest real fonts or
// synthesize a corpus, corrupt it, train the completion model (or the
// encoder-only baseline), complete corrupted glyphs, evaluate completions,
// and render glyphs to images.
//
// Exit codes: 0 success, 1 usage error, 2 missing/unreadable file,
// 3 config or checkpoint mismatch, 4 data error.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "glyphmend/checkpoint.hpp"
#include "glyphmend/contour.hpp"
#include "glyphmend/corpus.hpp"
#include "glyphmend/corruption.hpp"
#include "glyphmend/infer.hpp"
#include "glyphmend/metrics.hpp"
#include "glyphmend/net/trainer.hpp"
#include "glyphmend/render.hpp"
#include "glyphmend/report.hpp"
#include "glyphmend/sequence_io.hpp"
#include "glyphmend/synth.hpp"
#include "glyphmend/truetype.hpp"

namespace fs = std::filesystem;
using namespace glyphmend;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitMissingFile = 2;
constexpr int kExitConfigMismatch = 3;
constexpr int kExitDataError = 4;

struct CliError {
  int code;
  std::string message;
};

void require_file(const std::string& path) {
  if (!fs::exists(path)) {
    throw CliError{kExitMissingFile, "missing file: " + path};
  }
}

// Simple deterministic parallel map: results land in preassigned slots so
// output order never depends on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  if (jobs <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  const int n = std::min<int>(jobs, static_cast<int>(count));
  workers.reserve(static_cast<std::size_t>(n));
  for (int w = 0; w < n; ++w) {
    workers.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        fn(i);
      }
    });
  }
  for (auto& t : workers) t.join();
}

std::vector<double> parse_rates(const std::string& csv) {
  std::vector<double> rates;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    rates.push_back(std::stod(item));
  }
  if (rates.empty()) {
    throw CliError{kExitUsage, "no deletion rates given"};
  }
  return rates;
}

SplitRatios parse_split(const std::string& csv) {
  std::vector<double> parts;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(std::stod(item));
  if (parts.size() != 3) {
    throw CliError{kExitUsage, "--split needs three comma-separated ratios"};
  }
  return SplitRatios{parts[0], parts[1], parts[2]};
}

std::string format_rate_tag(double rate) {
  std::ostringstream out;
  out.setf(std::ios::fixed);
  out.precision(2);
  out << rate;
  return out.str();
}

std::string sanitize_filename(const std::string& raw) {
  std::string out = raw;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' &&
        c != '.') {
      c = '_';
    }
  }
  return out;
}

// --- corpus emission (shared by ingest and synth) -------------------------

void write_corpus(const CorpusSplit& split, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const auto emit = [&](const std::vector<FontRecord>& fonts, const char* name) {
    write_sequences(fs::path(out_dir) / (std::string(name) + ".jsonl"),
                    flatten_glyphs(fonts));
  };
  emit(split.train, "train");
  emit(split.validation, "val");
  emit(split.test, "test");
  write_manifest(fs::path(out_dir) / "manifest.jsonl", manifest_for_split(split));
  std::size_t total = 0;
  for (const auto* fonts : {&split.train, &split.validation, &split.test}) {
    for (const FontRecord& f : *fonts) total += f.glyphs.size();
  }
  std::cout << "wrote corpus: " << split.train.size() << " train / "
            << split.validation.size() << " val / " << split.test.size()
            << " test fonts, " << total << " glyphs -> " << out_dir << '\n';
}

// --- train configuration ---------------------------------------------------

struct TrainSetup {
  net::TrainConfig train;
  net::ModelConfig model;
  std::string arch = "encdec";  // or "encoder_only"
  std::string precision = "float";
};

// Config file: `key = value` lines, '#' comments.  Values from the file
// override flag values (flags override built-in defaults).
void apply_config_file(const std::string& path, TrainSetup* setup) {
  std::ifstream in(path);
  if (!in) {
    throw CliError{kExitMissingFile, "missing config file: " + path};
  }
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw CliError{kExitConfigMismatch,
                       path + ":" + std::to_string(lineno) +
                           ": expected `key = value`, got: " + line};
      }
      continue;
    }
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "batch_size") setup->train.batch_size = std::stoi(value);
      else if (key == "learning_rate") setup->train.learning_rate = std::stod(value);
      else if (key == "patience") setup->train.patience = std::stoi(value);
      else if (key == "max_epochs") setup->train.max_epochs = std::stoi(value);
      else if (key == "seed") setup->train.seed = std::stoull(value);
      else if (key == "clip_norm") setup->train.clip_norm = std::stod(value);
      else if (key == "d_model") setup->model.d_model = std::stoi(value);
      else if (key == "layers") setup->model.layers = std::stoi(value);
      else if (key == "heads") setup->model.heads = std::stoi(value);
      else if (key == "ffn_width") setup->model.ffn_width = std::stoi(value);
      else if (key == "dropout") setup->model.dropout = std::stod(value);
      else if (key == "sinusoidal_position")
        setup->model.sinusoidal_position = (value == "true" || value == "1");
      else if (key == "arch") setup->arch = value;
      else if (key == "precision") setup->precision = value;
      else
        throw CliError{kExitConfigMismatch,
                       path + ":" + std::to_string(lineno) +
                           ": unknown config key: " + key};
    } catch (const CliError&) {
      throw;
    } catch (const std::exception& e) {
      throw CliError{kExitConfigMismatch, path + ":" + std::to_string(lineno) +
                                              ": bad value for " + key + ": " +
                                              e.what()};
    }
  }
}

void echo_setup(const TrainSetup& s) {
  std::cout << "resolved: arch=" << s.arch << " precision=" << s.precision
            << " d_model=" << s.model.d_model << " layers=" << s.model.layers
            << " heads=" << s.model.heads << " ffn=" << s.model.ffn()
            << " dropout=" << s.model.dropout
            << " batch_size=" << s.train.batch_size
            << " learning_rate=" << s.train.learning_rate
            << " patience=" << s.train.patience
            << " max_epochs=" << s.train.max_epochs << " seed=" << s.train.seed
            << " clip_norm=" << s.train.clip_norm << '\n';
}

// Training files inside --data: every `train*.input.jsonl` pairs with its
// `.target.jsonl` (and `.oracle.jsonl` for the baseline); `val*` likewise.
struct DataFiles {
  std::vector<fs::path> inputs;
  std::vector<fs::path> targets;
  std::vector<fs::path> oracles;
};

DataFiles find_pairs(const std::string& dir, const std::string& prefix,
                     bool need_oracle) {
  DataFiles files;
  if (!fs::is_directory(dir)) {
    throw CliError{kExitMissingFile, "data directory not found: " + dir};
  }
  std::vector<fs::path> inputs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind(prefix, 0) == 0 &&
        name.size() > 12 && name.substr(name.size() - 12) == ".input.jsonl") {
      inputs.push_back(entry.path());
    }
  }
  std::sort(inputs.begin(), inputs.end());
  for (const fs::path& input : inputs) {
    std::string stem = input.string();
    stem.erase(stem.size() - 12);
    const fs::path target = stem + ".target.jsonl";
    if (!fs::exists(target)) {
      throw CliError{kExitMissingFile, "missing target file: " + target.string()};
    }
    files.inputs.push_back(input);
    files.targets.push_back(target);
    if (need_oracle) {
      const fs::path oracle = stem + ".oracle.jsonl";
      if (!fs::exists(oracle)) {
        throw CliError{kExitMissingFile, "missing oracle file: " + oracle.string()};
      }
      files.oracles.push_back(oracle);
    }
  }
  if (files.inputs.empty()) {
    throw CliError{kExitMissingFile,
                   "no " + prefix + "*.input.jsonl files in " + dir};
  }
  return files;
}

std::vector<SeqExample> load_examples(const DataFiles& files) {
  std::vector<GlyphSequence> inputs, targets;
  for (std::size_t i = 0; i < files.inputs.size(); ++i) {
    auto in = read_sequences(files.inputs[i]);
    auto tg = read_sequences(files.targets[i]);
    std::move(in.begin(), in.end(), std::back_inserter(inputs));
    std::move(tg.begin(), tg.end(), std::back_inserter(targets));
  }
  return make_examples(inputs, targets);
}

std::vector<BaselineExample> load_baseline_examples(const DataFiles& files) {
  std::vector<BaselineExample> out;
  for (std::size_t i = 0; i < files.inputs.size(); ++i) {
    const auto inputs = read_sequences(files.inputs[i]);
    const auto targets = read_sequences(files.targets[i]);
    const auto oracles = read_oracle(files.oracles[i]);
    if (inputs.size() != targets.size() || inputs.size() != oracles.size()) {
      throw CliError{kExitDataError,
                     "line counts differ between " + files.inputs[i].string() +
                         ", its target and oracle files"};
    }
    for (std::size_t k = 0; k < inputs.size(); ++k) {
      BaselineExample ex;
      ex.input = make_placeheld_input(inputs[k], oracles[k].meta);
      ex.target = to_tokens(tokenize(targets[k]));
      out.push_back(std::move(ex));
    }
  }
  return out;
}

template <typename Scalar>
int run_train_typed(const TrainSetup& setup, const std::string& data_dir,
                    const std::string& out_path) {
  const bool baseline = setup.arch == "encoder_only";
  const DataFiles train_files = find_pairs(data_dir, "train", baseline);
  const DataFiles val_files = find_pairs(data_dir, "val", baseline);

  const std::string metrics_path = out_path + ".metrics.jsonl";
  std::ofstream metrics(metrics_path);
  if (!metrics) {
    throw CliError{kExitMissingFile, "cannot open metrics log: " + metrics_path};
  }

  net::TrainResult result;
  Checkpoint ckpt;
  if (baseline) {
    const auto train_set = load_baseline_examples(train_files);
    const auto val_set = load_baseline_examples(val_files);
    std::cout << "training encoder_only baseline on " << train_set.size()
              << " examples (" << val_set.size() << " validation)\n";
    net::EncoderOnlyModel<Scalar> model;
    model.init(setup.model, setup.train.seed);
    std::cout << "parameters: " << model.parameter_count() << '\n';
    result = net::train_baseline(model, train_set, val_set, setup.train,
                                 &metrics, &std::cout);
    ckpt = net::model_to_checkpoint(model, "encoder_only");
  } else {
    const auto train_set = load_examples(train_files);
    const auto val_set = load_examples(val_files);
    std::cout << "training encdec on " << train_set.size() << " examples ("
              << val_set.size() << " validation)\n";
    net::EncDecModel<Scalar> model;
    model.init(setup.model, setup.train.seed);
    std::cout << "parameters: " << model.parameter_count() << '\n';
    result = net::train_encdec(model, train_set, val_set, setup.train, &metrics,
                               &std::cout);
    ckpt = net::model_to_checkpoint(model, "encdec");
  }
  ckpt.meta["train_config"] = setup.train;
  ckpt.meta["best_epoch"] = result.best_epoch;
  ckpt.meta["best_val_loss"] = result.best_val_loss;
  ckpt.meta["epochs_run"] = result.epochs_run;
  ckpt.meta["precision"] = setup.precision;
  save_checkpoint(ckpt, out_path);
  std::cout << "stopped after " << result.epochs_run << " epochs (best epoch "
            << result.best_epoch << ", best val loss " << result.best_val_loss
            << "); checkpoint -> " << out_path << "\nmetrics -> "
            << metrics_path << '\n';
  return kExitOk;
}

// --- subcommand implementations -------------------------------------------

int run_ingest(const std::string& fonts_dir, const std::string& out_dir,
               const std::string& split_csv, std::uint64_t seed,
               const std::string& charset) {
  if (!fs::is_directory(fonts_dir)) {
    throw CliError{kExitMissingFile, "font directory not found: " + fonts_dir};
  }
  std::vector<fs::path> font_paths;
  for (const auto& entry : fs::directory_iterator(fonts_dir)) {
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".ttf") font_paths.push_back(entry.path());
  }
  std::sort(font_paths.begin(), font_paths.end());
  if (font_paths.empty()) {
    throw CliError{kExitMissingFile, "no .ttf fonts in " + fonts_dir};
  }

  IngestOptions options;
  options.charset = charset;
  std::vector<FontRecord> fonts;
  for (const fs::path& path : font_paths) {
    try {
      const FontFile font = load_font(path.string());
      const std::string family =
          font.family_name.empty() ? path.stem().string() : font.family_name;
      const auto style = infer_style(family);
      if (!style.has_value()) {
        std::cout << "skipping monospace font: " << path.filename().string()
                  << '\n';
        continue;
      }
      std::vector<IngestSkip> skips;
      FontRecord record =
          ingest_font(font, path.stem().string(), *style, options, &skips);
      for (const IngestSkip& skip : skips) {
        std::cout << "warning: " << path.filename().string() << " '"
                  << skip.glyph_label << "': " << skip.reason << '\n';
      }
      if (record.glyphs.empty()) {
        std::cout << "skipping font with no usable glyphs: "
                  << path.filename().string() << '\n';
        continue;
      }
      fonts.push_back(std::move(record));
    } catch (const std::exception& e) {
      std::cout << "skipping unreadable font " << path.filename().string()
                << ": " << e.what() << '\n';
    }
  }
  if (fonts.empty()) {
    throw CliError{kExitDataError, "no usable fonts ingested from " + fonts_dir};
  }
  const CorpusSplit split = split_fonts(std::move(fonts), parse_split(split_csv), seed);
  write_corpus(split, out_dir);
  return kExitOk;
}

int run_synth(int count, std::uint64_t seed, const std::string& out_dir,
              const std::string& split_csv, int glyphs_per_font) {
  if (count < 1) throw CliError{kExitUsage, "--count must be >= 1"};
  SynthOptions options;
  options.glyphs_per_font = glyphs_per_font;
  std::vector<FontRecord> fonts = synth_glyphs(count, seed, options);
  const CorpusSplit split = split_fonts(std::move(fonts), parse_split(split_csv), seed);
  write_corpus(split, out_dir);
  return kExitOk;
}

int run_corrupt(const std::string& in_path, const std::string& mode_name,
                const std::string& rates_csv, std::uint64_t seed,
                std::string out_prefix, int jobs) {
  require_file(in_path);
  const auto mode = parse_deletion_mode(mode_name);
  if (!mode.has_value()) {
    throw CliError{kExitUsage, "unknown deletion mode: " + mode_name};
  }
  const std::vector<double> rates = parse_rates(rates_csv);
  for (double r : rates) {
    if (r < 0.0 || r >= 1.0) {
      throw CliError{kExitUsage, "deletion rate out of [0,1): " + std::to_string(r)};
    }
  }
  if (out_prefix.empty()) {
    out_prefix = in_path;
    const std::string suffix = ".jsonl";
    if (out_prefix.size() > suffix.size() &&
        out_prefix.substr(out_prefix.size() - suffix.size()) == suffix) {
      out_prefix.erase(out_prefix.size() - suffix.size());
    }
    out_prefix += "_";
  }
  const fs::path prefix_dir = fs::path(out_prefix).parent_path();
  if (!prefix_dir.empty()) fs::create_directories(prefix_dir);

  const std::vector<GlyphSequence> glyphs = read_sequences(in_path);
  std::cout << "resolved: in=" << in_path << " mode=" << mode_name
            << " seed=" << seed << " glyphs=" << glyphs.size() << '\n';
  std::size_t total_pairs = 0;
  std::size_t total_skips = 0;
  for (double rate : rates) {
    CorruptionSpec spec{*mode, rate, seed};
    std::vector<GlyphSequence> inputs(glyphs.size());
    std::vector<std::uint8_t> ok(glyphs.size(), 0);
    std::vector<std::string> errors(glyphs.size());
    parallel_for(glyphs.size(), jobs, [&](std::size_t i) {
      try {
        CorruptionSpec per = spec;
        per.seed = corruption_stream_seed(spec, glyphs[i].font_id,
                                          glyphs[i].glyph_label);
        inputs[i] = corrupt(glyphs[i], per);
        ok[i] = 1;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });
    std::vector<GlyphSequence> kept_inputs, kept_targets;
    for (std::size_t i = 0; i < glyphs.size(); ++i) {
      if (ok[i] != 0) {
        kept_inputs.push_back(std::move(inputs[i]));
        kept_targets.push_back(glyphs[i]);
      } else {
        ++total_skips;
        std::cout << "warning: skipped " << glyphs[i].font_id << "/"
                  << glyphs[i].glyph_label << " at r=" << rate << ": "
                  << errors[i] << '\n';
      }
    }
    const std::string base =
        out_prefix + mode_name + "_r" + format_rate_tag(rate);
    write_sequences(base + ".input.jsonl", kept_inputs);
    write_sequences(base + ".target.jsonl", kept_targets);
    write_oracle(base + ".oracle.jsonl", kept_inputs);
    total_pairs += kept_inputs.size();
    std::cout << "rate " << format_rate_tag(rate) << ": " << kept_inputs.size()
              << " pairs -> " << base << ".{input,target,oracle}.jsonl\n";
  }
  std::cout << "corrupted " << total_pairs << " pairs (" << total_skips
            << " skips)\n";
  return kExitOk;
}

int run_train(std::string config_path, std::string data_dir,
              const std::string& out_path, TrainSetup setup) {
  if (data_dir.empty()) {
    if (const char* env = std::getenv("GLYPHMEND_DATA_DIR")) data_dir = env;
  }
  if (data_dir.empty()) {
    throw CliError{kExitUsage,
                   "--data is required (or set GLYPHMEND_DATA_DIR)"};
  }
  if (!config_path.empty()) apply_config_file(config_path, &setup);
  if (setup.arch != "encdec" && setup.arch != "encoder_only") {
    throw CliError{kExitConfigMismatch, "unknown arch: " + setup.arch};
  }
  try {
    setup.model.validate();
    setup.train.validate();
  } catch (const std::exception& e) {
    throw CliError{kExitConfigMismatch, e.what()};
  }
  echo_setup(setup);
  if (setup.precision == "double") {
    return run_train_typed<double>(setup, data_dir, out_path);
  }
  if (setup.precision == "float") {
    return run_train_typed<float>(setup, data_dir, out_path);
  }
  throw CliError{kExitConfigMismatch, "unknown precision: " + setup.precision};
}

int run_complete(const std::string& ckpt_path, const std::string& in_path,
                 const std::string& out_path, bool baseline,
                 const std::string& oracle_path, int jobs) {
  require_file(ckpt_path);
  require_file(in_path);
  Checkpoint ckpt;
  try {
    ckpt = load_checkpoint(ckpt_path);
  } catch (const std::exception& e) {
    throw CliError{kExitConfigMismatch, e.what()};
  }
  const std::string arch = ckpt.meta.value("arch", "");
  const std::string wanted = baseline ? "encoder_only" : "encdec";
  if (arch != wanted) {
    throw CliError{kExitConfigMismatch,
                   "checkpoint arch is '" + arch + "' but this invocation needs '" +
                       wanted + "' (use --baseline to match)"};
  }
  net::ModelConfig cfg;
  if (ckpt.meta.contains("config")) cfg = ckpt.meta.at("config").get<net::ModelConfig>();

  const std::vector<GlyphSequence> inputs = read_sequences(in_path);
  std::vector<GlyphSequence> outputs(inputs.size());

  if (baseline) {
    if (oracle_path.empty()) {
      throw CliError{kExitUsage, "--baseline completion requires --oracle"};
    }
    require_file(oracle_path);
    const std::vector<OracleRecord> oracles = read_oracle(oracle_path);
    if (oracles.size() != inputs.size()) {
      throw CliError{kExitDataError, "oracle/meta mismatch: " + oracle_path +
                                         " has " + std::to_string(oracles.size()) +
                                         " lines, input has " +
                                         std::to_string(inputs.size())};
    }
    net::EncoderOnlyModel<float> model;
    model.init(cfg, 0);
    try {
      net::load_model_params(model, ckpt);
    } catch (const std::exception& e) {
      throw CliError{kExitConfigMismatch, e.what()};
    }
    std::vector<std::string> errors(inputs.size());
    parallel_for(inputs.size(), jobs, [&](std::size_t i) {
      try {
        outputs[i] = complete_baseline(model, inputs[i], oracles[i].meta);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (!errors[i].empty()) {
        throw CliError{kExitDataError, "line " + std::to_string(i + 1) + ": " +
                                           errors[i]};
      }
    }
  } else {
    net::EncDecModel<float> model;
    model.init(cfg, 0);
    try {
      net::load_model_params(model, ckpt);
    } catch (const std::exception& e) {
      throw CliError{kExitConfigMismatch, e.what()};
    }
    std::vector<std::string> errors(inputs.size());
    parallel_for(inputs.size(), jobs, [&](std::size_t i) {
      try {
        outputs[i] = complete(model, inputs[i]);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    });
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (!errors[i].empty()) {
        throw CliError{kExitDataError, "line " + std::to_string(i + 1) + ": " +
                                           errors[i]};
      }
    }
  }
  write_sequences(out_path, outputs);
  std::cout << "completed " << outputs.size() << " glyphs -> " << out_path
            << '\n';
  return kExitOk;
}

int run_evaluate(const std::string& pred_path, const std::string& target_path,
                 const std::string& input_path, const std::string& report_path,
                 const std::string& oracle_path, const std::string& manifest_path,
                 int jobs) {
  require_file(pred_path);
  require_file(target_path);
  require_file(input_path);
  const auto preds = read_sequences(pred_path);
  const auto targets = read_sequences(target_path);
  const auto inputs = read_sequences(input_path);
  if (preds.size() != targets.size() || preds.size() != inputs.size()) {
    throw CliError{kExitDataError,
                   "pred/target/input line counts differ: " +
                       std::to_string(preds.size()) + "/" +
                       std::to_string(targets.size()) + "/" +
                       std::to_string(inputs.size())};
  }
  std::vector<OracleRecord> oracles;
  if (!oracle_path.empty()) {
    require_file(oracle_path);
    oracles = read_oracle(oracle_path);
    if (oracles.size() != preds.size()) {
      throw CliError{kExitDataError, "oracle line count differs from pred"};
    }
  }
  std::map<std::string, FontStyle> styles;
  if (!manifest_path.empty()) {
    require_file(manifest_path);
    styles = style_index(read_manifest(manifest_path));
  }

  EvalReport report;
  report.rows.resize(preds.size());
  std::vector<std::string> errors(preds.size());
  parallel_for(preds.size(), jobs, [&](std::size_t i) {
    try {
      std::string style = "unknown";
      const auto it = styles.find(targets[i].font_id);
      if (it != styles.end()) style = font_style_name(it->second);
      std::string mode = "unknown";
      double rate = 0.0;
      if (!oracles.empty()) {
        mode = deletion_mode_name(oracles[i].meta.mode);
        rate = oracles[i].meta.rate;
      } else if (inputs[i].corruption.has_value()) {
        mode = deletion_mode_name(inputs[i].corruption->mode);
        rate = inputs[i].corruption->rate;
      }
      report.rows[i] =
          evaluate_pair(inputs[i], preds[i], targets[i], style, mode, rate);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!errors[i].empty()) {
      throw CliError{kExitDataError,
                     "line " + std::to_string(i + 1) + ": " + errors[i]};
    }
  }
  write_report_tsv(report, report_path);
  std::string curves_path = report_path;
  const auto dot = curves_path.find_last_of('.');
  if (dot != std::string::npos) curves_path.erase(dot);
  curves_path += ".curves.tsv";
  write_curves_tsv(report, curves_path);
  std::cout << format_summary(report);
  std::cout << "report -> " << report_path << "\ncurves -> " << curves_path
            << '\n';
  return kExitOk;
}

int run_render(const std::string& in_path, const std::string& out_dir,
               const std::string& oracle_path, int size, int jobs) {
  require_file(in_path);
  const auto glyphs = read_sequences(in_path);
  std::vector<OracleRecord> oracles;
  if (!oracle_path.empty()) {
    require_file(oracle_path);
    oracles = read_oracle(oracle_path);
    if (oracles.size() != glyphs.size()) {
      throw CliError{kExitDataError, "oracle line count differs from input"};
    }
  }
  fs::create_directories(out_dir);
  RenderOptions options;
  options.size = size;
  std::vector<std::string> errors(glyphs.size());
  parallel_for(glyphs.size(), jobs, [&](std::size_t i) {
    try {
      const std::vector<ControlPoint>* deleted = nullptr;
      if (!oracles.empty()) deleted = &oracles[i].meta.deleted_points;
      const RgbImage img = render_glyph(glyphs[i], options, deleted);
      std::ostringstream name;
      name << std::setw(5) << std::setfill('0') << i << "_"
           << sanitize_filename(glyphs[i].font_id) << "_"
           << sanitize_filename(glyphs[i].glyph_label) << ".bmp";
      write_bmp(img, (fs::path(out_dir) / name.str()).string());
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < glyphs.size(); ++i) {
    if (!errors[i].empty()) {
      throw CliError{kExitDataError,
                     "line " + std::to_string(i + 1) + ": " + errors[i]};
    }
  }
  std::cout << "rendered " << glyphs.size() << " glyphs -> " << out_dir << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"glyphmend: indication-free contour completion for vector glyphs"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "extract glyphs from TrueType fonts");
  std::string ingest_fonts, ingest_out = "corpus", ingest_split = "0.8,0.1,0.1";
  std::string ingest_charset = "ABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::uint64_t ingest_seed = 0;
  ingest->add_option("--fonts", ingest_fonts, "directory of .ttf fonts")->required();
  ingest->add_option("--out", ingest_out, "output corpus directory");
  ingest->add_option("--split", ingest_split, "train,val,test ratios");
  ingest->add_option("--seed", ingest_seed, "font shuffle seed");
  ingest->add_option("--charset", ingest_charset, "glyphs to extract");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  int synth_count = 100, synth_gpf = 1;
  std::uint64_t synth_seed = 0;
  std::string synth_out = "corpus", synth_split = "0.8,0.1,0.1";
  synth->add_option("--count", synth_count, "number of synthetic fonts")->required();
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", synth_out, "output corpus directory");
  synth->add_option("--split", synth_split, "train,val,test ratios");
  synth->add_option("--glyphs-per-font", synth_gpf, "glyphs per synthetic font");

  // corrupt
  auto* corrupt_cmd = app.add_subcommand("corrupt", "delete control points");
  std::string corrupt_in, corrupt_mode = "random", corrupt_rates = "0.1,0.2,0.3,0.4,0.5";
  std::string corrupt_out;
  std::uint64_t corrupt_seed = 0;
  int corrupt_jobs = 1;
  corrupt_cmd->add_option("--in", corrupt_in, "corpus sequence file")->required();
  corrupt_cmd->add_option("--mode", corrupt_mode, "random | burst");
  corrupt_cmd->add_option("--rates", corrupt_rates, "comma-separated deletion rates");
  corrupt_cmd->add_option("--seed", corrupt_seed, "corruption seed");
  corrupt_cmd->add_option("--out", corrupt_out, "output file prefix");
  corrupt_cmd->add_option("--jobs", corrupt_jobs, "worker threads");

  // train
  auto* train = app.add_subcommand("train", "train a completion model");
  std::string train_config, train_data, train_out = "model.ckpt";
  TrainSetup setup;
  train->add_option("--config", train_config, "key = value config file (overrides flags)");
  train->add_option("--data", train_data, "directory with train*/val* input+target files");
  train->add_option("--out", train_out, "checkpoint output path");
  train->add_option("--arch", setup.arch, "encdec | encoder_only");
  train->add_option("--precision", setup.precision, "float | double");
  train->add_option("--d-model", setup.model.d_model, "embedding width");
  train->add_option("--layers", setup.model.layers, "layers per stack");
  train->add_option("--heads", setup.model.heads, "attention heads");
  train->add_option("--ffn-width", setup.model.ffn_width, "feed-forward width (0 = 4*d_model)");
  train->add_option("--dropout", setup.model.dropout, "dropout rate");
  train->add_option("--batch-size", setup.train.batch_size, "batch size");
  train->add_option("--learning-rate", setup.train.learning_rate, "Adam learning rate");
  train->add_option("--patience", setup.train.patience, "early-stop patience (epochs)");
  train->add_option("--max-epochs", setup.train.max_epochs, "epoch cap");
  train->add_option("--seed", setup.train.seed, "training seed");
  train->add_option("--clip-norm", setup.train.clip_norm, "gradient clip (<=0 disables)");

  // complete
  auto* complete_cmd = app.add_subcommand("complete", "complete corrupted glyphs");
  std::string complete_ckpt, complete_in, complete_out = "pred.jsonl", complete_oracle;
  bool complete_baseline_flag = false;
  int complete_jobs = 1;
  complete_cmd->add_option("--ckpt", complete_ckpt, "model checkpoint")->required();
  complete_cmd->add_option("--in", complete_in, "corrupted input.jsonl")->required();
  complete_cmd->add_option("--out", complete_out, "completions output path");
  complete_cmd->add_flag("--baseline", complete_baseline_flag,
                         "use the encoder-only baseline (needs --oracle)");
  complete_cmd->add_option("--oracle", complete_oracle, "oracle.jsonl for --baseline");
  complete_cmd->add_option("--jobs", complete_jobs, "worker threads");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "score completions against ground truth");
  std::string eval_pred, eval_target, eval_input, eval_report = "report.tsv";
  std::string eval_oracle, eval_manifest;
  int eval_jobs = 1;
  evaluate->add_option("--pred", eval_pred, "completions file")->required();
  evaluate->add_option("--target", eval_target, "ground-truth file")->required();
  evaluate->add_option("--input", eval_input, "corrupted input file")->required();
  evaluate->add_option("--report", eval_report, "TSV report output path");
  evaluate->add_option("--oracle", eval_oracle, "oracle file (adds mode/rate)");
  evaluate->add_option("--manifest", eval_manifest, "corpus manifest (adds style)");
  evaluate->add_option("--jobs", eval_jobs, "worker threads");

  // render
  auto* render = app.add_subcommand("render", "draw glyphs to BMP images");
  std::string render_in, render_out = "renders", render_oracle;
  int render_size = 500, render_jobs = 1;
  render->add_option("--in", render_in, "sequence file")->required();
  render->add_option("--out", render_out, "output directory");
  render->add_option("--oracle", render_oracle, "oracle file (draws deleted points)");
  render->add_option("--size", render_size, "image size in pixels");
  render->add_option("--jobs", render_jobs, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (ingest->parsed()) {
      return run_ingest(ingest_fonts, ingest_out, ingest_split, ingest_seed,
                        ingest_charset);
    }
    if (synth->parsed()) {
      return run_synth(synth_count, synth_seed, synth_out, synth_split, synth_gpf);
    }
    if (corrupt_cmd->parsed()) {
      return run_corrupt(corrupt_in, corrupt_mode, corrupt_rates, corrupt_seed,
                         corrupt_out, corrupt_jobs);
    }
    if (train->parsed()) {
      return run_train(train_config, train_data, train_out, setup);
    }
    if (complete_cmd->parsed()) {
      return run_complete(complete_ckpt, complete_in, complete_out,
                          complete_baseline_flag, complete_oracle, complete_jobs);
    }
    if (evaluate->parsed()) {
      return run_evaluate(eval_pred, eval_target, eval_input, eval_report,
                          eval_oracle, eval_manifest, eval_jobs);
    }
    if (render->parsed()) {
      return run_render(render_in, render_out, render_oracle, render_size,
                        render_jobs);
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return e.code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitUsage;
}
