// End-to-end tests for the glyphmend CLI binary. Each case shells out to
// the real executable (path injected via GLYPHMEND_CLI_PATH) and checks
// exit codes, artifacts, and diagnostics.

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "glyphmend/checkpoint.hpp"
#include "glyphmend/contour.hpp"
#include "glyphmend/sequence_io.hpp"
#include "test_util.hpp"

using namespace glyphmend;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::size_t count_lines(const fs::path& path) {
  const std::string text = slurp(path);
  std::size_t n = 0;
  for (char c : text) {
    if (c == '\n') ++n;
  }
  return n;
}

/// Runs the CLI with the given argument string, capturing exit code and
/// both output streams. `env_prefix` is prepended verbatim (e.g. to set
/// or unset environment variables through env(1)).
CliResult run_cli(const testutil::TempDir& tmp, const std::string& args,
                  const std::string& env_prefix = "") {
  static int counter = 0;
  const fs::path out_file = tmp.path / ("stdout_" + std::to_string(counter) + ".txt");
  const fs::path err_file = tmp.path / ("stderr_" + std::to_string(counter) + ".txt");
  ++counter;
  std::string cmd;
  if (!env_prefix.empty()) cmd += env_prefix + " ";
  cmd += std::string("\"") + GLYPHMEND_CLI_PATH + "\" " + args + " > \"" +
         out_file.string() + "\" 2> \"" + err_file.string() + "\"";
  const int raw = std::system(cmd.c_str());
  CliResult result;
  if (raw != -1 && WIFEXITED(raw)) result.code = WEXITSTATUS(raw);
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, '\t')) fields.push_back(item);
  return fields;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

/// Closed ring of `interior` distinct on-curve points plus the explicit
/// closure record, all inside the unit square.
GlyphSequence ring_glyph(int interior, const std::string& font = "fontA",
                         const std::string& label = "A") {
  GlyphSequence seq;
  seq.font_id = font;
  seq.glyph_label = label;
  for (int i = 0; i < interior; ++i) {
    const double angle = 2.0 * M_PI * i / interior;
    ControlPoint p;
    p.x = 0.5 + 0.3 * std::cos(angle);
    p.y = 0.5 + 0.3 * std::sin(angle);
    p.contour_id = 1;
    p.point_id = i + 1;
    p.flag = CurveFlag::kOnCurve;
    seq.points.push_back(p);
  }
  ControlPoint closure = seq.points.front();
  closure.point_id = interior + 1;
  seq.points.push_back(closure);
  return seq;
}

}  // namespace

TEST_CASE("cli: full pipeline on a synthetic corpus") {
  testutil::TempDir tmp("glyphmend_cli_pipeline");
  const fs::path corpus = tmp.path / "corpus";
  const fs::path data = tmp.path / "data";
  const fs::path evald = tmp.path / "eval";

  // synth: 50 fonts split 30/10/10.
  {
    const CliResult r = run_cli(
        tmp, "synth --count 50 --seed 7 --out " + corpus.string() +
                 " --split 0.6,0.2,0.2");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("wrote corpus") != std::string::npos);
    for (const char* name : {"train.jsonl", "val.jsonl", "test.jsonl",
                             "manifest.jsonl"}) {
      CHECK(fs::exists(corpus / name));
    }
    CHECK(count_lines(corpus / "train.jsonl") == 30);
    CHECK(count_lines(corpus / "val.jsonl") == 10);
    CHECK(count_lines(corpus / "test.jsonl") == 10);
  }

  // corrupt each split; prefixes produce the train*/val* layout train needs.
  for (const auto& [split, prefix] :
       {std::pair{"train.jsonl", data / "train_"},
        std::pair{"val.jsonl", data / "val_"},
        std::pair{"test.jsonl", evald / "test_"}}) {
    const CliResult r = run_cli(
        tmp, "corrupt --in " + (corpus / split).string() +
                 " --mode random --rates 0.3 --seed 11 --out " + prefix.string());
    REQUIRE(r.code == 0);
  }
  const fs::path eval_input = evald / "test_random_r0.30.input.jsonl";
  const fs::path eval_target = evald / "test_random_r0.30.target.jsonl";
  const fs::path eval_oracle = evald / "test_random_r0.30.oracle.jsonl";
  for (const fs::path* p : {&eval_input, &eval_target, &eval_oracle}) {
    REQUIRE(fs::exists(*p));
  }
  const std::size_t n_eval = count_lines(eval_input);
  REQUIRE(n_eval == 10);
  CHECK(count_lines(eval_target) == n_eval);
  CHECK(count_lines(eval_oracle) == n_eval);

  // train the encoder-decoder briefly; resolved settings are echoed.
  const fs::path ckpt = tmp.path / "model.ckpt";
  {
    const CliResult r = run_cli(
        tmp, "train --data " + data.string() + " --out " + ckpt.string() +
                 " --d-model 16 --layers 1 --heads 2 --ffn-width 32"
                 " --dropout 0 --batch-size 8 --learning-rate 0.003"
                 " --max-epochs 3 --patience 5 --seed 3");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("resolved: arch=encdec") != std::string::npos);
    CHECK(r.out.find("d_model=16") != std::string::npos);
    CHECK(r.out.find("seed=3") != std::string::npos);
    REQUIRE(fs::exists(ckpt));
    REQUIRE(fs::exists(ckpt.string() + ".metrics.jsonl"));
  }

  // checkpoint metadata records the resolved run.
  {
    const Checkpoint loaded = load_checkpoint(ckpt.string());
    CHECK(loaded.meta.at("arch").get<std::string>() == "encdec");
    CHECK(loaded.meta.at("config").at("d_model").get<int>() == 16);
    CHECK(loaded.meta.at("precision").get<std::string>() == "float");
    const int epochs_run = loaded.meta.at("epochs_run").get<int>();
    CHECK(epochs_run >= 1);
    // metrics log: one train and one val line per epoch, all valid JSON.
    const auto lines = read_lines(ckpt.string() + ".metrics.jsonl");
    CHECK(lines.size() == 2 * static_cast<std::size_t>(epochs_run));
    for (const std::string& line : lines) {
      const auto j = nlohmann::json::parse(line);
      CHECK(j.contains("epoch"));
      CHECK(j.contains("phase"));
      CHECK(j.contains("total"));
    }
  }

  // complete: one prediction per input line, all structurally valid.
  const fs::path pred = tmp.path / "pred.jsonl";
  {
    const CliResult r = run_cli(tmp, "complete --ckpt " + ckpt.string() +
                                         " --in " + eval_input.string() +
                                         " --out " + pred.string());
    REQUIRE(r.code == 0);
    const auto preds = read_sequences(pred);
    REQUIRE(preds.size() == n_eval);
    for (const GlyphSequence& p : preds) {
      CHECK(validate(p).empty());
      CHECK(p.completion.has_value());
    }
  }

  // evaluate: TSV report with the full row schema plus a curves file.
  const fs::path report = tmp.path / "report.tsv";
  {
    const CliResult r = run_cli(
        tmp, "evaluate --pred " + pred.string() + " --target " +
                 eval_target.string() + " --input " + eval_input.string() +
                 " --report " + report.string() + " --oracle " +
                 eval_oracle.string() + " --manifest " +
                 (corpus / "manifest.jsonl").string());
    REQUIRE(r.code == 0);
    CHECK(r.out.find("rows: " + std::to_string(n_eval)) != std::string::npos);
    const auto lines = read_lines(report);
    REQUIRE(lines.size() == n_eval + 1);
    CHECK(lines[0] ==
          "font_id\tglyph\tstyle\tmode\trate\tl1_input\tl1_pred\t"
          "hausdorff_input\thausdorff_pred");
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto fields = split_tabs(lines[i]);
      REQUIRE(fields.size() == 9);
      CHECK(fields[2] != "unknown");  // manifest resolves the style
      CHECK(fields[3] == "random");
      CHECK(std::stod(fields[4]) == doctest::Approx(0.3));
      for (int k = 5; k < 9; ++k) CHECK(std::stod(fields[k]) >= 0.0);
    }
    CHECK(fs::exists(tmp.path / "report.curves.tsv"));
  }

  // evaluate with pred == target: every prediction distance is zero.
  {
    const fs::path report0 = tmp.path / "report_zero.tsv";
    const CliResult r = run_cli(
        tmp, "evaluate --pred " + eval_target.string() + " --target " +
                 eval_target.string() + " --input " + eval_input.string() +
                 " --report " + report0.string());
    REQUIRE(r.code == 0);
    const auto lines = read_lines(report0);
    REQUIRE(lines.size() == n_eval + 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto fields = split_tabs(lines[i]);
      REQUIRE(fields.size() == 9);
      CHECK(std::stod(fields[6]) == 0.0);  // l1_pred
      CHECK(std::stod(fields[8]) == 0.0);  // hausdorff_pred
    }
  }

  // render predictions, then the corrupted inputs with deletion markers.
  {
    const fs::path renders = tmp.path / "renders";
    const CliResult r = run_cli(tmp, "render --in " + pred.string() +
                                         " --out " + renders.string() +
                                         " --size 32");
    REQUIRE(r.code == 0);
    std::size_t bmps = 0;
    for (const auto& entry : fs::directory_iterator(renders)) {
      if (entry.path().extension() == ".bmp") {
        ++bmps;
        const std::string bytes = slurp(entry.path());
        REQUIRE(bytes.size() > 2);
        CHECK(bytes[0] == 'B');
        CHECK(bytes[1] == 'M');
      }
    }
    CHECK(bmps == n_eval);

    const CliResult r2 = run_cli(
        tmp, "render --in " + eval_input.string() + " --out " +
                 (tmp.path / "renders_in").string() + " --oracle " +
                 eval_oracle.string() + " --size 32");
    CHECK(r2.code == 0);
  }

  // encoder-only baseline: train with oracles, complete with --baseline.
  const fs::path base_ckpt = tmp.path / "baseline.ckpt";
  {
    const CliResult r = run_cli(
        tmp, "train --arch encoder_only --data " + data.string() + " --out " +
                 base_ckpt.string() +
                 " --d-model 16 --layers 1 --heads 2 --ffn-width 32"
                 " --dropout 0 --batch-size 8 --learning-rate 0.003"
                 " --max-epochs 2 --patience 5 --seed 3");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("resolved: arch=encoder_only") != std::string::npos);
  }
  {
    const fs::path pred_base = tmp.path / "pred_baseline.jsonl";
    const CliResult r = run_cli(
        tmp, "complete --ckpt " + base_ckpt.string() + " --in " +
                 eval_input.string() + " --baseline --oracle " +
                 eval_oracle.string() + " --out " + pred_base.string());
    REQUIRE(r.code == 0);
    const auto preds = read_sequences(pred_base);
    REQUIRE(preds.size() == n_eval);
    for (const GlyphSequence& p : preds) CHECK(validate(p).empty());
  }

  // architecture mismatches are config errors (exit 3).
  {
    const CliResult r = run_cli(tmp, "complete --ckpt " + base_ckpt.string() +
                                         " --in " + eval_input.string() +
                                         " --out " + (tmp.path / "x.jsonl").string());
    CHECK(r.code == 3);
    CHECK(r.err.find("checkpoint arch") != std::string::npos);
  }
  {
    const CliResult r = run_cli(
        tmp, "complete --ckpt " + ckpt.string() + " --in " +
                 eval_input.string() + " --baseline --oracle " +
                 eval_oracle.string() + " --out " + (tmp.path / "x.jsonl").string());
    CHECK(r.code == 3);
  }
  // --baseline without --oracle is a usage error (exit 1).
  {
    const CliResult r = run_cli(tmp, "complete --ckpt " + base_ckpt.string() +
                                         " --in " + eval_input.string() +
                                         " --baseline --out " +
                                         (tmp.path / "x.jsonl").string());
    CHECK(r.code == 1);
    CHECK(r.err.find("--oracle") != std::string::npos);
  }

  // config file overrides flags; flags override defaults.
  {
    const fs::path cfg = tmp.path / "train.cfg";
    std::ofstream(cfg) << "# overrides\n"
                       << "d_model = 32\n"
                       << "max_epochs = 1\n";
    const fs::path ckpt2 = tmp.path / "model_cfg.ckpt";
    const CliResult r = run_cli(
        tmp, "train --config " + cfg.string() + " --data " + data.string() +
                 " --out " + ckpt2.string() +
                 " --d-model 16 --layers 1 --heads 2 --ffn-width 32"
                 " --dropout 0 --batch-size 8 --max-epochs 9 --seed 3");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("d_model=32") != std::string::npos);   // file beats flag
    CHECK(r.out.find("max_epochs=1") != std::string::npos);
    CHECK(r.out.find("layers=1") != std::string::npos);     // flag beats default
    const Checkpoint loaded = load_checkpoint(ckpt2.string());
    CHECK(loaded.meta.at("config").at("d_model").get<int>() == 32);
    CHECK(loaded.meta.at("epochs_run").get<int>() == 1);
  }

  // GLYPHMEND_DATA_DIR supplies the default data directory.
  {
    const fs::path ckpt3 = tmp.path / "model_env.ckpt";
    const CliResult r = run_cli(
        tmp, "train --out " + ckpt3.string() +
                 " --d-model 16 --layers 1 --heads 2 --ffn-width 32"
                 " --dropout 0 --batch-size 8 --max-epochs 1 --seed 3",
        "env GLYPHMEND_DATA_DIR=" + data.string());
    REQUIRE(r.code == 0);
    CHECK(fs::exists(ckpt3));
  }
  {
    const CliResult r = run_cli(
        tmp, "train --out " + (tmp.path / "x.ckpt").string(),
        "env -u GLYPHMEND_DATA_DIR");
    CHECK(r.code == 1);
    CHECK(r.err.find("--data") != std::string::npos);
  }
}

TEST_CASE("cli: subcommands are deterministic given explicit seeds") {
  testutil::TempDir tmp("glyphmend_cli_determinism");
  const fs::path a = tmp.path / "a";
  const fs::path b = tmp.path / "b";
  for (const fs::path* dir : {&a, &b}) {
    const CliResult r = run_cli(
        tmp, "synth --count 6 --seed 9 --out " + dir->string());
    REQUIRE(r.code == 0);
  }
  for (const char* name : {"train.jsonl", "val.jsonl", "test.jsonl",
                           "manifest.jsonl"}) {
    CHECK(slurp(a / name) == slurp(b / name));
  }

  for (const char* tag : {"c1", "c2"}) {
    const CliResult r = run_cli(
        tmp, "corrupt --in " + (a / "train.jsonl").string() +
                 " --mode burst --rates 0.2,0.4 --seed 5 --out " +
                 (tmp.path / tag / "t_").string());
    REQUIRE(r.code == 0);
  }
  for (const char* name :
       {"t_burst_r0.20.input.jsonl", "t_burst_r0.40.input.jsonl",
        "t_burst_r0.20.oracle.jsonl"}) {
    const std::string run1 = slurp(tmp.path / "c1" / name);
    CHECK(!run1.empty());
    CHECK(run1 == slurp(tmp.path / "c2" / name));
  }
}

TEST_CASE("cli: corrupt removes round(rate * N) points") {
  testutil::TempDir tmp("glyphmend_cli_arith");
  const fs::path in = tmp.path / "glyph.jsonl";
  write_sequences(in, {ring_glyph(19)});  // closure record makes 20 points

  const CliResult r = run_cli(
      tmp, "corrupt --in " + in.string() + " --mode random --rates 0.5"
               " --seed 1 --out " + (tmp.path / "g_").string());
  REQUIRE(r.code == 0);

  const auto inputs = read_sequences(tmp.path / "g_random_r0.50.input.jsonl");
  REQUIRE(inputs.size() == 1);
  CHECK(inputs[0].points.size() == 10);  // 20 - round(0.5 * 20)
  CHECK(inputs[0].corrupted);
  CHECK(validate(inputs[0]).empty());

  const auto targets = read_sequences(tmp.path / "g_random_r0.50.target.jsonl");
  REQUIRE(targets.size() == 1);
  CHECK(targets[0].points == ring_glyph(19).points);

  const auto oracle = read_oracle(tmp.path / "g_random_r0.50.oracle.jsonl");
  REQUIRE(oracle.size() == 1);
  CHECK(oracle[0].meta.deleted_points.size() == 10);
}

TEST_CASE("cli: usage errors exit 1") {
  testutil::TempDir tmp("glyphmend_cli_usage");
  const fs::path in = tmp.path / "glyph.jsonl";
  write_sequences(in, {ring_glyph(19)});

  CHECK(run_cli(tmp, "").code == 1);                  // no subcommand
  CHECK(run_cli(tmp, "frobnicate").code == 1);        // unknown subcommand
  CHECK(run_cli(tmp, "synth --count 5 --bogus").code == 1);
  CHECK(run_cli(tmp, "synth --count 0 --out " + (tmp.path / "c").string())
            .code == 1);
  {
    const CliResult r = run_cli(
        tmp, "corrupt --in " + in.string() + " --mode typo --rates 0.3");
    CHECK(r.code == 1);
    CHECK(r.err.find("unknown deletion mode") != std::string::npos);
  }
  CHECK(run_cli(tmp, "corrupt --in " + in.string() + " --rates 1.5").code == 1);
  CHECK(run_cli(tmp, "corrupt --in " + in.string() + " --rates ,,").code == 1);
  CHECK(run_cli(tmp, "--help").code == 0);  // help is not an error
}

TEST_CASE("cli: missing files exit 2") {
  testutil::TempDir tmp("glyphmend_cli_missing");
  const std::string gone = (tmp.path / "nope.jsonl").string();
  {
    const CliResult r = run_cli(tmp, "corrupt --in " + gone);
    CHECK(r.code == 2);
    CHECK(r.err.find("missing file") != std::string::npos);
  }
  CHECK(run_cli(tmp, "render --in " + gone).code == 2);
  CHECK(run_cli(tmp, "complete --ckpt " + gone + " --in " + gone).code == 2);
  CHECK(run_cli(tmp, "evaluate --pred " + gone + " --target " + gone +
                         " --input " + gone).code == 2);
  CHECK(run_cli(tmp, "train --data " + (tmp.path / "no_dir").string()).code == 2);
  CHECK(run_cli(tmp, "ingest --fonts " + (tmp.path / "no_fonts").string())
            .code == 2);
  // data dir exists but holds no training pairs
  fs::create_directories(tmp.path / "empty");
  CHECK(run_cli(tmp, "train --data " + (tmp.path / "empty").string()).code == 2);
  // config file path must exist
  fs::create_directories(tmp.path / "d");
  CHECK(run_cli(tmp, "train --data " + (tmp.path / "d").string() +
                         " --config " + gone).code == 2);
}

TEST_CASE("cli: configuration mismatches exit 3") {
  testutil::TempDir tmp("glyphmend_cli_config");
  const fs::path data = tmp.path / "d";
  fs::create_directories(data);
  const std::string train_tail = " train --data " + data.string();

  // arch / precision / model validation run before any data loading.
  CHECK(run_cli(tmp, "train --data " + data.string() + " --arch bogus").code == 3);
  CHECK(run_cli(tmp, "train --data " + data.string() + " --precision half"
                         " --d-model 16 --layers 1 --heads 2").code == 3);
  {
    const CliResult r = run_cli(
        tmp, "train --data " + data.string() + " --d-model 10 --heads 2");
    CHECK(r.code == 3);
  }

  // config file diagnostics carry file:line context.
  const auto with_config = [&](const std::string& body) {
    static int n = 0;
    const fs::path cfg = tmp.path / ("cfg" + std::to_string(n++) + ".cfg");
    std::ofstream(cfg) << body;
    return run_cli(tmp, "train --data " + data.string() + " --config " +
                            cfg.string());
  };
  {
    const CliResult r = with_config("warp_factor = 9\n");
    CHECK(r.code == 3);
    CHECK(r.err.find("unknown config key") != std::string::npos);
    CHECK(r.err.find(":1") != std::string::npos);
  }
  {
    const CliResult r = with_config("# fine\nthis line has no equals\n");
    CHECK(r.code == 3);
    CHECK(r.err.find(":2") != std::string::npos);
  }
  {
    const CliResult r = with_config("d_model = abc\n");
    CHECK(r.code == 3);
    CHECK(r.err.find("bad value") != std::string::npos);
  }

  // a non-checkpoint file fails completion as a config mismatch.
  const fs::path junk = tmp.path / "junk.ckpt";
  std::ofstream(junk) << "not a checkpoint";
  const fs::path in = tmp.path / "glyph.jsonl";
  write_sequences(in, {ring_glyph(12)});
  {
    const CliResult r = run_cli(tmp, "complete --ckpt " + junk.string() +
                                         " --in " + in.string());
    CHECK(r.code == 3);
    CHECK(r.err.find("not a checkpoint file") != std::string::npos);
  }
}

TEST_CASE("cli: data errors exit 4") {
  testutil::TempDir tmp("glyphmend_cli_data");
  const fs::path two = tmp.path / "two.jsonl";
  const fs::path one = tmp.path / "one.jsonl";
  write_sequences(two, {ring_glyph(12, "f", "A"), ring_glyph(8, "f", "B")});
  write_sequences(one, {ring_glyph(12, "f", "A")});

  // malformed JSON lines
  const fs::path bad = tmp.path / "bad.jsonl";
  std::ofstream(bad) << "this is not json\n";
  CHECK(run_cli(tmp, "corrupt --in " + bad.string() + " --rates 0.3").code == 4);
  CHECK(run_cli(tmp, "render --in " + bad.string() + " --out " +
                         (tmp.path / "r").string()).code == 4);

  // pred/target/input line counts must agree
  {
    const CliResult r = run_cli(
        tmp, "evaluate --pred " + two.string() + " --target " + one.string() +
                 " --input " + two.string() + " --report " +
                 (tmp.path / "rep.tsv").string());
    CHECK(r.code == 4);
    CHECK(r.err.find("line counts differ") != std::string::npos);
  }

  // oracle sidecar must match the rendered file line for line
  {
    const CliResult c = run_cli(
        tmp, "corrupt --in " + one.string() + " --mode random --rates 0.3"
                 " --seed 2 --out " + (tmp.path / "o_").string());
    REQUIRE(c.code == 0);
    const CliResult r = run_cli(
        tmp, "render --in " + two.string() + " --out " +
                 (tmp.path / "r2").string() + " --oracle " +
                 (tmp.path / "o_random_r0.30.oracle.jsonl").string());
    CHECK(r.code == 4);
    CHECK(r.err.find("oracle") != std::string::npos);
  }
}
