#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "hymo/binio.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout only; stderr goes to a file
};

// Runs the built CLI binary; stderr is captured separately so the
// data/diagnostics stream separation stays observable.
RunResult run_cli(const std::string& args) {
  const std::string err_file = (fs::temp_directory_path() / "hymo_cli_stderr.txt").string();
  const std::string cmd = std::string(HYMO_CLI_PATH) + " " + args + " 2>" + err_file;
  RunResult r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read_stderr() {
  return hymo::read_file((fs::temp_directory_path() / "hymo_cli_stderr.txt").string());
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("hymo_cli_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("check-arith prints fixed-width semantics verdicts as JSON") {
  auto r = run_cli("check-arith --op add --signed false --width 8 --x 200 --y 100");
  REQUIRE(r.exit_code == 0);
  json j = json::parse(r.output);
  CHECK(j["in_bounds"] == false);
  CHECK(j["bound_violation"] == "overflow");
  CHECK(j["semantic_result"] == "44");

  auto div0 = run_cli("check-arith --op div --signed false --width 8 --x 5 --y 0 "
                      "--solc-version 0.4.24");
  json jd = json::parse(div0.output);
  CHECK(jd["semantic_result"] == "INVALID");
  CHECK(jd["bound_violation"] == "div_by_zero");

  auto old = run_cli("check-arith --op div --signed false --width 8 --x 5 --y 0 "
                     "--solc-version 0.3.6");
  CHECK(json::parse(old.output)["semantic_result"] == "0");

  auto corner = run_cli("check-arith --op div --signed true --width 8 --x -128 --y -1");
  CHECK(json::parse(corner.output)["semantic_result"] == "-128");
}

TEST_CASE("check-arith rejects bad widths with a nonzero exit") {
  auto r = run_cli("check-arith --op add --signed false --width 1 --x 0 --y 0");
  CHECK(r.exit_code != 0);
  CHECK(r.output.empty());  // errors go to stderr, not stdout
  CHECK(read_stderr().find("width") != std::string::npos);
}

TEST_CASE("disasm decodes bytecode to mnemonics") {
  auto r = run_cli("disasm --bytecode 0x6001");
  CHECK(r.exit_code == 0);
  CHECK(r.output == "PUSH1\n");

  auto empty = run_cli("disasm --bytecode 0x");
  CHECK(empty.exit_code == 0);
  CHECK(empty.output == "\n");

  auto odd = run_cli("disasm --bytecode 0x601");
  CHECK(odd.exit_code != 0);

  auto prelude = run_cli("disasm --bytecode 0x6080604052");
  CHECK(prelude.output == "PUSH1 PUSH1 MSTORE\n");
}

TEST_CASE("synth writes balanced manifests deterministically") {
  TempDir a("synth_a"), b("synth_b");
  auto r1 = run_cli("synth --count 4 --seed 9 --out-dir " + a.str());
  REQUIRE(r1.exit_code == 0);
  CHECK(r1.output.find("seed 9") != std::string::npos);

  std::ifstream manifest(a.path / "manifest.jsonl");
  int lines = 0, ones = 0;
  std::string line;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    ++lines;
    ones += json::parse(line)["label"] == 1 ? 1 : 0;
  }
  CHECK(lines == 4);
  CHECK(ones == 2);

  auto r2 = run_cli("synth --count 4 --seed 9 --out-dir " + b.str());
  REQUIRE(r2.exit_code == 0);
  CHECK(hymo::read_file((a.path / "manifest.jsonl").string()) ==
        hymo::read_file((b.path / "manifest.jsonl").string()));

  auto odd = run_cli("synth --count 5 --seed 1 --out-dir " + a.str());
  CHECK(odd.exit_code != 0);
}

TEST_CASE("preprocess emits token files and re-runs byte-identically") {
  TempDir corpus("pre_corpus");
  TempDir out("pre_out");
  REQUIRE(run_cli("synth --count 4 --seed 3 --out-dir " + corpus.str()).exit_code == 0);

  auto r = run_cli("preprocess --manifest " + corpus.str() + "/manifest.jsonl --out-dir " +
                   out.str());
  REQUIRE(r.exit_code == 0);

  int clean_files = 0, token_files = 0;
  for (const auto& e : fs::directory_iterator(out.path)) {
    const std::string name = e.path().filename().string();
    if (name.ends_with(".clean.sol")) ++clean_files;
    if (name.ends_with(".tokens.txt")) ++token_files;
  }
  CHECK(clean_files == 4);
  CHECK(token_files == 4);

  // Re-run into the same directory and compare bytes of one file pair.
  std::string before, after;
  fs::path sample_file;
  for (const auto& e : fs::directory_iterator(out.path))
    if (e.path().string().ends_with(".tokens.txt")) sample_file = e.path();
  before = hymo::read_file(sample_file.string());
  REQUIRE(run_cli("preprocess --manifest " + corpus.str() + "/manifest.jsonl --out-dir " +
                  out.str())
              .exit_code == 0);
  after = hymo::read_file(sample_file.string());
  CHECK(before == after);

  auto bad = run_cli("preprocess --manifest /nonexistent/m.jsonl --out-dir " + out.str());
  CHECK(bad.exit_code != 0);
}

TEST_CASE("train rejects unknown config names listing the valid ones") {
  TempDir corpus("train_corpus");
  REQUIRE(run_cli("synth --count 4 --seed 5 --out-dir " + corpus.str()).exit_code == 0);
  auto r = run_cli("train --manifest " + corpus.str() +
                   "/manifest.jsonl --config FBXX --emb-src /tmp/nope1 --emb-op /tmp/nope2 "
                   "--out /tmp/nope3");
  CHECK(r.exit_code != 0);
  const std::string err = read_stderr();
  CHECK(err.find("WCWC") != std::string::npos);
  CHECK(err.find("FBFB") != std::string::npos);
}

TEST_CASE("full CLI pipeline: synth, embed-train, train, eval") {
  TempDir dir("pipeline");
  const std::string d = dir.str();
  REQUIRE(run_cli("synth --count 20 --seed 77 --out-dir " + d + "/corpus").exit_code == 0);
  REQUIRE(run_cli("preprocess --manifest " + d + "/corpus/manifest.jsonl --out-dir " + d +
                  "/tokens")
              .exit_code == 0);
  REQUIRE(run_cli("disasm --manifest " + d + "/corpus/manifest.jsonl --out " + d + "/opcodes")
              .exit_code == 0);

  // Token files for embeddings: source tokens and opcode streams.
  auto emb = run_cli("embed-train --tokens-dir " + d + "/tokens --mode fasttext --dim 8 "
                     "--epochs 10 --buckets 1024 --seed 7 --out " + d + "/src.emb");
  REQUIRE(emb.exit_code == 0);
  CHECK(emb.output.find("seed=7") != std::string::npos);
  REQUIRE(run_cli("embed-train --tokens-dir " + d + "/opcodes --mode fasttext --dim 8 "
                  "--epochs 10 --buckets 1024 --seed 7 --out " + d + "/op.emb")
              .exit_code == 0);

  auto tr = run_cli("train --manifest " + d + "/corpus/manifest.jsonl --config FBFB "
                    "--emb-src " + d + "/src.emb --emb-op " + d + "/op.emb "
                    "--lr 0.05 --batch 2 --epochs 10 --dropout 0.0 --seed 11 "
                    "--gru-units 8 --cnn-filters 4 --cnn-kernel 2 --seq-len-src 48 "
                    "--seq-len-op 48 --fusion-hidden 32 --out " + d + "/model.ckpt");
  REQUIRE(tr.exit_code == 0);
  CHECK(tr.output.find("lr=0.05") != std::string::npos);
  CHECK(fs::exists(d + "/model.ckpt"));
  CHECK(fs::exists(d + "/model.ckpt.losses.json"));

  auto ev = run_cli("eval --checkpoint " + d + "/model.ckpt --manifest " + d +
                    "/corpus/manifest.jsonl --emb-src " + d + "/src.emb --emb-op " + d +
                    "/op.emb");
  REQUIRE(ev.exit_code == 0);
  json metrics = json::parse(ev.output);
  CHECK(metrics.contains("accuracy"));
  CHECK(metrics.contains("precision"));
  CHECK(metrics.contains("recall"));
  CHECK(metrics.contains("f1"));
  CHECK(metrics["accuracy"].get<double>() == 1.0);  // fits the separable corpus

  // Recorded checkpoint hash must match the file's actual hash.
  CHECK(metrics["checkpoint_hash"].get<std::string>() ==
        hymo::to_hex64(hymo::hash_file(d + "/model.ckpt")));

  // Tampered embeddings are rejected by the hash check.
  auto bytes = hymo::read_file(d + "/src.emb");
  bytes.back() = static_cast<char>(bytes.back() ^ 0x01);
  hymo::write_file(d + "/src_tampered.emb", bytes);
  auto tampered = run_cli("eval --checkpoint " + d + "/model.ckpt --manifest " + d +
                          "/corpus/manifest.jsonl --emb-src " + d + "/src_tampered.emb --emb-op " +
                          d + "/op.emb");
  CHECK(tampered.exit_code != 0);
}

TEST_CASE("help output carries the published defaults") {
  auto train_help = run_cli("train --help");
  CHECK(train_help.output.find("0.001") != std::string::npos);
  CHECK(train_help.output.find("128") != std::string::npos);
  CHECK(train_help.output.find("50") != std::string::npos);
  CHECK(train_help.output.find("0.5") != std::string::npos);

  auto emb_help = run_cli("embed-train --help");
  CHECK(emb_help.output.find("300") != std::string::npos);

  for (const std::string sub :
       {"preprocess", "disasm", "embed-train", "train", "eval", "check-arith", "synth",
        "self-compare"}) {
    auto h = run_cli(sub + " --help");
    CAPTURE(sub);
    CHECK(h.exit_code == 0);
    CHECK(h.output.find("--help") != std::string::npos);
  }

  auto unknown_flag = run_cli("synth --count 4 --seed 1 --no-such-flag --out-dir /tmp/x");
  CHECK(unknown_flag.exit_code != 0);
}
