// hymo: command-line front end for the smart-contract arithmetic-vulnerability
// detection pipeline. One subcommand per pipeline stage; every randomized
// stage takes (and echoes) an explicit seed.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <json.hpp>

#include "hymo/arithsem.hpp"
#include "hymo/binio.hpp"
#include "hymo/corpus.hpp"
#include "hymo/embed.hpp"
#include "hymo/evmdis.hpp"
#include "hymo/hymodel.hpp"
#include "hymo/solprep.hpp"
#include "hymo/trainkit.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hymo;

namespace {

std::string resolve_solc(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  const char* env = std::getenv("HYMO_SOLC");
  return env ? env : "";
}

std::string file_stem(const std::string& id, size_t index) {
  std::string stem;
  for (char c : id)
    stem.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  if (stem.empty()) stem = "sample";
  return stem + "_" + std::to_string(index);
}

int cmd_preprocess(const std::string& manifest, const std::string& out_dir) {
  auto samples = load_manifest(manifest);
  fs::create_directories(out_dir);
  int failures = 0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    try {
      if (s.source_text.empty())
        throw std::runtime_error("sample \"" + s.id + "\" has no source text");
      std::vector<std::string> warnings;
      const std::string cleaned = clean_source(s.source_text, &warnings);
      for (const auto& w : warnings) std::cerr << s.id << ": warning: " << w << "\n";
      const TokenSequence tokens = tokenize(cleaned, s.id);
      const std::string stem = file_stem(s.id, i);
      write_file((fs::path(out_dir) / (stem + ".clean.sol")).string(), cleaned);
      std::string token_text;
      for (const auto& t : tokens.tokens) {
        token_text += t;
        token_text.push_back('\n');
      }
      write_file((fs::path(out_dir) / (stem + ".tokens.txt")).string(), token_text);
    } catch (const std::exception& e) {
      std::cerr << "preprocess failed for sample " << s.id << ": " << e.what() << "\n";
      ++failures;
    }
  }
  std::cout << "preprocessed " << (samples.size() - static_cast<size_t>(failures)) << "/"
            << samples.size() << " samples into " << out_dir << "\n";
  return failures == 0 ? 0 : 1;
}

std::string joined_mnemonics(const OpcodeSequence& seq) {
  std::string out;
  for (const auto& m : seq.mnemonics) {
    if (!out.empty()) out.push_back(' ');
    out += m;
  }
  return out;
}

int cmd_disasm(const std::string& manifest, const std::string& bytecode, const std::string& out,
               const std::string& solc) {
  if (!bytecode.empty()) {
    const std::string text = joined_mnemonics(disassemble(parse_hex(bytecode)));
    if (out.empty())
      std::cout << text << "\n";
    else
      write_file(out, text + "\n");
    return 0;
  }
  if (manifest.empty()) throw CLI::ValidationError("disasm needs --manifest or --bytecode");
  if (out.empty()) throw CLI::ValidationError("manifest mode needs --out <dir>");
  auto samples = load_manifest(manifest);
  fs::create_directories(out);
  int failures = 0;
  for (size_t i = 0; i < samples.size(); ++i) {
    try {
      const OpcodeSequence seq = acquire_opcodes(samples[i], resolve_solc(solc));
      write_file((fs::path(out) / (file_stem(samples[i].id, i) + ".opcodes.txt")).string(),
                 joined_mnemonics(seq) + "\n");
    } catch (const std::exception& e) {
      std::cerr << "disasm failed for sample " << samples[i].id << ": " << e.what() << "\n";
      ++failures;
    }
  }
  std::cout << "disassembled " << (samples.size() - static_cast<size_t>(failures)) << "/"
            << samples.size() << " samples into " << out << "\n";
  return failures == 0 ? 0 : 1;
}

int cmd_embed_train(const std::string& tokens_dir, const EmbeddingConfig& config,
                    const std::string& out) {
  if (!fs::is_directory(tokens_dir))
    throw std::runtime_error("tokens directory not found: " + tokens_dir);
  std::map<std::string, fs::path> files;  // sorted by name for determinism
  for (const auto& entry : fs::directory_iterator(tokens_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      files[entry.path().filename().string()] = entry.path();
  TokenCorpus corpus;
  for (const auto& [name, path] : files) {
    std::ifstream in(path);
    std::vector<std::string> tokens;
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    if (!tokens.empty()) corpus.push_back(std::move(tokens));
  }
  if (corpus.empty()) throw std::runtime_error("no token files in " + tokens_dir);

  std::cout << "training " << embed_kind_name(config.mode) << " embeddings: dim=" << config.dim
            << " window=" << config.window << " negatives=" << config.negatives
            << " epochs=" << config.epochs << " lr=" << config.lr << " seed=" << config.seed
            << " on " << corpus.size() << " sequences\n";
  EmbeddingModel model = train_embeddings(corpus, config);
  save_embedding(model, out);
  std::cout << "saved embedding checkpoint to " << out << " (vocab " << model.vocab.size()
            << ", hash " << to_hex64(hash_file(out)) << ")\n";
  return 0;
}

struct TrainFlags {
  std::string manifest, config_name, emb_src, emb_op, out, loss_out, solc;
  double val_fraction = 0.0;
  HyperParams hp;
  ModelDims dims;
};

int cmd_train(const TrainFlags& f) {
  hybrid_config(f.config_name);  // validate the name before any file work

  auto samples = load_manifest(f.manifest);
  DatasetSplit split;
  split.seed = f.hp.seed;
  if (f.val_fraction > 0.0) {
    // Escape hatch: hold out a stratified fraction for post-training
    // validation metrics. No early stopping; the protocol stays fixed-epoch.
    DatasetSplit holdout = stratified_split(samples, f.val_fraction, f.hp.seed);
    split.train = std::move(holdout.train);
    split.test = std::move(holdout.test);
  } else {
    split.train = samples;
  }

  EmbeddingModel emb_src = load_embedding(f.emb_src);
  EmbeddingModel emb_op = load_embedding(f.emb_op);

  ModelDims dims = f.dims;
  dims.dropout_p = f.hp.dropout_p;
  HybridConfig cfg = hybrid_config(f.config_name, dims);
  cfg.branch1.embed_dim = emb_src.config.dim;
  cfg.branch2.embed_dim = emb_op.config.dim;

  EmbeddingSet set;
  auto& src_slot =
      cfg.branch1.embedding == EmbedKind::word2vec ? set.source_word2vec : set.source_fasttext;
  auto& op_slot =
      cfg.branch2.embedding == EmbedKind::word2vec ? set.opcode_word2vec : set.opcode_fasttext;
  src_slot = std::move(emb_src);
  op_slot = std::move(emb_op);

  std::cout << "training " << f.config_name << ": lr=" << f.hp.lr << " batch=" << f.hp.batch_size
            << " epochs=" << f.hp.epochs << " dropout=" << f.hp.dropout_p
            << " seed=" << f.hp.seed << " samples=" << split.train.size() << "\n";

  TrainResult result = train(cfg, split, f.hp, set, resolve_solc(f.solc));
  result.model.emb_hash_branch1 = to_hex64(hash_file(f.emb_src));
  result.model.emb_hash_branch2 = to_hex64(hash_file(f.emb_op));
  save_checkpoint(result.model, f.out);

  if (!split.test.empty()) {
    Metrics vm = evaluate(result.model, split.test, set, resolve_solc(f.solc));
    std::cout << "validation (" << split.test.size() << " held-out samples): accuracy "
              << vm.accuracy << ", precision " << vm.precision << ", recall " << vm.recall
              << ", f1 " << vm.f1 << "\n";
  }

  json losses = json::array();
  for (double l : result.epoch_losses) losses.push_back(l);
  const std::string loss_path = f.loss_out.empty() ? f.out + ".losses.json" : f.loss_out;
  write_file(loss_path, json{{"epoch_losses", losses}}.dump(2) + "\n");
  std::cout << "saved model checkpoint to " << f.out << " (hash " << to_hex64(hash_file(f.out))
            << "), loss log to " << loss_path << "\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& manifest,
             const std::string& emb_src, const std::string& emb_op, const std::string& out,
             const std::string& solc) {
  auto samples = load_manifest(manifest);
  if (samples.empty()) throw std::runtime_error("manifest has no samples: " + manifest);
  HybridModel<float> model = load_checkpoint(checkpoint);

  const std::string src_hash = to_hex64(hash_file(emb_src));
  const std::string op_hash = to_hex64(hash_file(emb_op));
  if (!model.emb_hash_branch1.empty() && model.emb_hash_branch1 != src_hash)
    throw std::runtime_error("embedding file " + emb_src + " (hash " + src_hash +
                             ") does not match the checkpoint's recorded hash " +
                             model.emb_hash_branch1);
  if (!model.emb_hash_branch2.empty() && model.emb_hash_branch2 != op_hash)
    throw std::runtime_error("embedding file " + emb_op + " (hash " + op_hash +
                             ") does not match the checkpoint's recorded hash " +
                             model.emb_hash_branch2);

  EmbeddingSet set;
  EmbeddingModel src_model = load_embedding(emb_src);
  EmbeddingModel op_model = load_embedding(emb_op);
  auto& src_slot = model.config.branch1.embedding == EmbedKind::word2vec ? set.source_word2vec
                                                                         : set.source_fasttext;
  auto& op_slot = model.config.branch2.embedding == EmbedKind::word2vec ? set.opcode_word2vec
                                                                        : set.opcode_fasttext;
  src_slot = std::move(src_model);
  op_slot = std::move(op_model);

  Metrics m = evaluate(model, samples, set, resolve_solc(solc));
  json j = {{"config", model.config.name},
            {"checkpoint_hash", to_hex64(hash_file(checkpoint))},
            {"samples", samples.size()},
            {"tp", m.tp},
            {"fp", m.fp},
            {"tn", m.tn},
            {"fn", m.fn},
            {"accuracy", m.accuracy},
            {"precision", m.precision},
            {"recall", m.recall},
            {"f1", m.f1}};
  const std::string text = j.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
  return 0;
}

int cmd_check_arith(const std::string& op_name, bool is_signed, int width, const std::string& x,
                    const std::string& y, const std::string& version_str) {
  auto kind = arith_kind_from_name(op_name);
  if (!kind)
    throw std::runtime_error("unknown --op \"" + op_name +
                             "\"; valid: add, sub, mul, div, mod");
  std::vector<std::string> warnings;
  PragmaSpec pv = extract_pragma("pragma solidity " + version_str + ";", &warnings);
  if (pv.constraint_kind == PragmaKind::none_found)
    throw std::runtime_error("bad --solc-version \"" + version_str + "\"");

  ArithOp op{*kind, is_signed, width, pv.lower_bound};
  ArithVerdict v = check(op, BigInt(x), BigInt(y));

  json j;
  j["op"] = op_name;
  j["signed"] = is_signed;
  j["width"] = width;
  j["solidity_version"] = pv.lower_bound.str();
  j["x"] = x;
  j["y"] = y;
  j["in_bounds"] = v.in_bounds;
  j["bound_violation"] = v.violation ? json(bound_violation_name(*v.violation)) : json(nullptr);
  if (v.is_invalid)
    j["semantic_result"] = "INVALID";
  else
    j["semantic_result"] = v.value.str();
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_synth(int count, std::uint64_t seed, const std::string& out_dir) {
  auto samples = synth_corpus(count, seed);
  const std::string manifest = save_manifest(samples, out_dir);
  std::cout << "wrote " << samples.size() << " samples (seed " << seed << ") to " << manifest
            << "\n";
  return 0;
}

struct SelfCompareFlags {
  std::string manifest, emb_src_w2v, emb_src_ft, emb_op_w2v, emb_op_ft, report_out, solc;
  double test_fraction = 0.2;
  HyperParams hp;
  ModelDims dims;
};

int cmd_self_compare(const SelfCompareFlags& f) {
  auto samples = load_manifest(f.manifest);
  auto split = stratified_split(samples, f.test_fraction, f.hp.seed);

  EmbeddingSet set;
  set.source_word2vec = load_embedding(f.emb_src_w2v);
  set.source_fasttext = load_embedding(f.emb_src_ft);
  set.opcode_word2vec = load_embedding(f.emb_op_w2v);
  set.opcode_fasttext = load_embedding(f.emb_op_ft);

  ModelDims dims = f.dims;
  dims.embed_dim = set.source_word2vec.config.dim;
  dims.dropout_p = f.hp.dropout_p;

  std::cout << "self-comparison: " << split.train.size() << " train / " << split.test.size()
            << " test, seed " << f.hp.seed << "\n";
  ExperimentReport report = run_self_comparison(split, f.hp, set, dims, resolve_solc(f.solc));
  std::cout << report.to_table();
  if (!f.report_out.empty()) {
    write_file(f.report_out, report.to_json(true) + "\n");
    std::cout << "report written to " << f.report_out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HyMo multi-modal smart-contract arithmetic-vulnerability pipeline"};
  app.require_subcommand(1);
  int exit_code = 0;

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "clean and tokenize contract sources");
  auto pre_manifest = std::make_shared<std::string>();
  auto pre_out = std::make_shared<std::string>();
  pre->add_option("--manifest", *pre_manifest, "JSON-Lines manifest path")->required();
  pre->add_option("--out-dir", *pre_out, "output directory for cleaned/token files")->required();
  pre->callback([=, &exit_code] { exit_code = cmd_preprocess(*pre_manifest, *pre_out); });

  // disasm
  auto* dis = app.add_subcommand("disasm", "produce opcode streams from bytecode or a manifest");
  auto dis_manifest = std::make_shared<std::string>();
  auto dis_bytecode = std::make_shared<std::string>();
  auto dis_out = std::make_shared<std::string>();
  auto dis_solc = std::make_shared<std::string>();
  dis->add_option("--manifest", *dis_manifest, "manifest whose samples are disassembled");
  dis->add_option("--bytecode", *dis_bytecode, "hex bytecode (optional 0x prefix)");
  dis->add_option("--out", *dis_out, "output file (bytecode mode) or directory (manifest mode)");
  dis->add_option("--solc", *dis_solc, "external Solidity compiler path (or HYMO_SOLC)");
  dis->callback([=, &exit_code] {
    exit_code = cmd_disasm(*dis_manifest, *dis_bytecode, *dis_out, *dis_solc);
  });

  // embed-train
  auto* emb = app.add_subcommand("embed-train", "train a word2vec/fasttext embedding model");
  auto emb_dir = std::make_shared<std::string>();
  auto emb_mode = std::make_shared<std::string>("fasttext");
  auto emb_out = std::make_shared<std::string>();
  auto emb_cfg = std::make_shared<EmbeddingConfig>();
  emb->add_option("--tokens-dir", *emb_dir,
                  "directory of .txt token files (one sequence per file)")
      ->required();
  emb->add_option("--mode", *emb_mode, "embedding mode: fasttext or word2vec")
      ->capture_default_str();
  emb->add_option("--dim", emb_cfg->dim, "embedding dimension")->capture_default_str();
  emb->add_option("--window", emb_cfg->window, "context window")->capture_default_str();
  emb->add_option("--negatives", emb_cfg->negatives, "negative samples per pair")
      ->capture_default_str();
  emb->add_option("--epochs", emb_cfg->epochs, "training epochs")->capture_default_str();
  emb->add_option("--lr", emb_cfg->lr, "learning rate")->capture_default_str();
  emb->add_option("--min-count", emb_cfg->min_count, "minimum token frequency")
      ->capture_default_str();
  emb->add_option("--minn", emb_cfg->minn, "minimum n-gram length")->capture_default_str();
  emb->add_option("--maxn", emb_cfg->maxn, "maximum n-gram length")->capture_default_str();
  emb->add_option("--buckets", emb_cfg->bucket_count, "subword hash buckets")
      ->capture_default_str();
  emb->add_option("--seed", emb_cfg->seed, "RNG seed")->capture_default_str();
  emb->add_option("--out", *emb_out, "embedding checkpoint output path")->required();
  emb->callback([=, &exit_code] {
    if (*emb_mode == "word2vec")
      emb_cfg->mode = EmbedKind::word2vec;
    else if (*emb_mode == "fasttext")
      emb_cfg->mode = EmbedKind::fasttext;
    else
      throw CLI::ValidationError("--mode must be fasttext or word2vec");
    exit_code = cmd_embed_train(*emb_dir, *emb_cfg, *emb_out);
  });

  // train
  auto* tr = app.add_subcommand("train", "train one hybrid model on a manifest");
  auto tr_flags = std::make_shared<TrainFlags>();
  tr->add_option("--manifest", tr_flags->manifest, "training manifest")->required();
  tr->add_option("--config", tr_flags->config_name, "hybrid config: WCWC, WCFB, FBWC, FBFB")
      ->required();
  tr->add_option("--emb-src", tr_flags->emb_src, "source-token embedding checkpoint")->required();
  tr->add_option("--emb-op", tr_flags->emb_op, "opcode embedding checkpoint")->required();
  tr->add_option("--out", tr_flags->out, "model checkpoint output path")->required();
  tr->add_option("--loss-out", tr_flags->loss_out, "loss log path (default <out>.losses.json)");
  tr->add_option("--val-fraction", tr_flags->val_fraction,
                 "stratified held-out fraction reported after training (0 = none)")
      ->capture_default_str();
  tr->add_option("--lr", tr_flags->hp.lr, "Adam learning rate")->capture_default_str();
  tr->add_option("--batch", tr_flags->hp.batch_size, "batch size")->capture_default_str();
  tr->add_option("--epochs", tr_flags->hp.epochs, "training epochs")->capture_default_str();
  tr->add_option("--dropout", tr_flags->hp.dropout_p, "dropout rate")->capture_default_str();
  tr->add_option("--seed", tr_flags->hp.seed, "RNG seed")->capture_default_str();
  tr->add_option("--gru-units", tr_flags->dims.gru_units, "BiGRU units per direction")
      ->capture_default_str();
  tr->add_option("--cnn-filters", tr_flags->dims.cnn_filters, "CNN filters")
      ->capture_default_str();
  tr->add_option("--cnn-kernel", tr_flags->dims.cnn_kernel, "CNN kernel width")
      ->capture_default_str();
  tr->add_option("--seq-len-src", tr_flags->dims.seq_len_source, "source sequence length")
      ->capture_default_str();
  tr->add_option("--seq-len-op", tr_flags->dims.seq_len_opcode, "opcode sequence length")
      ->capture_default_str();
  tr->add_option("--fusion-hidden", tr_flags->dims.fusion_hidden, "fusion hidden width")
      ->capture_default_str();
  tr->add_option("--solc", tr_flags->solc, "external Solidity compiler path (or HYMO_SOLC)");
  tr->callback([=, &exit_code] { exit_code = cmd_train(*tr_flags); });

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a manifest");
  auto ev_ckpt = std::make_shared<std::string>();
  auto ev_manifest = std::make_shared<std::string>();
  auto ev_emb_src = std::make_shared<std::string>();
  auto ev_emb_op = std::make_shared<std::string>();
  auto ev_out = std::make_shared<std::string>();
  auto ev_solc = std::make_shared<std::string>();
  ev->add_option("--checkpoint", *ev_ckpt, "model checkpoint")->required();
  ev->add_option("--manifest", *ev_manifest, "evaluation manifest")->required();
  ev->add_option("--emb-src", *ev_emb_src, "source-token embedding checkpoint")->required();
  ev->add_option("--emb-op", *ev_emb_op, "opcode embedding checkpoint")->required();
  ev->add_option("--out", *ev_out, "metrics JSON output path (default stdout)");
  ev->add_option("--solc", *ev_solc, "external Solidity compiler path (or HYMO_SOLC)");
  ev->callback([=, &exit_code] {
    exit_code = cmd_eval(*ev_ckpt, *ev_manifest, *ev_emb_src, *ev_emb_op, *ev_out, *ev_solc);
  });

  // check-arith
  auto* ca = app.add_subcommand("check-arith", "evaluate fixed-width integer semantics");
  auto ca_op = std::make_shared<std::string>();
  auto ca_signed = std::make_shared<bool>(false);
  auto ca_width = std::make_shared<int>(256);
  auto ca_x = std::make_shared<std::string>();
  auto ca_y = std::make_shared<std::string>();
  auto ca_version = std::make_shared<std::string>("0.4.24");
  ca->add_option("--op", *ca_op, "operation: add, sub, mul, div, mod")->required();
  ca->add_option("--signed", *ca_signed, "signed operands")->capture_default_str();
  ca->add_option("--width", *ca_width, "bit width in [2,256]")->capture_default_str();
  ca->add_option("--x", *ca_x, "left operand (decimal)")->required();
  ca->add_option("--y", *ca_y, "right operand (decimal)")->required();
  ca->add_option("--solc-version", *ca_version, "Solidity version for /0 semantics")
      ->capture_default_str();
  ca->callback([=, &exit_code] {
    exit_code = cmd_check_arith(*ca_op, *ca_signed, *ca_width, *ca_x, *ca_y, *ca_version);
  });

  // synth
  auto* sy = app.add_subcommand("synth", "generate a synthetic labeled corpus");
  auto sy_count = std::make_shared<int>(0);
  auto sy_seed = std::make_shared<std::uint64_t>(0);
  auto sy_out = std::make_shared<std::string>();
  sy->add_option("--count", *sy_count, "number of samples (even)")->required();
  sy->add_option("--seed", *sy_seed, "RNG seed")->capture_default_str();
  sy->add_option("--out-dir", *sy_out, "output directory")->required();
  sy->callback([=, &exit_code] { exit_code = cmd_synth(*sy_count, *sy_seed, *sy_out); });

  // self-compare
  auto* sc = app.add_subcommand("self-compare",
                                "train and evaluate all four hybrids on one split");
  auto sc_flags = std::make_shared<SelfCompareFlags>();
  sc->add_option("--manifest", sc_flags->manifest, "labeled manifest")->required();
  sc->add_option("--test-fraction", sc_flags->test_fraction, "held-out fraction")
      ->capture_default_str();
  sc->add_option("--emb-src-w2v", sc_flags->emb_src_w2v, "word2vec source embeddings")
      ->required();
  sc->add_option("--emb-src-ft", sc_flags->emb_src_ft, "fasttext source embeddings")->required();
  sc->add_option("--emb-op-w2v", sc_flags->emb_op_w2v, "word2vec opcode embeddings")->required();
  sc->add_option("--emb-op-ft", sc_flags->emb_op_ft, "fasttext opcode embeddings")->required();
  sc->add_option("--report-out", sc_flags->report_out, "experiment report JSON path");
  sc->add_option("--lr", sc_flags->hp.lr, "Adam learning rate")->capture_default_str();
  sc->add_option("--batch", sc_flags->hp.batch_size, "batch size")->capture_default_str();
  sc->add_option("--epochs", sc_flags->hp.epochs, "training epochs")->capture_default_str();
  sc->add_option("--dropout", sc_flags->hp.dropout_p, "dropout rate")->capture_default_str();
  sc->add_option("--seed", sc_flags->hp.seed, "RNG seed")->capture_default_str();
  sc->add_option("--gru-units", sc_flags->dims.gru_units, "BiGRU units per direction")
      ->capture_default_str();
  sc->add_option("--cnn-filters", sc_flags->dims.cnn_filters, "CNN filters")
      ->capture_default_str();
  sc->add_option("--cnn-kernel", sc_flags->dims.cnn_kernel, "CNN kernel width")
      ->capture_default_str();
  sc->add_option("--seq-len-src", sc_flags->dims.seq_len_source, "source sequence length")
      ->capture_default_str();
  sc->add_option("--seq-len-op", sc_flags->dims.seq_len_opcode, "opcode sequence length")
      ->capture_default_str();
  sc->add_option("--fusion-hidden", sc_flags->dims.fusion_hidden, "fusion hidden width")
      ->capture_default_str();
  sc->add_option("--solc", sc_flags->solc, "external Solidity compiler path (or HYMO_SOLC)");
  sc->callback([=, &exit_code] { exit_code = cmd_self_compare(*sc_flags); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
