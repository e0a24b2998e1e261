#include "hymo/trainkit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hymo/binio.hpp"

using nlohmann::json;

namespace hymo {

void HyperParams::validate() const {
  if (!(lr > 0)) throw std::invalid_argument("learning rate must be positive");
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (dropout_p < 0 || dropout_p >= 1)
    throw std::invalid_argument("dropout must be in [0,1), got " + std::to_string(dropout_p));
}

Metrics Metrics::from_counts(long tp, long fp, long tn, long fn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.tn = tn;
  m.fn = fn;
  const long total = tp + fp + tn + fn;
  m.accuracy = total == 0 ? 0.0
                          : static_cast<double>(tp + tn) / static_cast<double>(total);
  m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
  m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
  m.f1 = m.precision + m.recall == 0.0 ? 0.0
                                       : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

namespace published_reference {
double f1_pct_recomputed() {
  return 2.0 * precision_pct * recall_pct / (precision_pct + recall_pct);
}
}  // namespace published_reference

const EmbeddingModel& EmbeddingSet::get(InputRep rep, EmbedKind kind) const {
  if (rep == InputRep::cleaned_source)
    return kind == EmbedKind::word2vec ? source_word2vec : source_fasttext;
  return kind == EmbedKind::word2vec ? opcode_word2vec : opcode_fasttext;
}

EmbeddingSet build_embedding_set(const std::vector<ContractSample>& samples,
                                 const EmbeddingConfig& base,
                                 const std::string& compiler_path) {
  TokenCorpus source_corpus, opcode_corpus;
  source_corpus.reserve(samples.size());
  opcode_corpus.reserve(samples.size());
  for (const auto& s : samples) {
    source_corpus.push_back(source_tokens_for(s).tokens);
    opcode_corpus.push_back(acquire_opcodes(s, compiler_path).mnemonics);
  }
  auto with_mode = [&](EmbedKind kind) {
    EmbeddingConfig c = base;
    c.mode = kind;
    return c;
  };
  EmbeddingSet set;
  set.source_word2vec = train_embeddings(source_corpus, with_mode(EmbedKind::word2vec));
  set.source_fasttext = train_embeddings(source_corpus, with_mode(EmbedKind::fasttext));
  set.opcode_word2vec = train_embeddings(opcode_corpus, with_mode(EmbedKind::word2vec));
  set.opcode_fasttext = train_embeddings(opcode_corpus, with_mode(EmbedKind::fasttext));
  return set;
}

std::vector<size_t> epoch_permutation(size_t n, Rng& rng) {
  std::vector<size_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = i;
  for (size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng.next_below(i)]);
  return perm;
}

namespace {

struct PreparedSample {
  EmbeddedSequence<float> emb1, emb2;
  int label = 0;
};

std::vector<PreparedSample> prepare(const HybridConfig& config,
                                    const std::vector<ContractSample>& samples,
                                    const EmbeddingSet& embeddings,
                                    const std::string& compiler_path) {
  const EmbeddingModel& emb1 = embeddings.get(config.branch1.input_rep, config.branch1.embedding);
  const EmbeddingModel& emb2 = embeddings.get(config.branch2.input_rep, config.branch2.embedding);
  std::vector<PreparedSample> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    PreparedSample p;
    p.emb1 = embed_branch_input(config.branch1, emb1, s, compiler_path);
    p.emb2 = embed_branch_input(config.branch2, emb2, s, compiler_path);
    p.label = s.label;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

TrainResult train(const HybridConfig& config, const DatasetSplit& split, const HyperParams& hp,
                  const EmbeddingSet& embeddings, const std::string& compiler_path) {
  hp.validate();
  if (split.train.empty()) throw std::invalid_argument("training split is empty");

  HybridConfig cfg = config;
  cfg.dropout_p = hp.dropout_p;  // dropout is a training-time setting

  auto prepared = prepare(cfg, split.train, embeddings, compiler_path);
  const size_t n = prepared.size();

  TrainResult result;
  result.model.init(cfg, hp.seed);

  Rng root(hp.seed);
  Rng shuffle_rng = root.fork(1);
  Rng dropout_rng = root.fork(2);
  nn::AdamConfig adam;
  adam.lr = hp.lr;

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    auto perm = epoch_permutation(n, shuffle_rng);
    double epoch_loss = 0;
    size_t batch_index = 0;
    for (size_t start = 0; start < n; start += static_cast<size_t>(hp.batch_size)) {
      const size_t end = std::min(n, start + static_cast<size_t>(hp.batch_size));
      const float scale = 1.0f / static_cast<float>(end - start);
      result.model.zero_grads();
      for (size_t i = start; i < end; ++i) {
        const PreparedSample& s = prepared[perm[i]];
        HybridCache<float> cache;
        hybrid_forward(result.model, s.emb1, s.emb2, /*train=*/true, &dropout_rng, &cache);
        const double loss = nn::cross_entropy_logits(cache.logits, s.label);
        if (!std::isfinite(loss))
          throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch + 1) +
                                   ", batch " + std::to_string(batch_index + 1) + " (config " +
                                   cfg.name + ")");
        epoch_loss += loss;
        hybrid_backward(result.model, cache, s.label, scale);
      }
      result.model.visit([&](nn::Tensor<float>& t) { nn::adam_step(t, adam); });
      ++batch_index;
    }
    result.epoch_losses.push_back(epoch_loss / static_cast<double>(n));
  }
  return result;
}

Metrics evaluate(const HybridModel<float>& model, const std::vector<ContractSample>& samples,
                 const EmbeddingSet& embeddings, const std::string& compiler_path) {
  if (samples.empty()) throw std::invalid_argument("evaluate: empty sample list");
  auto prepared = prepare(model.config, samples, embeddings, compiler_path);
  long tp = 0, fp = 0, tn = 0, fn = 0;
  for (const auto& s : prepared) {
    nn::Vector<float> probs = hybrid_forward(model, s.emb1, s.emb2, /*train=*/false, nullptr);
    const int pred = probs(1) >= probs(0) ? 1 : 0;
    if (pred == 1 && s.label == 1) ++tp;
    if (pred == 1 && s.label == 0) ++fp;
    if (pred == 0 && s.label == 0) ++tn;
    if (pred == 0 && s.label == 1) ++fn;
  }
  return Metrics::from_counts(tp, fp, tn, fn);
}

std::string dataset_fingerprint(const DatasetSplit& split) {
  std::string blob = "train:";
  for (const auto& s : split.train) blob += s.id + "#" + std::to_string(s.label) + ";";
  blob += "|test:";
  for (const auto& s : split.test) blob += s.id + "#" + std::to_string(s.label) + ";";
  return to_hex64(fnv1a64(blob));
}

namespace {

json metrics_to_json(const Metrics& m) {
  return json{{"tp", m.tp},           {"fp", m.fp},
              {"tn", m.tn},           {"fn", m.fn},
              {"accuracy", m.accuracy}, {"precision", m.precision},
              {"recall", m.recall},   {"f1", m.f1}};
}

json published_reference_json() {
  return json{{"config", "FBFB"},
              {"accuracy_pct", published_reference::accuracy_pct},
              {"recall_pct", published_reference::recall_pct},
              {"precision_pct", published_reference::precision_pct},
              {"f1_pct_reported", published_reference::f1_pct_reported},
              {"f1_pct_recomputed", published_reference::f1_pct_recomputed()},
              {"note", "reported F1 differs from 2PR/(P+R) of the reported precision/recall; "
                       "both values shown, neither asserted"}};
}

}  // namespace

std::string ExperimentReport::to_json(bool include_timing) const {
  json j;
  j["dataset_fingerprint"] = dataset_fingerprint;
  j["hyperparams"] = {{"lr", lr},
                      {"batch_size", batch_size},
                      {"epochs", epochs},
                      {"dropout_p", dropout_p},
                      {"seed", seed}};
  j["published_reference"] = published_reference_json();
  json entries_json = json::array();
  for (const auto& e : entries) {
    json je = {{"config", e.config},
               {"metrics", metrics_to_json(e.metrics)},
               {"final_train_loss", e.final_train_loss}};
    if (include_timing) {
      je["train_seconds"] = e.train_seconds;
      je["eval_seconds"] = e.eval_seconds;
    }
    entries_json.push_back(je);
  }
  j["results"] = entries_json;
  return j.dump(2);
}

std::string ExperimentReport::to_table() const {
  std::ostringstream os;
  os << std::left << std::setw(8) << "Config" << std::right << std::setw(10) << "Accuracy"
     << std::setw(11) << "Precision" << std::setw(8) << "Recall" << std::setw(10) << "F1-score"
     << "\n";
  os << std::string(47, '-') << "\n";
  os << std::fixed << std::setprecision(2);
  for (const auto& e : entries) {
    os << std::left << std::setw(8) << e.config << std::right << std::setw(9)
       << e.metrics.accuracy * 100 << "%" << std::setw(10) << e.metrics.precision * 100 << "%"
       << std::setw(7) << e.metrics.recall * 100 << "%" << std::setw(9) << e.metrics.f1 * 100
       << "%\n";
  }
  os << "\npublished FBFB reference: accuracy " << published_reference::accuracy_pct << "%, precision "
     << published_reference::precision_pct << "%, recall " << published_reference::recall_pct
     << "%, F1 " << published_reference::f1_pct_reported << "% (recomputed from P/R: "
     << published_reference::f1_pct_recomputed() << "%; the two disagree, both shown)\n";
  return os.str();
}

ExperimentReport run_self_comparison(const DatasetSplit& split, const HyperParams& hp,
                                     const EmbeddingSet& embeddings, const ModelDims& dims,
                                     const std::string& compiler_path) {
  ExperimentReport report;
  report.dataset_fingerprint = hymo::dataset_fingerprint(split);
  report.seed = hp.seed;
  report.lr = hp.lr;
  report.batch_size = hp.batch_size;
  report.epochs = hp.epochs;
  report.dropout_p = hp.dropout_p;

  for (const auto& name : hybrid_names()) {
    HybridConfig cfg = hybrid_config(name, dims);
    ExperimentReport::Entry entry;
    entry.config = name;

    const auto t0 = std::chrono::steady_clock::now();
    TrainResult trained = train(cfg, split, hp, embeddings, compiler_path);
    const auto t1 = std::chrono::steady_clock::now();
    entry.metrics = evaluate(trained.model, split.test, embeddings, compiler_path);
    const auto t2 = std::chrono::steady_clock::now();

    entry.final_train_loss = trained.epoch_losses.back();
    entry.train_seconds = std::chrono::duration<double>(t1 - t0).count();
    entry.eval_seconds = std::chrono::duration<double>(t2 - t1).count();
    report.entries.push_back(std::move(entry));
  }

  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const auto& a, const auto& b) {
                     return a.metrics.accuracy > b.metrics.accuracy;
                   });
  return report;
}

}  // namespace hymo
