#include "hymo/embed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hymo/binio.hpp"
#include "hymo/rng.hpp"

using nlohmann::json;

namespace hymo {

namespace {

constexpr const char* kPadToken = "<PAD>";
constexpr const char* kUnkToken = "<UNK>";
constexpr const char* kMagic = "HYMOEMB1";

int bucket_of(const std::string& ngram, int bucket_count) {
  return static_cast<int>(fnv1a64(ngram) % static_cast<std::uint64_t>(bucket_count));
}

// Sigmoid with the pre-activation clamped so losses stay finite and
// saturated pairs stop producing updates, like the canonical lookup-table
// implementations.
float clamped_sigmoid(float x) {
  x = std::clamp(x, -30.0f, 30.0f);
  return 1.0f / (1.0f + std::exp(-x));
}

double pair_loss(float dot, int label) {
  double x = std::clamp(static_cast<double>(dot), -30.0, 30.0);
  double s = 1.0 / (1.0 + std::exp(-x));
  return label ? -std::log(s) : -std::log(1.0 - s);
}

}  // namespace

const char* embed_kind_name(EmbedKind kind) {
  return kind == EmbedKind::word2vec ? "word2vec" : "fasttext";
}

Vocabulary::Vocabulary() {
  add_token(kPadToken, 0);
  add_token(kUnkToken, 0);
}

void Vocabulary::add_token(const std::string& token, long frequency) {
  index_.emplace(token, static_cast<int>(tokens_.size()));
  tokens_.push_back(token);
  freqs_.push_back(frequency);
}

void Vocabulary::add_dropped(long occurrences) { freqs_[kUnk] += occurrences; }

int Vocabulary::index_of(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(const std::string& token) const { return index_.contains(token); }

TokenCorpus as_token_corpus(std::span<const TokenSequence> seqs) {
  TokenCorpus out;
  out.reserve(seqs.size());
  for (const auto& s : seqs) out.push_back(s.tokens);
  return out;
}

TokenCorpus as_token_corpus(std::span<const OpcodeSequence> seqs) {
  TokenCorpus out;
  out.reserve(seqs.size());
  for (const auto& s : seqs) out.push_back(s.mnemonics);
  return out;
}

Vocabulary build_vocab(const TokenCorpus& corpora, int min_count) {
  if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
  std::map<std::string, long> counts;  // ordered map keeps ties deterministic
  long total = 0;
  for (const auto& seq : corpora)
    for (const auto& tok : seq) {
      ++counts[tok];
      ++total;
    }
  if (total == 0) throw std::invalid_argument("build_vocab: empty corpora");

  std::vector<std::pair<std::string, long>> retained;
  long dropped = 0;
  for (const auto& [tok, freq] : counts) {
    if (freq >= min_count)
      retained.emplace_back(tok, freq);
    else
      dropped += freq;
  }
  std::stable_sort(retained.begin(), retained.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocabulary vocab;
  for (const auto& [tok, freq] : retained) vocab.add_token(tok, freq);
  vocab.add_dropped(dropped);
  return vocab;
}

std::vector<std::string> ngrams(const std::string& token, int minn, int maxn) {
  if (minn < 1 || minn > maxn)
    throw std::invalid_argument("ngrams needs 1 <= minn <= maxn, got minn=" +
                                std::to_string(minn) + " maxn=" + std::to_string(maxn));
  const std::string wrapped = "<" + token + ">";
  const int w = static_cast<int>(wrapped.size());
  std::vector<std::string> out;
  for (int n = minn; n <= std::min(maxn, w); ++n)
    for (int start = 0; start + n <= w; ++start)
      out.push_back(wrapped.substr(static_cast<size_t>(start), static_cast<size_t>(n)));
  out.push_back(wrapped);  // whole-word entry, kept even when duplicated
  return out;
}

std::vector<int> EmbeddingModel::subword_ids(const std::string& token) const {
  if (config.mode != EmbedKind::fasttext || token == kPadToken || token == kUnkToken) return {};
  std::vector<int> ids;
  for (const auto& g : ngrams(token, config.minn, config.maxn))
    ids.push_back(bucket_of(g, config.bucket_count));
  return ids;
}

Eigen::VectorXf EmbeddingModel::token_vector(const std::string& token) const {
  const int dim = this->dim();
  if (config.mode == EmbedKind::word2vec)
    return input_vectors.row(vocab.index_of(token)).transpose();

  Eigen::VectorXf acc = Eigen::VectorXf::Zero(dim);
  const auto ids = subword_ids(token);
  for (int id : ids) acc += subword_buckets.row(id).transpose();
  if (!ids.empty()) acc /= static_cast<float>(ids.size());
  if (vocab.contains(token))
    acc += input_vectors.row(vocab.index_of(token)).transpose();
  else if (ids.empty())
    acc = input_vectors.row(Vocabulary::kUnk).transpose();  // specials fall back to <UNK>
  return acc;
}

EmbeddingModel train_embeddings(const TokenCorpus& corpora, const EmbeddingConfig& config,
                                EmbedTrainLog* log) {
  if (config.dim < 1) throw std::invalid_argument("embedding dim must be >= 1");
  if (config.window < 1) throw std::invalid_argument("window must be >= 1");
  if (config.negatives < 0) throw std::invalid_argument("negatives must be >= 0");
  if (config.mode == EmbedKind::fasttext && config.bucket_count < 1)
    throw std::invalid_argument("fasttext needs bucket_count >= 1");

  EmbeddingModel model;
  model.config = config;
  model.vocab = build_vocab(corpora, config.min_count);
  const int vocab_size = model.vocab.size();
  const int dim = config.dim;

  // Index streams; out-of-vocabulary tokens train as <UNK>.
  std::vector<std::vector<int>> stream;
  stream.reserve(corpora.size());
  for (const auto& seq : corpora) {
    std::vector<int> ids;
    ids.reserve(seq.size());
    for (const auto& tok : seq) ids.push_back(model.vocab.index_of(tok));
    stream.push_back(std::move(ids));
  }

  // Per-word subword bucket lists (fasttext only).
  std::vector<std::vector<int>> word_subwords(static_cast<size_t>(vocab_size));
  if (config.mode == EmbedKind::fasttext)
    for (int i = 2; i < vocab_size; ++i)
      word_subwords[static_cast<size_t>(i)] = model.subword_ids(model.vocab.token_at(i));

  // Negative-sampling distribution: unigram frequencies raised to 0.75.
  std::vector<double> cumulative;
  std::vector<int> sampled_index;
  {
    double total = 0;
    for (int i = 1; i < vocab_size; ++i) {  // <PAD> never sampled
      long f = model.vocab.frequency_at(i);
      if (f <= 0) continue;
      total += std::pow(static_cast<double>(f), 0.75);
      cumulative.push_back(total);
      sampled_index.push_back(i);
    }
    if (cumulative.empty()) throw std::invalid_argument("no sampleable tokens in vocabulary");
  }

  Rng root(config.seed);
  Rng init_rng = root.fork(1);
  Rng window_rng = root.fork(2);
  Rng neg_rng = root.fork(3);

  model.input_vectors.resize(vocab_size, dim);
  for (int r = 0; r < vocab_size; ++r)
    for (int c = 0; c < dim; ++c)
      model.input_vectors(r, c) =
          static_cast<float>(init_rng.next_uniform(-0.5, 0.5)) / static_cast<float>(dim);
  model.input_vectors.row(Vocabulary::kPad).setZero();
  model.output_vectors = Eigen::MatrixXf::Zero(vocab_size, dim);
  model.subword_buckets = config.mode == EmbedKind::fasttext
                              ? Eigen::MatrixXf::Zero(config.bucket_count, dim)
                              : Eigen::MatrixXf();

  auto draw_negative = [&]() -> int {
    double u = neg_rng.next_unit() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    size_t pos = std::min(static_cast<size_t>(it - cumulative.begin()), cumulative.size() - 1);
    return sampled_index[pos];
  };

  Eigen::VectorXf center_vec(dim), neu1e(dim);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& ids : stream) {
      const int len = static_cast<int>(ids.size());
      for (int pos = 0; pos < len; ++pos) {
        const int center = ids[static_cast<size_t>(pos)];
        const int reach = 1 + static_cast<int>(window_rng.next_below(
                                  static_cast<std::uint64_t>(config.window)));
        for (int off = -reach; off <= reach; ++off) {
          if (off == 0) continue;
          const int ctx_pos = pos + off;
          if (ctx_pos < 0 || ctx_pos >= len) continue;
          const int ctx = ids[static_cast<size_t>(ctx_pos)];

          // Compose the center representation.
          const auto& subs = word_subwords[static_cast<size_t>(center)];
          center_vec = model.input_vectors.row(center).transpose();
          if (!subs.empty()) {
            Eigen::VectorXf acc = Eigen::VectorXf::Zero(dim);
            for (int id : subs) acc += model.subword_buckets.row(id).transpose();
            center_vec += acc / static_cast<float>(subs.size());
          }

          neu1e.setZero();
          double loss = 0;
          for (int d = 0; d <= config.negatives; ++d) {
            int target;
            int label;
            if (d == 0) {
              target = ctx;
              label = 1;
            } else {
              target = draw_negative();
              if (target == ctx) continue;
              label = 0;
            }
            const float dot = model.output_vectors.row(target) * center_vec;
            loss += pair_loss(dot, label);
            const float g = (static_cast<float>(label) - clamped_sigmoid(dot)) * config.lr;
            neu1e += g * model.output_vectors.row(target).transpose();
            model.output_vectors.row(target) += g * center_vec.transpose();
          }

          model.input_vectors.row(center) += neu1e.transpose();
          if (!subs.empty() && config.train_subwords) {
            const Eigen::VectorXf share = neu1e / static_cast<float>(subs.size());
            for (int id : subs) model.subword_buckets.row(id) += share.transpose();
          }
          if (log) log->step_losses.push_back(loss);
        }
      }
    }
  }
  return model;
}

void save_embedding(const EmbeddingModel& model, const std::string& path) {
  json meta;
  meta["mode"] = embed_kind_name(model.config.mode);
  meta["dim"] = model.config.dim;
  meta["window"] = model.config.window;
  meta["negatives"] = model.config.negatives;
  meta["epochs"] = model.config.epochs;
  meta["lr"] = model.config.lr;
  meta["min_count"] = model.config.min_count;
  meta["minn"] = model.config.minn;
  meta["maxn"] = model.config.maxn;
  meta["bucket_count"] = model.config.bucket_count;
  meta["seed"] = model.config.seed;
  meta["train_subwords"] = model.config.train_subwords;

  json tokens = json::array();
  json freqs = json::array();
  for (int i = 0; i < model.vocab.size(); ++i) {
    tokens.push_back(model.vocab.token_at(i));
    freqs.push_back(model.vocab.frequency_at(i));
  }
  meta["vocab"] = {{"tokens", tokens}, {"frequencies", freqs}};

  auto matrix_meta = [](const char* name, const Eigen::MatrixXf& m) {
    return json{{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}};
  };
  meta["matrices"] = json::array({matrix_meta("input", model.input_vectors),
                                  matrix_meta("output", model.output_vectors),
                                  matrix_meta("buckets", model.subword_buckets)});

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write embedding checkpoint: " + path);
  out.write(kMagic, 8);
  const std::string meta_str = meta.dump();
  write_u64le(out, meta_str.size());
  out.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));
  for (const Eigen::MatrixXf* m :
       {&model.input_vectors, &model.output_vectors, &model.subword_buckets})
    for (Eigen::Index r = 0; r < m->rows(); ++r)
      for (Eigen::Index c = 0; c < m->cols(); ++c) write_f32le(out, (*m)(r, c));
  if (!out) throw std::runtime_error("short write to embedding checkpoint: " + path);
}

EmbeddingModel load_embedding(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open embedding checkpoint: " + path);
  char magic[8];
  if (!in.read(magic, 8) || std::string_view(magic, 8) != kMagic)
    throw std::runtime_error("bad magic in embedding checkpoint: " + path);

  const std::uint64_t meta_len = read_u64le(in, "embedding metadata length");
  std::string meta_str(meta_len, '\0');
  if (!in.read(meta_str.data(), static_cast<std::streamsize>(meta_len)))
    throw std::runtime_error("truncated embedding metadata in " + path);
  json meta;
  try {
    meta = json::parse(meta_str);
  } catch (const json::exception& e) {
    throw std::runtime_error("corrupt embedding metadata in " + path + ": " + e.what());
  }

  EmbeddingModel model;
  const std::string mode = meta.at("mode").get<std::string>();
  if (mode == "word2vec")
    model.config.mode = EmbedKind::word2vec;
  else if (mode == "fasttext")
    model.config.mode = EmbedKind::fasttext;
  else
    throw std::runtime_error("unknown embedding mode \"" + mode + "\" in " + path);
  model.config.dim = meta.at("dim").get<int>();
  model.config.window = meta.at("window").get<int>();
  model.config.negatives = meta.at("negatives").get<int>();
  model.config.epochs = meta.at("epochs").get<int>();
  model.config.lr = meta.at("lr").get<float>();
  model.config.min_count = meta.at("min_count").get<int>();
  model.config.minn = meta.at("minn").get<int>();
  model.config.maxn = meta.at("maxn").get<int>();
  model.config.bucket_count = meta.at("bucket_count").get<int>();
  model.config.seed = meta.at("seed").get<std::uint64_t>();
  model.config.train_subwords = meta.at("train_subwords").get<bool>();

  const auto& tokens = meta.at("vocab").at("tokens");
  const auto& freqs = meta.at("vocab").at("frequencies");
  if (tokens.size() != freqs.size() || tokens.size() < 2)
    throw std::runtime_error("corrupt vocabulary in " + path);
  Vocabulary vocab;
  for (size_t i = 2; i < tokens.size(); ++i)
    vocab.add_token(tokens[i].get<std::string>(), freqs[i].get<long>());
  vocab.add_dropped(freqs[1].get<long>());
  model.vocab = vocab;

  auto read_matrix = [&](const json& m) {
    Eigen::MatrixXf out(m.at("rows").get<Eigen::Index>(), m.at("cols").get<Eigen::Index>());
    for (Eigen::Index r = 0; r < out.rows(); ++r)
      for (Eigen::Index c = 0; c < out.cols(); ++c)
        out(r, c) = read_f32le(in, m.at("name").get<std::string>() + " matrix");
    return out;
  };
  const auto& mats = meta.at("matrices");
  if (mats.size() != 3) throw std::runtime_error("corrupt matrix manifest in " + path);
  model.input_vectors = read_matrix(mats[0]);
  model.output_vectors = read_matrix(mats[1]);
  model.subword_buckets = read_matrix(mats[2]);

  if (in.peek() != std::char_traits<char>::eof())
    throw std::runtime_error("trailing bytes after embedding checkpoint data in " + path);
  return model;
}

}  // namespace hymo
