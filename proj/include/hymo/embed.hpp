#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hymo/evmdis.hpp"
#include "hymo/solprep.hpp"

namespace hymo {

enum class EmbedKind { word2vec, fasttext };

const char* embed_kind_name(EmbedKind kind);

// Token -> index map with <PAD> at 0 and <UNK> at 1. Real tokens are indexed
// by descending frequency, ties broken lexicographically.
class Vocabulary {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;

  Vocabulary();

  void add_token(const std::string& token, long frequency);  // append at next index
  void add_dropped(long occurrences);                        // counts absorbed by <UNK>

  int index_of(const std::string& token) const;  // kUnk when absent
  bool contains(const std::string& token) const;
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token_at(int index) const { return tokens_.at(static_cast<size_t>(index)); }
  long frequency_at(int index) const { return freqs_.at(static_cast<size_t>(index)); }

 private:
  std::vector<std::string> tokens_;
  std::vector<long> freqs_;
  std::unordered_map<std::string, int> index_;
};

using TokenCorpus = std::vector<std::vector<std::string>>;

TokenCorpus as_token_corpus(std::span<const TokenSequence> seqs);
TokenCorpus as_token_corpus(std::span<const OpcodeSequence> seqs);

Vocabulary build_vocab(const TokenCorpus& corpora, int min_count);

// Character n-grams of the '<'token'>' wrapping, lengths minn..maxn in
// position order, plus the whole wrapped token as a final entry. Duplicates
// are retained.
std::vector<std::string> ngrams(const std::string& token, int minn, int maxn);

struct EmbeddingConfig {
  EmbedKind mode = EmbedKind::fasttext;
  int dim = 300;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  float lr = 0.025f;
  int min_count = 1;
  int minn = 3;
  int maxn = 6;
  int bucket_count = 100000;
  std::uint64_t seed = 0;
  bool train_subwords = true;  // false freezes the (zero-initialized) buckets
};

struct EmbeddingModel {
  EmbeddingConfig config;
  Vocabulary vocab;
  Eigen::MatrixXf input_vectors;    // |V| x dim
  Eigen::MatrixXf output_vectors;   // |V| x dim
  Eigen::MatrixXf subword_buckets;  // bucket_count x dim in fasttext mode, else 0 x 0

  int dim() const { return static_cast<int>(input_vectors.cols()); }

  // Bucket row indices for a token's n-grams. Empty for <PAD>/<UNK> and in
  // word2vec mode.
  std::vector<int> subword_ids(const std::string& token) const;

  // Composed lookup: word2vec = word (or <UNK>) vector; fasttext = word
  // vector plus the mean of the subword bucket vectors, subwords alone for
  // out-of-vocabulary tokens.
  Eigen::VectorXf token_vector(const std::string& token) const;
};

struct EmbedTrainLog {
  std::vector<double> step_losses;
};

// Skip-gram with negative sampling; fasttext mode composes the center vector
// from word + subword buckets. Deterministic given (corpus, config).
EmbeddingModel train_embeddings(const TokenCorpus& corpora, const EmbeddingConfig& config,
                                EmbedTrainLog* log = nullptr);

// Fixed-length embedded view of one sequence. Masked-out rows are zero.
template <typename Scalar>
struct EmbeddedSequence {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> matrix;  // L x dim
  std::vector<std::uint8_t> mask;                                // 1 = real token

  int length() const { return static_cast<int>(matrix.rows()); }

  // Number of leading unmasked rows; the mask must be a true-prefix.
  int valid_prefix() const {
    int n = 0;
    while (n < static_cast<int>(mask.size()) && mask[static_cast<size_t>(n)]) ++n;
    for (int i = n; i < static_cast<int>(mask.size()); ++i)
      if (mask[static_cast<size_t>(i)])
        throw std::invalid_argument("non-contiguous mask: padding must be a suffix");
    return n;
  }
};

template <typename Scalar>
EmbeddedSequence<Scalar> embed_sequence(const EmbeddingModel& model,
                                        std::span<const std::string> tokens, int length) {
  if (length < 1) throw std::invalid_argument("sequence length must be >= 1");
  EmbeddedSequence<Scalar> out;
  out.matrix.setZero(length, model.input_vectors.cols());
  out.mask.assign(static_cast<size_t>(length), 0);
  const int n = std::min<int>(length, static_cast<int>(tokens.size()));
  for (int i = 0; i < n; ++i) {
    out.matrix.row(i) = model.token_vector(tokens[static_cast<size_t>(i)]).cast<Scalar>();
    out.mask[static_cast<size_t>(i)] = 1;
  }
  return out;
}

template <typename Scalar>
EmbeddedSequence<Scalar> embed_sequence(const EmbeddingModel& model, const TokenSequence& seq,
                                        int length) {
  return embed_sequence<Scalar>(model, std::span<const std::string>(seq.tokens), length);
}

template <typename Scalar>
EmbeddedSequence<Scalar> embed_sequence(const EmbeddingModel& model, const OpcodeSequence& seq,
                                        int length) {
  return embed_sequence<Scalar>(model, std::span<const std::string>(seq.mnemonics), length);
}

// Checkpoint IO, format HYMOEMB1: magic, JSON metadata block, then the
// parameter matrices as little-endian float32 in row-major order.
void save_embedding(const EmbeddingModel& model, const std::string& path);
EmbeddingModel load_embedding(const std::string& path);

}  // namespace hymo
