#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hymo/corpus.hpp"
#include "hymo/embed.hpp"
#include "hymo/nn.hpp"

namespace hymo {

enum class InputRep { cleaned_source, opcode };
enum class EncoderKind { cnn, bigru };

const char* input_rep_name(InputRep rep);
const char* encoder_kind_name(EncoderKind kind);

// Size knobs, defaulted to the full-scale settings; desk-scale runs shrink
// them.
struct ModelDims {
  int embed_dim = 300;
  int gru_units = 300;
  int cnn_filters = 128;
  int cnn_kernel = 5;
  int seq_len_source = 512;
  int seq_len_opcode = 1024;
  int fusion_hidden = 128;
  double dropout_p = 0.5;
};

struct BranchConfig {
  InputRep input_rep = InputRep::cleaned_source;
  EmbedKind embedding = EmbedKind::fasttext;
  EncoderKind encoder = EncoderKind::bigru;
  int embed_dim = 300;
  int gru_units = 300;
  int cnn_filters = 128;
  int cnn_kernel = 5;
  int seq_len = 512;

  int feature_dim() const {
    return encoder == EncoderKind::bigru ? 2 * gru_units : cnn_filters;
  }
};

struct HybridConfig {
  std::string name;
  BranchConfig branch1, branch2;  // branch1 reads source, branch2 opcodes
  int fusion_hidden = 128;
  double dropout_p = 0.5;

  int fused_dim() const { return branch1.feature_dim() + branch2.feature_dim(); }
};

// Single models M1..M4 and the four hybrid pairings WCWC=(M1,M3),
// WCFB=(M1,M4), FBWC=(M2,M3), FBFB=(M2,M4).
BranchConfig single_model_config(const std::string& name, const ModelDims& dims = {});
HybridConfig hybrid_config(const std::string& name, const ModelDims& dims = {});
const std::vector<std::string>& hybrid_names();

// ---- parameters -----------------------------------------------------------

template <typename S>
struct BranchParams {
  EncoderKind encoder = EncoderKind::bigru;
  int cnn_kernel = 0;
  nn::GruParams<S> gru_fwd, gru_bwd;
  nn::Tensor<S> conv_W, conv_b;

  void init(const BranchConfig& cfg, const std::string& prefix, Rng& rng) {
    encoder = cfg.encoder;
    cnn_kernel = cfg.cnn_kernel;
    if (cfg.encoder == EncoderKind::bigru) {
      gru_fwd.init(prefix + ".gru_fwd", cfg.embed_dim, cfg.gru_units, rng);
      gru_bwd.init(prefix + ".gru_bwd", cfg.embed_dim, cfg.gru_units, rng);
    } else {
      conv_W.init_glorot(prefix + ".conv_W", cfg.cnn_kernel * cfg.embed_dim, cfg.cnn_filters,
                         rng);
      conv_b.init(prefix + ".conv_b", cfg.cnn_filters, 1);
    }
  }

  template <typename F>
  void visit(F&& f) {
    if (encoder == EncoderKind::bigru) {
      gru_fwd.visit(f);
      gru_bwd.visit(f);
    } else {
      f(conv_W);
      f(conv_b);
    }
  }
};

template <typename S>
struct BranchCache {
  nn::Matrix<S> input;  // embedded sequence, kept for the convolution backward
  int valid_len = 0;
  nn::BiGruCache<S> rnn;
  nn::Matrix<S> conv_pre;  // pre-activation convolution output
  std::vector<int> pool_argmax;
};

template <typename S>
nn::Vector<S> branch_forward(const BranchParams<S>& params, const BranchConfig& cfg,
                             const EmbeddedSequence<S>& emb, BranchCache<S>* cache = nullptr) {
  nn::check_shape(static_cast<int>(emb.matrix.cols()) == cfg.embed_dim,
                  "branch_forward: embedding dim " + std::to_string(emb.matrix.cols()) +
                      " != configured " + std::to_string(cfg.embed_dim));
  const int valid = emb.valid_prefix();
  if (cache) {
    cache->input = emb.matrix;
    cache->valid_len = valid;
  }
  if (cfg.encoder == EncoderKind::bigru)
    return nn::bigru_forward(emb.matrix, valid, params.gru_fwd, params.gru_bwd,
                             cache ? &cache->rnn : nullptr);

  // CNN path convolves the full padded matrix; masked rows are zero.
  nn::Matrix<S> conv =
      nn::conv1d_forward(emb.matrix, params.conv_W.value, nn::Vector<S>(params.conv_b.value),
                         cfg.cnn_kernel);
  if (cache) cache->conv_pre = conv;
  std::vector<int> argmax;
  nn::Vector<S> feature = nn::global_max_pool(nn::Matrix<S>(nn::relu(conv)), &argmax);
  if (cache) cache->pool_argmax = argmax;
  return feature;
}

template <typename S>
void branch_backward(BranchParams<S>& params, const BranchCache<S>& cache,
                     const nn::Vector<S>& dfeature, nn::Matrix<S>* dX = nullptr) {
  if (params.encoder == EncoderKind::bigru) {
    nn::bigru_backward(params.gru_fwd, params.gru_bwd, cache.rnn, dfeature, dX);
    return;
  }
  nn::Matrix<S> dpool =
      nn::global_max_pool_backward(cache.conv_pre.rows(), cache.pool_argmax, dfeature);
  nn::Matrix<S> dconv = nn::relu_backward(cache.conv_pre, dpool);
  nn::Vector<S> db = nn::Vector<S>::Zero(params.conv_b.value.rows());
  nn::Matrix<S> dx = nn::conv1d_backward(cache.input, params.conv_W.value, params.cnn_kernel,
                                         dconv, params.conv_W.grad, db);
  params.conv_b.grad += db;
  if (dX) *dX = dx;
}

// ---- hybrid model -----------------------------------------------------------

template <typename S>
struct HybridModel {
  HybridConfig config;
  std::uint64_t seed = 0;
  BranchParams<S> branch1, branch2;
  nn::Tensor<S> fusion_W, fusion_b;  // [fused, hidden], [hidden]
  nn::Tensor<S> head_W, head_b;      // [hidden, 2], [2]
  std::string emb_hash_branch1, emb_hash_branch2;  // embedding checkpoint references

  void init(const HybridConfig& cfg, std::uint64_t init_seed) {
    config = cfg;
    seed = init_seed;
    Rng rng(init_seed);
    branch1.init(cfg.branch1, "branch1", rng);
    branch2.init(cfg.branch2, "branch2", rng);
    fusion_W.init_glorot("fusion.W", cfg.fused_dim(), cfg.fusion_hidden, rng);
    fusion_b.init("fusion.b", cfg.fusion_hidden, 1);
    head_W.init_glorot("head.W", cfg.fusion_hidden, 2, rng);
    head_b.init("head.b", 2, 1);
  }

  template <typename F>
  void visit(F&& f) {
    branch1.visit(f);
    branch2.visit(f);
    f(fusion_W);
    f(fusion_b);
    f(head_W);
    f(head_b);
  }

  void zero_grads() {
    visit([](nn::Tensor<S>& t) { t.zero_grad(); });
  }
};

template <typename S>
struct HybridCache {
  BranchCache<S> b1, b2;
  nn::Vector<S> fused;
  nn::Matrix<S> fusion_pre, fusion_act, dropout_mask, dropped;
  nn::Vector<S> logits, probs;
};

// Forward pass: concat(branch features) -> dense -> ReLU -> dropout ->
// dense -> softmax. Training mode needs a dropout stream.
template <typename S>
nn::Vector<S> hybrid_forward(const HybridModel<S>& m, const EmbeddedSequence<S>& emb1,
                             const EmbeddedSequence<S>& emb2, bool train, Rng* dropout_rng,
                             HybridCache<S>* cache = nullptr) {
  if (train && m.config.dropout_p > 0.0 && dropout_rng == nullptr)
    throw std::invalid_argument("hybrid_forward: training with dropout needs an RNG");

  HybridCache<S> local;
  HybridCache<S>& c = cache ? *cache : local;

  nn::Vector<S> f1 = branch_forward(m.branch1, m.config.branch1, emb1, &c.b1);
  nn::Vector<S> f2 = branch_forward(m.branch2, m.config.branch2, emb2, &c.b2);
  c.fused.resize(f1.size() + f2.size());
  c.fused << f1, f2;

  c.fusion_pre = nn::dense_forward(nn::Matrix<S>(c.fused.transpose()), m.fusion_W.value,
                                   nn::Vector<S>(m.fusion_b.value));
  c.fusion_act = nn::relu(c.fusion_pre);
  Rng unused(0);
  c.dropped = nn::dropout_forward(c.fusion_act, m.config.dropout_p, train,
                                  dropout_rng ? *dropout_rng : unused, &c.dropout_mask);
  nn::Matrix<S> logits_row =
      nn::dense_forward(c.dropped, m.head_W.value, nn::Vector<S>(m.head_b.value));
  c.logits = logits_row.row(0).transpose();
  c.probs = nn::softmax(c.logits);
  return c.probs;
}

// Backpropagation from cross-entropy at `true_label`; loss_scale folds in
// batch averaging. Input gradients are written when requested.
template <typename S>
void hybrid_backward(HybridModel<S>& m, const HybridCache<S>& cache, int true_label, S loss_scale,
                     nn::Matrix<S>* dX1 = nullptr, nn::Matrix<S>* dX2 = nullptr) {
  nn::Vector<S> dlogits = nn::softmax_ce_backward(cache.probs, true_label) * loss_scale;

  nn::Vector<S> db_head = nn::Vector<S>::Zero(2);
  nn::Matrix<S> ddropped = nn::dense_backward(cache.dropped, m.head_W.value,
                                              nn::Matrix<S>(dlogits.transpose()), m.head_W.grad,
                                              db_head);
  m.head_b.grad += db_head;

  nn::Matrix<S> dact = ddropped.cwiseProduct(cache.dropout_mask);
  nn::Matrix<S> dpre = nn::relu_backward(cache.fusion_pre, dact);

  nn::Vector<S> db_fusion = nn::Vector<S>::Zero(m.fusion_b.value.rows());
  nn::Matrix<S> dfused_row = nn::dense_backward(nn::Matrix<S>(cache.fused.transpose()),
                                                m.fusion_W.value, dpre, m.fusion_W.grad,
                                                db_fusion);
  m.fusion_b.grad += db_fusion;

  const int d1 = m.config.branch1.feature_dim();
  const int d2 = m.config.branch2.feature_dim();
  nn::Vector<S> dfused = dfused_row.row(0).transpose();
  branch_backward(m.branch1, cache.b1, nn::Vector<S>(dfused.head(d1)), dX1);
  branch_backward(m.branch2, cache.b2, nn::Vector<S>(dfused.tail(d2)), dX2);
}

// ---- inference over raw samples ---------------------------------------------

struct Prediction {
  int label = 0;
  double p_vulnerable = 0.0;
};

// Cleans + tokenizes the source modality of a sample.
TokenSequence source_tokens_for(const ContractSample& sample);

// Embeds the branch's modality of `sample` at the branch's sequence length.
EmbeddedSequence<float> embed_branch_input(const BranchConfig& branch,
                                           const EmbeddingModel& embedding,
                                           const ContractSample& sample,
                                           const std::string& compiler_path = "");

// Runs the full pipeline on one sample. Exact 0.5 ties resolve to label 1 so
// borderline contracts get flagged for review.
Prediction predict(const HybridModel<float>& model, const ContractSample& sample,
                   const EmbeddingModel& emb_branch1, const EmbeddingModel& emb_branch2,
                   const std::string& compiler_path = "");

// ---- checkpoints --------------------------------------------------------------
// Format HYMO1: magic, version byte, JSON config + parameter manifest
// (name/shape/offset), then float32 little-endian data.

void save_checkpoint(HybridModel<float>& model, const std::string& path);
HybridModel<float> load_checkpoint(const std::string& path);

}  // namespace hymo
