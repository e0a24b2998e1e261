#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hymo/rng.hpp"

namespace hymo::nn {

template <typename S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

inline void check_shape(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

// Named parameter array with its gradient and Adam state.
template <typename S>
struct Tensor {
  std::string name;
  Matrix<S> value, grad, adam_m, adam_v;
  long adam_t = 0;

  void init(std::string param_name, Eigen::Index rows, Eigen::Index cols) {
    name = std::move(param_name);
    value.setZero(rows, cols);
    grad.setZero(rows, cols);
    adam_m.setZero(rows, cols);
    adam_v.setZero(rows, cols);
    adam_t = 0;
  }

  // Uniform in +-sqrt(6 / (rows + cols)), drawn row-major.
  void init_glorot(std::string param_name, Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    init(std::move(param_name), rows, cols);
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        value(r, c) = static_cast<S>(rng.next_uniform(-limit, limit));
  }

  void zero_grad() { grad.setZero(); }
};

// ---- dense --------------------------------------------------------------

// y = x * W + b  with x: [batch, in], W: [in, out], b: [out].
template <typename S>
Matrix<S> dense_forward(const Matrix<S>& x, const Matrix<S>& W, const Vector<S>& b) {
  check_shape(x.cols() == W.rows(), "dense: x has " + std::to_string(x.cols()) +
                                        " columns but W has " + std::to_string(W.rows()) +
                                        " rows");
  check_shape(W.cols() == b.size(), "dense: W has " + std::to_string(W.cols()) +
                                        " columns but b has " + std::to_string(b.size()) +
                                        " entries");
  return (x * W).rowwise() + b.transpose();
}

// Accumulates dW/db; returns dx.
template <typename S>
Matrix<S> dense_backward(const Matrix<S>& x, const Matrix<S>& W, const Matrix<S>& dy,
                         Matrix<S>& dW, Vector<S>& db) {
  check_shape(dy.rows() == x.rows() && dy.cols() == W.cols(), "dense backward: bad dy shape");
  dW += x.transpose() * dy;
  db += dy.colwise().sum().transpose();
  return dy * W.transpose();
}

// ---- elementwise --------------------------------------------------------

template <typename S>
Matrix<S> relu(const Matrix<S>& x) {
  return x.cwiseMax(S(0));
}

template <typename S>
Matrix<S> relu_backward(const Matrix<S>& x, const Matrix<S>& dy) {
  return (x.array() > S(0)).template cast<S>() * dy.array();
}

// Inverted dropout: training zeroes entries with probability p and scales
// survivors by 1/(1-p); inference is the identity. The mask (written when
// training) is what backward multiplies by.
template <typename S>
Matrix<S> dropout_forward(const Matrix<S>& x, double p, bool train, Rng& rng,
                          Matrix<S>* mask = nullptr) {
  if (p < 0.0 || p >= 1.0)
    throw std::invalid_argument("dropout rate must be in [0,1), got " + std::to_string(p));
  if (!train) {
    if (mask) *mask = Matrix<S>::Ones(x.rows(), x.cols());
    return x;
  }
  Matrix<S> m(x.rows(), x.cols());
  const S keep_scale = static_cast<S>(1.0 / (1.0 - p));
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c)
      m(r, c) = rng.next_unit() < p ? S(0) : keep_scale;
  if (mask) *mask = m;
  return x.cwiseProduct(m);
}

// ---- softmax / cross-entropy --------------------------------------------

template <typename S>
Vector<S> softmax(const Vector<S>& logits) {
  check_shape(logits.size() > 0, "softmax: empty input");
  Vector<S> shifted = logits.array() - logits.maxCoeff();
  Vector<S> e = shifted.array().exp();
  return e / e.sum();
}

template <typename S>
S cross_entropy(const Vector<S>& probs, int true_class) {
  check_shape(true_class >= 0 && true_class < probs.size(), "cross_entropy: bad class index");
  return -std::log(probs(true_class));
}

// Numerically safe loss straight from logits (log-sum-exp form); used by the
// training loop so saturated predictions cannot produce infinities.
template <typename S>
S cross_entropy_logits(const Vector<S>& logits, int true_class) {
  check_shape(true_class >= 0 && true_class < logits.size(),
              "cross_entropy_logits: bad class index");
  const S m = logits.maxCoeff();
  const S lse = m + std::log((logits.array() - m).exp().sum());
  return lse - logits(true_class);
}

// d loss / d logits for softmax + cross-entropy.
template <typename S>
Vector<S> softmax_ce_backward(const Vector<S>& probs, int true_class) {
  Vector<S> d = probs;
  d(true_class) -= S(1);
  return d;
}

// ---- 1-D convolution ----------------------------------------------------

// Valid cross-correlation along the sequence axis. X: [L, dim];
// W: [k*dim, F] with row (tau*dim + d) holding the weight for window offset
// tau and channel d; b: [F]. Output: [L-k+1, F].
template <typename S>
Matrix<S> unfold_windows(const Matrix<S>& X, int k) {
  const Eigen::Index L = X.rows(), dim = X.cols();
  Matrix<S> U(L - k + 1, k * dim);
  for (Eigen::Index t = 0; t + k <= L; ++t)
    for (int tau = 0; tau < k; ++tau) U.block(t, tau * dim, 1, dim) = X.row(t + tau);
  return U;
}

template <typename S>
Matrix<S> conv1d_forward(const Matrix<S>& X, const Matrix<S>& W, const Vector<S>& b, int k) {
  check_shape(k >= 1, "conv1d: kernel must be >= 1");
  check_shape(X.rows() >= k, "conv1d: sequence length " + std::to_string(X.rows()) +
                                 " shorter than kernel " + std::to_string(k));
  check_shape(W.rows() == k * X.cols(), "conv1d: W has " + std::to_string(W.rows()) +
                                            " rows, expected " + std::to_string(k * X.cols()));
  check_shape(W.cols() == b.size(), "conv1d: bias size mismatch");
  return (unfold_windows(X, k) * W).rowwise() + b.transpose();
}

template <typename S>
Matrix<S> conv1d_backward(const Matrix<S>& X, const Matrix<S>& W, int k, const Matrix<S>& dY,
                          Matrix<S>& dW, Vector<S>& db) {
  const Eigen::Index dim = X.cols();
  Matrix<S> U = unfold_windows(X, k);
  check_shape(dY.rows() == U.rows() && dY.cols() == W.cols(), "conv1d backward: bad dY shape");
  dW += U.transpose() * dY;
  db += dY.colwise().sum().transpose();
  Matrix<S> dU = dY * W.transpose();
  Matrix<S> dX = Matrix<S>::Zero(X.rows(), dim);
  for (Eigen::Index t = 0; t < dU.rows(); ++t)
    for (int tau = 0; tau < k; ++tau) dX.row(t + tau) += dU.block(t, tau * dim, 1, dim);
  return dX;
}

// ---- global max pooling --------------------------------------------------

// Per-channel maximum over rows; ties resolve to the first (lowest) row so
// the backward routing is unambiguous.
template <typename S>
Vector<S> global_max_pool(const Matrix<S>& X, std::vector<int>* argmax = nullptr) {
  check_shape(X.rows() >= 1, "global_max_pool: empty input");
  Vector<S> out(X.cols());
  if (argmax) argmax->assign(static_cast<size_t>(X.cols()), 0);
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    Eigen::Index best = 0;
    for (Eigen::Index r = 1; r < X.rows(); ++r)
      if (X(r, c) > X(best, c)) best = r;
    out(c) = X(best, c);
    if (argmax) (*argmax)[static_cast<size_t>(c)] = static_cast<int>(best);
  }
  return out;
}

template <typename S>
Matrix<S> global_max_pool_backward(Eigen::Index rows, const std::vector<int>& argmax,
                                   const Vector<S>& dy) {
  Matrix<S> dX = Matrix<S>::Zero(rows, dy.size());
  for (Eigen::Index c = 0; c < dy.size(); ++c) dX(argmax[static_cast<size_t>(c)], c) += dy(c);
  return dX;
}

// ---- GRU ------------------------------------------------------------------

// Gating convention: z = sigmoid(Wz x + Uz h + bz), r likewise,
// hbar = tanh(Wh x + Uh (r.h) + bh), h' = (1-z).h + z.hbar.
// Weights apply as W * x with W: [H, D], U: [H, H].
template <typename S>
struct GruParams {
  Tensor<S> Wz, Uz, bz, Wr, Ur, br, Wh, Uh, bh;

  void init(const std::string& prefix, int input_dim, int hidden, Rng& rng) {
    Wz.init_glorot(prefix + ".Wz", hidden, input_dim, rng);
    Uz.init_glorot(prefix + ".Uz", hidden, hidden, rng);
    bz.init(prefix + ".bz", hidden, 1);
    Wr.init_glorot(prefix + ".Wr", hidden, input_dim, rng);
    Ur.init_glorot(prefix + ".Ur", hidden, hidden, rng);
    br.init(prefix + ".br", hidden, 1);
    Wh.init_glorot(prefix + ".Wh", hidden, input_dim, rng);
    Uh.init_glorot(prefix + ".Uh", hidden, hidden, rng);
    bh.init(prefix + ".bh", hidden, 1);
  }

  int hidden() const { return static_cast<int>(Wz.value.rows()); }
  int input_dim() const { return static_cast<int>(Wz.value.cols()); }

  template <typename F>
  void visit(F&& f) {
    f(Wz); f(Uz); f(bz);
    f(Wr); f(Ur); f(br);
    f(Wh); f(Uh); f(bh);
  }
};

template <typename S>
Vector<S> sigmoid(const Vector<S>& x) {
  return (S(1) / (S(1) + (-x.array()).exp())).matrix();
}

template <typename S>
struct GruStepCache {
  Vector<S> x, h_prev, z, r, hbar;
};

template <typename S>
Vector<S> gru_cell(const GruParams<S>& p, const Vector<S>& x, const Vector<S>& h_prev,
                   GruStepCache<S>* cache = nullptr) {
  check_shape(x.size() == p.Wz.value.cols(), "gru_cell: input size " + std::to_string(x.size()) +
                                                 " != " + std::to_string(p.Wz.value.cols()));
  check_shape(h_prev.size() == p.Wz.value.rows(), "gru_cell: hidden size mismatch");
  Vector<S> z = sigmoid<S>(p.Wz.value * x + p.Uz.value * h_prev + p.bz.value);
  Vector<S> r = sigmoid<S>(p.Wr.value * x + p.Ur.value * h_prev + p.br.value);
  Vector<S> hbar =
      (p.Wh.value * x + p.Uh.value * r.cwiseProduct(h_prev) + p.bh.value).array().tanh();
  Vector<S> h = (Vector<S>::Ones(z.size()) - z).cwiseProduct(h_prev) + z.cwiseProduct(hbar);
  if (cache) *cache = {x, h_prev, z, r, hbar};
  return h;
}

// Returns dL/dh_prev, accumulates parameter gradients, and adds dL/dx into
// *dx when given.
template <typename S>
Vector<S> gru_cell_backward(GruParams<S>& p, const GruStepCache<S>& c, const Vector<S>& dh,
                            Vector<S>* dx = nullptr) {
  const Vector<S> ones = Vector<S>::Ones(dh.size());
  const Vector<S> dz = dh.cwiseProduct(c.hbar - c.h_prev);
  const Vector<S> dhbar = dh.cwiseProduct(c.z);
  Vector<S> dh_prev = dh.cwiseProduct(ones - c.z);

  const Vector<S> da_h = dhbar.cwiseProduct(ones - c.hbar.cwiseProduct(c.hbar));
  p.Wh.grad += da_h * c.x.transpose();
  p.Uh.grad += da_h * c.r.cwiseProduct(c.h_prev).transpose();
  p.bh.grad += da_h;
  const Vector<S> drh = p.Uh.value.transpose() * da_h;
  const Vector<S> dr = drh.cwiseProduct(c.h_prev);
  dh_prev += drh.cwiseProduct(c.r);

  const Vector<S> da_z = dz.cwiseProduct(c.z).cwiseProduct(ones - c.z);
  p.Wz.grad += da_z * c.x.transpose();
  p.Uz.grad += da_z * c.h_prev.transpose();
  p.bz.grad += da_z;
  dh_prev += p.Uz.value.transpose() * da_z;

  const Vector<S> da_r = dr.cwiseProduct(c.r).cwiseProduct(ones - c.r);
  p.Wr.grad += da_r * c.x.transpose();
  p.Ur.grad += da_r * c.h_prev.transpose();
  p.br.grad += da_r;
  dh_prev += p.Ur.value.transpose() * da_r;

  if (dx)
    *dx += p.Wz.value.transpose() * da_z + p.Wr.value.transpose() * da_r +
           p.Wh.value.transpose() * da_h;
  return dh_prev;
}

// ---- bidirectional GRU -----------------------------------------------------

template <typename S>
struct BiGruCache {
  std::vector<GruStepCache<S>> fwd_steps, bwd_steps;
  int valid_len = 0;
  Eigen::Index input_rows = 0;
};

// Runs the forward GRU left-to-right and the backward GRU right-to-left over
// the first valid_len rows of X; returns [h_fwd_final ; h_bwd_final].
// All-padding input (valid_len 0) gives a zero feature.
template <typename S>
Vector<S> bigru_forward(const Matrix<S>& X, int valid_len, const GruParams<S>& fwd,
                        const GruParams<S>& bwd, BiGruCache<S>* cache = nullptr) {
  check_shape(valid_len >= 0 && valid_len <= X.rows(), "bigru: valid_len out of range");
  const int H = fwd.hidden();
  check_shape(bwd.hidden() == H, "bigru: direction hidden sizes differ");
  if (cache) {
    cache->fwd_steps.assign(static_cast<size_t>(valid_len), {});
    cache->bwd_steps.assign(static_cast<size_t>(valid_len), {});
    cache->valid_len = valid_len;
    cache->input_rows = X.rows();
  }
  Vector<S> hf = Vector<S>::Zero(H), hb = Vector<S>::Zero(H);
  for (int t = 0; t < valid_len; ++t)
    hf = gru_cell(fwd, Vector<S>(X.row(t).transpose()), hf,
                  cache ? &cache->fwd_steps[static_cast<size_t>(t)] : nullptr);
  for (int t = valid_len - 1; t >= 0; --t)
    hb = gru_cell(bwd, Vector<S>(X.row(t).transpose()), hb,
                  cache ? &cache->bwd_steps[static_cast<size_t>(valid_len - 1 - t)] : nullptr);
  Vector<S> feature(2 * H);
  feature << hf, hb;
  return feature;
}

// Backpropagation through time from the concatenated final states.
template <typename S>
void bigru_backward(GruParams<S>& fwd, GruParams<S>& bwd, const BiGruCache<S>& cache,
                    const Vector<S>& dfeature, Matrix<S>* dX = nullptr) {
  const int H = fwd.hidden();
  check_shape(dfeature.size() == 2 * H, "bigru backward: bad feature gradient size");
  if (dX) dX->setZero(cache.input_rows, fwd.input_dim());
  Vector<S> dh = dfeature.head(H);
  Vector<S> dx_row(fwd.input_dim());
  for (int t = cache.valid_len - 1; t >= 0; --t) {
    dx_row.setZero();
    dh = gru_cell_backward(fwd, cache.fwd_steps[static_cast<size_t>(t)], dh,
                           dX ? &dx_row : nullptr);
    if (dX) dX->row(t) += dx_row.transpose();
  }
  dh = dfeature.tail(H);
  for (int j = cache.valid_len - 1; j >= 0; --j) {
    const int row = cache.valid_len - 1 - j;
    dx_row.setZero();
    dh = gru_cell_backward(bwd, cache.bwd_steps[static_cast<size_t>(j)], dh,
                           dX ? &dx_row : nullptr);
    if (dX) dX->row(row) += dx_row.transpose();
  }
}

// ---- Adam -------------------------------------------------------------------

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

template <typename S>
void adam_step(Tensor<S>& t, const AdamConfig& cfg) {
  if (!t.grad.allFinite())
    throw std::runtime_error("non-finite gradient in parameter " + t.name);
  t.adam_t += 1;
  const S b1 = static_cast<S>(cfg.beta1), b2 = static_cast<S>(cfg.beta2);
  t.adam_m = b1 * t.adam_m + (S(1) - b1) * t.grad;
  t.adam_v = (b2 * t.adam_v.array() + (S(1) - b2) * t.grad.array().square()).matrix();
  const S m_corr = static_cast<S>(1.0 - std::pow(cfg.beta1, static_cast<double>(t.adam_t)));
  const S v_corr = static_cast<S>(1.0 - std::pow(cfg.beta2, static_cast<double>(t.adam_t)));
  t.value.array() -= static_cast<S>(cfg.lr) * (t.adam_m.array() / m_corr) /
                     ((t.adam_v.array() / v_corr).sqrt() + static_cast<S>(cfg.eps));
}

}  // namespace hymo::nn
