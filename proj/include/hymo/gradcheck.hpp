#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hymo/nn.hpp"

namespace hymo::nn {

// Central-finite-difference comparison harness, 64-bit only. The caller
// computes analytic gradients once; run() walks every registered coordinate,
// re-evaluates the loss at +-step, and reports the worst relative error
// |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
class GradCheck {
 public:
  struct Result {
    double max_rel_err = 0.0;
    std::string worst_coordinate;
  };

  template <int R, int C>
  void add(const std::string& name, Eigen::Matrix<double, R, C>* value,
           const Eigen::Matrix<double, R, C>* grad) {
    entries_.push_back({name, value->data(), grad->data(), value->size()});
  }

  void add(Tensor<double>& t) { add(t.name, &t.value, &t.grad); }

  Result run(const std::function<double()>& loss_fn, double step = 1e-5) const {
    Result result;
    for (const auto& e : entries_) {
      for (Eigen::Index i = 0; i < e.count; ++i) {
        const double saved = e.values[i];
        e.values[i] = saved + step;
        const double up = loss_fn();
        e.values[i] = saved - step;
        const double down = loss_fn();
        e.values[i] = saved;
        const double numeric = (up - down) / (2.0 * step);
        const double analytic = e.grads[i];
        const double rel = std::abs(analytic - numeric) /
                           std::max(1e-8, std::abs(analytic) + std::abs(numeric));
        if (rel > result.max_rel_err) {
          result.max_rel_err = rel;
          result.worst_coordinate = e.name + "[" + std::to_string(i) + "]";
        }
      }
    }
    return result;
  }

 private:
  struct Entry {
    std::string name;
    double* values;
    const double* grads;
    Eigen::Index count;
  };
  std::vector<Entry> entries_;
};

}  // namespace hymo::nn
