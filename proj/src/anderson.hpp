#pragma once

#include <Eigen/Dense>
#include <deque>

#include "blab/field.hpp"

namespace blab::detail {

// Anderson mixing (type II) for fixed points x = G(x) in a real inner product.
class AndersonMixer {
 public:
  explicit AndersonMixer(int depth) : depth_(depth) {}

  // x: current iterate, g = G(x) - x.  Returns the next iterate.
  Eigen::VectorXd next(const Eigen::VectorXd& x, const Eigen::VectorXd& g) {
    if (x_prev_.size()) {
      dx_.push_back(x - x_prev_);
      dg_.push_back(g - g_prev_);
      if (static_cast<int>(dx_.size()) > depth_) {
        dx_.pop_front();
        dg_.pop_front();
      }
    }
    x_prev_ = x;
    g_prev_ = g;
    Eigen::VectorXd out = x + g;
    if (dx_.empty()) return out;
    Eigen::MatrixXd G(g.size(), dg_.size());
    for (size_t i = 0; i < dg_.size(); ++i) G.col(i) = dg_[i];
    const Eigen::VectorXd gamma = G.colPivHouseholderQr().solve(g);
    for (size_t i = 0; i < dx_.size(); ++i) out -= gamma(i) * (dx_[i] + dg_[i]);
    return out;
  }

  void reset() {
    dx_.clear();
    dg_.clear();
    x_prev_.resize(0);
  }

 private:
  int depth_;
  std::deque<Eigen::VectorXd> dx_, dg_;
  Eigen::VectorXd x_prev_, g_prev_;
};

inline Eigen::Map<Eigen::VectorXd> as_real(Samples& s) {
  return {reinterpret_cast<double*>(s.data()), 2 * s.size()};
}

inline Eigen::Map<const Eigen::VectorXd> as_real(const Samples& s) {
  return {reinterpret_cast<const double*>(s.data()), 2 * s.size()};
}

}  // namespace blab::detail
