#pragma once

#include <limits>
#include <vector>

#include "csi/model.hpp"
#include "csi/sample.hpp"

// Exact log-probabilities and the conditional information density.
// All public values are in bits (log base 2). Probability-zero events are
// reported as -inf (and +inf for the density); conditioning on a
// probability-zero side-information string throws ConditioningOnNull.

namespace csi {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PairString {
  int n = 0;
  std::vector<std::uint8_t> pair, x, y;
};

PairString make_pair_string(const PairModel& model, const std::vector<int>& xs,
                            const std::vector<int>& ys);

// Incremental log2 P(c_1..c_t) of the pair process under stationary start,
// with the pre-history marginalized over the stationary law.
class JointStepper {
 public:
  explicit JointStepper(const PairModel& model) { reset(model); }
  void reset(const PairModel& model);
  // absorbs one pair symbol; returns the log2 increment (bits, <= 0)
  double step(int c);
  double total_bits() const { return total_; }

 private:
  const PairModel* model_ = nullptr;
  std::vector<double> w_, wn_;
  int t_ = 0, det_state_ = 0;
  double total_ = 0;
};

// Forward filter for the hidden-history chain driven by Y observations.
// After each step the weights form the posterior over pair-histories given
// the absorbed y-prefix; log2 P(y_1..y_t) accumulates in bits.
class YFilter {
 public:
  explicit YFilter(const PairModel& model) { reset(model); }
  void reset(const PairModel& model);
  // absorbs one side-information symbol; returns the log2 increment (bits)
  double step(int y);
  double total_bits() const { return total_; }
  const std::vector<double>& weights() const { return w_; }

 private:
  const PairModel* model_ = nullptr;
  std::vector<double> w_, wn_;
  double total_ = 0;
};

// Per-prefix conditional information density along a pair path.
class DensityStepper {
 public:
  explicit DensityStepper(const PairModel& model) : joint_(model), filter_(model), model_(&model) {}
  // absorbs one pair symbol; returns d_t - d_{t-1} (bits)
  double step(int c) {
    const double dj = joint_.step(c);
    const double dy = filter_.step(model_->y_of(c));
    return dy - dj;
  }
  // d_t = -log2 P(x_1^t | y_1^t), >= 0 (+inf when the joint has prob 0)
  double density_bits() const { return filter_.total_bits() - joint_.total_bits(); }
  double joint_bits() const { return joint_.total_bits(); }
  double y_marginal_bits() const { return filter_.total_bits(); }

 private:
  JointStepper joint_;
  YFilter filter_;
  const PairModel* model_;
};

double joint_log_prob(const PairModel& model, const std::uint8_t* pair, int n);
double y_marginal_log_prob(const PairModel& model, const std::uint8_t* y, int n);
// -log2 P(x|y) >= 0; throws ConditioningOnNull if P(y_1^n) = 0
double conditional_info_density(const PairModel& model, const std::uint8_t* pair,
                                const std::uint8_t* y, int n);

inline double joint_log_prob(const PairModel& m, const PairString& s) {
  return joint_log_prob(m, s.pair.data(), s.n);
}
inline double y_marginal_log_prob(const PairModel& m, const PairString& s) {
  return y_marginal_log_prob(m, s.y.data(), s.n);
}
inline double conditional_info_density(const PairModel& m, const PairString& s) {
  return conditional_info_density(m, s.pair.data(), s.y.data(), s.n);
}

struct DensityTrajectory {
  int n = 0;
  double h_bits = 0;                 // rate used for centering
  std::vector<double> density_bits;  // d_t for t = 1..n
  std::vector<double> centered_path; // S(t) = -d_t + t*h on the integer grid
};

DensityTrajectory density_trajectory(const PairModel& model, const std::uint8_t* pair, int n,
                                     double h_bits);

// Windowed estimates of f_j = log2[ P(X_j,Y_j | pair past) / P(Y_j | Y past) ]
// for j = 1..n of the sample. The numerator is exact (pair past of depth k
// suffices); the denominator conditions on the y-window of length `window`
// ending at j-1, approximating the infinite past. Requires window <= m and
// window >= model order.
std::vector<double> per_symbol_density_terms(const PairModel& model, const TwoSidedSample& sample,
                                             int window);

}  // namespace csi
