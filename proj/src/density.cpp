#include "csi/density.hpp"

#include <cmath>

namespace csi {

PairString make_pair_string(const PairModel& model, const std::vector<int>& xs,
                            const std::vector<int>& ys) {
  if (xs.size() != ys.size()) throw Error(Errc::BadSpec, "x and y strings must have equal length");
  PairString s;
  s.n = static_cast<int>(xs.size());
  s.pair.resize(s.n);
  s.x.resize(s.n);
  s.y.resize(s.n);
  for (int i = 0; i < s.n; ++i) {
    if (xs[i] < 0 || xs[i] >= model.x_alphabet().size || ys[i] < 0 ||
        ys[i] >= model.y_alphabet().size)
      throw Error(Errc::BadSpec, "symbol out of alphabet range");
    s.x[i] = static_cast<std::uint8_t>(xs[i]);
    s.y[i] = static_cast<std::uint8_t>(ys[i]);
    s.pair[i] = static_cast<std::uint8_t>(model.pair_symbol(xs[i], ys[i]));
  }
  return s;
}

void JointStepper::reset(const PairModel& model) {
  model_ = &model;
  t_ = 0;
  det_state_ = 0;
  total_ = 0;
  if (model.order() > 0) {
    w_ = model.stationary();
    wn_.assign(w_.size(), 0.0);
  }
}

double JointStepper::step(int c) {
  const PairModel& m = *model_;
  double inc;
  if (t_ < m.order()) {
    // pre-history still uncertain: marginalize over the stationary law
    const int S = m.state_count();
    double mass = 0;
    std::fill(wn_.begin(), wn_.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      const double ws = w_[s];
      if (ws == 0) continue;
      const double p = ws * m.kernel(s, c);
      if (p == 0) continue;
      wn_[m.shift_state(s, c)] += p;
      mass += p;
    }
    w_.swap(wn_);
    if (mass == 0) {
      inc = -kInf;
    } else {
      for (double& v : w_) v /= mass;
      inc = std::log2(mass);
    }
  } else {
    inc = m.log2_kernel(det_state_, c);
  }
  det_state_ = m.shift_state(det_state_, c);
  ++t_;
  total_ += inc;
  return inc;
}

void YFilter::reset(const PairModel& model) {
  model_ = &model;
  total_ = 0;
  if (model.order() == 0)
    w_.assign(1, 1.0);
  else
    w_ = model.stationary();
  wn_.assign(w_.size(), 0.0);
}

double YFilter::step(int y) {
  const PairModel& m = *model_;
  const int S = m.state_count();
  const int X = m.x_alphabet().size;
  std::fill(wn_.begin(), wn_.end(), 0.0);
  double mass = 0;
  for (int s = 0; s < S; ++s) {
    const double ws = w_[s];
    if (ws == 0) continue;
    for (int x = 0; x < X; ++x) {
      const int c = m.pair_symbol(x, y);
      const double p = ws * m.kernel(s, c);
      if (p == 0) continue;
      wn_[m.shift_state(s, c)] += p;
      mass += p;
    }
  }
  w_.swap(wn_);
  double inc;
  if (mass == 0) {
    inc = -kInf;
  } else {
    for (double& v : w_) v /= mass;
    inc = std::log2(mass);
  }
  total_ += inc;
  return inc;
}

double joint_log_prob(const PairModel& model, const std::uint8_t* pair, int n) {
  JointStepper js(model);
  for (int t = 0; t < n; ++t) {
    js.step(pair[t]);
    if (js.total_bits() == -kInf) return -kInf;
  }
  return js.total_bits();
}

double y_marginal_log_prob(const PairModel& model, const std::uint8_t* y, int n) {
  YFilter f(model);
  for (int t = 0; t < n; ++t) {
    f.step(y[t]);
    if (f.total_bits() == -kInf) return -kInf;
  }
  return f.total_bits();
}

double conditional_info_density(const PairModel& model, const std::uint8_t* pair,
                                const std::uint8_t* y, int n) {
  const double marg = y_marginal_log_prob(model, y, n);
  if (marg == -kInf)
    throw Error(Errc::ConditioningOnNull, "side-information string has probability 0");
  const double joint = joint_log_prob(model, pair, n);
  if (joint == -kInf) return kInf;
  double d = marg - joint;
  if (d < 0) {
    if (d < -1e-9) throw Error(Errc::BadSpec, "conditional density negative beyond tolerance");
    d = 0;
  }
  return d;
}

DensityTrajectory density_trajectory(const PairModel& model, const std::uint8_t* pair, int n,
                                     double h_bits) {
  DensityTrajectory out;
  out.n = n;
  out.h_bits = h_bits;
  out.density_bits.resize(n);
  out.centered_path.resize(n);
  DensityStepper ds(model);
  for (int t = 0; t < n; ++t) {
    ds.step(pair[t]);
    if (ds.y_marginal_bits() == -kInf)
      throw Error(Errc::ConditioningOnNull, "side-information prefix has probability 0");
    const double d = ds.density_bits();
    out.density_bits[t] = d;
    out.centered_path[t] = -d + (t + 1) * h_bits;
  }
  return out;
}

std::vector<double> per_symbol_density_terms(const PairModel& model, const TwoSidedSample& sample,
                                             int window) {
  const int k = model.order();
  if (window < k) throw Error(Errc::WindowTooShort, "window must be >= model order");
  if (window > sample.m)
    throw Error(Errc::WindowTooShort, "window exceeds the sample's past length");
  const int n = sample.n;
  std::vector<double> f(n);
  YFilter filter(model);
  for (int j = 1; j <= n; ++j) {
    // exact numerator: log2 P(c_j | pair history of depth k)
    int state = 0;
    for (int d = k; d >= 1; --d) state = model.shift_state(state, sample.pair[sample.idx(j - d)]);
    const double num = model.log2_kernel(state, sample.pair[sample.idx(j)]);
    // windowed denominator: filter restarted from stationary at j - window
    filter.reset(model);
    for (int t = j - window; t < j; ++t) filter.step(sample.y[sample.idx(t)]);
    const double den = filter.step(sample.y[sample.idx(j)]);
    f[j - 1] = num - den;
  }
  return f;
}

}  // namespace csi
