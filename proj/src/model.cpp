#include "csi/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

namespace csi {

namespace {

constexpr double kRowSumTol = 1e-9;
constexpr double kStationaryTol = 1e-10;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

}  // namespace

int PairModel::state_symbol(int s, int d) const {
  // d = 1 is the most recent (least significant) digit
  int v = s;
  for (int i = 1; i < d; ++i) v /= pair_count_;
  return v % pair_count_;
}

PairModel PairModel::build(const ModelSpec& spec) {
  PairModel m;
  if (spec.x_alphabet < 1 || spec.y_alphabet < 1)
    throw Error(Errc::BadSpec, "alphabet sizes must be >= 1");
  if (spec.x_alphabet > 256 || spec.y_alphabet > 256)
    throw Error(Errc::BadSpec, "alphabet sizes above 256 are not supported");
  if (spec.order < 0) throw Error(Errc::BadSpec, "order must be >= 0");
  m.x_ = {spec.x_alphabet, spec.x_names};
  m.y_ = {spec.y_alphabet, spec.y_names};
  m.order_ = spec.order;
  m.pair_count_ = spec.x_alphabet * spec.y_alphabet;

  const std::int64_t states64 = spec.order == 0 ? 1 : ipow(m.pair_count_, spec.order);
  if (states64 > 1000000)
    throw Error(Errc::BadSpec, "history state count " + std::to_string(states64) +
                                   " exceeds the 1e6 limit");
  m.state_count_ = static_cast<int>(states64);
  m.top_digit_weight_ = spec.order <= 1 ? 1 : static_cast<int>(ipow(m.pair_count_, spec.order - 1));

  if (static_cast<int>(spec.kernel.size()) != m.state_count_)
    throw Error(Errc::BadSpec, "kernel must have " + std::to_string(m.state_count_) + " rows, got " +
                                   std::to_string(spec.kernel.size()));

  m.kernel_.resize(static_cast<std::size_t>(m.state_count_) * m.pair_count_);
  for (int s = 0; s < m.state_count_; ++s) {
    const auto& row = spec.kernel[s];
    if (static_cast<int>(row.size()) != m.pair_count_)
      throw Error(Errc::BadSpec, "kernel row " + std::to_string(s) + " must have " +
                                     std::to_string(m.pair_count_) + " entries");
    double sum = 0;
    for (int c = 0; c < m.pair_count_; ++c) {
      if (row[c] < 0)
        throw Error(Errc::NegativeProbability,
                    "negative probability in kernel row " + std::to_string(s));
      sum += row[c];
      m.kernel_[static_cast<std::size_t>(s) * m.pair_count_ + c] = row[c];
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
      throw Error(Errc::RowSumError, "kernel row " + std::to_string(s) + " sums to " +
                                         std::to_string(sum) + " (off by more than 1e-9)");
  }

  m.log2_kernel_.resize(m.kernel_.size());
  for (std::size_t i = 0; i < m.kernel_.size(); ++i)
    m.log2_kernel_[i] = m.kernel_[i] > 0 ? std::log2(m.kernel_[i]) : kNegInf;

  m.kernel_cdf_.resize(m.kernel_.size());
  for (int s = 0; s < m.state_count_; ++s) {
    double acc = 0;
    for (int c = 0; c < m.pair_count_; ++c) {
      acc += m.kernel(s, c);
      m.kernel_cdf_[static_cast<std::size_t>(s) * m.pair_count_ + c] = acc;
    }
  }

  m.compute_validity();
  m.compute_stationary();

  m.stationary_cdf_.resize(m.state_count_);
  double acc = 0;
  for (int s = 0; s < m.state_count_; ++s) {
    acc += m.stationary_[s];
    m.stationary_cdf_[s] = acc;
  }

  if (m.order_ >= 1) {
    m.reversed_norm_.resize(m.state_count_);
    for (int s = 0; s < m.state_count_; ++s) {
      const int c = s % m.pair_count_;
      const int base = s / m.pair_count_;
      double z = 0;
      for (int e = 0; e < m.pair_count_; ++e) {
        const int p = e * m.top_digit_weight_ + base;
        z += m.stationary_[p] * m.kernel(p, c);
      }
      m.reversed_norm_[s] = z;
    }
  }
  return m;
}

void PairModel::compute_stationary() {
  const int S = state_count_;
  stationary_.assign(S, 0.0);
  if (order_ == 0) {
    stationary_[0] = 1.0;
    return;
  }

  // Dense transition matrix of the history chain (sparse in structure:
  // s -> shift(s, c) with probability kernel(s, c)).
  auto build_dense = [&]() {
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(S, S);
    for (int s = 0; s < S; ++s)
      for (int c = 0; c < pair_count_; ++c) T(s, shift_state(s, c)) += kernel(s, c);
    return T;
  };

  bool solved = false;
  if (S <= 2048) {
    Eigen::MatrixXd T = build_dense();
    // (T' - I) pi = 0 with the first equation replaced by sum pi = 1
    Eigen::MatrixXd A = T.transpose() - Eigen::MatrixXd::Identity(S, S);
    A.row(0).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(S);
    b(0) = 1.0;
    Eigen::VectorXd pi = A.fullPivLu().solve(b);
    if (pi.allFinite()) {
      double mn = pi.minCoeff();
      if (mn > -1e-9) {
        for (int s = 0; s < S; ++s) stationary_[s] = std::max(0.0, pi(s));
        solved = true;
      }
    }
  }

  if (!solved) {
    // power iteration fallback
    std::vector<double> v(S, 1.0 / S), w(S);
    for (int it = 0; it < 200000; ++it) {
      std::fill(w.begin(), w.end(), 0.0);
      for (int s = 0; s < S; ++s) {
        const double vs = v[s];
        if (vs == 0) continue;
        for (int c = 0; c < pair_count_; ++c) w[shift_state(s, c)] += vs * kernel(s, c);
      }
      double diff = 0;
      for (int s = 0; s < S; ++s) diff += std::abs(w[s] - v[s]);
      v.swap(w);
      if (diff < 1e-15) break;
    }
    stationary_ = v;
  }

  // normalize and check the fixed-point residual
  double tot = std::accumulate(stationary_.begin(), stationary_.end(), 0.0);
  for (double& p : stationary_) p /= tot;
  std::vector<double> w(S, 0.0);
  for (int s = 0; s < S; ++s)
    for (int c = 0; c < pair_count_; ++c) w[shift_state(s, c)] += stationary_[s] * kernel(s, c);
  double res = 0;
  for (int s = 0; s < S; ++s) res += std::abs(w[s] - stationary_[s]);
  if (res > kStationaryTol) {
    if (validity_.irreducible)
      throw Error(Errc::BadSpec, "stationary fixed-point residual " + std::to_string(res) +
                                     " exceeds 1e-10");
    // reducible chains keep the (non-unique) fixed point; callers see the
    // NotIrreducible flag via validity()
  }
}

void PairModel::compute_validity() {
  const int S = state_count_;
  validity_.all_positive =
      std::all_of(kernel_.begin(), kernel_.end(), [](double p) { return p > 0; });

  if (order_ == 0) {
    validity_.irreducible = true;
    validity_.aperiodic = true;
  } else {
    // adjacency on the history chain
    std::vector<std::vector<int>> fwd(S), bwd(S);
    for (int s = 0; s < S; ++s)
      for (int c = 0; c < pair_count_; ++c)
        if (kernel(s, c) > 0) {
          const int t = shift_state(s, c);
          fwd[s].push_back(t);
          bwd[t].push_back(s);
        }
    auto reach = [S](const std::vector<std::vector<int>>& adj, int from) {
      std::vector<char> seen(S, 0);
      std::vector<int> stack{from};
      seen[from] = 1;
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u])
          if (!seen[v]) {
            seen[v] = 1;
            stack.push_back(v);
          }
      }
      return seen;
    };
    // irreducible iff every history state communicates with state 0
    auto f0 = reach(fwd, 0);
    bool irreducible = true;
    for (int s = 0; s < S && irreducible; ++s) {
      if (!f0[s]) {
        irreducible = false;
        break;
      }
    }
    if (irreducible) {
      auto b0 = reach(bwd, 0);
      for (int s = 0; s < S; ++s)
        if (!b0[s]) {
          irreducible = false;
          break;
        }
    }
    validity_.irreducible = irreducible;

    // period = gcd over edges u->v of (depth[u] + 1 - depth[v]) within the
    // class of state 0 (BFS depths from 0)
    bool aperiodic = false;
    {
      std::vector<int> depth(S, -1);
      std::vector<int> q{0};
      depth[0] = 0;
      for (std::size_t h = 0; h < q.size(); ++h) {
        int u = q[h];
        for (int v : fwd[u])
          if (depth[v] < 0) {
            depth[v] = depth[u] + 1;
            q.push_back(v);
          }
      }
      int g = 0;
      for (int u = 0; u < S; ++u) {
        if (depth[u] < 0) continue;
        for (int v : fwd[u])
          if (depth[v] >= 0) g = std::gcd(g, std::abs(depth[u] + 1 - depth[v]));
      }
      aperiodic = (g == 1);
    }
    validity_.aperiodic = aperiodic;
  }

  if (validity_.all_positive) {
    validity_.irreducible = true;
    validity_.aperiodic = true;
    validity_.assumption_m_case = 'a';
  } else {
    validity_.assumption_m_case = 'u';  // case (b) decided after the Y-marginal check
  }
}

PairModel::YMarginal PairModel::marginal_y_model() const {
  YMarginal out;
  const int Y = y_.size;
  if (order_ == 0) {
    out.is_markov = true;
    out.order = 0;
    out.kernel.assign(1, std::vector<double>(Y, 0.0));
    for (int c = 0; c < pair_count_; ++c) out.kernel[0][y_of(c)] += kernel(0, c);
    return out;
  }
  const int k = order_;
  const std::int64_t yStates = ipow(Y, k);
  // group pair-histories by their y-projection; all rows in a group must
  // induce the same y-transition law
  std::vector<std::vector<double>> yk(static_cast<std::size_t>(yStates),
                                      std::vector<double>(Y, -1.0));
  for (int s = 0; s < state_count_; ++s) {
    // y-projection of the history, most recent in the least significant digit
    int ys = 0, t = s, w = 1;
    for (int d = 0; d < k; ++d) {
      ys += (t % pair_count_) % Y * w;
      t /= pair_count_;
      w *= Y;
    }
    std::vector<double> row(Y, 0.0);
    for (int c = 0; c < pair_count_; ++c) row[y_of(c)] += kernel(s, c);
    auto& ref = yk[ys];
    if (ref[0] < 0) {
      ref = row;
    } else {
      for (int y = 0; y < Y; ++y)
        if (std::abs(ref[y] - row[y]) > 1e-12) {
          out.is_markov = false;
          return out;
        }
    }
  }
  out.is_markov = true;
  out.order = k;
  out.kernel.resize(static_cast<std::size_t>(yStates));
  for (std::int64_t i = 0; i < yStates; ++i)
    out.kernel[i] = yk[i][0] < 0 ? std::vector<double>(Y, 1.0 / Y) : yk[i];
  return out;
}

PairModel::NoiseChannel PairModel::noise_channel() const {
  NoiseChannel out;
  const int X = x_.size, Y = y_.size;
  // P(x',y'|h) must equal PY(y'|h) * Q(x'|y') with Q shared by all histories
  std::vector<std::vector<double>> q(Y, std::vector<double>(X, -1.0));
  for (int s = 0; s < state_count_; ++s) {
    for (int y = 0; y < Y; ++y) {
      double py = 0;
      for (int x = 0; x < X; ++x) py += kernel(s, pair_symbol(x, y));
      if (py == 0) continue;
      for (int x = 0; x < X; ++x) {
        const double qv = kernel(s, pair_symbol(x, y)) / py;
        if (q[y][x] < 0)
          q[y][x] = qv;
        else if (std::abs(q[y][x] - qv) > 1e-12) {
          out.applies = false;
          return out;
        }
      }
    }
  }
  for (int y = 0; y < Y; ++y)
    if (q[y][0] < 0) {
      out.applies = false;  // y never emitted; structure undecidable
      return out;
    }
  out.applies = true;
  out.q = std::move(q);
  return out;
}

ModelValidity check_validity(const PairModel& m) {
  ModelValidity v = m.validity_;
  if (v.assumption_m_case == 'a') return v;
  if (!v.irreducible || !v.aperiodic) return v;
  const auto ym = m.marginal_y_model();
  if (!ym.is_markov) return v;
  if (ym.order == 0) {
    v.assumption_m_case = 'b';
    return v;
  }
  // irreducibility and aperiodicity of the Y-history chain
  const int Y = m.y_alphabet().size;
  const int S = static_cast<int>(ym.kernel.size());
  std::vector<std::vector<int>> fwd(S), bwd(S);
  for (int s = 0; s < S; ++s)
    for (int y = 0; y < Y; ++y)
      if (ym.kernel[s][y] > 0) {
        const int t = (s * Y + y) % S;
        fwd[s].push_back(t);
        bwd[t].push_back(s);
      }
  auto reach = [S](const std::vector<std::vector<int>>& adj, int from) {
    std::vector<char> seen(S, 0);
    std::vector<int> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int w : adj[u])
        if (!seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
    }
    return seen;
  };
  auto f0 = reach(fwd, 0);
  auto b0 = reach(bwd, 0);
  for (int s = 0; s < S; ++s)
    if (!f0[s] || !b0[s]) return v;
  std::vector<int> depth(S, -1);
  std::vector<int> q{0};
  depth[0] = 0;
  for (std::size_t hh = 0; hh < q.size(); ++hh) {
    int u = q[hh];
    for (int w : fwd[u])
      if (depth[w] < 0) {
        depth[w] = depth[u] + 1;
        q.push_back(w);
      }
  }
  int g = 0;
  for (int u = 0; u < S; ++u)
    for (int w : fwd[u]) g = std::gcd(g, std::abs(depth[u] + 1 - depth[w]));
  if (g == 1) v.assumption_m_case = 'b';
  return v;
}

namespace {

std::string canonical_text(const PairModel& m) {
  std::ostringstream os;
  char buf[40];
  os << m.x_alphabet().size << '|' << m.y_alphabet().size << '|' << m.order() << '|';
  for (int s = 0; s < m.state_count(); ++s)
    for (int c = 0; c < m.pair_count(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g,", m.kernel(s, c));
      os << buf;
    }
  return os.str();
}

}  // namespace

std::uint64_t PairModel::hash() const {
  const std::string text = canonical_text(*this);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

PairModel PairModel::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw Error(Errc::BadSpec, std::string("model JSON parse error: ") + e.what());
  }
  ModelSpec spec;
  try {
    spec.x_alphabet = j.at("x_alphabet").get<int>();
    spec.y_alphabet = j.at("y_alphabet").get<int>();
    spec.order = j.at("order").get<int>();
    spec.kernel = j.at("kernel").get<std::vector<std::vector<double>>>();
    if (j.contains("names")) {
      const auto& n = j["names"];
      if (n.contains("x")) spec.x_names = n["x"].get<std::vector<std::string>>();
      if (n.contains("y")) spec.y_names = n["y"].get<std::vector<std::string>>();
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::BadSpec, std::string("model JSON field error: ") + e.what());
  }
  return build(spec);
}

PairModel PairModel::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::BadSpec, "cannot open model file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string PairModel::to_json_text() const {
  nlohmann::ordered_json j;
  j["x_alphabet"] = x_.size;
  j["y_alphabet"] = y_.size;
  j["order"] = order_;
  auto rows = nlohmann::ordered_json::array();
  for (int s = 0; s < state_count_; ++s) {
    auto row = nlohmann::ordered_json::array();
    for (int c = 0; c < pair_count_; ++c) row.push_back(kernel(s, c));
    rows.push_back(std::move(row));
  }
  j["kernel"] = std::move(rows);
  if (!x_.names.empty() || !y_.names.empty()) {
    j["names"] = {{"x", x_.names}, {"y", y_.names}};
  }
  return j.dump(2);
}

}  // namespace csi
