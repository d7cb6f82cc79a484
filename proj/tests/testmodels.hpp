#pragma once

#include "csi/model.hpp"

// Shared model zoo for the test suites. Matches the JSON files in models/.
namespace testmodels {

using csi::ModelSpec;
using csi::PairModel;

// binary symmetric-style pair: Y is a symmetric binary Markov chain with
// flip probability 0.2 and X = Y xor N with N iid Bernoulli(0.11)
inline PairModel dsc() {
  ModelSpec s;
  s.x_alphabet = 2;
  s.y_alphabet = 2;
  s.order = 1;
  s.kernel = {{0.712, 0.022, 0.088, 0.178},
              {0.178, 0.088, 0.022, 0.712},
              {0.712, 0.022, 0.088, 0.178},
              {0.178, 0.088, 0.022, 0.712}};
  return PairModel::build(s);
}

// same channel with Y iid uniform: a memoryless pair
inline PairModel dsc_memoryless() {
  ModelSpec s;
  s.x_alphabet = 2;
  s.y_alphabet = 2;
  s.order = 0;
  s.kernel = {{0.445, 0.055, 0.055, 0.445}};
  return PairModel::build(s);
}

// generic all-positive order-1 pair kernel (Y-marginal is hidden-Markov)
inline PairModel markov1() {
  ModelSpec s;
  s.x_alphabet = 2;
  s.y_alphabet = 2;
  s.order = 1;
  s.kernel = {{0.40, 0.15, 0.30, 0.15},
              {0.10, 0.50, 0.15, 0.25},
              {0.25, 0.20, 0.35, 0.20},
              {0.15, 0.30, 0.10, 0.45}};
  return PairModel::build(s);
}

inline PairModel uniform_indep() {
  ModelSpec s;
  s.x_alphabet = 2;
  s.y_alphabet = 2;
  s.order = 0;
  s.kernel = {{0.25, 0.25, 0.25, 0.25}};
  return PairModel::build(s);
}

inline PairModel copy_model() {
  ModelSpec s;
  s.x_alphabet = 2;
  s.y_alphabet = 2;
  s.order = 0;
  s.kernel = {{0.5, 0.0, 0.0, 0.5}};
  return PairModel::build(s);
}

// X uniform iid independent of a symmetric binary Markov Y (flip 0.2)
inline PairModel x_indep_ymarkov() {
  ModelSpec s;
  s.x_alphabet = 2;
  s.y_alphabet = 2;
  s.order = 1;
  s.kernel = {{0.40, 0.10, 0.40, 0.10},
              {0.10, 0.40, 0.10, 0.40},
              {0.40, 0.10, 0.40, 0.10},
              {0.10, 0.40, 0.10, 0.40}};
  return PairModel::build(s);
}

// uniform conditionals with equal support sizes: zero varentropy
inline PairModel zerovar_equal() {
  ModelSpec s;
  s.x_alphabet = 3;
  s.y_alphabet = 2;
  s.order = 0;
  s.kernel = {{0.15, 0.0, 0.15, 0.35, 0.0, 0.35}};
  return PairModel::build(s);
}

// uniform conditionals with unequal support sizes: positive varentropy
inline PairModel zerovar_unequal() {
  ModelSpec s;
  s.x_alphabet = 3;
  s.y_alphabet = 2;
  s.order = 0;
  const double a = 0.15, b = 0.7 / 3;
  s.kernel = {{a, b, a, b, 0.0, b}};
  return PairModel::build(s);
}

// Y transition depends on the previous X: the Y-marginal is not Markov
inline PairModel y_nonmarkov() {
  ModelSpec s;
  s.x_alphabet = 2;
  s.y_alphabet = 2;
  s.order = 1;
  s.kernel = {{0.42, 0.15, 0.28, 0.15},
              {0.24, 0.30, 0.16, 0.30},
              {0.30, 0.25, 0.20, 0.25},
              {0.36, 0.20, 0.24, 0.20}};
  return PairModel::build(s);
}

// x binary, y ternary memoryless pair with asymmetric probabilities
inline PairModel small_2x3() {
  ModelSpec s;
  s.x_alphabet = 2;
  s.y_alphabet = 3;
  s.order = 0;
  s.kernel = {{0.30, 0.05, 0.10, 0.15, 0.25, 0.15}};
  return PairModel::build(s);
}

// order-1 kernel with an unreachable pair state (zero column)
inline ModelSpec reducible_spec() {
  ModelSpec s;
  s.x_alphabet = 2;
  s.y_alphabet = 2;
  s.order = 1;
  // pair symbol 3 never emitted: history state 3 unreachable
  s.kernel = {{0.5, 0.3, 0.2, 0.0},
              {0.2, 0.5, 0.3, 0.0},
              {0.4, 0.4, 0.2, 0.0},
              {0.3, 0.3, 0.4, 0.0}};
  return s;
}

// period-2 (alternating) chain
inline ModelSpec periodic_spec() {
  ModelSpec s;
  s.x_alphabet = 1;
  s.y_alphabet = 2;
  s.order = 1;
  s.kernel = {{0.0, 1.0}, {1.0, 0.0}};
  return s;
}

}  // namespace testmodels
