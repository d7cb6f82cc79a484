#include <doctest.h>

#include <cmath>

#include "csi/model.hpp"
#include "testmodels.hpp"

using namespace csi;

TEST_CASE("memoryless uniform pair builds with trivial stationary law") {
  const auto m = testmodels::uniform_indep();
  CHECK(m.kind() == ModelKind::Memoryless);
  CHECK(m.state_count() == 1);
  CHECK(m.stationary(0) == doctest::Approx(1.0));
  CHECK(m.validity().all_positive);
  CHECK(m.validity().assumption_m_case == 'a');
}

TEST_CASE("row sum and negativity validation") {
  ModelSpec s;
  s.x_alphabet = 2;
  s.y_alphabet = 2;
  s.order = 0;
  s.kernel = {{0.5, 0.3, 0.3, 0.0}};  // sums to 1.1
  CHECK_THROWS_AS(PairModel::build(s), Error);
  try {
    PairModel::build(s);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::RowSumError);
  }
  s.kernel = {{0.5, 0.6, -0.1, 0.0}};
  try {
    PairModel::build(s);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NegativeProbability);
  }
}

TEST_CASE("dsc stationary matches the hand-solved pair law") {
  const auto m = testmodels::dsc();
  // history = one pair symbol; stationary over (x,y)
  CHECK(m.stationary(0) == doctest::Approx(0.445).epsilon(1e-9));
  CHECK(m.stationary(1) == doctest::Approx(0.055).epsilon(1e-9));
  CHECK(m.stationary(2) == doctest::Approx(0.055).epsilon(1e-9));
  CHECK(m.stationary(3) == doctest::Approx(0.445).epsilon(1e-9));
  CHECK(m.validity().assumption_m_case == 'a');
}

TEST_CASE("stationary residual is a fixed point") {
  for (const auto& m : {testmodels::markov1(), testmodels::dsc(), testmodels::y_nonmarkov()}) {
    std::vector<double> w(m.state_count(), 0.0);
    for (int s = 0; s < m.state_count(); ++s)
      for (int c = 0; c < m.pair_count(); ++c) w[m.shift_state(s, c)] += m.stationary(s) * m.kernel(s, c);
    double res = 0;
    for (int s = 0; s < m.state_count(); ++s) res += std::abs(w[s] - m.stationary(s));
    CHECK(res <= 1e-10);
  }
}

TEST_CASE("degenerate kernel reports NotIrreducible but still builds") {
  const auto m = PairModel::build(testmodels::reducible_spec());
  CHECK_FALSE(m.validity().irreducible);
  CHECK_FALSE(m.validity().all_positive);
}

TEST_CASE("periodic chain flagged as not aperiodic") {
  const auto m = PairModel::build(testmodels::periodic_spec());
  CHECK(m.validity().irreducible);
  CHECK_FALSE(m.validity().aperiodic);
}

TEST_CASE("assumption case classification") {
  CHECK(check_validity(testmodels::dsc()).assumption_m_case == 'a');
  CHECK(check_validity(testmodels::markov1()).assumption_m_case == 'a');
  // zero entries but irreducible with Markov Y: case b
  ModelSpec s;
  s.x_alphabet = 2;
  s.y_alphabet = 2;
  s.order = 1;
  // X copies the previous Y deterministically; Y is a mixing Markov chain
  s.kernel = {{0.7, 0.3, 0.0, 0.0},
              {0.0, 0.0, 0.4, 0.6},
              {0.7, 0.3, 0.0, 0.0},
              {0.0, 0.0, 0.4, 0.6}};
  const auto m = PairModel::build(s);
  CHECK_FALSE(m.validity().all_positive);
  const auto v = check_validity(m);
  CHECK(v.irreducible);
  CHECK(v.aperiodic);
  CHECK(v.assumption_m_case == 'b');
}

TEST_CASE("y marginal detection") {
  CHECK(testmodels::dsc().marginal_y_model().is_markov);
  CHECK(testmodels::x_indep_ymarkov().marginal_y_model().is_markov);
  CHECK_FALSE(testmodels::y_nonmarkov().marginal_y_model().is_markov);
  CHECK(testmodels::dsc_memoryless().marginal_y_model().is_markov);

  const auto ym = testmodels::dsc().marginal_y_model();
  REQUIRE(ym.kernel.size() == 2);
  CHECK(ym.kernel[0][0] == doctest::Approx(0.8));
  CHECK(ym.kernel[1][1] == doctest::Approx(0.8));
}

TEST_CASE("noise channel detection") {
  CHECK(testmodels::dsc().noise_channel().applies);
  CHECK(testmodels::dsc_memoryless().noise_channel().applies);
  CHECK_FALSE(testmodels::markov1().noise_channel().applies);
  const auto nc = testmodels::dsc().noise_channel();
  CHECK(nc.q[0][0] == doctest::Approx(0.89));
  CHECK(nc.q[1][0] == doctest::Approx(0.11));
}

TEST_CASE("json round trip preserves the model hash") {
  const auto m = testmodels::markov1();
  const auto m2 = PairModel::from_json_text(m.to_json_text());
  CHECK(m.hash() == m2.hash());
}

TEST_CASE("shipped model files match the test zoo") {
  CHECK(PairModel::load_file("models/dsc.json").hash() == testmodels::dsc().hash());
  CHECK(PairModel::load_file("models/dsc_memoryless.json").hash() ==
        testmodels::dsc_memoryless().hash());
  CHECK(PairModel::load_file("models/markov1.json").hash() == testmodels::markov1().hash());
  CHECK(PairModel::load_file("models/uniform_indep.json").hash() ==
        testmodels::uniform_indep().hash());
  CHECK(PairModel::load_file("models/zerovar_equal.json").hash() ==
        testmodels::zerovar_equal().hash());
}

TEST_CASE("state history arithmetic") {
  const auto m = testmodels::markov1();
  CHECK(m.shift_state(2, 3) == 3);  // order 1: new state = new symbol
  ModelSpec s;
  s.x_alphabet = 2;
  s.y_alphabet = 1;
  s.order = 2;
  s.kernel.assign(4, {0.5, 0.5});
  const auto m2 = PairModel::build(s);
  // state digits: (older, recent); shifting in symbol c drops the older
  CHECK(m2.shift_state(0b01, 1) == 0b11);
  CHECK(m2.state_symbol(0b01, 1) == 1);
  CHECK(m2.state_symbol(0b01, 2) == 0);
}
