#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "crnoma/errors.hpp"
#include "crnoma/rate_engine.hpp"
#include "crnoma/rng.hpp"

using namespace crnoma;

namespace {

constexpr double kTol = 1e-12;

PairEval make_eval(double rs, double rw, double power) {
  PairEval e;
  e.rate_strong = rs;
  e.rate_weak = rw;
  e.pair_power = power;
  e.delta_strong = 0.5;
  e.delta_weak = 0.5;
  e.pair_ee = (rs + rw) / power;
  return e;
}

}  // namespace

TEST_CASE("oma rate examples") {
  CHECK(std::abs(oma_rate(1.0, 1.0) - 0.5) < kTol);
  CHECK(oma_rate(5.0, 0.0) == 0.0);
  CHECK(std::abs(oma_rate(1000.0, 0.003) - 1.0) < kTol);
}

TEST_CASE("weak-user rate examples") {
  CHECK(std::abs(noma_weak_rate(1.0, 0.5, 2.0) - 1.0) < kTol);
  CHECK(noma_weak_rate(10.0, 0.0, 3.0) == 0.0);
  CHECK(std::abs(noma_weak_rate(1.0, 1.0, 7.0) - 3.0) < kTol);
}

TEST_CASE("strong-user rate examples with self-gain interference") {
  CHECK(std::abs(noma_strong_rate(1.0, 0.5, 0.5, 2.0) - std::log2(1.5)) < kTol);
  CHECK(std::abs(noma_strong_rate(1.0, 0.5, 0.5, 2.0) - 0.5849625007211562) < kTol);
  CHECK(noma_strong_rate(4.0, 0.0, 0.7, 2.0) == 0.0);
  CHECK(std::abs(noma_strong_rate(1.0, 1.0, 0.0, 3.0) - 2.0) < kTol);
}

TEST_CASE("strong-user rate with an explicit interference gain") {
  // 1 + 0.6*10*2 / (0.4*10*0.5 + 1) = 1 + 12/3 = 5
  CHECK(std::abs(noma_strong_rate(10.0, 0.6, 0.4, 2.0, 0.5) - std::log2(5.0)) < kTol);
  CHECK(noma_strong_rate(10.0, 0.6, 0.4, 2.0, 2.0) == noma_strong_rate(10.0, 0.6, 0.4, 2.0));
}

TEST_CASE("qos examples") {
  PairEval e = make_eval(1.0, 1.0, 1.0);
  e.oma_rate_strong = 0.5;
  e.oma_rate_weak = 0.5;
  CHECK(qos_satisfied(e));
  e.rate_strong = 0.4;
  CHECK_FALSE(qos_satisfied(e));
}

TEST_CASE("qos check matches the direct inequality over a split grid") {
  Rng rng(17);
  for (const auto interference : {SicInterference::weak_user, SicInterference::as_printed}) {
    for (int trial = 0; trial < 20; ++trial) {
      const double snr = std::pow(10.0, rng.uniform(0.0, 4.0));
      const double ga = rng.exponential() * 1e-3;
      const double gb = rng.exponential() * 1e-3;
      const double gs = std::max(ga, gb);
      const double gw = std::min(ga, gb);
      LinkModel link{snr, 1.0, interference, C1Policy::penalty};
      for (int i = 0; i <= 200; ++i) {
        const double ds = i / 200.0;
        const double dw = 1.0 - ds;
        const double ig = interference == SicInterference::weak_user ? gw : gs;
        const double rs = std::log2(1.0 + ds * snr * gs / (dw * snr * ig + 1.0));
        const double rw = std::log2(1.0 + dw * snr * gw);
        const bool direct = rs >= 0.5 * std::log2(1.0 + snr * gs) - 1e-12 && rw >= 0.5 * std::log2(1.0 + snr * gw) - 1e-12;
        const PairEval e = evaluate_pair(link, gs, gw, ds, dw);
        CHECK(qos_satisfied(e) == direct);
      }
    }
  }
}

TEST_CASE("network EE examples") {
  const std::vector<PairEval> one = {make_eval(2.0, 1.0, 1.0)};
  CHECK(std::abs(network_ee(one) - 3.0) < kTol);
  const std::vector<PairEval> two = {make_eval(2.0, 1.0, 1.0), make_eval(2.0, 1.0, 1.0)};
  CHECK(std::abs(network_ee(two) - 6.0) < kTol);
}

TEST_CASE("network EE equals the sum of independently computed pair EE") {
  Rng rng(3);
  LinkModel link{1000.0, 1.0, SicInterference::weak_user, C1Policy::penalty};
  std::vector<PairEval> pairs;
  double expected = 0.0;
  for (int j = 0; j < 3; ++j) {
    const double gs = rng.exponential() * 1e-2;
    const double gw = gs * rng.uniform();
    const double ds = rng.uniform();
    pairs.push_back(evaluate_pair(link, gs, gw, ds, 1.0 - ds));
    const double rs = std::log2(1.0 + ds * 1000.0 * gs / ((1.0 - ds) * 1000.0 * gw + 1.0));
    const double rw = std::log2(1.0 + (1.0 - ds) * 1000.0 * gw);
    expected += (rs + rw) / 1.0;
  }
  CHECK(std::abs(network_ee(pairs) - expected) < kTol);
  auto shuffled = pairs;
  std::reverse(shuffled.begin(), shuffled.end());
  CHECK(std::abs(network_ee(shuffled) - network_ee(pairs)) < kTol);
  std::rotate(shuffled.begin(), shuffled.begin() + 1, shuffled.end());
  CHECK(std::abs(network_ee(shuffled) - network_ee(pairs)) < kTol);
}

TEST_CASE("network EE reports C2 and C3 violations") {
  std::vector<PairEval> pairs = {make_eval(1.0, 1.0, 1.0), make_eval(1.0, 1.0, 1.0)};
  pairs[1].delta_strong = 0.7;
  pairs[1].delta_weak = 0.4;
  try {
    network_ee(pairs, 10.0, 1.0);
    FAIL("expected C2");
  } catch (const ConstraintViolation& e) {
    CHECK(e.constraint() == "C2");
    CHECK(e.index() == 1);
  }
  pairs[1].delta_weak = 0.3;
  pairs[0].pair_power = 1.5;
  try {
    network_ee(pairs, 10.0, 1.0);
    FAIL("expected C2 on power");
  } catch (const ConstraintViolation& e) {
    CHECK(e.constraint() == "C2");
    CHECK(e.index() == 0);
  }
  pairs[0].pair_power = 1.0;
  CHECK_NOTHROW(network_ee(pairs, 2.0, 1.0));
  try {
    network_ee(pairs, 1.5, 1.0);
    FAIL("expected C3");
  } catch (const ConstraintViolation& e) {
    CHECK(e.constraint() == "C3");
  }
}

TEST_CASE("rates are monotone in split and gain") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const double snr = std::pow(10.0, rng.uniform(-1.0, 4.0));
    const double g = rng.exponential();
    const double d1 = rng.uniform();
    const double d2 = std::min(1.0, d1 + rng.uniform() * 0.3);
    const double other = rng.uniform();
    CHECK(noma_weak_rate(snr, d2, g) >= noma_weak_rate(snr, d1, g));
    CHECK(noma_weak_rate(snr, d1, g * 1.5) >= noma_weak_rate(snr, d1, g));
    CHECK(noma_strong_rate(snr, d2, other, g) >= noma_strong_rate(snr, d1, other, g));
    CHECK(noma_strong_rate(snr, other, d2, g) <= noma_strong_rate(snr, other, d1, g));
  }
}

TEST_CASE("interference-free strong rate is twice the OMA rate") {
  for (const double snr : {0.5, 1.0, 31.6, 1000.0}) {
    for (const double g : {0.0, 1e-4, 0.3, 7.0}) {
      CHECK(std::abs(noma_strong_rate(snr, 1.0, 0.0, g) - 2.0 * oma_rate(snr, g)) < kTol);
    }
  }
}

TEST_CASE("rates stay finite for finite inputs") {
  Rng rng(2);
  LinkModel link{1e6, 1.0, SicInterference::weak_user, C1Policy::oma_fallback};
  for (int i = 0; i < 1000; ++i) {
    const double gs = rng.exponential() * std::pow(10.0, rng.uniform(-8.0, 2.0));
    const double gw = gs * rng.uniform();
    const double ds = rng.uniform();
    const PairEval e = evaluate_pair(link, gs, gw, ds, 1.0 - ds);
    CHECK(std::isfinite(e.rate_strong));
    CHECK(std::isfinite(e.rate_weak));
    CHECK(std::isfinite(e.pair_ee));
    CHECK(e.rate_strong >= 0.0);
    CHECK(e.rate_weak >= 0.0);
  }
}

TEST_CASE("failed splits fall back to OMA rates under the fallback policy") {
  LinkModel link{1000.0, 1.0, SicInterference::weak_user, C1Policy::oma_fallback};
  // Equal gains: the weak member cannot reach its OMA rate with a quarter of the power.
  const PairEval e = evaluate_pair(link, 0.01, 0.01, 0.75, 0.25);
  CHECK_FALSE(e.noma_c1_ok);
  CHECK(e.mode == PairMode::oma);
  CHECK(e.rate_strong == e.oma_rate_strong);
  CHECK(e.rate_weak == e.oma_rate_weak);
  CHECK(qos_satisfied(e));
  CHECK(std::abs(e.pair_ee - 2.0 * oma_rate(1000.0, 0.01)) < kTol);
  link.c1 = C1Policy::penalty;
  const PairEval p = evaluate_pair(link, 0.01, 0.01, 0.75, 0.25);
  CHECK(p.mode == PairMode::noma);
  CHECK_FALSE(qos_satisfied(p));
}

TEST_CASE("pair budget scales the effective SNR") {
  LinkModel link{1000.0, 1.0, SicInterference::weak_user, C1Policy::penalty};
  const PairEval half = evaluate_pair(link, 0.01, 0.001, 0.4, 0.6, 0.5);
  CHECK(half.pair_power == 0.5);
  CHECK(std::abs(half.rate_weak - std::log2(1.0 + 0.6 * 500.0 * 0.001)) < kTol);
  CHECK(std::abs(half.pair_ee - (half.rate_strong + half.rate_weak) / 0.5) < kTol);
}

TEST_CASE("per-user QoS region under the two interference models") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double xs = std::pow(10.0, rng.uniform(-1.0, 4.0));
    const double xw = xs * rng.uniform(0.01, 0.99);
    // With the weak gain in the interference term the split δ_ν = 1/(1+sqrt(1+x_ν)) always passes.
    const double dw = 1.0 / (1.0 + std::sqrt(1.0 + xw));
    LinkModel weak{1.0, 1.0, SicInterference::weak_user, C1Policy::penalty};
    CHECK(qos_satisfied(evaluate_pair(weak, xs, xw, 1.0 - dw, dw)));
    // With the strong gain in the interference term no split on a fine grid passes.
    LinkModel printed{1.0, 1.0, SicInterference::as_printed, C1Policy::penalty};
    bool any = false;
    for (int i = 0; i <= 1000 && !any; ++i) any = qos_satisfied(evaluate_pair(printed, xs, xw, i / 1000.0, 1.0 - i / 1000.0));
    CHECK_FALSE(any);
  }
}

TEST_CASE("policy names parse") {
  CHECK(parse_sic_interference("weak_user") == SicInterference::weak_user);
  CHECK(parse_sic_interference("as_printed") == SicInterference::as_printed);
  CHECK(parse_c1_policy("penalty") == C1Policy::penalty);
  CHECK_THROWS_AS(parse_c1_policy("drop"), ConfigError);
}
