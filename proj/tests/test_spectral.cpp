#include <doctest.h>

#include <random>

#include "cfs/spectral.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace cfs;
using C = std::complex<double>;

TEST_CASE("spectral weight") {
  CHECK(spectral_weight(EigenvalueList(1, {1.0, -1.0})) == 2.0);
  CHECK(spectral_weight(EigenvalueList(1, {C(3, 4), 0.0})) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(spectral_weight(EigenvalueList(1, {0.0, 0.0})) == 0.0);

  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<C> v(4);
    for (auto& z : v) z = C(g(rng), g(rng));
    double ref = 0.0;
    for (const auto& z : v) ref += std::hypot(z.real(), z.imag());
    CHECK(spectral_weight(EigenvalueList(2, v)) == doctest::Approx(ref).epsilon(1e-14));
  }
}

TEST_CASE("lagrangian closed form") {
  CHECK(lagrangian(EigenvalueList(2, {1.0, 1.0, 1.0, 1.0})) == 0.0);
  CHECK(lagrangian(EigenvalueList(2, {2.0, 1.0, 0.0, 0.0})) == doctest::Approx(2.75));
  CHECK(lagrangian(EigenvalueList(1, {2.0, 1.0})) == doctest::Approx(0.5));
}

TEST_CASE("lagrangian variance form") {
  CHECK(lagrangian_variance_form(EigenvalueList(2, {1.0, 1.0, 1.0, 1.0})) == 0.0);
  CHECK(lagrangian_variance_form(EigenvalueList(1, {2.0, 1.0})) == doctest::Approx(0.5));
}

TEST_CASE("boundedness integrand") {
  CHECK(boundedness_integrand(EigenvalueList(1, {1.0, -1.0})) == 4.0);
  CHECK(boundedness_integrand(EigenvalueList(2, {0.0, 0.0, 0.0, 0.0})) == 0.0);
  std::mt19937_64 rng(22);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const EigenvalueList ev(2, {C(g(rng), g(rng)), C(g(rng), 0), C(0, g(rng)), 0.0});
    const double w = spectral_weight(ev);
    CHECK(boundedness_integrand(ev) == doctest::Approx(w * w).epsilon(1e-14));
  }
}

TEST_CASE("classification examples") {
  CHECK(classify_causality(EigenvalueList(2, {1.0, 1.0, -1.0, -1.0}), 1e-9) == Causality::Spacelike);
  CHECK(classify_causality(EigenvalueList(2, {2.0, 1.0, 1.0, 1.0}), 1e-9) == Causality::Timelike);
  CHECK(classify_causality(EigenvalueList(2, {C(0, 2), C(0, -2), 1.0, 1.0}), 1e-9) == Causality::Lightlike);
  // All zero products classify as spacelike through the absolute floor.
  CHECK(classify_causality(EigenvalueList(2, {0.0, 0.0, 0.0, 0.0}), 1e-9) == Causality::Spacelike);
  // Equal-modulus conjugate pairs are spacelike, not lightlike.
  CHECK(classify_causality(EigenvalueList(1, {C(1, 1), C(1, -1)}), 1e-9) == Causality::Spacelike);
  // Padded zeros are taken literally.
  CHECK(classify_causality(EigenvalueList(2, {1.0, -1.0, 0.0, 0.0}), 1e-9) == Causality::Timelike);
}

TEST_CASE("classification rejects tolerances outside (0, 1)") {
  const EigenvalueList ev(1, {1.0, 1.0});
  for (double tol : {0.0, -1.0, 1.0, 2.0}) {
    CHECK(testing::error_of([&] { classify_causality(ev, tol); }) == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("eigenvalue lists have exactly 2n entries") {
  CHECK(testing::error_of([] { EigenvalueList(2, {1.0, 2.0}); }) == ErrorCode::InvalidArgument);
  const auto padded = EigenvalueList::padded(2, {3.0});
  CHECK(padded.size() == 4);
  CHECK(padded[1] == C(0.0));
  CHECK(testing::error_of([] { EigenvalueList::padded(1, {1.0, 2.0, 3.0}); }) == ErrorCode::RankViolation);
}

TEST_CASE("properties on random lists") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + trial % 2;
    std::vector<C> v(2 * n);
    for (auto& z : v) z = C(u(rng), trial % 3 == 0 ? 0.0 : u(rng));
    const EigenvalueList ev(n, v);
    const double l = lagrangian(ev);
    CHECK(l >= 0.0);
    CHECK(std::abs(l - lagrangian_variance_form(ev)) <= 1e-10 * (1.0 + l));
    CHECK(std::abs(l - oracle::lagrangian_definition(v, n)) <= 1e-10 * (1.0 + l));

    const double s = u(rng);
    std::vector<C> scaled = v;
    for (auto& z : scaled) z *= s;
    const EigenvalueList ev_s(n, scaled);
    CHECK(lagrangian(ev_s) == doctest::Approx(s * s * l).epsilon(1e-10).scale(1.0));
    CHECK(boundedness_integrand(ev_s) == doctest::Approx(s * s * boundedness_integrand(ev)).epsilon(1e-12));
    CHECK(classify_causality(ev_s, 1e-6) == classify_causality(ev, 1e-6));
  }
}

TEST_CASE("equal moduli give spacelike and vanishing L") {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> phase(-M_PI, M_PI);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 2;
    const double r = 0.1 + trial * 0.01;
    std::vector<C> v(2 * n);
    for (auto& z : v) z = std::polar(r, phase(rng));
    const EigenvalueList ev(n, v);
    CHECK(classify_causality(ev, 1e-9) == Causality::Spacelike);
    CHECK(lagrangian(ev) <= 1e-12 * std::pow(spectral_weight(ev), 2));
  }
}
