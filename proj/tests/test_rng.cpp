#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gsure/rng.hpp"

using gsure::Rng;

TEST_CASE("splitmix64 reference stream") {
  // published test vector for the reference constants, seed 0
  Rng g(0);
  CHECK(g.next_u64() == 0xe220a8397b1dcdafULL);
  CHECK(g.next_u64() == 0x6e789e6aa1b965f4ULL);
  CHECK(g.next_u64() == 0x06c45d188009454fULL);

  Rng h(1234567);
  CHECK(h.next_u64() == 6457827717110365317ULL);
  CHECK(h.next_u64() == 3203168211198807973ULL);
}

TEST_CASE("uniform maps the top 53 bits into (0,1]") {
  Rng g(0);
  const double u = g.uniform();
  CHECK(u == doctest::Approx(0.8833108082136427).epsilon(1e-15));
  Rng h(99);
  for (int i = 0; i < 10000; ++i) {
    const double v = h.uniform();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("child streams are the indexed outputs of the parent") {
  Rng parent(42);
  // child(i) must behave as if seeded by the (i+1)-th raw output
  Rng c0 = parent.child(0);
  Rng c3 = parent.child(3);
  CHECK(c0.next_u64() == Rng(13679457532755275413ULL).next_u64());
  CHECK(c3.next_u64() == Rng(6349198060258255764ULL).next_u64());
  // children at distinct indices disagree
  CHECK(parent.child(1).next_u64() != parent.child(2).next_u64());
}

TEST_CASE("normal draws have the right first two moments") {
  Rng g(7);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = g.normal();
    s += z;
    s2 += z * z;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.01);
  CHECK(var == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("integer-shape gamma sampler matches mean and variance") {
  Rng g(11);
  const int n = 100000;
  const int k = 2;
  const double rate = 1.0;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = g.gamma_integer_shape(k, rate);
    CHECK(x > 0.0);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(mean == doctest::Approx(k / rate).epsilon(0.02));
  CHECK(var == doctest::Approx(k / (rate * rate)).epsilon(0.05));
  CHECK_THROWS_AS(g.gamma_integer_shape(0, 1.0), gsure::Error);
}

TEST_CASE("identical seeds give identical vectors") {
  Rng a(123), b(123);
  const auto va = a.normal_vector(64);
  const auto vb = b.normal_vector(64);
  CHECK((va - vb).cwiseAbs().maxCoeff() == 0.0);
  const auto ra = a.rademacher_vector(64);
  for (int i = 0; i < 64; ++i) CHECK(std::abs(ra[i]) == 1.0);
}
