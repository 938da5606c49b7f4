#include "fixtures.hpp"

#include "constants.hpp"
#include "intmat.hpp"
#include "polytope.hpp"
#include "primes.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <numeric>
#include <random>

using namespace toric;

namespace {

constexpr double kZeta2 = 1.6449340668482264;
constexpr double kZeta3 = 1.2020569031595943;

// Closed form of (1/(r-1)!) * integral over the dual effective cone of
// exp(-<K, y>) for r <= 2.
Rat alpha_closed_form(const ToricFan& fan) {
  const auto& cm = fan.pic().class_map;
  const std::size_t r = fan.picard_rank();
  std::vector<i64> K(r, 0);
  for (const auto& row : cm)
    for (std::size_t k = 0; k < r; ++k) K[k] += row[k];
  if (r == 1) return Rat(1, std::abs(K[0]));
  REQUIRE(r == 2);
  std::vector<std::array<i64, 2>> extreme;
  for (const auto& c : cm) {
    for (int s : {1, -1}) {
      std::array<i64, 2> w{-s * c[1], s * c[0]};
      i64 g = std::gcd(w[0], w[1]);
      w[0] /= g;
      w[1] /= g;
      bool ok = true;
      for (const auto& c2 : cm)
        if (c2[0] * w[0] + c2[1] * w[1] < 0) ok = false;
      if (ok && std::find(extreme.begin(), extreme.end(), w) == extreme.end()) extreme.push_back(w);
    }
  }
  REQUIRE(extreme.size() == 2);
  auto [w1, w2] = std::pair{extreme[0], extreme[1]};
  i64 det = std::abs(w1[0] * w2[1] - w1[1] * w2[0]);
  i64 a1 = K[0] * w1[0] + K[1] * w1[1], a2 = K[0] * w2[0] + K[1] * w2[1];
  return Rat(det, a1 * a2);
}

// Monte Carlo alpha: choose r independent classes C; t = C y maps the
// polytope into the standard simplex, sampled uniformly.
double alpha_monte_carlo(const ToricFan& fan, std::size_t samples) {
  const auto& cm = fan.pic().class_map;
  const std::size_t r = fan.picard_rank(), n = cm.size();
  std::vector<std::size_t> pick;
  for (std::size_t i = 0; i < n && pick.size() < r; ++i) {
    RatMatrix m(pick.size() + 1, r);
    for (std::size_t a = 0; a <= pick.size(); ++a)
      for (std::size_t k = 0; k < r; ++k) m(a, k) = to_int(cm[a < pick.size() ? pick[a] : i][k]);
    if (rank(m) == pick.size() + 1) pick.push_back(i);
  }
  REQUIRE(pick.size() == r);
  RatMatrix C(r, r);
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t k = 0; k < r; ++k) C(a, k) = to_int(cm[pick[a]][k]);
  double det = std::abs(determinant(C).get_d());
  std::vector<std::vector<double>> Cinv(r, std::vector<double>(r));
  for (std::size_t k = 0; k < r; ++k) {
    std::vector<Rat> e(r, Rat(0));
    e[k] = 1;
    auto col = solve(C, e);
    REQUIRE(col.has_value());
    for (std::size_t a = 0; a < r; ++a) Cinv[a][k] = (*col)[a].get_d();
  }
  std::mt19937_64 rng(20240601);
  std::exponential_distribution<double> ex(1.0);
  std::size_t hits = 0;
  std::vector<double> t(r), y(r);
  for (std::size_t s = 0; s < samples; ++s) {
    double total = 0;
    for (auto& v : t) total += (v = ex(rng));
    total += ex(rng);
    for (auto& v : t) v /= total;
    for (std::size_t a = 0; a < r; ++a) {
      y[a] = 0;
      for (std::size_t k = 0; k < r; ++k) y[a] += Cinv[a][k] * t[k];
    }
    double sum = 0;
    bool inside = true;
    for (const auto& c : cm) {
      double v = 0;
      for (std::size_t k = 0; k < r; ++k) v += static_cast<double>(c[k]) * y[k];
      if (v < -1e-12) inside = false;
      sum += v;
    }
    if (inside && sum <= 1 + 1e-12) ++hits;
  }
  double simplex = 1.0 / std::tgamma(static_cast<double>(r) + 1);
  return static_cast<double>(r) * simplex * static_cast<double>(hits) / static_cast<double>(samples) / det;
}

} // namespace

TEST_CASE("alpha exact values") {
  CHECK(alpha_constant(test_fan("p1")) == Rat(1, 2));
  CHECK(alpha_constant(test_fan("p2")) == Rat(1, 3));
  CHECK(alpha_constant(test_fan("p3")) == Rat(1, 4));
  CHECK(alpha_constant(test_fan("p1xp1")) == Rat(1, 4));
  CHECK(alpha_constant(test_fan("f1")) == Rat(1, 6));
  CHECK(alpha_constant(test_fan("p1cubed")) == Rat(1, 16));
  CHECK(alpha_constant(test_fan("p1fourth")) == Rat(1, 96));
}

TEST_CASE("alpha matches closed form for r <= 2") {
  for (const char* name : {"p1", "p2", "p3", "p1xp1", "f1"}) {
    CAPTURE(name);
    auto tf = test_fan(name);
    CHECK(alpha_constant(tf) == alpha_closed_form(tf));
  }
}

TEST_CASE("alpha matches Monte Carlo for r = 3, 4") {
  for (const char* name : {"p1cubed", "dp7", "p1fourth", "dp6"}) {
    CAPTURE(name);
    auto tf = test_fan(name);
    double exact = alpha_constant(tf).get_d();
    double mc = alpha_monte_carlo(tf, 1000000);
    CHECK(std::abs(exact - mc) < 1e-3);
  }
}

TEST_CASE("alpha is invariant under unimodular basis change") {
  std::mt19937_64 rng(7);
  for (const char* name : {"p1xp1", "f1", "dp7", "dp6"}) {
    auto tf = test_fan(name);
    const std::size_t r = tf.picard_rank();
    for (int trial = 0; trial < 5; ++trial) {
      // Random product of elementary matrices.
      IntMatrix U = IntMatrix::identity(r);
      for (int s = 0; s < 6; ++s) {
        std::size_t i = rng() % r, j = rng() % r;
        if (i == j) continue;
        long k = static_cast<long>(rng() % 5) - 2;
        for (std::size_t c = 0; c < r; ++c) U(i, c) += k * U(j, c);
      }
      std::vector<std::vector<i64>> classes;
      for (const auto& row : tf.pic().class_map) {
        std::vector<i64> out(r, 0);
        for (std::size_t a = 0; a < r; ++a)
          for (std::size_t b = 0; b < r; ++b) out[a] += to_i64(U(a, b)) * row[b];
        classes.push_back(out);
      }
      CHECK(alpha_from_classes(classes) == alpha_constant(tf));
    }
  }
}

TEST_CASE("polytope volume") {
  // Unit square and a triangle.
  std::vector<Halfspace> sq{{{-1, 0}, 0}, {{1, 0}, 1}, {{0, -1}, 0}, {{0, 1}, 1}};
  CHECK(polytope_volume(sq, 2) == 1);
  std::vector<Halfspace> tri{{{-1, 0}, 0}, {{0, -1}, 0}, {{1, 1}, 1}};
  CHECK(polytope_volume(tri, 2) == Rat(1, 2));
  CHECK(polytope_vertices(tri, 2).size() == 3);
  // Cube [0,2]^3 has volume 8.
  std::vector<Halfspace> cube;
  for (int k = 0; k < 3; ++k) {
    std::vector<Rat> e(3, Rat(0));
    e[k] = 1;
    cube.push_back({e, 2});
    e[k] = -1;
    cube.push_back({e, 0});
  }
  CHECK(polytope_volume(cube, 3) == 8);
  std::vector<Halfspace> flat{{{-1, 0}, 0}, {{1, 0}, 0}, {{0, -1}, 0}, {{0, 1}, 1}};
  CHECK_THROWS_AS(polytope_volume(flat, 2), Error);
}

TEST_CASE("kappa examples") {
  auto p1 = test_fan("p1"), p2 = test_fan("p2"), pp = test_fan("p1xp1"), f1 = test_fan("f1");
  CHECK(local_density_kappa(p2, 2) == Rat(7, 8));
  CHECK(kappa_via_fvector(p2, 2) == Rat(7, 8));
  for (u64 p : {2, 3, 5, 7, 101}) CHECK(local_density_kappa(p1, p) == 1 - Rat(1, static_cast<long>(p * p)));
  CHECK(local_density_kappa(pp, 3) == Rat(64, 81));
  CHECK(kappa_via_fvector(pp, 3) == Rat(64, 81));
  // #F1(F_2) = 9, so kappa_2 = (1/4)(9/4).
  CHECK(kappa_via_fvector(f1, 2) == Rat(9, 16));
  CHECK(kappa_via_mobius(p2, 5) == 1 - Rat(1, 125));
  CHECK(kappa_via_mobius(pp, 5) == (1 - Rat(1, 25)) * (1 - Rat(1, 25)));
  CHECK_THROWS_AS(local_density_kappa(p2, 4), Error);
}

TEST_CASE("kappa triple agreement") {
  for (const char* name : {"p1", "p2", "p1xp1", "f1", "p3", "dp7"}) {
    CAPTURE(name);
    auto tf = test_fan(name);
    for (u64 p : primes_up_to(997)) {
      Rat a = local_density_kappa(tf, p);
      CHECK(a == kappa_via_fvector(tf, p));
      CHECK(a == kappa_via_mobius(tf, p));
    }
  }
}

TEST_CASE("kappa tail bound holds per prime") {
  for (const char* name : {"p1", "p2", "p1xp1", "f1", "dp6"}) {
    auto tf = test_fan(name);
    Rat C(kappa_tail_constant(tf));
    for (u64 p : primes_up_to(200)) {
      Rat k = kappa_via_fvector(tf, p);
      CHECK(abs(k - 1) <= C / Rat(static_cast<long>(p * p)));
      CHECK(k <= 1);
    }
  }
}

TEST_CASE("kappa products") {
  auto p2 = test_fan("p2");
  KappaProduct k = kappa_truncated(p2, 10000);
  CHECK(std::abs(k.value() - 1 / kZeta3) < 1e-6);
  double lo = Rat(k.product * k.tail_lo).get_d(), hi = Rat(k.product * k.tail_hi).get_d();
  CHECK(lo <= 1 / kZeta3);
  CHECK(1 / kZeta3 <= hi);
  CHECK(std::abs(kappa_truncated(test_fan("p1"), 10000).value() - 1 / kZeta2) < 1e-4);
  CHECK(std::abs(kappa_truncated(test_fan("p1xp1"), 10000).value() - 1 / (kZeta2 * kZeta2)) < 1e-4);

  KappaLevel l1 = kappa_level(p2, 1, 1000);
  CHECK(l1.inv_level_power == 1);
  CHECK(l1.rest.product == kappa_truncated(p2, 1000).product);
  KappaLevel l2 = kappa_level(test_fan("p1"), 2, 100000);
  CHECK(std::abs(l2.value() - 1 / (3 * kZeta2)) < 1e-5);
  KappaLevel l6 = kappa_level(p2, 6, 10000);
  CHECK(l6.inv_level_power == Rat(1, 216));
  double expected = 1 / kZeta3 / ((1 - 1.0 / 8) * (1 - 1.0 / 27)) / 216;
  CHECK(std::abs(l6.value() - expected) < 1e-9);
}

TEST_CASE("mobius function") {
  auto p2 = test_fan("p2"), p1 = test_fan("p1");
  CHECK(mobius_muX(p2, {5, 5, 5}) == -1);
  CHECK(mobius_muX(p2, {5, 1, 1}) == 0);
  CHECK(mobius_muX(p2, {1, 1, 1}) == 1);
  CHECK(mobius_muX(p2, {4, 1, 1}) == 0);
  CHECK(mobius_muX(p2, {6, 6, 6}) == 1);
  CHECK(mobius_muX(p1, {3, 3}) == -1);
  CHECK(alpha_zero(p2) == 3);
  CHECK(alpha_zero(test_fan("p1xp1")) == 2);
  CHECK(alpha_zero(p1) == 2);
}

TEST_CASE("mobius defining property over primes 2 and 3") {
  for (const char* name : {"p1", "p2", "p1xp1", "f1", "p3"}) {
    CAPTURE(name);
    auto tf = test_fan(name);
    const std::size_t n = tf.num_rays();
    const u64 vals[] = {1, 2, 3, 6};
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      std::vector<u64> d(n);
      for (std::size_t i = 0; i < n; ++i) d[i] = vals[idx[i]];
      // sum over divisors d' | d
      i64 sum = 0;
      std::vector<std::size_t> sub(n, 0);
      while (true) {
        std::vector<u64> dd(n);
        bool divides = true;
        for (std::size_t i = 0; i < n; ++i) {
          dd[i] = vals[sub[i]];
          if (d[i] % dd[i] != 0) divides = false;
        }
        if (divides) sum += mobius_muX(tf, dd);
        std::size_t k = 0;
        while (k < n && sub[k] == 3) sub[k++] = 0;
        if (k == n) break;
        ++sub[k];
      }
      Int g = 0;
      for (const auto& cd : tf.cones()) {
        Int m = 1;
        for (std::size_t rho = 0; rho < n; ++rho) m *= pow_int(to_int_u(d[rho]), static_cast<unsigned long>(cd.a_vec[rho]));
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), m.get_mpz_t());
      }
      CHECK(sum == (g == 1 ? 1 : 0));
      std::size_t k = 0;
      while (k < n && idx[k] == 3) idx[k++] = 0;
      if (k == n) break;
      ++idx[k];
    }
  }
}

TEST_CASE("mobius partial sums") {
  auto p2 = test_fan("p2");
  CHECK(mobius_partial_sums(p2, 8).head == 2);
  CHECK(mobius_partial_sums(test_fan("p1"), 4).head == 2);
  CHECK(mobius_partial_sums(p2, 1).head == 1);
  // Growth exponent for P^2 is 1/alpha_0 = 1/3.
  double h1 = mobius_partial_sums(p2, 100).head.get_d(), h2 = mobius_partial_sums(p2, 1000000).head.get_d();
  double slope = std::log(h2 / h1) / std::log(1e4);
  CHECK(slope <= 1.0 / 3 + 0.1);
  CHECK(mobius_partial_sums(p2, 1000).tail > 0);
}

TEST_CASE("constants report") {
  std::string js = constants_report_json(test_fan("p2"), 100);
  CHECK(js.find("\"alpha\":\"1/3\"") != std::string::npos);
  CHECK(js.find("\"alpha0\":3") != std::string::npos);
  CHECK(js.find("\"per_prime\"") != std::string::npos);
}
