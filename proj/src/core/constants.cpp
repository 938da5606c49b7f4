#include "constants.hpp"

#include "intmat.hpp"
#include "polytope.hpp"
#include "primes.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstdio>
#include <map>

namespace toric {

namespace {

constexpr std::size_t kMaxAlphaRank = 6;
constexpr std::size_t kMaxSubsetRays = 24;

void require_prime(u64 p) {
  if (!is_prime_u64(p)) fail(Error::Kind::Argument, std::to_string(p) + " is not prime");
}

void require_subset_loop(const ToricFan& fan) {
  if (fan.num_rays() > kMaxSubsetRays)
    fail(Error::Kind::Limit, "ray-subset sums are limited to " + std::to_string(kMaxSubsetRays) + " rays");
}

Int binomial(unsigned long n, unsigned long k) {
  Int r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

// Exact product of a list of rationals by a balanced product tree.
Rat product_tree(std::vector<Rat> xs) {
  if (xs.empty()) return 1;
  while (xs.size() > 1) {
    std::vector<Rat> next;
    next.reserve((xs.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) next.push_back(xs[i] * xs[i + 1]);
    if (xs.size() % 2) next.push_back(xs.back());
    xs.swap(next);
  }
  return xs[0];
}

std::string decimal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

} // namespace

Rat alpha_from_classes(const std::vector<std::vector<i64>>& classes) {
  if (classes.empty() || classes[0].empty()) fail(Error::Kind::Argument, "no divisor classes");
  const std::size_t r = classes[0].size();
  if (r > kMaxAlphaRank) fail(Error::Kind::Limit, "alpha is limited to Picard rank <= 6");
  RatMatrix c(classes.size(), r);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].size() != r) fail(Error::Kind::Argument, "ragged class matrix");
    for (std::size_t k = 0; k < r; ++k) c(i, k) = to_int(classes[i][k]);
  }
  // With the classes spanning, <c, y> >= 0 and <sum c, y> <= 1 bound y.
  if (rank(c) != r) fail(Error::Kind::Hypothesis, "ray classes do not span Pic; the polytope is unbounded");
  std::vector<Halfspace> ineqs;
  Halfspace anti{std::vector<Rat>(r, Rat(0)), Rat(1)};
  for (std::size_t i = 0; i < classes.size(); ++i) {
    Halfspace h{std::vector<Rat>(r), Rat(0)};
    for (std::size_t k = 0; k < r; ++k) {
      h.a[k] = -c(i, k);
      anti.a[k] += c(i, k);
    }
    ineqs.push_back(std::move(h));
  }
  ineqs.push_back(std::move(anti));
  return Rat(static_cast<long>(r)) * polytope_volume(ineqs, r);
}

Rat alpha_constant(const ToricFan& fan) { return alpha_from_classes(fan.pic().class_map); }

Rat local_density_kappa(const ToricFan& fan, u64 p) {
  require_prime(p);
  require_subset_loop(fan);
  const std::size_t n = fan.num_rays();
  const Int pm1 = to_int_u(p - 1);
  Int num = 0;
  for (RayMask s = 0; s < (RayMask{1} << n); ++s)
    if (fan.spans_cone(s)) num += pow_int(pm1, n - static_cast<unsigned long>(std::popcount(s)));
  return Rat(num, pow_int(to_int_u(p), n));
}

Rat kappa_via_fvector(const ToricFan& fan, u64 p) {
  require_prime(p);
  const std::size_t d = fan.dim(), r = fan.picard_rank();
  const Int P = to_int_u(p), pm1 = to_int_u(p - 1);
  Int points = 0;
  for (std::size_t k = 0; k <= d; ++k) points += to_int_u(fan.f_vector()[k]) * pow_int(pm1, d - k);
  return Rat(pow_int(pm1, r), pow_int(P, r)) * Rat(points, pow_int(P, d));
}

Rat kappa_via_mobius(const ToricFan& fan, u64 p) {
  require_prime(p);
  MobiusTable table(fan);
  const std::size_t n = fan.num_rays();
  const Int P = to_int_u(p);
  Rat sum = 0;
  for (RayMask s = 0; s < (RayMask{1} << n); ++s) {
    i64 m = table.mu(s);
    if (m != 0) sum += Rat(to_int(m), pow_int(P, static_cast<unsigned long>(std::popcount(s))));
  }
  return sum;
}

Int kappa_tail_constant(const ToricFan& fan) {
  // kappa_p = sum_k f_k (1 - x)^(n-k) x^k with x = 1/p.
  const std::size_t n = fan.num_rays(), d = fan.dim();
  std::vector<Int> e(n + 1, 0);
  for (std::size_t k = 0; k <= d; ++k)
    for (std::size_t i = 0; i <= n - k; ++i) {
      Int term = to_int_u(fan.f_vector()[k]) * binomial(n - k, i);
      if (i % 2) term = -term;
      e[k + i] += term;
    }
  if (e[0] != 1 || e[1] != 0) fail(Error::Kind::Internal, "unexpected low-order terms in kappa_p expansion");
  Int c = 0;
  for (std::size_t m = 2; m <= n; ++m) c += abs(e[m]);
  return c;
}

namespace {

KappaProduct kappa_product_excluding(const ToricFan& fan, u64 p_max, u64 level) {
  if (p_max < 2) fail(Error::Kind::Argument, "P_max must be >= 2");
  KappaProduct out;
  out.p_max = p_max;
  std::vector<Rat> factors;
  for (u64 p : primes_up_to(p_max))
    if (level % p != 0) factors.push_back(kappa_via_fvector(fan, p));
  out.product = product_tree(std::move(factors));
  // Each kappa_p is a density, so <= 1; and kappa_p >= 1 - C/p^2 with
  // sum_{p > P} 1/p^2 < 1/P.
  Rat eps(kappa_tail_constant(fan), to_int_u(p_max));
  out.tail_lo = eps >= 1 ? Rat(0) : Rat(1) - eps;
  out.tail_hi = 1;
  return out;
}

} // namespace

KappaProduct kappa_truncated(const ToricFan& fan, u64 p_max) { return kappa_product_excluding(fan, p_max, 1); }

KappaLevel kappa_level(const ToricFan& fan, u64 l, u64 p_max) {
  if (l < 1) fail(Error::Kind::Argument, "level must be >= 1");
  KappaLevel out;
  out.level = to_int_u(l);
  out.inv_level_power = Rat(1, pow_int(out.level, fan.num_rays()));
  out.rest = kappa_product_excluding(fan, p_max, l);
  return out;
}

MobiusTable::MobiusTable(const ToricFan& fan) {
  require_subset_loop(fan);
  const std::size_t n = fan.num_rays();
  mu_.resize(std::size_t{1} << n);
  for (RayMask s = 0; s < mu_.size(); ++s) mu_[s] = fan.spans_cone(s) ? 1 : 0;
  // Subset Moebius transform.
  for (std::size_t i = 0; i < n; ++i)
    for (RayMask s = 0; s < mu_.size(); ++s)
      if (s >> i & 1) mu_[s] -= mu_[s ^ (RayMask{1} << i)];
  by_size_.assign(n + 1, 0);
  for (RayMask s = 0; s < mu_.size(); ++s) by_size_[std::popcount(s)] += static_cast<u64>(mu_[s] < 0 ? -mu_[s] : mu_[s]);
}

i64 mobius_muX(const ToricFan& fan, const std::vector<u64>& d) {
  if (d.size() != fan.num_rays()) fail(Error::Kind::Argument, "mu_X needs one entry per ray");
  std::map<Int, RayMask> support;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] < 1) fail(Error::Kind::Argument, "mu_X entries must be positive");
    for (auto& [p, e] : factor(to_int_u(d[i])).factors) {
      if (e > 1) return 0;
      support[p] |= RayMask{1} << i;
    }
  }
  if (support.empty()) return 1;
  MobiusTable table(fan);
  i64 v = 1;
  for (auto& [p, s] : support) v *= table.mu(s);
  return v;
}

std::size_t alpha_zero(const ToricFan& fan) {
  std::size_t best = fan.num_rays() + 1;
  for (RayMask m : fan.primitive_collections()) best = std::min<std::size_t>(best, std::popcount(m));
  if (best > fan.num_rays()) fail(Error::Kind::Internal, "fan has no primitive collection");
  return best;
}

MobiusSums mobius_partial_sums(const ToricFan& fan, u64 b) {
  constexpr u64 kCap = 10000000;
  if (b < 1 || b > kCap) fail(Error::Kind::Argument, "bound must lie in [1, 10^7]");
  MobiusTable table(fan);
  const auto& c = table.weight_by_size();
  MobiusSums out;
  out.bound = b;
  out.cap = std::min<u64>(16 * b, kCap);
  // g(m) = sum_{Pi(d) = m} |mu_X(d)| is multiplicative with g(p^k) = c_k.
  std::vector<u64> spf(out.cap + 1, 0);
  for (u64 i = 2; i <= out.cap; ++i)
    if (spf[i] == 0)
      for (u64 j = i; j <= out.cap; j += i)
        if (spf[j] == 0) spf[j] = i;
  std::vector<u64> g(out.cap + 1, 0);
  g[1] = 1;
  out.head = 0;
  out.tail = 0;
  for (u64 m = 1; m <= out.cap; ++m) {
    if (m > 1) {
      u64 p = spf[m], rest = m;
      std::size_t k = 0;
      while (rest % p == 0) {
        rest /= p;
        ++k;
      }
      g[m] = k < c.size() ? c[k] * g[rest] : 0;
    }
    if (m <= b)
      out.head += to_int_u(g[m]);
    else
      out.tail += static_cast<long double>(g[m]) / static_cast<long double>(m);
  }
  return out;
}

std::string constants_report_json(const ToricFan& fan, u64 p_max) {
  using nlohmann::json;
  json doc;
  Rat alpha = alpha_constant(fan);
  KappaProduct k = kappa_truncated(fan, p_max);
  doc["alpha"] = to_string(alpha);
  doc["alpha_decimal"] = decimal(alpha.get_d());
  doc["alpha0"] = alpha_zero(fan);
  doc["kappa"] = {{"value", decimal(k.value())},
                  {"tail_lo", decimal(Rat(k.product * k.tail_lo).get_d())},
                  {"tail_hi", decimal(Rat(k.product * k.tail_hi).get_d())},
                  {"tail_constant", to_string(kappa_tail_constant(fan))},
                  {"P_max", p_max}};
  json per = json::array();
  for (u64 p : primes_up_to(std::min<u64>(p_max, 100))) {
    Rat kp = kappa_via_fvector(fan, p);
    per.push_back({{"p", p}, {"kappa_p", to_string(kp)}, {"decimal", decimal(kp.get_d())}});
  }
  doc["per_prime"] = per;
  return doc.dump();
}

} // namespace toric
