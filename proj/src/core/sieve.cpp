#include "sieve.hpp"

#include "primes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace toric {

namespace {

struct Divisor {
  u64 d;
  unsigned omega;
  Rat g;     // prod g(p)
  Rat h;     // prod g(p) / (1 - g(p))
  int mu;
  std::vector<std::size_t> primes; // indices into problem.primes
};

// Squarefree products of the sieving primes below `limit`, in increasing order.
std::vector<Divisor> divisors_below(const SieveProblem& pr, long double limit) {
  std::vector<Divisor> out;
  std::vector<std::size_t> order(pr.primes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pr.primes[a] < pr.primes[b]; });
  Divisor cur{1, 0, 1, 1, 1, {}};
  auto rec = [&](auto& self, std::size_t from) -> void {
    out.push_back(cur);
    for (std::size_t k = from; k < order.size(); ++k) {
      const std::size_t i = order[k];
      long double next = static_cast<long double>(cur.d) * static_cast<long double>(pr.primes[i]);
      if (next >= limit) break; // primes are sorted
      Divisor saved = cur;
      cur.d *= pr.primes[i];
      ++cur.omega;
      cur.g *= pr.density[i];
      cur.h *= pr.density[i] / (1 - pr.density[i]);
      cur.mu = -cur.mu;
      cur.primes.push_back(i);
      self(self, k + 1);
      cur = saved;
    }
  };
  rec(rec, 0);
  std::sort(out.begin(), out.end(), [](const Divisor& a, const Divisor& b) { return a.d < b.d; });
  return out;
}

} // namespace

SelbergResult selberg_bound(const SieveProblem& pr) {
  if (pr.density.size() != pr.primes.size()) fail(Error::Kind::Argument, "one density value per prime is required");
  SelbergResult res;
  if (pr.primes.empty()) {
    res.bound = res.main_term = res.quadratic = Rat(static_cast<long>(pr.sequence.size()));
    res.J = 1;
    res.remainder = 0;
    res.sifted = pr.sequence.size();
    return res;
  }
  if (!(pr.level > 1)) fail(Error::Kind::Argument, "sieve level D must exceed 1");
  if (pr.level > 1e18) fail(Error::Kind::Argument, "sieve level D must be <= 1e18");
  for (std::size_t i = 0; i < pr.primes.size(); ++i) {
    if (!is_prime_u64(pr.primes[i])) fail(Error::Kind::Argument, std::to_string(pr.primes[i]) + " is not prime");
    if (pr.density[i] <= 0 || pr.density[i] >= 1) fail(Error::Kind::Argument, "densities g(p) must lie in (0,1)");
  }
  if (pr.mass < 0) fail(Error::Kind::Argument, "mass must be nonnegative");

  const long double D = pr.level, sqrtD = std::sqrt(static_cast<long double>(pr.level));
  std::vector<Divisor> all = divisors_below(pr, D);
  res.divisors = all.size();

  // Residue of each a_i modulo the sieving primes, as a bitmask of dividing primes.
  std::vector<std::vector<bool>> divides(pr.sequence.size(), std::vector<bool>(pr.primes.size()));
  res.sifted = 0;
  for (std::size_t i = 0; i < pr.sequence.size(); ++i) {
    bool free = true;
    for (std::size_t k = 0; k < pr.primes.size(); ++k) {
      divides[i][k] = mpz_divisible_ui_p(pr.sequence[i].get_mpz_t(), static_cast<unsigned long>(pr.primes[k])) != 0;
      if (divides[i][k]) free = false;
    }
    if (free) ++res.sifted;
  }
  auto divides_all = [&](std::size_t i, const Divisor& d) {
    for (std::size_t k : d.primes)
      if (!divides[i][k]) return false;
    return true;
  };

  res.J = 0;
  for (const auto& d : all)
    if (static_cast<long double>(d.d) < sqrtD) res.J += d.h;
  res.main_term = pr.mass / res.J;

  res.remainder = 0;
  for (const auto& d : all) {
    u64 Ad = 0;
    for (std::size_t i = 0; i < pr.sequence.size(); ++i)
      if (divides_all(i, d)) ++Ad;
    Rat R = Rat(to_int_u(Ad)) - d.g * pr.mass;
    res.remainder += pow_int(3, d.omega) * abs(R);
  }
  res.bound = res.main_term + res.remainder;

  // lambda_d = mu(d) (h(d) / g(d)) (sum_{e < sqrtD/d, (e,d)=1} h(e)) / J for d < sqrtD.
  std::vector<const Divisor*> small;
  for (const auto& d : all)
    if (static_cast<long double>(d.d) < sqrtD) small.push_back(&d);
  std::vector<Rat> lambda(small.size());
  for (std::size_t a = 0; a < small.size(); ++a) {
    const Divisor& d = *small[a];
    Rat s = 0;
    for (const Divisor* e : small) {
      if (static_cast<long double>(e->d) * static_cast<long double>(d.d) >= sqrtD) continue;
      if (std::gcd(e->d, d.d) != 1) continue;
      s += e->h;
    }
    lambda[a] = Rat(d.mu) * (d.h / d.g) * s / res.J;
  }
  res.quadratic = 0;
  for (std::size_t i = 0; i < pr.sequence.size(); ++i) {
    Rat t = 0;
    for (std::size_t a = 0; a < small.size(); ++a)
      if (divides_all(i, *small[a])) t += lambda[a];
    res.quadratic += t * t;
  }
  return res;
}

SieveProblem interval_problem(u64 n, u64 prime_bound, double level) {
  SieveProblem pr;
  for (u64 i = 1; i <= n; ++i) pr.sequence.push_back(to_int_u(i));
  for (u64 p : primes_up_to(prime_bound)) {
    if (p >= prime_bound) break;
    pr.primes.push_back(p);
    pr.density.push_back(Rat(1, to_int_u(p)));
  }
  pr.level = level;
  pr.mass = Rat(to_int_u(n));
  return pr;
}

GeomSieveResult geometric_sieve_count(const ToricFan& fan, const Polynomial& f, const Polynomial& g, u64 N, u64 B,
                                      bool coprime_only, unsigned threads) {
  if (N < 2) fail(Error::Kind::Argument, "N must be >= 2");
  if (f.nvars() != fan.num_rays() || g.nvars() != fan.num_rays())
    fail(Error::Kind::Argument, "polynomials must use one variable per ray");
  CoprimeWitness w = coprime_witness(f, g);
  if (!w.coprime) fail(Error::Kind::Hypothesis, "f and g are not certified coprime: " + w.reason);

  constexpr u64 kTrialLimit = 1000000;
  const std::vector<u64> small = primes_up_to(std::min(N - 1, kTrialLimit));
  enum class Verdict { No, Yes, Unknown };
  auto classify = [&](const PointView& p) {
    Int h;
    mpz_gcd(h.get_mpz_t(), f.eval(p.coords).get_mpz_t(), g.eval(p.coords).get_mpz_t());
    if (h == 0) return Verdict::Yes; // every prime divides 0
    if (h == 1) return Verdict::No;
    if (N <= kTrialLimit) {
      for (u64 q : small) {
        if (h == 1) break;
        while (mpz_divisible_ui_p(h.get_mpz_t(), static_cast<unsigned long>(q)))
          mpz_divexact_ui(h.get_mpz_t(), h.get_mpz_t(), static_cast<unsigned long>(q));
      }
      return h > 1 ? Verdict::Yes : Verdict::No;
    }
    Factorization fz = factor(h, kTrialLimit);
    for (const auto& [q, e] : fz.factors)
      if (q >= to_int_u(N)) return Verdict::Yes;
    // An unfactored composite has all prime factors above the trial bound,
    // but they may still be below N.
    if (!fz.complete()) return fz.unfactored >= to_int_u(N) ? Verdict::Unknown : Verdict::No;
    return Verdict::No;
  };
  CountQuery q;
  q.B = B;
  q.coprime_only = coprime_only;
  q.threads = threads;
  GeomSieveResult res;
  res.count = count_matching(fan, q, [&](const PointView& p) { return classify(p) == Verdict::Yes; });
  res.uncertain = N > kTrialLimit ? count_matching(fan, q, [&](const PointView& p) { return classify(p) == Verdict::Unknown; }) : 0;
  res.total = count(fan, q);
  return res;
}

u64 subvariety_count(const ToricFan& fan, const Polynomial& phi, u64 B, unsigned threads) {
  if (phi.nvars() != fan.num_rays()) fail(Error::Kind::Argument, "polynomial must use one variable per ray");
  if (phi.is_zero()) fail(Error::Kind::Argument, "phi vanishes identically");
  CountQuery q;
  q.B = B;
  q.threads = threads;
  return count_matching(fan, q, [&](const PointView& p) { return phi.eval(p.coords) == 0; });
}

u64 prime_section_count(const ToricFan& fan, const Polynomial& s, u64 B, unsigned threads) {
  if (s.nvars() != fan.num_rays()) fail(Error::Kind::Argument, "polynomial must use one variable per ray");
  CountQuery q;
  q.B = B;
  q.coprime_only = true;
  q.threads = threads;
  return count_matching(fan, q, [&](const PointView& p) { return is_prime(abs(s.eval(p.coords))); });
}

} // namespace toric
