#include "primes.hpp"

#include <algorithm>
#include <map>

namespace toric {

std::vector<u64> primes_up_to(u64 n) {
  std::vector<u64> out;
  if (n < 2) return out;
  std::vector<bool> composite(n + 1, false);
  for (u64 i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (u64 j = i * i; j <= n; j += i) composite[j] = true;
  }
  return out;
}

namespace {

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

} // namespace

bool is_prime_u64(u64 n) {
  if (n < 2) return false;
  static constexpr u64 small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (u64 p : small) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  u64 d = n - 1;
  unsigned s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : small) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < s; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

bool is_prime(const Int& n) {
  if (n < 2) return false;
  if (fits_u64(n)) return is_prime_u64(to_u64(n));
  return mpz_probab_prime_p(n.get_mpz_t(), 40) > 0;
}

Int pollard_rho(const Int& n, unsigned attempts, u64 iterations) {
  if (n % 2 == 0) return 2;
  for (unsigned c = 1; c <= attempts; ++c) {
    Int x = 2, y = 2, d = 1, q = 1;
    auto step = [&](Int& v) {
      v = v * v + c;
      mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
    };
    // Brent-style batching of gcds.
    Int ys;
    for (u64 i = 0; i < iterations && d == 1; i += 64) {
      ys = y;
      Int xs = x;
      for (int k = 0; k < 64; ++k) {
        step(x);
        step(y);
        step(y);
        Int diff = abs(x - y);
        q = q * diff;
        mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      }
      mpz_gcd(d.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      if (d == n) {
        // Backtrack one step at a time from the saved state.
        x = xs;
        y = ys;
        do {
          step(x);
          step(y);
          step(y);
          Int diff = abs(x - y);
          mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
        } while (d == 1);
      }
    }
    if (d != 1 && d != n) return d;
  }
  return 0;
}

Factorization factor(const Int& n, u64 trial_bound) {
  if (n == 0) fail(Error::Kind::Argument, "cannot factor zero");
  Factorization f;
  Int m = abs(n);
  std::map<Int, unsigned> acc;
  auto divide_out = [&](u64 p) {
    if (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(p))) {
      unsigned e = 0;
      while (mpz_divisible_ui_p(m.get_mpz_t(), static_cast<unsigned long>(p))) {
        mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), static_cast<unsigned long>(p));
        ++e;
      }
      acc[to_int_u(p)] += e;
    }
  };
  divide_out(2);
  for (u64 p = 3; p <= trial_bound; p += 2) {
    if (Int(to_int_u(p)) * to_int_u(p) > m) break;
    divide_out(p);
  }
  std::vector<Int> pending;
  if (m > 1) pending.push_back(m);
  while (!pending.empty()) {
    Int c = pending.back();
    pending.pop_back();
    if (c == 1) continue;
    if (is_prime(c)) {
      acc[c] += 1;
      continue;
    }
    Int g = pollard_rho(c);
    if (g == 0) {
      f.unfactored *= c;
      continue;
    }
    pending.push_back(g);
    pending.push_back(c / g);
  }
  for (auto& [p, e] : acc) f.factors.emplace_back(p, e);
  return f;
}

} // namespace toric
