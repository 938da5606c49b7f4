#pragma once

// Selberg upper-bound sieve for integer sequences, and sieve-flavoured
// counting experiments over torsor points.

#include "polynomial.hpp"
#include "torsor.hpp"

#include <vector>

namespace toric {

struct SieveProblem {
  std::vector<Int> sequence;
  std::vector<u64> primes;
  std::vector<Rat> density; // g(p), aligned with `primes`
  double level = 2;         // D
  Rat mass = 0;             // X-hat
};

struct SelbergResult {
  Rat bound;       // mass / J + remainder
  Rat J;           // sum over squarefree d | Pi(P), d < sqrt(D), of prod g/(1-g)
  Rat main_term;   // mass / J
  Rat remainder;   // sum over d | Pi(P), d < D, of tau_3(d) |A_d - g(d) mass|
  Rat quadratic;   // sum_i (sum_{d | a_i, d < sqrt D} lambda_d)^2 with the optimal lambda
  u64 sifted = 0;  // exact #{i : gcd(a_i, Pi(P)) = 1}
  u64 divisors = 0; // number of d < D entering the remainder
};

// Throws Argument if some g(p) is outside (0,1), D <= 1, or a listed prime is
// not prime. An empty prime set returns |A| for every field.
SelbergResult selberg_bound(const SieveProblem& problem);

// Sequence 1..n with g(p) = 1/p, X-hat = n: the classical test instance.
SieveProblem interval_problem(u64 n, u64 prime_bound, double level);

struct GeomSieveResult {
  u64 count = 0;     // points with a prime p >= N dividing gcd(f(X), g(X))
  u64 uncertain = 0; // gcd has an unfactored composite part; a prime >= N is possible
  u64 total = 0;     // points examined
};

// N > 10^6 switches from trial division below N to full factorization.
GeomSieveResult geometric_sieve_count(const ToricFan& fan, const Polynomial& f, const Polynomial& g, u64 N, u64 B,
                                      bool coprime_only = false, unsigned threads = 1);

// #{X in A(B) : phi(X) = 0}; phi must be a nonzero polynomial.
u64 subvariety_count(const ToricFan& fan, const Polynomial& phi, u64 B, unsigned threads = 1);

// #{X in C_0(B)^+ : |s(X)| is prime}.
u64 prime_section_count(const ToricFan& fan, const Polynomial& s, u64 B, unsigned threads = 1);

} // namespace toric
