#pragma once

#include "arith.hpp"

#include <utility>
#include <vector>

namespace toric {

std::vector<u64> primes_up_to(u64 n);

// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime_u64(u64 n);
// Deterministic below 2^64; beyond that GMP's BPSW + Miller-Rabin test.
bool is_prime(const Int& n);

struct Factorization {
  std::vector<std::pair<Int, unsigned>> factors; // prime, multiplicity (ascending primes)
  Int unfactored = 1;                            // composite cofactor that resisted Pollard rho
  bool complete() const { return unfactored == 1; }
};

// Trial division up to `trial_bound`, then Miller-Rabin and Pollard rho on the
// cofactor. |n| is factored; n must be nonzero.
Factorization factor(const Int& n, u64 trial_bound = 1000000);

// Nontrivial factor of a composite n, or 0 on failure.
Int pollard_rho(const Int& n, unsigned attempts = 8, u64 iterations = 1u << 20);

} // namespace toric
