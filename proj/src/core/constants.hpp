#pragma once

// Exact leading-constant ingredients: alpha, local densities kappa_p and their
// Euler product, the fan Moebius function mu_X and the exponent alpha_0.

#include "fan.hpp"

#include <string>
#include <vector>

namespace toric {

// r * vol{ y : <class(D_rho), y> >= 0, <-K, y> <= 1 } for the fan's Picard basis.
Rat alpha_constant(const ToricFan& fan);
// Same, for explicitly supplied ray classes (n rows of length r).
Rat alpha_from_classes(const std::vector<std::vector<i64>>& classes);

// Sum over ray subsets S spanning a cone of (p-1)^(n-|S|) / p^n.
Rat local_density_kappa(const ToricFan& fan, u64 p);
// (1 - 1/p)^r * #X(F_p) / p^d with #X(F_p) = sum_k f_k (p-1)^(d-k).
Rat kappa_via_fvector(const ToricFan& fan, u64 p);
// Sum over S of mu_S / p^|S|.
Rat kappa_via_mobius(const ToricFan& fan, u64 p);

// kappa_p - 1 = sum_{m >= 2} e_m p^-m; returns C = sum |e_m|, so |kappa_p - 1| <= C / p^2.
Int kappa_tail_constant(const ToricFan& fan);

struct KappaProduct {
  u64 p_max = 0;
  Rat product;  // prod_{p <= p_max} kappa_p (excluding primes dividing `level`)
  Rat tail_lo;  // prod_{p > p_max} kappa_p lies in [tail_lo, tail_hi]
  Rat tail_hi;
  double value() const { return product.get_d(); }
};

KappaProduct kappa_truncated(const ToricFan& fan, u64 p_max);

struct KappaLevel {
  Int level;
  Rat inv_level_power; // 1 / l^n
  KappaProduct rest;   // primes not dividing l
  double value() const { return inv_level_power.get_d() * rest.value(); }
};

KappaLevel kappa_level(const ToricFan& fan, u64 l, u64 p_max);

// mu_S = sum_{S' subset S} (-1)^{|S \ S'|} [S' spans a cone], memoized for every mask.
class MobiusTable {
public:
  explicit MobiusTable(const ToricFan& fan);
  i64 mu(RayMask support) const { return mu_.at(support); }
  // c_k = sum_{|S| = k} |mu_S|
  const std::vector<u64>& weight_by_size() const noexcept { return by_size_; }

private:
  std::vector<i64> mu_;
  std::vector<u64> by_size_;
};

i64 mobius_muX(const ToricFan& fan, const std::vector<u64>& d);

// Minimal number of rays not contained in a common cone.
std::size_t alpha_zero(const ToricFan& fan);

struct MobiusSums {
  u64 bound = 0;
  u64 cap = 0;
  Int head;         // sum_{Pi(d) <= b} |mu_X(d)|, d = 1 included
  long double tail; // sum_{b < Pi(d) <= cap} |mu_X(d)| / Pi(d)
};

// cap = min(16 b, 10^7); b is limited to 10^7.
MobiusSums mobius_partial_sums(const ToricFan& fan, u64 b);

// {alpha, alpha0, kappa:{value, tail_lo, tail_hi, P_max}, per_prime:[...]}
std::string constants_report_json(const ToricFan& fan, u64 p_max);

} // namespace toric
