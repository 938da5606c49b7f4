#pragma once

// Lattice points on the universal torsor: heights, the coprimality condition,
// and exact enumeration/counting of Cox coordinates of bounded height.

#include "fan.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace toric {

struct TorsorPoint {
  std::vector<i64> coords;
  Int height;
  bool integral = false;
};

// Chart neighbourhood 0 < z_j <= lambda_j in U_sigma for one maximal cone.
struct ChartBox {
  std::size_t cone = 0;
  std::vector<Rat> lambda;
};

struct Congruence {
  u64 modulus = 1;
  std::vector<u64> residues;
};

struct CountQuery {
  u64 B = 1;
  std::optional<ChartBox> box;
  std::optional<Congruence> congruence;
  std::optional<std::vector<u64>> divisibility;
  bool coprime_only = false;
  unsigned threads = 1;
  double max_points = 1e10; // refuse when the estimated output exceeds this
};

// Borrowed view handed to enumeration visitors; valid only during the call.
struct PointView {
  std::span<const u64> coords;
  u64 height;
  bool integral;
};

// Largest supported height bound; keeps every saturating product inside 128 bits.
inline constexpr u64 kMaxHeightBound = u64{1} << 62;

Int toric_height(const ToricFan& fan, std::span<const i64> x);

// Zero-set criterion: for every prime p the rays with p | X_rho span a cone.
bool is_cox_integral(const ToricFan& fan, std::span<const i64> x);
// gcd over sigma of prod_{rho not in sigma(1)} |X_rho|; equals 1 iff integral.
Int complement_gcd(const ToricFan& fan, std::span<const i64> x);
// gcd over sigma of prod_{rho in sigma(1)} |X_rho|, the index set as literally
// printed in the torsor-lifting statement. Kept to document the discrepancy.
Int cone_product_gcd(const ToricFan& fan, std::span<const i64> x);

// Smallest cone index sigma with |z_j| <= 1 in the chart of sigma. Such a cone
// attains max_sigma |X^{D_0(sigma)}|; for Fano fans it is the smallest argmax.
std::size_t which_cone(const ToricFan& fan, std::span<const i64> x);

void validate_query(const ToricFan& fan, const CountQuery& q);
double estimate_points(const ToricFan& fan, const CountQuery& q);

// Visits the points of the query in deterministic order (cone by cone,
// lexicographic in the admissible order). Return false to stop early.
void enumerate(const ToricFan& fan, const CountQuery& q, const std::function<bool(const PointView&)>& visit);
std::vector<TorsorPoint> enumerate_points(const ToricFan& fan, const CountQuery& q);

u64 count(const ToricFan& fan, const CountQuery& q);

// Number of query points satisfying `pred`, using q.threads workers; `pred`
// is called concurrently and must not mutate shared state.
u64 count_matching(const ToricFan& fan, const CountQuery& q, const std::function<bool(const PointView&)>& pred);

// T_O(Q)-points of height <= B: signed torsor points modulo the kernel signs.
u64 rational_point_count(const ToricFan& fan, u64 B);

enum class FlatMode {
  AllCones,  // X^{E_sigma(j)} >= (log B)^A for every maximal cone
  ChartLocal // only for the cones whose chart contains the point
};

// #(A(B) \ A^{(A)flat}(B)); requires B >= 3.
u64 flat_complement_count(const ToricFan& fan, u64 B, double A, FlatMode mode = FlatMode::AllCones,
                          unsigned threads = 1);

std::string query_to_json(const CountQuery& q);
CountQuery query_from_json(const std::string& text);

} // namespace toric
