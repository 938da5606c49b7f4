#pragma once

// Fans of smooth complete toric varieties and the combinatorial data derived
// from them: Picard lattice, per-cone anticanonical exponents, chart maps.

#include "arith.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace toric {

using RayMask = std::uint64_t;

struct Fan {
  std::size_t dim = 0;
  std::vector<std::vector<i64>> rays;
  std::vector<std::vector<std::size_t>> max_cones;
  std::string name;

  std::size_t num_rays() const noexcept { return rays.size(); }
};

struct Violation {
  std::string check; // primitive, nonzero, duplicate_ray, cone_shape, regularity, facet, connectivity, orientation, support
  std::vector<std::size_t> rays;
  std::vector<std::size_t> cones;
  std::string message;
};

struct FanReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

// Ray-divisor classes in a fixed basis of Pic(X) ~ Z^r.
struct PicData {
  std::size_t rank = 0;
  std::vector<std::vector<i64>> class_map; // n rows of length r
};

struct ConeData {
  std::size_t index = 0;
  std::vector<std::size_t> admissible_order; // base rays (r) then the cone's rays (d)
  std::vector<i64> m_vec;                    // m_{D_0}(sigma) in M
  std::vector<i64> a_vec;                    // exponents of X^{D_0(sigma)}, indexed by ray
  std::vector<std::vector<i64>> e_vecs;      // d rows, exponents on the r base rays
  std::vector<std::vector<i64>> f_vecs;      // d rows, exponents indexed by ray

  std::span<const std::size_t> base() const;  // first r entries of the admissible order
  std::span<const std::size_t> fiber() const; // last d entries
  std::size_t r = 0;
};

Fan parse_fan(std::string_view text);
// Canonical JSON: keys sorted, "name" emitted only when non-empty.
std::string serialize_fan(const Fan& fan);

FanReport validate_fan(const Fan& fan);
std::string report_to_json(const FanReport& report);

PicData picard_lattice(const Fan& fan);
ConeData cone_data(const Fan& fan, const PicData& pic, std::size_t cone);

// Validated fan with every derived datum precomputed. Immutable.
class ToricFan {
public:
  explicit ToricFan(Fan fan);

  const Fan& fan() const noexcept { return fan_; }
  const PicData& pic() const noexcept { return pic_; }
  const std::vector<ConeData>& cones() const noexcept { return cones_; }
  const ConeData& cone(std::size_t i) const { return cones_.at(i); }

  std::size_t dim() const noexcept { return fan_.dim; }
  std::size_t num_rays() const noexcept { return fan_.rays.size(); }
  std::size_t num_cones() const noexcept { return fan_.max_cones.size(); }
  std::size_t picard_rank() const noexcept { return pic_.rank; }

  RayMask cone_mask(std::size_t cone) const { return cone_masks_.at(cone); }
  // True iff the rays in `mask` are all contained in one maximal cone.
  bool spans_cone(RayMask mask) const;
  // Minimal ray subsets that span no cone.
  const std::vector<RayMask>& primitive_collections() const noexcept { return primitive_; }
  // max over cones of a_rho(sigma); X_rho <= B^(1/max) on A(B).
  const std::vector<unsigned>& max_exponent() const noexcept { return max_exp_; }
  // f_k = number of k-dimensional cones, k = 0..d.
  const std::vector<u64>& f_vector() const noexcept { return f_vector_; }

private:
  Fan fan_;
  PicData pic_;
  std::vector<ConeData> cones_;
  std::vector<RayMask> cone_masks_;
  std::vector<RayMask> primitive_;
  std::vector<unsigned> max_exp_;
  std::vector<u64> f_vector_;
};

ToricFan load_fan_file(const std::string& path);

// Chart coordinates z_j = prod_rho X_rho^{<n_j^v, n_rho>} of pi(X) in U_sigma.
std::vector<Rat> chart_map(const ToricFan& fan, std::size_t cone, std::span<const Rat> x);

} // namespace toric
