#pragma once

// Exact rational polytopes given by inequalities <a_i, y> <= b_i: vertex
// enumeration and volume by a recursive pulling triangulation.

#include "arith.hpp"

#include <vector>

namespace toric {

struct Halfspace {
  std::vector<Rat> a;
  Rat b;
};

using RatPoint = std::vector<Rat>;

// All vertices, by solving every dim-subset of the bounding hyperplanes.
// Sorted lexicographically, no duplicates.
std::vector<RatPoint> polytope_vertices(const std::vector<Halfspace>& ineqs, std::size_t dim);

// Affine dimension of a point set (-1 for the empty set).
long affine_dimension(const std::vector<RatPoint>& pts);

// Simplices (as vertex index lists) of a triangulation of a full-dimensional
// bounded polytope, pulling the lexicographically smallest vertex first.
std::vector<std::vector<std::size_t>> pulling_triangulation(const std::vector<Halfspace>& ineqs,
                                                            const std::vector<RatPoint>& vertices);

// Lebesgue volume of a bounded polytope; throws Hypothesis if it is not
// full-dimensional. Boundedness is the caller's responsibility.
Rat polytope_volume(const std::vector<Halfspace>& ineqs, std::size_t dim);

} // namespace toric
