#include "polytope.hpp"

#include "intmat.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace toric {

namespace {

Rat dot(const std::vector<Rat>& a, const RatPoint& y) {
  Rat s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * y[i];
  return s;
}

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

Rat factorial(std::size_t k) {
  Int f = 1;
  for (std::size_t i = 2; i <= k; ++i) f *= static_cast<unsigned long>(i);
  return Rat(f);
}

using Face = std::vector<std::size_t>; // sorted vertex indices

struct Triangulator {
  const std::vector<Halfspace>& ineqs;
  const std::vector<RatPoint>& verts;
  std::vector<std::vector<bool>> tight; // tight[i][v]

  std::vector<Face> facets(const Face& face, long dim) const {
    std::set<Face> out;
    for (const auto& t : tight) {
      Face sub;
      for (std::size_t v : face)
        if (t[v]) sub.push_back(v);
      if (sub.size() == face.size() || sub.empty()) continue;
      std::vector<RatPoint> pts;
      for (std::size_t v : sub) pts.push_back(verts[v]);
      if (affine_dimension(pts) == dim - 1) out.insert(sub);
    }
    return {out.begin(), out.end()};
  }

  void run(const Face& face, long dim, std::vector<std::vector<std::size_t>>& out) const {
    if (dim == 0) {
      out.push_back({face.front()});
      return;
    }
    const std::size_t apex = face.front(); // vertices are sorted, so this is the lex-min
    for (const Face& f : facets(face, dim)) {
      if (std::binary_search(f.begin(), f.end(), apex)) continue;
      std::vector<std::vector<std::size_t>> sub;
      run(f, dim - 1, sub);
      for (auto& s : sub) {
        s.insert(s.begin(), apex);
        out.push_back(std::move(s));
      }
    }
  }
};

} // namespace

std::vector<RatPoint> polytope_vertices(const std::vector<Halfspace>& ineqs, std::size_t dim) {
  std::set<RatPoint> found;
  if (ineqs.size() < dim) return {};
  std::vector<std::size_t> idx(dim);
  for (std::size_t i = 0; i < dim; ++i) idx[i] = i;
  do {
    RatMatrix m(dim, dim);
    std::vector<Rat> rhs(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) m(i, j) = ineqs[idx[i]].a[j];
      rhs[i] = ineqs[idx[i]].b;
    }
    auto y = solve(m, rhs);
    if (!y) continue;
    bool feasible = std::all_of(ineqs.begin(), ineqs.end(), [&](const Halfspace& h) { return dot(h.a, *y) <= h.b; });
    if (feasible) found.insert(*y);
  } while (next_combination(idx, ineqs.size()));
  return {found.begin(), found.end()};
}

long affine_dimension(const std::vector<RatPoint>& pts) {
  if (pts.empty()) return -1;
  if (pts.size() == 1) return 0;
  RatMatrix m(pts.size() - 1, pts[0].size());
  for (std::size_t i = 1; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts[0].size(); ++j) m(i - 1, j) = pts[i][j] - pts[0][j];
  return static_cast<long>(rank(m));
}

std::vector<std::vector<std::size_t>> pulling_triangulation(const std::vector<Halfspace>& ineqs,
                                                            const std::vector<RatPoint>& vertices) {
  Triangulator t{ineqs, vertices, {}};
  for (const auto& h : ineqs) {
    std::vector<bool> row(vertices.size());
    for (std::size_t v = 0; v < vertices.size(); ++v) row[v] = dot(h.a, vertices[v]) == h.b;
    t.tight.push_back(std::move(row));
  }
  Face all(vertices.size());
  for (std::size_t v = 0; v < all.size(); ++v) all[v] = v;
  std::vector<std::vector<std::size_t>> out;
  t.run(all, affine_dimension(vertices), out);
  return out;
}

Rat polytope_volume(const std::vector<Halfspace>& ineqs, std::size_t dim) {
  auto verts = polytope_vertices(ineqs, dim);
  if (affine_dimension(verts) != static_cast<long>(dim))
    fail(Error::Kind::Hypothesis, "polytope is not full-dimensional");
  Rat total = 0;
  for (const auto& simplex : pulling_triangulation(ineqs, verts)) {
    RatMatrix m(dim, dim);
    for (std::size_t i = 1; i <= dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) m(i - 1, j) = verts[simplex[i]][j] - verts[simplex[0]][j];
    total += abs(determinant(m));
  }
  return total / factorial(dim);
}

} // namespace toric
