#include "fan.hpp"

#include "intmat.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace toric {

using nlohmann::json;

std::span<const std::size_t> ConeData::base() const { return {admissible_order.data(), r}; }
std::span<const std::size_t> ConeData::fiber() const {
  return {admissible_order.data() + r, admissible_order.size() - r};
}

// ---------------------------------------------------------------------------
// Parsing and serialization

Fan parse_fan(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Error::Kind::Parse, std::string("fan file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail(Error::Kind::Parse, "fan file must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it)
    if (it.key() != "rays" && it.key() != "max_cones" && it.key() != "name")
      fail(Error::Kind::Parse, "unknown key '" + it.key() + "' in fan file");
  if (!doc.contains("rays") || !doc["rays"].is_array() || doc["rays"].empty())
    fail(Error::Kind::Parse, "fan file needs a non-empty \"rays\" array");
  if (!doc.contains("max_cones") || !doc["max_cones"].is_array() || doc["max_cones"].empty())
    fail(Error::Kind::Parse, "fan file needs a non-empty \"max_cones\" array");

  Fan fan;
  for (std::size_t i = 0; i < doc["rays"].size(); ++i) {
    const json& ray = doc["rays"][i];
    if (!ray.is_array() || ray.empty()) fail(Error::Kind::Parse, "ray " + std::to_string(i) + " is not a non-empty array");
    std::vector<i64> v;
    for (const json& x : ray) {
      if (!x.is_number_integer()) fail(Error::Kind::Parse, "ray " + std::to_string(i) + " has a non-integer entry");
      v.push_back(x.get<i64>());
    }
    if (i == 0) fan.dim = v.size();
    if (v.size() != fan.dim)
      fail(Error::Kind::Parse, "dimension mismatch: ray " + std::to_string(i) + " has length " +
                                   std::to_string(v.size()) + ", expected " + std::to_string(fan.dim));
    fan.rays.push_back(std::move(v));
  }
  for (std::size_t c = 0; c < doc["max_cones"].size(); ++c) {
    const json& cone = doc["max_cones"][c];
    if (!cone.is_array()) fail(Error::Kind::Parse, "cone " + std::to_string(c) + " is not an array");
    std::vector<std::size_t> idx;
    for (const json& x : cone) {
      if (!x.is_number_integer()) fail(Error::Kind::Parse, "cone " + std::to_string(c) + " has a non-integer index");
      i64 k = x.get<i64>();
      if (k < 0 || static_cast<std::size_t>(k) >= fan.rays.size())
        fail(Error::Kind::Parse, "cone " + std::to_string(c) + " index " + std::to_string(k) + " out of range");
      idx.push_back(static_cast<std::size_t>(k));
    }
    fan.max_cones.push_back(std::move(idx));
  }
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail(Error::Kind::Parse, "\"name\" must be a string");
    fan.name = doc["name"].get<std::string>();
  }
  return fan;
}

std::string serialize_fan(const Fan& fan) {
  json doc = json::object();
  doc["rays"] = fan.rays;
  doc["max_cones"] = fan.max_cones;
  if (!fan.name.empty()) doc["name"] = fan.name;
  return doc.dump();
}

// ---------------------------------------------------------------------------
// Validation

namespace {

IntMatrix ray_matrix(const Fan& fan, std::span<const std::size_t> idx) {
  IntMatrix m(idx.size(), fan.dim);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = 0; j < fan.dim; ++j) m(i, j) = to_int(fan.rays[idx[i]][j]);
  return m;
}

std::string join(std::span<const std::size_t> v) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << '}';
  return os.str();
}

// Coefficients of v in the basis of the cone's rays (cone assumed unimodular).
std::vector<Rat> cone_coordinates(const Fan& fan, std::span<const std::size_t> cone, std::span<const i64> v) {
  RatMatrix a(fan.dim, fan.dim);
  for (std::size_t i = 0; i < fan.dim; ++i)
    for (std::size_t j = 0; j < fan.dim; ++j) a(j, i) = Rat(to_int(fan.rays[cone[i]][j]));
  std::vector<Rat> b(fan.dim);
  for (std::size_t j = 0; j < fan.dim; ++j) b[j] = Rat(to_int(v[j]));
  auto x = solve(a, b);
  if (!x) fail(Error::Kind::Internal, "singular cone in cone_coordinates");
  return *x;
}

} // namespace

FanReport validate_fan(const Fan& fan) {
  FanReport rep;
  auto add = [&](std::string check, std::vector<std::size_t> rays, std::vector<std::size_t> cones, std::string msg) {
    rep.violations.push_back({std::move(check), std::move(rays), std::move(cones), std::move(msg)});
  };
  const std::size_t n = fan.rays.size(), d = fan.dim;

  for (std::size_t i = 0; i < n; ++i) {
    i64 g = 0;
    for (i64 x : fan.rays[i]) g = std::gcd(g, x);
    if (g == 0)
      add("nonzero", {i}, {}, "ray " + std::to_string(i) + " is the zero vector");
    else if (g != 1)
      add("primitive", {i}, {}, "ray " + std::to_string(i) + " is not primitive (gcd " + std::to_string(g) + ")");
    for (std::size_t j = 0; j < i; ++j)
      if (fan.rays[i] == fan.rays[j])
        add("duplicate_ray", {j, i}, {}, "rays " + std::to_string(j) + " and " + std::to_string(i) + " are equal");
  }

  std::vector<bool> well_shaped(fan.max_cones.size(), false);
  std::vector<bool> regular(fan.max_cones.size(), false);
  std::set<std::vector<std::size_t>> seen;
  for (std::size_t c = 0; c < fan.max_cones.size(); ++c) {
    std::vector<std::size_t> s = fan.max_cones[c];
    std::sort(s.begin(), s.end());
    bool distinct = std::adjacent_find(s.begin(), s.end()) == s.end();
    if (s.size() != d || !distinct) {
      add("cone_shape", s, {c}, "cone " + std::to_string(c) + " must list " + std::to_string(d) + " distinct rays");
      continue;
    }
    if (!seen.insert(s).second) {
      add("cone_shape", s, {c}, "cone " + std::to_string(c) + " is listed twice");
      continue;
    }
    well_shaped[c] = true;
    Int det = determinant(ray_matrix(fan, fan.max_cones[c]));
    if (abs(det) != 1)
      add("regularity", s, {c}, "cone " + std::to_string(c) + " has determinant " + det.get_str() + " (not +-1)");
    else
      regular[c] = true;
  }

  std::vector<bool> used(n, false);
  for (std::size_t c = 0; c < fan.max_cones.size(); ++c)
    if (well_shaped[c])
      for (std::size_t i : fan.max_cones[c]) used[i] = true;
  for (std::size_t i = 0; i < n; ++i)
    if (!used[i]) add("unused_ray", {i}, {}, "ray " + std::to_string(i) + " belongs to no maximal cone");

  // Facet pairing, orientation and connectivity of the dual graph.
  std::map<std::vector<std::size_t>, std::vector<std::pair<std::size_t, std::size_t>>> facets; // facet -> (cone, opposite ray)
  for (std::size_t c = 0; c < fan.max_cones.size(); ++c) {
    if (!well_shaped[c]) continue;
    std::vector<std::size_t> s = fan.max_cones[c];
    std::sort(s.begin(), s.end());
    for (std::size_t drop = 0; drop < d; ++drop) {
      std::vector<std::size_t> f;
      for (std::size_t k = 0; k < d; ++k)
        if (k != drop) f.push_back(s[k]);
      facets[f].push_back({c, s[drop]});
    }
  }
  std::vector<std::vector<std::size_t>> adj(fan.max_cones.size());
  for (const auto& [facet, owners] : facets) {
    if (owners.size() != 2) {
      std::vector<std::size_t> cones;
      for (auto& o : owners) cones.push_back(o.first);
      add("facet", facet, cones,
          "facet " + join(facet) + " lies in " + std::to_string(owners.size()) +
              " maximal cone(s), expected exactly 2 (fan not complete)");
      continue;
    }
    auto [c1, o1] = owners[0];
    auto [c2, o2] = owners[1];
    adj[c1].push_back(c2);
    adj[c2].push_back(c1);
    if (!regular[c1] || !regular[c2]) continue;
    std::vector<std::size_t> with1 = facet, with2 = facet;
    with1.push_back(o1);
    with2.push_back(o2);
    Int s1 = determinant(ray_matrix(fan, with1)), s2 = determinant(ray_matrix(fan, with2));
    if (sgn(s1) * sgn(s2) >= 0)
      add("orientation", facet, {c1, c2},
          "cones " + std::to_string(c1) + " and " + std::to_string(c2) + " lie on the same side of facet " + join(facet));
  }
  if (!fan.max_cones.empty()) {
    std::vector<bool> seen_c(fan.max_cones.size(), false);
    std::vector<std::size_t> stack;
    std::size_t start = 0;
    while (start < fan.max_cones.size() && !well_shaped[start]) ++start;
    if (start < fan.max_cones.size()) {
      stack.push_back(start);
      seen_c[start] = true;
      while (!stack.empty()) {
        std::size_t c = stack.back();
        stack.pop_back();
        for (std::size_t e : adj[c])
          if (!seen_c[e]) {
            seen_c[e] = true;
            stack.push_back(e);
          }
      }
      std::vector<std::size_t> unreachable;
      for (std::size_t c = 0; c < fan.max_cones.size(); ++c)
        if (well_shaped[c] && !seen_c[c]) unreachable.push_back(c);
      if (!unreachable.empty())
        add("connectivity", {}, unreachable, "dual graph of maximal cones is disconnected");
    }
  }

  // Support: a deterministic panel of directions must be covered, and an
  // interior point of each cone must lie in no other cone.
  bool all_regular = std::all_of(regular.begin(), regular.end(), [](bool b) { return b; });
  if (all_regular && d <= 16) {
    auto containing = [&](std::span<const i64> v, bool interior_only_other, std::size_t self) {
      std::vector<std::size_t> hits;
      for (std::size_t c = 0; c < fan.max_cones.size(); ++c) {
        if (interior_only_other && c == self) continue;
        auto coef = cone_coordinates(fan, fan.max_cones[c], v);
        if (std::all_of(coef.begin(), coef.end(), [](const Rat& x) { return x >= 0; })) hits.push_back(c);
      }
      return hits;
    };
    std::vector<std::vector<i64>> panel;
    for (std::size_t i = 0; i < d; ++i)
      for (i64 s : {1, -1}) {
        std::vector<i64> v(d, 0);
        v[i] = s;
        panel.push_back(v);
      }
    for (std::size_t bits = 0; bits < (std::size_t{1} << d); ++bits) {
      std::vector<i64> v(d);
      for (std::size_t i = 0; i < d; ++i) v[i] = (bits >> i) & 1 ? -1 : 1;
      panel.push_back(v);
    }
    for (const auto& v : panel)
      if (containing(v, false, 0).empty()) {
        std::ostringstream os;
        os << "direction (";
        for (std::size_t i = 0; i < d; ++i) os << (i ? "," : "") << v[i];
        os << ") is not covered by any maximal cone";
        add("support", {}, {}, os.str());
      }
    for (std::size_t c = 0; c < fan.max_cones.size(); ++c) {
      std::vector<i64> p(d, 0);
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t j = 0; j < d; ++j) p[j] += static_cast<i64>(k + 1) * fan.rays[fan.max_cones[c][k]][j];
      auto others = containing(p, true, c);
      if (!others.empty()) {
        others.insert(others.begin(), c);
        add("support", {}, others, "maximal cones " + join(others) + " overlap");
      }
    }
  }
  return rep;
}

std::string report_to_json(const FanReport& report) {
  json doc = json::object();
  doc["ok"] = report.ok();
  json v = json::array();
  for (const auto& x : report.violations)
    v.push_back({{"check", x.check}, {"rays", x.rays}, {"cones", x.cones}, {"message", x.message}});
  doc["violations"] = v;
  return doc.dump();
}

// ---------------------------------------------------------------------------
// Picard lattice and per-cone data

PicData picard_lattice(const Fan& fan) {
  const std::size_t n = fan.rays.size(), d = fan.dim;
  IntMatrix h(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) h(i, j) = to_int(fan.rays[i][j]);
  SmithForm snf = smith_normal_form(h);
  for (std::size_t i = 0; i < d; ++i) {
    if (i >= n || snf.diag(i, i) == 0) fail(Error::Kind::Hypothesis, "rays do not span the lattice N");
    if (snf.diag(i, i) != 1)
      fail(Error::Kind::Hypothesis,
           "Picard group has torsion (invariant factor " + snf.diag(i, i).get_str() + "); fan is not smooth");
  }
  PicData pic;
  pic.rank = n - d;
  pic.class_map.assign(n, std::vector<i64>(pic.rank));
  for (std::size_t rho = 0; rho < n; ++rho)
    for (std::size_t k = 0; k < pic.rank; ++k) pic.class_map[rho][k] = to_i64(snf.left(d + k, rho));
  return pic;
}

ConeData cone_data(const Fan& fan, const PicData& pic, std::size_t cone) {
  const std::size_t n = fan.rays.size(), d = fan.dim;
  if (cone >= fan.max_cones.size()) fail(Error::Kind::Argument, "cone index " + std::to_string(cone) + " out of range");
  std::vector<std::size_t> sigma = fan.max_cones[cone];
  std::sort(sigma.begin(), sigma.end());

  ConeData cd;
  cd.index = cone;
  cd.r = pic.rank;
  for (std::size_t i = 0; i < n; ++i)
    if (!std::binary_search(sigma.begin(), sigma.end(), i)) cd.admissible_order.push_back(i);
  for (std::size_t i : sigma) cd.admissible_order.push_back(i);

  IntMatrix r = ray_matrix(fan, sigma);
  IntMatrix rinv = unimodular_inverse(r); // columns are the dual basis n_j^v
  cd.m_vec.assign(d, 0);
  for (std::size_t i = 0; i < d; ++i) {
    Int s = 0;
    for (std::size_t j = 0; j < d; ++j) s += rinv(i, j);
    cd.m_vec[i] = to_i64(s);
  }
  cd.a_vec.assign(n, 0);
  for (std::size_t rho = 0; rho < n; ++rho) {
    i64 pairing = 0;
    for (std::size_t j = 0; j < d; ++j) pairing += cd.m_vec[j] * fan.rays[rho][j];
    cd.a_vec[rho] = 1 - pairing;
    if (cd.a_vec[rho] < 0)
      fail(Error::Kind::Hypothesis, "anticanonical not globally generated: a_rho(sigma) = " +
                                        std::to_string(cd.a_vec[rho]) + " for ray " + std::to_string(rho) +
                                        ", cone " + std::to_string(cone));
  }
  cd.f_vecs.assign(d, std::vector<i64>(n, 0));
  cd.e_vecs.assign(d, std::vector<i64>(pic.rank, 0));
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t rho = 0; rho < n; ++rho) {
      Int s = 0;
      for (std::size_t k = 0; k < d; ++k) s += rinv(k, j) * fan.rays[rho][k];
      cd.f_vecs[j][rho] = to_i64(s);
    }
    for (std::size_t i = 0; i < pic.rank; ++i) cd.e_vecs[j][i] = -cd.f_vecs[j][cd.admissible_order[i]];
    if (std::all_of(cd.e_vecs[j].begin(), cd.e_vecs[j].end(), [](i64 x) { return x == 0; }))
      fail(Error::Kind::Internal, "E_sigma(j) vanishes; fan cannot be complete");
  }
  return cd;
}

// ---------------------------------------------------------------------------

ToricFan::ToricFan(Fan fan) : fan_(std::move(fan)) {
  FanReport rep = validate_fan(fan_);
  if (!rep.ok()) {
    std::string msg = "invalid fan:";
    for (const auto& v : rep.violations) msg += "\n  [" + v.check + "] " + v.message;
    fail(Error::Kind::InvalidFan, msg);
  }
  const std::size_t n = fan_.rays.size(), d = fan_.dim;
  if (n > 63) fail(Error::Kind::Argument, "at most 63 rays are supported");
  pic_ = picard_lattice(fan_);
  for (std::size_t c = 0; c < fan_.max_cones.size(); ++c) {
    cones_.push_back(cone_data(fan_, pic_, c));
    RayMask m = 0;
    for (std::size_t i : fan_.max_cones[c]) m |= RayMask{1} << i;
    cone_masks_.push_back(m);
  }
  max_exp_.assign(n, 0);
  for (const auto& cd : cones_)
    for (std::size_t rho = 0; rho < n; ++rho)
      max_exp_[rho] = std::max<unsigned>(max_exp_[rho], static_cast<unsigned>(cd.a_vec[rho]));
  for (std::size_t rho = 0; rho < n; ++rho)
    if (max_exp_[rho] == 0)
      fail(Error::Kind::Hypothesis, "coordinate " + std::to_string(rho) + " never appears in the height (-K not big)");

  // Faces of a simplicial fan are the subsets of maximal cones.
  std::set<RayMask> faces;
  for (RayMask cm : cone_masks_)
    for (RayMask sub = cm;; sub = (sub - 1) & cm) {
      faces.insert(sub);
      if (sub == 0) break;
    }
  f_vector_.assign(d + 1, 0);
  for (RayMask f : faces) ++f_vector_[static_cast<std::size_t>(__builtin_popcountll(f))];

  // Minimal non-faces have at most d + 1 elements.
  std::vector<std::size_t> comb;
  for (std::size_t k = 1; k <= std::min(n, d + 1); ++k) {
    comb.resize(k);
    std::iota(comb.begin(), comb.end(), 0);
    for (;;) {
      RayMask m = 0;
      for (std::size_t i : comb) m |= RayMask{1} << i;
      if (!faces.count(m)) {
        bool minimal = true;
        for (std::size_t i : comb)
          if (!faces.count(m & ~(RayMask{1} << i))) {
            minimal = false;
            break;
          }
        if (minimal) primitive_.push_back(m);
      }
      std::size_t i = k;
      while (i > 0 && comb[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
}

bool ToricFan::spans_cone(RayMask mask) const {
  for (RayMask cm : cone_masks_)
    if ((mask & ~cm) == 0) return true;
  return false;
}

ToricFan load_fan_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Error::Kind::Io, "cannot read fan file '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return ToricFan(parse_fan(os.str()));
}

std::vector<Rat> chart_map(const ToricFan& fan, std::size_t cone, std::span<const Rat> x) {
  if (x.size() != fan.num_rays()) fail(Error::Kind::Argument, "chart_map: expected " + std::to_string(fan.num_rays()) + " coordinates");
  for (const Rat& v : x)
    if (v == 0) fail(Error::Kind::Argument, "chart_map: Cox coordinates must be nonzero");
  const ConeData& cd = fan.cone(cone);
  std::vector<Rat> z(fan.dim());
  for (std::size_t j = 0; j < fan.dim(); ++j) {
    Rat acc = 1;
    for (std::size_t rho = 0; rho < fan.num_rays(); ++rho) {
      i64 e = cd.f_vecs[j][rho];
      Rat base = e >= 0 ? x[rho] : Rat(1) / x[rho];
      for (i64 k = 0; k < (e >= 0 ? e : -e); ++k) acc *= base;
    }
    acc.canonicalize();
    z[j] = acc;
  }
  return z;
}

} // namespace toric
