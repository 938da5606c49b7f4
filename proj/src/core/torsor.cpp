#include "torsor.hpp"

#include "primes.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

namespace toric {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Pointwise functions on arbitrary nonzero Cox coordinates

namespace {

void require_nonzero(const ToricFan& fan, std::span<const i64> x) {
  if (x.size() != fan.num_rays())
    fail(Error::Kind::Argument, "expected " + std::to_string(fan.num_rays()) + " Cox coordinates, got " +
                                    std::to_string(x.size()));
  for (i64 v : x)
    if (v == 0) fail(Error::Kind::Argument, "Cox coordinates must be nonzero");
}

Int abs_monomial(std::span<const i64> x, std::span<const i64> exps) {
  Int acc = 1;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (exps[i] > 0) acc *= pow_int(abs(to_int(x[i])), static_cast<unsigned long>(exps[i]));
  return acc;
}

// |X|^F <= 1 for the Laurent monomial with exponents F.
bool laurent_at_most_one(std::span<const i64> x, std::span<const i64> f) {
  Int num = 1, den = 1;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (f[i] > 0) num *= pow_int(abs(to_int(x[i])), static_cast<unsigned long>(f[i]));
    if (f[i] < 0) den *= pow_int(abs(to_int(x[i])), static_cast<unsigned long>(-f[i]));
  }
  return num <= den;
}

} // namespace

Int toric_height(const ToricFan& fan, std::span<const i64> x) {
  require_nonzero(fan, x);
  Int best = 0;
  for (const auto& cd : fan.cones()) {
    Int m = abs_monomial(x, cd.a_vec);
    if (m > best) best = m;
  }
  return best;
}

bool is_cox_integral(const ToricFan& fan, std::span<const i64> x) {
  require_nonzero(fan, x);
  std::set<Int> primes;
  for (i64 v : x) {
    if (v == 1 || v == -1) continue;
    Factorization f = factor(to_int(v));
    if (!f.complete()) return complement_gcd(fan, x) == 1;
    for (auto& [p, e] : f.factors) primes.insert(p);
  }
  for (const Int& p : primes) {
    RayMask zero_set = 0;
    for (std::size_t rho = 0; rho < x.size(); ++rho)
      if (mpz_divisible_p(to_int(x[rho]).get_mpz_t(), p.get_mpz_t())) zero_set |= RayMask{1} << rho;
    if (!fan.spans_cone(zero_set)) return false;
  }
  return true;
}

Int complement_gcd(const ToricFan& fan, std::span<const i64> x) {
  require_nonzero(fan, x);
  Int g = 0;
  for (std::size_t c = 0; c < fan.num_cones(); ++c) {
    Int prod = 1;
    for (std::size_t rho = 0; rho < x.size(); ++rho)
      if (!(fan.cone_mask(c) >> rho & 1)) prod *= abs(to_int(x[rho]));
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), prod.get_mpz_t());
  }
  return g;
}

Int cone_product_gcd(const ToricFan& fan, std::span<const i64> x) {
  require_nonzero(fan, x);
  Int g = 0;
  for (std::size_t c = 0; c < fan.num_cones(); ++c) {
    Int prod = 1;
    for (std::size_t rho = 0; rho < x.size(); ++rho)
      if (fan.cone_mask(c) >> rho & 1) prod *= abs(to_int(x[rho]));
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), prod.get_mpz_t());
  }
  return g;
}

std::size_t which_cone(const ToricFan& fan, std::span<const i64> x) {
  require_nonzero(fan, x);
  for (std::size_t c = 0; c < fan.num_cones(); ++c) {
    const ConeData& cd = fan.cone(c);
    bool inside = true;
    for (const auto& f : cd.f_vecs)
      if (!laurent_at_most_one(x, f)) {
        inside = false;
        break;
      }
    if (inside) return c;
  }
  fail(Error::Kind::Internal, "point lies in no chart C_sigma; fan is not complete");
}

// ---------------------------------------------------------------------------
// Query validation and size estimate

namespace {

struct Progression {
  u64 modulus = 1;
  u64 first = 1; // smallest positive member
};

i64 inverse_mod(i64 a, i64 m) {
  i64 g = m, x = 0, x1 = 1, a1 = ((a % m) + m) % m;
  while (a1 != 0) {
    i64 q = g / a1;
    std::tie(g, a1) = std::make_pair(a1, g - q * a1);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  if (g != 1) fail(Error::Kind::Argument, "divisibility entry not coprime to the congruence modulus");
  return ((x % m) + m) % m;
}

std::vector<Progression> progressions(const ToricFan& fan, const CountQuery& q) {
  std::vector<Progression> out(fan.num_rays());
  for (std::size_t rho = 0; rho < out.size(); ++rho) {
    u64 l = q.congruence ? q.congruence->modulus : 1;
    u64 xi = q.congruence ? q.congruence->residues[rho] % l : 0;
    u64 dv = q.divisibility ? (*q.divisibility)[rho] : 1;
    u128 mod = static_cast<u128>(l) * dv;
    if (mod > kMaxHeightBound) fail(Error::Kind::Argument, "congruence modulus times divisibility is too large");
    // x = dv * k with dv * k = xi (mod l).
    u64 k = l == 1 ? 0 : static_cast<u64>((static_cast<u128>(xi) * static_cast<u64>(inverse_mod(static_cast<i64>(dv % l), static_cast<i64>(l)))) % l);
    u64 residue = static_cast<u64>((static_cast<u128>(dv) * k) % mod);
    out[rho].modulus = static_cast<u64>(mod);
    out[rho].first = residue == 0 ? static_cast<u64>(mod) : residue;
  }
  return out;
}

} // namespace

void validate_query(const ToricFan& fan, const CountQuery& q) {
  const std::size_t n = fan.num_rays();
  if (q.B > kMaxHeightBound) fail(Error::Kind::Argument, "height bound exceeds 2^62");
  if (q.box) {
    if (q.box->cone >= fan.num_cones())
      fail(Error::Kind::Argument, "box cone index " + std::to_string(q.box->cone) + " out of range");
    if (q.box->lambda.size() != fan.dim())
      fail(Error::Kind::Argument, "box needs " + std::to_string(fan.dim()) + " side lengths");
    for (const Rat& l : q.box->lambda)
      if (l <= 0 || l > 1) fail(Error::Kind::Argument, "box side lengths must lie in (0,1], got " + to_string(l));
  }
  if (q.congruence) {
    if (q.congruence->modulus < 1) fail(Error::Kind::Argument, "congruence modulus must be >= 1");
    if (q.congruence->residues.size() != n)
      fail(Error::Kind::Argument, "congruence needs " + std::to_string(n) + " residues");
    for (u64 r : q.congruence->residues)
      if (r >= q.congruence->modulus) fail(Error::Kind::Argument, "residues must lie in [0, l)");
  }
  if (q.divisibility) {
    if (q.divisibility->size() != n) fail(Error::Kind::Argument, "divisibility needs " + std::to_string(n) + " entries");
    for (u64 dv : *q.divisibility) {
      if (dv < 1) fail(Error::Kind::Argument, "divisibility entries must be positive");
      if (q.congruence && std::gcd(dv, q.congruence->modulus) != 1)
        fail(Error::Kind::Argument, "divisibility entries must be coprime to the congruence modulus");
    }
  }
}

double estimate_points(const ToricFan& fan, const CountQuery& q) {
  if (q.B == 0) return 0;
  const double B = static_cast<double>(q.B);
  const double L = std::max(1.0, std::log(B));
  const std::size_t r = fan.picard_rank();
  double est = B * std::pow(L, static_cast<double>(r) - 1) / std::tgamma(static_cast<double>(r));
  est *= q.box ? 1.0 : static_cast<double>(fan.num_cones());
  if (q.box)
    for (const Rat& l : q.box->lambda) est *= l.get_d();
  for (const auto& p : progressions(fan, q)) est /= static_cast<double>(p.modulus);
  return est;
}

// ---------------------------------------------------------------------------
// Enumeration engine

namespace {

struct Term {
  std::size_t ray;
  unsigned exp;
};

struct ChartTest {
  // One inequality prod pos^e <= prod neg^e per fiber direction.
  std::vector<std::vector<Term>> pos, neg;
};

constexpr u128 kChartCap = u128{1} << 125;

u128 sat_monomial(std::span<const u64> x, const std::vector<Term>& terms, u128 cap) {
  u128 acc = 1;
  for (const Term& t : terms) {
    acc = sat_mul(acc, sat_pow(x[t.ray], t.exp, cap), cap);
    if (acc > cap) return acc;
  }
  return acc;
}

Int big_monomial(std::span<const u64> x, const std::vector<Term>& terms) {
  Int acc = 1;
  for (const Term& t : terms) acc *= pow_int(to_int_u(x[t.ray]), t.exp);
  return acc;
}

// X^pos <= X^neg, exactly.
bool monomial_leq(std::span<const u64> x, const std::vector<Term>& pos, const std::vector<Term>& neg) {
  u128 a = sat_monomial(x, pos, kChartCap), b = sat_monomial(x, neg, kChartCap);
  if (a <= kChartCap && b <= kChartCap) return a <= b;
  return big_monomial(x, pos) <= big_monomial(x, neg);
}

bool in_chart(std::span<const u64> x, const ChartTest& t) {
  for (std::size_t j = 0; j < t.pos.size(); ++j)
    if (!monomial_leq(x, t.pos[j], t.neg[j])) return false;
  return true;
}

ChartTest chart_test(const ConeData& cd) {
  ChartTest t;
  for (const auto& f : cd.f_vecs) {
    std::vector<Term> p, m;
    for (std::size_t rho = 0; rho < f.size(); ++rho) {
      if (f[rho] > 0) p.push_back({rho, static_cast<unsigned>(f[rho])});
      if (f[rho] < 0) m.push_back({rho, static_cast<unsigned>(-f[rho])});
    }
    t.pos.push_back(std::move(p));
    t.neg.push_back(std::move(m));
  }
  return t;
}

class Engine {
public:
  Engine(const ToricFan& fan, const CountQuery& q) : fan_(fan), q_(q), progs_(progressions(fan, q)) {
    const std::size_t n = fan.num_rays();
    ub_.resize(n);
    for (std::size_t rho = 0; rho < n; ++rho) ub_[rho] = iroot(q.B, fan.max_exponent()[rho]);
    for (RayMask m : fan.primitive_collections()) {
      std::vector<std::size_t> rays;
      for (std::size_t rho = 0; rho < n; ++rho)
        if (m >> rho & 1) rays.push_back(rho);
      primitive_.push_back(std::move(rays));
    }
    for (const auto& cd : fan.cones()) charts_.push_back(chart_test(cd));
    if (q.box)
      cones_ = {q.box->cone};
    else
      for (std::size_t c = 0; c < fan.num_cones(); ++c) cones_.push_back(c);
  }

  const std::vector<std::size_t>& cones() const { return cones_; }

  // Number of candidate values of the first base coordinate of `cone`.
  u64 first_range(std::size_t cone) const {
    if (q_.B == 0) return 0;
    std::size_t rho = fan_.cone(cone).base()[0];
    const Progression& p = progs_[rho];
    return p.first > ub_[rho] ? 0 : (ub_[rho] - p.first) / p.modulus + 1;
  }

  // Scans cone `cone` restricted to first-coordinate indices [lo, hi).
  template <class Visit>
  bool run(std::size_t cone, u64 lo, u64 hi, Visit& visit) const {
    Scan<Visit> s{*this, fan_.cone(cone), visit, std::vector<u64>(fan_.num_rays(), 0), {}, {}, {}, lo, hi};
    const ConeData& cd = fan_.cone(cone);
    const std::size_t r = cd.r;
    s.base_exp.resize(r);
    for (std::size_t i = 0; i < r; ++i) s.base_exp[i] = static_cast<unsigned>(cd.a_vec[cd.base()[i]]);
    s.min_rest.assign(r + 1, 1);
    for (std::size_t i = r; i-- > 0;) {
      const Progression& p = progs_[cd.base()[i]];
      s.min_rest[i] = sat_mul(s.min_rest[i + 1], sat_pow(p.first, s.base_exp[i], q_.B), q_.B);
    }
    s.fiber_bound.assign(fan_.dim(), 0);
    return s.base(0, 1);
  }

private:
  template <class Visit>
  struct Scan {
    const Engine& e;
    const ConeData& cd;
    Visit& visit;
    std::vector<u64> x;
    std::vector<unsigned> base_exp;
    std::vector<u128> min_rest;
    std::vector<u64> fiber_bound;
    u64 lo, hi;

    bool base(std::size_t i, u128 partial) {
      if (i == cd.r) return leaf(partial);
      const std::size_t rho = cd.base()[i];
      const Progression& p = e.progs_[rho];
      const u128 B = e.q_.B;
      u64 idx = i == 0 ? lo : 0;
      for (u64 v = p.first + idx * p.modulus; v <= e.ub_[rho]; v += p.modulus, ++idx) {
        if (i == 0 && idx >= hi) break;
        u128 next = sat_mul(partial, sat_pow(v, base_exp[i], B), B);
        if (sat_mul(next, min_rest[i + 1], B) > B) break;
        x[rho] = v;
        if (!base(i + 1, next)) return false;
      }
      return true;
    }

    bool leaf(u128 height) {
      const std::size_t d = cd.fiber().size();
      for (std::size_t j = 0; j < d; ++j) {
        Int num = 1, den = 1;
        for (std::size_t i = 0; i < cd.r; ++i) {
          i64 ex = cd.e_vecs[j][i];
          if (ex > 0) num *= pow_int(to_int_u(x[cd.base()[i]]), static_cast<unsigned long>(ex));
          if (ex < 0) den *= pow_int(to_int_u(x[cd.base()[i]]), static_cast<unsigned long>(-ex));
        }
        if (e.q_.box) {
          const Rat& lam = e.q_.box->lambda[j];
          num *= lam.get_num();
          den *= lam.get_den();
        }
        Int fl = num / den; // floor for positive operands
        const std::size_t rho = cd.fiber()[j];
        u64 bound = e.ub_[rho];
        if (fits_u64(fl) && to_u64(fl) < bound) bound = to_u64(fl);
        if (bound < e.progs_[rho].first) return true;
        fiber_bound[j] = bound;
      }
      return fiber(0, static_cast<u64>(height));
    }

    bool fiber(std::size_t j, u64 height) {
      if (j == cd.fiber().size()) return emit(height);
      const std::size_t rho = cd.fiber()[j];
      const Progression& p = e.progs_[rho];
      for (u64 v = p.first; v <= fiber_bound[j]; v += p.modulus) {
        x[rho] = v;
        if (!fiber(j + 1, height)) return false;
      }
      return true;
    }

    bool emit(u64 height) {
      bool integral = true;
      for (const auto& coll : e.primitive_) {
        u64 g = 0;
        for (std::size_t rho : coll) {
          g = gcd_u64(g, x[rho]);
          if (g == 1) break;
        }
        if (g != 1) {
          integral = false;
          break;
        }
      }
      if (e.q_.coprime_only && !integral) return true;
      if (!e.q_.box)
        for (std::size_t c = 0; c < cd.index; ++c)
          if (e.in_chart_of(c, x)) return true; // owned by an earlier cone
      return visit(PointView{x, height, integral});
    }
  };

  bool in_chart_of(std::size_t cone, std::span<const u64> x) const { return in_chart(x, charts_[cone]); }

  const ToricFan& fan_;
  const CountQuery& q_;
  std::vector<Progression> progs_;
  std::vector<u64> ub_;
  std::vector<std::vector<std::size_t>> primitive_;
  std::vector<ChartTest> charts_;
  std::vector<std::size_t> cones_;
};

void check_size(const ToricFan& fan, const CountQuery& q) {
  validate_query(fan, q);
  double est = estimate_points(fan, q);
  if (est > q.max_points) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "refusing query: estimated %.3g points exceeds the cap of %.3g", est, q.max_points);
    fail(Error::Kind::Limit, buf);
  }
}

// Parallel count of points satisfying `pred`, partitioned on the first base
// coordinate. `pred` must be safe to call concurrently.
template <class Pred>
u64 count_if(const ToricFan& fan, const CountQuery& q, const Pred& pred) {
  Engine engine(fan, q);
  struct Task {
    std::size_t cone;
    u64 lo, hi;
  };
  const unsigned threads = std::max(1u, q.threads);
  std::vector<Task> tasks;
  for (std::size_t c : engine.cones()) {
    u64 range = engine.first_range(c);
    if (range == 0) continue;
    u64 chunks = threads == 1 ? 1 : std::min<u64>(range, 16 * threads);
    u64 step = (range + chunks - 1) / chunks;
    for (u64 lo = 0; lo < range; lo += step) tasks.push_back({c, lo, std::min(range, lo + step)});
  }
  std::atomic<std::size_t> next{0};
  std::atomic<u64> total{0};
  auto worker = [&] {
    u64 local = 0;
    auto visit = [&](const PointView& p) {
      if (pred(p)) ++local;
      return true;
    };
    for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();) engine.run(tasks[t].cone, tasks[t].lo, tasks[t].hi, visit);
    total += local;
  };
  if (threads == 1 || tasks.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < std::min<std::size_t>(threads, tasks.size()); ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return total.load();
}

} // namespace

void enumerate(const ToricFan& fan, const CountQuery& q, const std::function<bool(const PointView&)>& visit) {
  check_size(fan, q);
  Engine engine(fan, q);
  auto v = [&](const PointView& p) { return visit(p); };
  for (std::size_t c : engine.cones())
    if (!engine.run(c, 0, engine.first_range(c), v)) return;
}

std::vector<TorsorPoint> enumerate_points(const ToricFan& fan, const CountQuery& q) {
  std::vector<TorsorPoint> out;
  enumerate(fan, q, [&](const PointView& p) {
    TorsorPoint t;
    t.coords.assign(p.coords.begin(), p.coords.end());
    t.height = to_int_u(p.height);
    t.integral = p.integral;
    out.push_back(std::move(t));
    return true;
  });
  return out;
}

u64 count(const ToricFan& fan, const CountQuery& q) {
  check_size(fan, q);
  return count_if(fan, q, [](const PointView&) { return true; });
}

u64 count_matching(const ToricFan& fan, const CountQuery& q, const std::function<bool(const PointView&)>& pred) {
  check_size(fan, q);
  return count_if(fan, q, pred);
}

u64 rational_point_count(const ToricFan& fan, u64 B) {
  if (B == 0) return 0;
  const std::size_t n = fan.num_rays(), r = fan.picard_rank();
  if (n > 20) fail(Error::Kind::Argument, "rational_point_count supports at most 20 rays");
  // Kernel sign patterns: eps_rho = prod_k t_k^{class(D_rho)_k}, t in {+-1}^r.
  std::vector<u64> kernel;
  for (u64 t = 0; t < (u64{1} << r); ++t) {
    u64 mask = 0;
    for (std::size_t rho = 0; rho < n; ++rho) {
      i64 parity = 0;
      for (std::size_t k = 0; k < r; ++k)
        if (t >> k & 1) parity += fan.pic().class_map[rho][k];
      if (parity % 2 != 0) mask |= u64{1} << rho;
    }
    kernel.push_back(mask);
  }
  // A signed point (X, s) with X > 0 is the orbit representative iff s is the
  // smallest mask in s ^ kernel.
  std::vector<bool> representative(u64{1} << n);
  for (u64 s = 0; s < representative.size(); ++s) {
    bool least = true;
    for (u64 k : kernel)
      if ((s ^ k) < s) {
        least = false;
        break;
      }
    representative[s] = least;
  }
  CountQuery q;
  q.B = B;
  q.coprime_only = true;
  check_size(fan, q);
  u64 total = 0;
  enumerate(fan, q, [&](const PointView&) {
    for (u64 s = 0; s < representative.size(); ++s)
      if (representative[s]) ++total;
    return true;
  });
  return total;
}

u64 flat_complement_count(const ToricFan& fan, u64 B, double A, FlatMode mode, unsigned threads) {
  if (B < 3) fail(Error::Kind::Argument, "flat_complement_count needs B >= 3");
  if (A < 0) fail(Error::Kind::Argument, "flat_complement_count needs A >= 0");
  const long double threshold = std::pow(std::log(static_cast<long double>(B)), static_cast<long double>(A));
  struct ETerm {
    std::vector<Term> pos, neg;
  };
  std::vector<std::vector<ETerm>> e_terms(fan.num_cones());
  std::vector<ChartTest> charts;
  for (const auto& cd : fan.cones()) {
    for (const auto& b : cd.e_vecs) {
      ETerm t;
      for (std::size_t i = 0; i < cd.r; ++i) {
        if (b[i] > 0) t.pos.push_back({cd.base()[i], static_cast<unsigned>(b[i])});
        if (b[i] < 0) t.neg.push_back({cd.base()[i], static_cast<unsigned>(-b[i])});
      }
      e_terms[cd.index].push_back(std::move(t));
    }
    charts.push_back(chart_test(cd));
  }
  auto below = [&](std::span<const u64> x, const ETerm& t) {
    u128 a = sat_monomial(x, t.pos, kChartCap), b = sat_monomial(x, t.neg, kChartCap);
    long double num, den;
    if (a <= kChartCap && b <= kChartCap) {
      num = static_cast<long double>(a);
      den = static_cast<long double>(b);
    } else {
      num = big_monomial(x, t.pos).get_d();
      den = big_monomial(x, t.neg).get_d();
    }
    return num < threshold * den;
  };
  auto in_complement = [&](const PointView& p) {
    for (std::size_t c = 0; c < fan.num_cones(); ++c) {
      if (mode == FlatMode::ChartLocal && !in_chart(p.coords, charts[c])) continue;
      for (const auto& t : e_terms[c])
        if (below(p.coords, t)) return true;
    }
    return false;
  };
  CountQuery q;
  q.B = B;
  q.threads = threads;
  check_size(fan, q);
  return count_if(fan, q, in_complement);
}

// ---------------------------------------------------------------------------

std::string query_to_json(const CountQuery& q) {
  json doc = json::object();
  doc["B"] = q.B;
  doc["coprime_only"] = q.coprime_only;
  if (q.box) {
    json lam = json::array();
    for (const Rat& l : q.box->lambda) lam.push_back(to_string(l));
    doc["box"] = {{"cone", q.box->cone}, {"lambda", lam}};
  }
  if (q.congruence) doc["congruence"] = {{"l", q.congruence->modulus}, {"xi", q.congruence->residues}};
  if (q.divisibility) doc["divisibility"] = *q.divisibility;
  return doc.dump();
}

CountQuery query_from_json(const std::string& text) {
  CountQuery q;
  try {
    json doc = json::parse(text);
    q.B = doc.at("B").get<u64>();
    q.coprime_only = doc.value("coprime_only", false);
    if (doc.contains("box")) {
      ChartBox b;
      b.cone = doc["box"].at("cone").get<std::size_t>();
      for (const auto& l : doc["box"].at("lambda"))
        b.lambda.push_back(l.is_string() ? parse_rational(l.get<std::string>()) : Rat(to_int(l.get<i64>())));
      q.box = b;
    }
    if (doc.contains("congruence"))
      q.congruence = Congruence{doc["congruence"].at("l").get<u64>(), doc["congruence"].at("xi").get<std::vector<u64>>()};
    if (doc.contains("divisibility")) q.divisibility = doc["divisibility"].get<std::vector<u64>>();
  } catch (const json::exception& e) {
    fail(Error::Kind::Parse, std::string("malformed query: ") + e.what());
  }
  return q;
}

} // namespace toric
