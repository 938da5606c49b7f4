#include "toricount/toricount.h"

#include "constants.hpp"
#include "fan.hpp"
#include "harness.hpp"
#include "sieve.hpp"
#include "torsor.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <new>
#include <span>

struct toric_fan {
  toric::ToricFan fan;
};

struct toric_query {
  toric::CountQuery q;
};

namespace {

using namespace toric;
using nlohmann::json;

thread_local std::string g_last_error;

toric_status status_of(Error::Kind k) {
  switch (k) {
  case Error::Kind::Parse: return TORIC_ERR_PARSE;
  case Error::Kind::InvalidFan: return TORIC_ERR_INVALID_FAN;
  case Error::Kind::Hypothesis: return TORIC_ERR_HYPOTHESIS;
  case Error::Kind::Argument: return TORIC_ERR_ARGUMENT;
  case Error::Kind::Limit: return TORIC_ERR_LIMIT;
  case Error::Kind::Io: return TORIC_ERR_IO;
  case Error::Kind::Internal: return TORIC_ERR_INTERNAL;
  }
  return TORIC_ERR_INTERNAL;
}

template <class F>
toric_status guard(F&& f) {
  try {
    g_last_error.clear();
    f();
    return TORIC_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const json::exception& e) {
    g_last_error = e.what();
    return TORIC_ERR_PARSE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown failure";
  }
  return TORIC_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  if (!p) fail(Error::Kind::Argument, std::string(what) + " must not be NULL");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::span<const i64> coords(const int64_t* x, size_t n) {
  need(x, "coordinates");
  return {reinterpret_cast<const i64*>(x), n};
}

} // namespace

extern "C" {

const char* toric_last_error(void) { return g_last_error.c_str(); }

const char* toric_status_name(toric_status s) {
  switch (s) {
  case TORIC_OK: return "ok";
  case TORIC_ERR_PARSE: return "parse error";
  case TORIC_ERR_INVALID_FAN: return "invalid fan";
  case TORIC_ERR_HYPOTHESIS: return "hypothesis violated";
  case TORIC_ERR_ARGUMENT: return "invalid argument";
  case TORIC_ERR_LIMIT: return "limit exceeded";
  case TORIC_ERR_IO: return "i/o error";
  case TORIC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* toric_version(void) { return "1.0.0"; }

void toric_string_free(char* s) { std::free(s); }

toric_status toric_fan_check(const char* text, char** report, int* ok) {
  return guard([&] {
    need(text, "fan text");
    need(report, "report");
    need(ok, "ok");
    FanReport rep = validate_fan(parse_fan(text));
    *report = dup(report_to_json(rep));
    *ok = rep.ok() ? 1 : 0;
  });
}

toric_status toric_fan_parse(const char* text, toric_fan** out) {
  return guard([&] {
    need(text, "fan text");
    need(out, "out");
    *out = new toric_fan{ToricFan(parse_fan(text))};
  });
}

toric_status toric_fan_load(const char* path, toric_fan** out) {
  return guard([&] {
    need(path, "path");
    need(out, "out");
    *out = new toric_fan{load_fan_file(path)};
  });
}

void toric_fan_free(toric_fan* fan) { delete fan; }

size_t toric_fan_dim(const toric_fan* fan) { return fan ? fan->fan.dim() : 0; }
size_t toric_fan_num_rays(const toric_fan* fan) { return fan ? fan->fan.num_rays() : 0; }
size_t toric_fan_num_cones(const toric_fan* fan) { return fan ? fan->fan.num_cones() : 0; }
size_t toric_fan_picard_rank(const toric_fan* fan) { return fan ? fan->fan.picard_rank() : 0; }

toric_status toric_fan_serialize(const toric_fan* fan, char** out) {
  return guard([&] {
    need(fan, "fan");
    need(out, "out");
    *out = dup(serialize_fan(fan->fan.fan()));
  });
}

toric_status toric_fan_cone_json(const toric_fan* fan, size_t cone, char** out) {
  return guard([&] {
    need(fan, "fan");
    need(out, "out");
    if (cone >= fan->fan.num_cones()) fail(Error::Kind::Argument, "cone index out of range");
    const ConeData& cd = fan->fan.cone(cone);
    json doc = {{"index", cd.index}, {"admissible_order", cd.admissible_order}, {"m", cd.m_vec},
                {"a", cd.a_vec},     {"e", cd.e_vecs},                       {"f", cd.f_vecs},
                {"class_map", fan->fan.pic().class_map}};
    *out = dup(doc.dump());
  });
}

toric_status toric_height(const toric_fan* fan, const int64_t* x, size_t n, char** out) {
  return guard([&] {
    need(fan, "fan");
    need(out, "out");
    *out = dup(to_string(toric::toric_height(fan->fan, coords(x, n))));
  });
}

toric_status toric_is_integral(const toric_fan* fan, const int64_t* x, size_t n, int* out) {
  return guard([&] {
    need(fan, "fan");
    need(out, "out");
    *out = is_cox_integral(fan->fan, coords(x, n)) ? 1 : 0;
  });
}

toric_status toric_which_cone(const toric_fan* fan, const int64_t* x, size_t n, size_t* out) {
  return guard([&] {
    need(fan, "fan");
    need(out, "out");
    *out = toric::which_cone(fan->fan, coords(x, n));
  });
}

toric_status toric_query_new(uint64_t B, toric_query** out) {
  return guard([&] {
    need(out, "out");
    *out = new toric_query{};
    (*out)->q.B = B;
  });
}

toric_status toric_query_from_json(const char* text, toric_query** out) {
  return guard([&] {
    need(text, "query text");
    need(out, "out");
    *out = new toric_query{query_from_json(text)};
  });
}

void toric_query_free(toric_query* q) { delete q; }

toric_status toric_query_set_box(toric_query* q, size_t cone, const char* const* lambda, size_t d) {
  return guard([&] {
    need(q, "query");
    need(lambda, "lambda");
    ChartBox box;
    box.cone = cone;
    for (size_t i = 0; i < d; ++i) {
      need(lambda[i], "lambda entry");
      box.lambda.push_back(parse_rational(lambda[i]));
    }
    q->q.box = box;
  });
}

toric_status toric_query_set_congruence(toric_query* q, uint64_t l, const uint64_t* xi, size_t n) {
  return guard([&] {
    need(q, "query");
    need(xi, "residues");
    if (l == 0) fail(Error::Kind::Argument, "congruence modulus must be positive");
    q->q.congruence = Congruence{l, std::vector<u64>(xi, xi + n)};
  });
}

toric_status toric_query_set_divisibility(toric_query* q, const uint64_t* d, size_t n) {
  return guard([&] {
    need(q, "query");
    need(d, "divisibility");
    for (size_t i = 0; i < n; ++i)
      if (d[i] == 0) fail(Error::Kind::Argument, "divisibility entries must be positive");
    q->q.divisibility = std::vector<u64>(d, d + n);
  });
}

toric_status toric_query_set_coprime(toric_query* q, int coprime_only) {
  return guard([&] {
    need(q, "query");
    q->q.coprime_only = coprime_only != 0;
  });
}

toric_status toric_query_set_threads(toric_query* q, unsigned threads) {
  return guard([&] {
    need(q, "query");
    q->q.threads = threads == 0 ? 1 : threads;
  });
}

toric_status toric_query_set_max_points(toric_query* q, double cap) {
  return guard([&] {
    need(q, "query");
    if (!(cap > 0)) fail(Error::Kind::Argument, "cap must be positive");
    q->q.max_points = cap;
  });
}

toric_status toric_count(const toric_fan* fan, const toric_query* q, uint64_t* out) {
  return guard([&] {
    need(fan, "fan");
    need(q, "query");
    need(out, "out");
    *out = count(fan->fan, q->q);
  });
}

toric_status toric_count_json(const toric_fan* fan, const toric_query* q, char** out) {
  return guard([&] {
    need(fan, "fan");
    need(q, "query");
    need(out, "out");
    auto t0 = std::chrono::steady_clock::now();
    u64 c = count(fan->fan, q->q);
    auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    json doc = {{"query", json::parse(query_to_json(q->q))}, {"count", c}, {"wall_time_ms", ms}};
    *out = dup(doc.dump());
  });
}

toric_status toric_enumerate(const toric_fan* fan, const toric_query* q, toric_point_cb cb, void* user) {
  return guard([&] {
    need(fan, "fan");
    need(q, "query");
    need(reinterpret_cast<const void*>(cb), "callback");
    enumerate(fan->fan, q->q, [&](const PointView& p) {
      return cb(p.coords.data(), p.coords.size(), p.height, p.integral ? 1 : 0, user) == 0;
    });
  });
}

toric_status toric_rational_point_count(const toric_fan* fan, uint64_t B, uint64_t* out) {
  return guard([&] {
    need(fan, "fan");
    need(out, "out");
    *out = rational_point_count(fan->fan, B);
  });
}

toric_status toric_flat_complement_count(const toric_fan* fan, uint64_t B, double A, int chart_local, unsigned threads,
                                         uint64_t* out) {
  return guard([&] {
    need(fan, "fan");
    need(out, "out");
    *out = flat_complement_count(fan->fan, B, A, chart_local ? FlatMode::ChartLocal : FlatMode::AllCones,
                                 threads == 0 ? 1 : threads);
  });
}

toric_status toric_alpha(const toric_fan* fan, char** out) {
  return guard([&] {
    need(fan, "fan");
    need(out, "out");
    *out = dup(to_string(alpha_constant(fan->fan)));
  });
}

toric_status toric_alpha_zero(const toric_fan* fan, size_t* out) {
  return guard([&] {
    need(fan, "fan");
    need(out, "out");
    *out = alpha_zero(fan->fan);
  });
}

toric_status toric_kappa_p(const toric_fan* fan, uint64_t p, char** out) {
  return guard([&] {
    need(fan, "fan");
    need(out, "out");
    *out = dup(to_string(local_density_kappa(fan->fan, p)));
  });
}

toric_status toric_kappa_truncated(const toric_fan* fan, uint64_t pmax, double* value, double* lo, double* hi) {
  return guard([&] {
    need(fan, "fan");
    KappaProduct k = kappa_truncated(fan->fan, pmax);
    if (value) *value = k.value();
    if (lo) *lo = Rat(k.product * k.tail_lo).get_d();
    if (hi) *hi = Rat(k.product * k.tail_hi).get_d();
  });
}

toric_status toric_kappa_level(const toric_fan* fan, uint64_t l, uint64_t pmax, char** inv_power, double* value) {
  return guard([&] {
    need(fan, "fan");
    KappaLevel k = kappa_level(fan->fan, l, pmax);
    if (inv_power) *inv_power = dup(to_string(k.inv_level_power));
    if (value) *value = k.value();
  });
}

toric_status toric_mobius(const toric_fan* fan, const uint64_t* d, size_t n, int64_t* out) {
  return guard([&] {
    need(fan, "fan");
    need(d, "d");
    need(out, "out");
    *out = mobius_muX(fan->fan, std::vector<u64>(d, d + n));
  });
}

toric_status toric_constants_json(const toric_fan* fan, uint64_t pmax, char** out) {
  return guard([&] {
    need(fan, "fan");
    need(out, "out");
    *out = dup(constants_report_json(fan->fan, pmax));
  });
}

toric_status toric_selberg_json(const char* problem, char** out) {
  return guard([&] {
    need(problem, "problem");
    need(out, "out");
    json doc = json::parse(problem);
    SieveProblem pr;
    for (const auto& a : doc.at("sequence"))
      pr.sequence.push_back(a.is_string() ? Int(a.get<std::string>()) : to_int(a.get<i64>()));
    pr.primes = doc.at("primes").get<std::vector<u64>>();
    for (const auto& g : doc.at("density"))
      pr.density.push_back(g.is_string() ? parse_rational(g.get<std::string>()) : Rat(to_int(g.get<i64>())));
    pr.level = doc.at("level").get<double>();
    const json& m = doc.at("mass");
    pr.mass = m.is_string() ? parse_rational(m.get<std::string>()) : Rat(to_int(m.get<i64>()));
    SelbergResult r = selberg_bound(pr);
    json res = {{"bound", to_string(r.bound)},         {"bound_decimal", format_double(r.bound.get_d())},
                {"J", to_string(r.J)},                 {"main_term", to_string(r.main_term)},
                {"remainder", to_string(r.remainder)}, {"quadratic", to_string(r.quadratic)},
                {"sifted", r.sifted},                  {"divisors", r.divisors}};
    *out = dup(res.dump());
  });
}

toric_status toric_geometric_sieve(const toric_fan* fan, const char* f, const char* g, uint64_t N, uint64_t B,
                                   int coprime_only, unsigned threads, uint64_t* count, uint64_t* uncertain) {
  return guard([&] {
    need(fan, "fan");
    need(f, "f");
    need(g, "g");
    need(count, "count");
    const std::size_t n = fan->fan.num_rays();
    GeomSieveResult r = geometric_sieve_count(fan->fan, parse_polynomial(f, n), parse_polynomial(g, n), N, B,
                                              coprime_only != 0, threads == 0 ? 1 : threads);
    *count = r.count;
    if (uncertain) *uncertain = r.uncertain;
  });
}

toric_status toric_subvariety_count(const toric_fan* fan, const char* phi, uint64_t B, unsigned threads, uint64_t* out) {
  return guard([&] {
    need(fan, "fan");
    need(phi, "phi");
    need(out, "out");
    *out = subvariety_count(fan->fan, parse_polynomial(phi, fan->fan.num_rays()), B, threads == 0 ? 1 : threads);
  });
}

toric_status toric_prime_section_count(const toric_fan* fan, const char* s, uint64_t B, unsigned threads,
                                       uint64_t* out) {
  return guard([&] {
    need(fan, "fan");
    need(s, "s");
    need(out, "out");
    *out = prime_section_count(fan->fan, parse_polynomial(s, fan->fan.num_rays()), B, threads == 0 ? 1 : threads);
  });
}

toric_status toric_run_plan_file(const char* path, char** csv, char** summary) {
  return guard([&] {
    need(path, "path");
    ExperimentResult r = run_plan_file(path);
    if (csv) *csv = dup(r.csv);
    if (summary) *summary = dup(r.summary_json);
  });
}

} // extern "C"
