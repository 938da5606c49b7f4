#include "harness.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace toric {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "NA";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

namespace {

ExperimentKind parse_kind(const std::string& k) {
  if (k == "manin") return ExperimentKind::Manin;
  if (k == "equidist") return ExperimentKind::Equidist;
  if (k == "flat_complement") return ExperimentKind::FlatComplement;
  if (k == "geom_sieve") return ExperimentKind::GeomSieve;
  if (k == "subvariety") return ExperimentKind::Subvariety;
  if (k == "prime_section") return ExperimentKind::PrimeSection;
  fail(Error::Kind::Parse, "unknown experiment kind '" + k + "'");
}

const char* kind_name(ExperimentKind k) {
  switch (k) {
  case ExperimentKind::Manin: return "manin";
  case ExperimentKind::Equidist: return "equidist";
  case ExperimentKind::FlatComplement: return "flat_complement";
  case ExperimentKind::GeomSieve: return "geom_sieve";
  case ExperimentKind::Subvariety: return "subvariety";
  case ExperimentKind::PrimeSection: return "prime_section";
  }
  return "?";
}

Rat rat_field(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return Rat(to_int(v.get<i64>()));
  fail(Error::Kind::Parse, "expected an integer or a \"p/q\" string");
}

double log_b(u64 B) { return std::log(static_cast<double>(B)); }

double manin_curve(u64 B, std::size_t r) { return static_cast<double>(B) * std::pow(log_b(B), static_cast<double>(r) - 1); }

std::string class_label(const ResidueClass& c) {
  std::string s = std::to_string(c.l) + ":";
  for (std::size_t i = 0; i < c.xi.size(); ++i) s += (i ? "," : "") + std::to_string(c.xi[i]);
  return s;
}

} // namespace

ExperimentPlan parse_plan(const std::string& text, const std::string& base_dir) {
  ExperimentPlan plan;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(Error::Kind::Parse, std::string("plan is not valid JSON: ") + e.what());
  }
  try {
    static const std::set<std::string> known{"fan", "kind", "B", "params", "output", "threads"};
    for (auto it = doc.begin(); it != doc.end(); ++it)
      if (!known.count(it.key())) fail(Error::Kind::Parse, "unknown plan key '" + it.key() + "'");
    std::filesystem::path fp = doc.at("fan").get<std::string>();
    plan.fan_path = fp.is_absolute() ? fp.string() : (std::filesystem::path(base_dir) / fp).string();
    plan.kind = parse_kind(doc.at("kind").get<std::string>());
    plan.schedule = doc.at("B").get<std::vector<u64>>();
    plan.threads = doc.value("threads", 1u);
    if (doc.contains("output")) {
      std::filesystem::path op = doc["output"].get<std::string>();
      plan.output = op.is_absolute() ? op.string() : (std::filesystem::path(base_dir) / op).string();
    }
    const json params = doc.value("params", json::object());
    if (params.contains("cone")) plan.cone = params["cone"].get<std::size_t>();
    if (params.contains("lambda"))
      for (const auto& l : params["lambda"]) plan.lambda.push_back(rat_field(l));
    if (params.contains("classes"))
      for (const auto& c : params["classes"]) plan.classes.push_back({c.at("l").get<u64>(), c.at("xi").get<std::vector<u64>>()});
    plan.fit = params.value("fit", plan.kind == ExperimentKind::Manin || plan.kind == ExperimentKind::Equidist);
    plan.p_max = params.value("P_max", plan.p_max);
    plan.A = params.value("A", plan.A);
    if (params.contains("mode")) {
      std::string m = params["mode"].get<std::string>();
      if (m == "all_cones")
        plan.flat_mode = FlatMode::AllCones;
      else if (m == "chart_local")
        plan.flat_mode = FlatMode::ChartLocal;
      else
        fail(Error::Kind::Parse, "flat complement mode must be all_cones or chart_local");
    }
    plan.f = params.value("f", "");
    plan.g = params.value("g", "");
    if (params.contains("N")) plan.N = params["N"].get<std::vector<u64>>();
    if (params.contains("phi")) {
      if (params["phi"].is_string())
        plan.phi = {params["phi"].get<std::string>()};
      else
        plan.phi = params["phi"].get<std::vector<std::string>>();
    }
    plan.s = params.value("s", "");
    plan.theta = params.value("theta", plan.theta);
    plan.coprime_only = params.value("coprime_only", false);
  } catch (const json::exception& e) {
    fail(Error::Kind::Parse, std::string("malformed plan: ") + e.what());
  }
  if (plan.schedule.empty()) fail(Error::Kind::Argument, "B schedule is empty");
  for (std::size_t i = 1; i < plan.schedule.size(); ++i)
    if (plan.schedule[i] <= plan.schedule[i - 1]) fail(Error::Kind::Argument, "B schedule must be strictly increasing");
  if (plan.threads == 0) plan.threads = 1;
  switch (plan.kind) {
  case ExperimentKind::GeomSieve:
    if (plan.f.empty() || plan.g.empty() || plan.N.empty()) fail(Error::Kind::Argument, "geom_sieve needs f, g and N");
    break;
  case ExperimentKind::Subvariety:
    if (plan.phi.empty()) fail(Error::Kind::Argument, "subvariety needs phi");
    break;
  case ExperimentKind::PrimeSection:
    if (plan.s.empty()) fail(Error::Kind::Argument, "prime_section needs s");
    break;
  case ExperimentKind::FlatComplement:
    if (plan.schedule.front() < 3) fail(Error::Kind::Argument, "flat_complement needs B >= 3");
    break;
  case ExperimentKind::Equidist:
    if (plan.classes.empty()) fail(Error::Kind::Argument, "equidist needs at least one (l, xi) class");
    break;
  case ExperimentKind::Manin: break;
  }
  if (plan.fit && (plan.kind == ExperimentKind::Manin || plan.kind == ExperimentKind::Equidist) && plan.schedule.size() < 3)
    fail(Error::Kind::Argument, "a leading-constant fit needs at least 3 height bounds (set params.fit = false)");
  return plan;
}

FitReport fit_leading_constant(const std::vector<std::pair<u64, u64>>& counts, std::size_t r, double predicted) {
  if (counts.size() < 3) fail(Error::Kind::Argument, "a leading-constant fit needs at least 3 points");
  long double s11 = 0, s12 = 0, s22 = 0, t1 = 0, t2 = 0;
  std::vector<std::array<long double, 3>> rows;
  for (auto [B, c] : counts) {
    long double L = std::log(static_cast<long double>(B));
    long double x1 = std::pow(L, static_cast<long double>(r) - 1), x2 = std::pow(L, static_cast<long double>(r) - 2);
    long double y = static_cast<long double>(c) / static_cast<long double>(B);
    rows.push_back({x1, x2, y});
    s11 += x1 * x1;
    s12 += x1 * x2;
    s22 += x2 * x2;
    t1 += x1 * y;
    t2 += x2 * y;
  }
  long double det = s11 * s22 - s12 * s12;
  if (det == 0) fail(Error::Kind::Argument, "degenerate fit design");
  FitReport f;
  f.c1 = static_cast<double>((t1 * s22 - t2 * s12) / det);
  f.c2 = static_cast<double>((s11 * t2 - s12 * t1) / det);
  f.predicted = predicted;
  f.deviation = predicted != 0 ? std::abs(f.c1 - predicted) / predicted : std::numeric_limits<double>::quiet_NaN();
  long double ss = 0;
  for (const auto& row : rows) {
    long double e = row[2] - f.c1 * row[0] - f.c2 * row[1];
    ss += e * e;
  }
  f.residual = static_cast<double>(std::sqrt(ss / rows.size()));
  return f;
}

bool class_is_admissible(const ToricFan& fan, const ResidueClass& cls) {
  if (cls.xi.size() != fan.num_rays()) fail(Error::Kind::Argument, "residue vector has the wrong length");
  u64 l = cls.l;
  for (u64 p = 2; p * p <= l || (p <= l && l > 1); ++p) {
    if (l % p) continue;
    while (l % p == 0) l /= p;
    RayMask zero = 0;
    for (std::size_t rho = 0; rho < cls.xi.size(); ++rho)
      if (cls.xi[rho] % p == 0) zero |= RayMask{1} << rho;
    if (!fan.spans_cone(zero)) return false;
  }
  return true;
}

double equidist_constant(const ToricFan& fan, const ResidueClass& cls, const std::vector<Rat>& lambda, u64 p_max) {
  if (!class_is_admissible(fan, cls)) return 0;
  Rat vol = 1;
  for (const Rat& l : lambda) vol *= l;
  return kappa_level(fan, cls.l, p_max).value() * vol.get_d() * alpha_constant(fan).get_d();
}

ExperimentResult run_experiment(const ToricFan& fan, const ExperimentPlan& plan) {
  ExperimentResult res;
  const std::size_t r = fan.picard_rank();
  json summary;
  summary["kind"] = kind_name(plan.kind);
  summary["fan"] = fan.fan().name;
  summary["schedule"] = plan.schedule;
  Rat alpha = alpha_constant(fan);
  summary["constants"]["alpha"] = to_string(alpha);
  summary["constants"]["alpha_decimal"] = format_double(alpha.get_d());
  summary["constants"]["picard_rank"] = r;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto ratio = [&](u64 c, double ref) { return ref > 0 ? static_cast<double>(c) / ref : nan; };

  switch (plan.kind) {
  case ExperimentKind::Manin:
  case ExperimentKind::Equidist: {
    KappaProduct kp = kappa_truncated(fan, plan.p_max);
    summary["constants"]["kappa"] = {{"value", format_double(kp.value())},
                                     {"P_max", plan.p_max},
                                     {"tail_lo", to_string(kp.tail_lo)},
                                     {"tail_hi", to_string(kp.tail_hi)}};
    std::vector<Rat> lambda = plan.lambda.empty() ? std::vector<Rat>(fan.dim(), Rat(1)) : plan.lambda;
    if (lambda.size() != fan.dim()) fail(Error::Kind::Argument, "lambda needs one entry per fiber coordinate");
    json lam = json::array();
    for (const Rat& l : lambda) lam.push_back(to_string(l));
    summary["constants"]["lambda"] = lam;
    std::vector<ResidueClass> classes = plan.classes;
    std::optional<std::size_t> cone = plan.cone;
    if (plan.kind == ExperimentKind::Equidist && !cone) cone = 0;
    if (plan.kind == ExperimentKind::Manin) classes = {ResidueClass{1, std::vector<u64>(fan.num_rays(), 0)}};
    // Leading constants per class.
    std::vector<double> consts;
    json cls_json = json::array();
    for (const auto& c : classes) {
      double k;
      if (plan.kind == ExperimentKind::Manin) {
        Rat vol = 1;
        for (const Rat& l : lambda) vol *= l;
        k = alpha.get_d() * kp.value() * (cone ? vol.get_d() : static_cast<double>(fan.num_cones()));
      } else {
        k = equidist_constant(fan, c, lambda, plan.p_max);
      }
      consts.push_back(k);
      if (plan.kind == ExperimentKind::Equidist) {
        KappaLevel kl = kappa_level(fan, c.l, plan.p_max);
        cls_json.push_back({{"class", class_label(c)},
                            {"admissible", class_is_admissible(fan, c)},
                            {"inv_level_power", to_string(kl.inv_level_power)},
                            {"kappa_level", format_double(kl.value())},
                            {"leading_constant", format_double(k)}});
      }
    }
    if (plan.kind == ExperimentKind::Equidist) summary["classes"] = cls_json;
    double total_const = 0;
    for (double k : consts) total_const += k;
    summary["predicted_leading_constant"] = format_double(total_const);
    std::vector<std::pair<u64, u64>> sums;
    for (u64 B : plan.schedule) {
      u64 sum = 0;
      for (std::size_t i = 0; i < classes.size(); ++i) {
        CountQuery q;
        q.B = B;
        q.coprime_only = true;
        q.threads = plan.threads;
        if (cone) q.box = ChartBox{*cone, lambda};
        if (classes[i].l > 1) q.congruence = Congruence{classes[i].l, classes[i].xi};
        u64 c = count(fan, q);
        sum += c;
        if (plan.kind == ExperimentKind::Equidist) {
          double ref = consts[i] * manin_curve(B, r);
          res.rows.push_back({B, class_label(classes[i]), c, ref, ratio(c, ref)});
        }
      }
      double ref = total_const * manin_curve(B, r);
      std::string label = plan.kind == ExperimentKind::Manin ? (cone ? "cone:" + std::to_string(*cone) : "all") : "sum";
      res.rows.push_back({B, label, sum, ref, ratio(sum, ref)});
      sums.emplace_back(B, sum);
    }
    if (plan.fit) res.fit = fit_leading_constant(sums, r, total_const);
    break;
  }
  case ExperimentKind::FlatComplement: {
    summary["constants"]["A"] = format_double(plan.A);
    summary["constants"]["mode"] = plan.flat_mode == FlatMode::AllCones ? "all_cones" : "chart_local";
    double lo = std::numeric_limits<double>::infinity(), hi = 0;
    for (u64 B : plan.schedule) {
      u64 c = flat_complement_count(fan, B, plan.A, plan.flat_mode, plan.threads);
      double L = log_b(B);
      double ref = static_cast<double>(B) * std::pow(L, static_cast<double>(r) - 2) * std::log(L);
      double q = ratio(c, ref);
      res.rows.push_back({B, "A=" + format_double(plan.A), c, ref, q});
      if (!std::isnan(q)) {
        lo = std::min(lo, q);
        hi = std::max(hi, q);
      }
    }
    summary["ratio_spread"] = format_double(lo > 0 && hi > 0 ? hi / lo : nan);
    break;
  }
  case ExperimentKind::GeomSieve: {
    Polynomial f = parse_polynomial(plan.f, fan.num_rays()), g = parse_polynomial(plan.g, fan.num_rays());
    summary["constants"]["f"] = f.to_string();
    summary["constants"]["g"] = g.to_string();
    bool monotone = true, enveloped = true;
    json env = json::array();
    for (u64 B : plan.schedule) {
      double L = log_b(B);
      std::optional<double> C;
      u64 prev = std::numeric_limits<u64>::max();
      for (u64 N : plan.N) {
        GeomSieveResult gs = geometric_sieve_count(fan, f, g, N, B, plan.coprime_only, plan.threads);
        double ref = static_cast<double>(B) * L / (static_cast<double>(N) * std::log(static_cast<double>(N))) +
                     static_cast<double>(B) * std::log(L);
        double q = ratio(gs.count, ref);
        res.rows.push_back({B, "N=" + std::to_string(N), gs.count, ref, q});
        if (gs.count > prev) monotone = false;
        prev = gs.count;
        if (!C) {
          C = q;
        } else if (q > *C) {
          enveloped = false;
        }
        env.push_back({{"B", B}, {"N", N}, {"uncertain", gs.uncertain}, {"total", gs.total}});
      }
      summary["envelope_constant"][std::to_string(B)] = format_double(C.value_or(nan));
    }
    summary["nonincreasing_in_N"] = monotone;
    summary["within_envelope"] = enveloped;
    summary["details"] = env;
    break;
  }
  case ExperimentKind::Subvariety: {
    std::vector<Polynomial> phis;
    json list = json::array();
    for (const auto& s : plan.phi) {
      phis.push_back(parse_polynomial(s, fan.num_rays()));
      list.push_back(phis.back().to_string());
    }
    summary["constants"]["phi"] = list;
    for (u64 B : plan.schedule) {
      double L = log_b(B);
      double ref = static_cast<double>(B) * std::pow(L, std::max(static_cast<double>(r) - 2, 0.0)) * std::log(L);
      for (std::size_t i = 0; i < phis.size(); ++i) {
        u64 c = subvariety_count(fan, phis[i], B, plan.threads);
        res.rows.push_back({B, "phi" + std::to_string(i), c, ref, ratio(c, ref)});
      }
    }
    break;
  }
  case ExperimentKind::PrimeSection: {
    Polynomial s = parse_polynomial(plan.s, fan.num_rays());
    summary["constants"]["s"] = s.to_string();
    summary["constants"]["theta"] = format_double(plan.theta);
    for (u64 B : plan.schedule) {
      double L = log_b(B);
      double ref = manin_curve(B, r) / std::pow(std::log(L), plan.theta);
      u64 c = prime_section_count(fan, s, B, plan.threads);
      res.rows.push_back({B, "theta=" + format_double(plan.theta), c, ref, ratio(c, ref)});
    }
    break;
  }
  }

  std::ostringstream csv;
  csv << "B,param,count,reference_curve_value,ratio\n";
  json rows = json::array();
  for (const auto& row : res.rows) {
    csv << row.B << "," << row.param << "," << row.count << "," << format_double(row.reference) << ","
        << format_double(row.ratio) << "\n";
    rows.push_back({{"B", row.B},
                    {"param", row.param},
                    {"count", row.count},
                    {"reference", format_double(row.reference)},
                    {"ratio", format_double(row.ratio)}});
  }
  summary["rows"] = rows;
  if (res.fit) {
    summary["fit"] = {{"C1", format_double(res.fit->c1)},
                      {"C2", format_double(res.fit->c2)},
                      {"predicted", format_double(res.fit->predicted)},
                      {"deviation", format_double(res.fit->deviation)},
                      {"residual", format_double(res.fit->residual)}};
  }
  res.csv = csv.str();
  res.summary_json = summary.dump(2) + "\n";
  return res;
}

ExperimentResult run_plan_text(const std::string& text, const std::string& base_dir) {
  ExperimentPlan plan = parse_plan(text, base_dir);
  ToricFan fan = load_fan_file(plan.fan_path);
  ExperimentResult res = run_experiment(fan, plan);
  if (!plan.output.empty()) {
    std::ofstream csv(plan.output + ".csv"), js(plan.output + ".json");
    if (!csv || !js) fail(Error::Kind::Io, "cannot write experiment output '" + plan.output + "'");
    csv << res.csv;
    js << res.summary_json;
  }
  return res;
}

ExperimentResult run_plan_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Error::Kind::Io, "cannot read plan file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string dir = std::filesystem::path(path).parent_path().string();
  return run_plan_text(ss.str(), dir.empty() ? "." : dir);
}

} // namespace toric
