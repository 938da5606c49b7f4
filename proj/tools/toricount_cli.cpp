// Command-line front end. Everything goes through the C API.

#include "toricount/toricount.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kOk = 0, kFailure = 1, kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Status to exit code; prints the library message.
int report(toric_status s) {
  if (s == TORIC_OK) return kOk;
  std::cerr << "error: " << toric_status_name(s) << ": " << toric_last_error() << "\n";
  return s == TORIC_ERR_ARGUMENT || s == TORIC_ERR_PARSE ? kUsage : kFailure;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  toric_string_free(s);
  return out;
}

unsigned default_threads() {
  if (const char* env = std::getenv("TORICOUNT_THREADS")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    std::cerr << "warning: ignoring malformed TORICOUNT_THREADS='" << env << "'\n";
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<uint64_t> parse_u64_list(const std::string& s) {
  std::vector<uint64_t> out;
  for (const auto& item : split(s, ',')) {
    try {
      std::size_t used = 0;
      if (item.empty() || item[0] == '-') throw std::invalid_argument("negative");
      out.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw UsageError("expected a comma-separated list of nonnegative integers, got '" + s + "'");
    }
  }
  return out;
}

// "l:x1,x2,..." or {"l":..,"xi":[..]}
std::pair<uint64_t, std::vector<uint64_t>> parse_congruence(const std::string& s) {
  if (!s.empty() && s[0] == '{') {
    try {
      json j = json::parse(s);
      return {j.at("l").get<uint64_t>(), j.at("xi").get<std::vector<uint64_t>>()};
    } catch (const json::exception& e) {
      throw UsageError(std::string("malformed --congruence JSON: ") + e.what());
    }
  }
  auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError("--congruence expects l:xi1,xi2,...");
  auto l = parse_u64_list(s.substr(0, colon));
  if (l.size() != 1) throw UsageError("--congruence expects a single modulus");
  return {l[0], parse_u64_list(s.substr(colon + 1))};
}

// "sigma:lambda1,lambda2,..." or {"cone":..,"lambda":[..]}
std::pair<std::size_t, std::vector<std::string>> parse_box(const std::string& s) {
  if (!s.empty() && s[0] == '{') {
    try {
      json j = json::parse(s);
      std::vector<std::string> lam;
      for (const auto& v : j.at("lambda")) lam.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      return {j.at("cone").get<std::size_t>(), lam};
    } catch (const json::exception& e) {
      throw UsageError(std::string("malformed --box JSON: ") + e.what());
    }
  }
  auto colon = s.find(':');
  if (colon == std::string::npos) throw UsageError("--box expects sigma:lambda1,lambda2,...");
  auto cone = parse_u64_list(s.substr(0, colon));
  if (cone.size() != 1) throw UsageError("--box expects a single cone index");
  return {static_cast<std::size_t>(cone[0]), split(s.substr(colon + 1), ',')};
}

struct FanHandle {
  toric_fan* fan = nullptr;
  ~FanHandle() { toric_fan_free(fan); }
};

struct QueryHandle {
  toric_query* q = nullptr;
  ~QueryHandle() { toric_query_free(q); }
};

std::string read_file(const std::string& path, bool& ok) {
  std::ifstream in(path);
  ok = static_cast<bool>(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int load_fan(const std::string& path, FanHandle& h) {
  toric_status s = toric_fan_load(path.c_str(), &h.fan);
  if (s == TORIC_OK) return kOk;
  std::cerr << "error: " << toric_status_name(s) << ": " << toric_last_error() << "\n";
  return kFailure; // unreadable or invalid fan files are validation failures
}

int write_points(const uint64_t* c, size_t n, uint64_t, int, void* user) {
  auto* os = static_cast<std::ostream*>(user);
  for (size_t i = 0; i < n; ++i) *os << (i ? "," : "") << c[i];
  *os << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"toricount: rational points of bounded height on smooth projective toric varieties"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(toric_version()));

  // fan check
  auto* fan_cmd = app.add_subcommand("fan", "fan utilities");
  fan_cmd->require_subcommand(1);
  auto* fan_check = fan_cmd->add_subcommand("check", "validate a fan file and print a JSON report");
  std::string check_path;
  fan_check->add_option("FILE", check_path, "fan file")->required();

  // const
  auto* const_cmd = app.add_subcommand("const", "exact constants of a fan");
  std::string const_what, const_fan;
  uint64_t const_p = 0, const_pmax = 10000;
  const_cmd->add_option("WHAT", const_what, "alpha | kappa | alpha0 | report")
      ->required()
      ->check(CLI::IsMember({"alpha", "kappa", "alpha0", "report"}));
  const_cmd->add_option("--fan", const_fan, "fan file")->required();
  auto* opt_p = const_cmd->add_option("--p", const_p, "prime for a single local density");
  auto* opt_pmax = const_cmd->add_option("--pmax", const_pmax, "truncation bound for the Euler product");
  opt_p->excludes(opt_pmax);

  // count
  auto* count_cmd = app.add_subcommand("count", "count torsor points of bounded height");
  std::string count_fan, congruence, box, divisibility, output = "text";
  uint64_t count_B = 0;
  bool coprime = false, points = false, rational = false;
  unsigned threads = 0;
  count_cmd->add_option("--fan", count_fan, "fan file")->required();
  count_cmd->add_option("--B", count_B, "height bound")->required();
  count_cmd->add_option("--congruence", congruence, "l:xi1,...,xin or JSON {\"l\":..,\"xi\":[..]}");
  count_cmd->add_option("--box", box, "sigma:lambda1,...,lambdad or JSON {\"cone\":..,\"lambda\":[..]}");
  count_cmd->add_option("--divisibility", divisibility, "d1,...,dn");
  count_cmd->add_flag("--coprime", coprime, "only coprime (integral) points");
  count_cmd->add_flag("--points", points, "print the points as CSV rows instead of the count");
  count_cmd->add_flag("--rational", rational, "count rational points of the open torus (sign classes)");
  count_cmd->add_option("--output", output, "text | json | csv")->check(CLI::IsMember({"text", "json", "csv"}));
  count_cmd->add_option("--threads", threads, "worker threads (default: TORICOUNT_THREADS or all cores)");

  // flat
  auto* flat_cmd = app.add_subcommand("flat", "count the complement of the flat set");
  std::string flat_fan;
  uint64_t flat_B = 0;
  double flat_A = 1;
  bool chart_local = false;
  flat_cmd->add_option("--fan", flat_fan, "fan file")->required();
  flat_cmd->add_option("--B", flat_B, "height bound (>= 3)")->required();
  flat_cmd->add_option("--A", flat_A, "exponent of log B in the threshold");
  flat_cmd->add_flag("--chart-local", chart_local, "test only the cones whose chart contains the point");
  flat_cmd->add_option("--threads", threads, "worker threads");

  // sieve
  auto* sieve_cmd = app.add_subcommand("sieve", "sieve experiments");
  sieve_cmd->require_subcommand(1);
  auto* geom = sieve_cmd->add_subcommand("geom", "points where a prime >= N divides gcd(f, g)");
  std::string sieve_fan, f_text, g_text;
  uint64_t sieve_N = 0, sieve_B = 0;
  bool sieve_coprime = false;
  geom->add_option("--fan", sieve_fan, "fan file")->required();
  geom->add_option("--f", f_text, "polynomial in X0..X{n-1}")->required();
  geom->add_option("--g", g_text, "polynomial in X0..X{n-1}")->required();
  geom->add_option("--N", sieve_N, "prime threshold")->required();
  geom->add_option("--B", sieve_B, "height bound")->required();
  geom->add_flag("--coprime", sieve_coprime, "restrict to coprime points");
  geom->add_option("--output", output, "text | json")->check(CLI::IsMember({"text", "json"}));
  geom->add_option("--threads", threads, "worker threads");
  auto* selberg = sieve_cmd->add_subcommand("selberg", "Selberg upper bound for a sieve problem");
  std::string problem_path;
  uint64_t interval = 0, primes_below = 0;
  double level = 0;
  auto* opt_problem = selberg->add_option("--problem", problem_path, "JSON problem file");
  auto* opt_interval = selberg->add_option("--interval", interval, "sift 1..n with g(p) = 1/p");
  selberg->add_option("--primes-below", primes_below, "sieving primes for --interval");
  selberg->add_option("--level", level, "sieve level D for --interval");
  opt_problem->excludes(opt_interval);

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "run an experiment plan");
  std::string plan_path;
  bool summary = false;
  exp_cmd->add_option("PLANFILE", plan_path, "plan file")->required();
  exp_cmd->add_flag("--summary", summary, "print the JSON summary instead of the CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  if (threads == 0) threads = default_threads();

  try {
    if (*fan_check) {
      bool ok = false;
      std::string text = read_file(check_path, ok);
      if (!ok) {
        std::cerr << "error: cannot read fan file '" << check_path << "'\n";
        return kFailure;
      }
      char* rep = nullptr;
      int valid = 0;
      toric_status s = toric_fan_check(text.c_str(), &rep, &valid);
      if (s != TORIC_OK) {
        std::cerr << "error: " << toric_status_name(s) << ": " << toric_last_error() << "\n";
        return kFailure;
      }
      std::string r = take(rep);
      std::cout << r << "\n";
      if (!valid) {
        for (const auto& v : json::parse(r)["violations"]) std::cerr << v["check"].get<std::string>() << ": " << v["message"].get<std::string>() << "\n";
        return kFailure;
      }
      return kOk;
    }

    if (*const_cmd) {
      FanHandle h;
      if (int rc = load_fan(const_fan, h)) return rc;
      if (const_what == "alpha") {
        char* out = nullptr;
        if (toric_status s = toric_alpha(h.fan, &out)) return report(s);
        std::cout << take(out) << "\n";
      } else if (const_what == "alpha0") {
        size_t a0 = 0;
        if (toric_status s = toric_alpha_zero(h.fan, &a0)) return report(s);
        std::cout << a0 << "\n";
      } else if (const_what == "kappa") {
        if (*opt_p) {
          char* out = nullptr;
          if (toric_status s = toric_kappa_p(h.fan, const_p, &out)) return report(s);
          std::cout << take(out) << "\n";
        } else {
          double v = 0, lo = 0, hi = 0;
          if (toric_status s = toric_kappa_truncated(h.fan, const_pmax, &v, &lo, &hi)) return report(s);
          std::printf("%.12g [%.12g, %.12g] P_max=%llu\n", v, lo, hi, static_cast<unsigned long long>(const_pmax));
        }
      } else {
        char* out = nullptr;
        if (toric_status s = toric_constants_json(h.fan, const_pmax, &out)) return report(s);
        std::cout << take(out) << "\n";
      }
      return kOk;
    }

    if (*count_cmd) {
      QueryHandle q;
      if (toric_status s = toric_query_new(count_B, &q.q)) return report(s);
      toric_query_set_coprime(q.q, coprime ? 1 : 0);
      toric_query_set_threads(q.q, threads);
      if (!congruence.empty()) {
        auto [l, xi] = parse_congruence(congruence);
        if (toric_status s = toric_query_set_congruence(q.q, l, xi.data(), xi.size())) return report(s);
      }
      if (!box.empty()) {
        auto [cone, lam] = parse_box(box);
        std::vector<const char*> ptrs;
        for (const auto& l : lam) ptrs.push_back(l.c_str());
        if (toric_status s = toric_query_set_box(q.q, cone, ptrs.data(), ptrs.size())) return report(s);
      }
      if (!divisibility.empty()) {
        auto d = parse_u64_list(divisibility);
        if (toric_status s = toric_query_set_divisibility(q.q, d.data(), d.size())) return report(s);
      }
      FanHandle h;
      if (int rc = load_fan(count_fan, h)) return rc;
      if (rational) {
        if (!congruence.empty() || !box.empty() || !divisibility.empty() || points)
          throw UsageError("--rational cannot be combined with other constraints");
        uint64_t c = 0;
        if (toric_status s = toric_rational_point_count(h.fan, count_B, &c)) return report(s);
        std::cout << c << "\n";
        return kOk;
      }
      if (points) {
        std::ostringstream rows;
        if (toric_status s = toric_enumerate(h.fan, q.q, write_points, &rows)) return report(s);
        std::cout << rows.str();
        return kOk;
      }
      if (output == "json") {
        char* out = nullptr;
        if (toric_status s = toric_count_json(h.fan, q.q, &out)) return report(s);
        std::cout << take(out) << "\n";
        return kOk;
      }
      uint64_t c = 0;
      if (toric_status s = toric_count(h.fan, q.q, &c)) return report(s);
      if (output == "csv")
        std::cout << "B,count\n" << count_B << "," << c << "\n";
      else
        std::cout << c << "\n";
      return kOk;
    }

    if (*flat_cmd) {
      FanHandle h;
      if (int rc = load_fan(flat_fan, h)) return rc;
      uint64_t c = 0;
      if (toric_status s = toric_flat_complement_count(h.fan, flat_B, flat_A, chart_local ? 1 : 0, threads, &c))
        return report(s);
      std::cout << c << "\n";
      return kOk;
    }

    if (*geom) {
      FanHandle h;
      if (int rc = load_fan(sieve_fan, h)) return rc;
      uint64_t c = 0, unc = 0;
      if (toric_status s = toric_geometric_sieve(h.fan, f_text.c_str(), g_text.c_str(), sieve_N, sieve_B,
                                                 sieve_coprime ? 1 : 0, threads, &c, &unc))
        return report(s);
      if (output == "json")
        std::cout << json{{"count", c}, {"uncertain", unc}, {"N", sieve_N}, {"B", sieve_B}}.dump() << "\n";
      else
        std::cout << c << (unc ? " (+" + std::to_string(unc) + " uncertain)" : std::string()) << "\n";
      return kOk;
    }

    if (*selberg) {
      std::string problem;
      if (!problem_path.empty()) {
        bool ok = false;
        problem = read_file(problem_path, ok);
        if (!ok) {
          std::cerr << "error: cannot read problem file '" << problem_path << "'\n";
          return kFailure;
        }
      } else {
        if (interval == 0 || primes_below == 0 || level <= 1)
          throw UsageError("selberg needs --problem FILE or --interval n --primes-below P --level D");
        json pr;
        pr["sequence"] = json::array();
        for (uint64_t i = 1; i <= interval; ++i) pr["sequence"].push_back(i);
        pr["primes"] = json::array();
        pr["density"] = json::array();
        for (uint64_t p = 2; p < primes_below; ++p) {
          bool prime = true;
          for (uint64_t k = 2; k * k <= p; ++k)
            if (p % k == 0) prime = false;
          if (!prime) continue;
          pr["primes"].push_back(p);
          pr["density"].push_back("1/" + std::to_string(p));
        }
        pr["level"] = level;
        pr["mass"] = interval;
        problem = pr.dump();
      }
      char* out = nullptr;
      if (toric_status s = toric_selberg_json(problem.c_str(), &out)) return report(s);
      std::cout << take(out) << "\n";
      return kOk;
    }

    if (*exp_cmd) {
      char *csv = nullptr, *js = nullptr;
      if (toric_status s = toric_run_plan_file(plan_path.c_str(), &csv, &js)) {
        take(csv);
        take(js);
        return s == TORIC_ERR_IO ? report(s), kFailure : report(s);
      }
      std::string c = take(csv), j = take(js);
      std::cout << (summary ? j : c);
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
