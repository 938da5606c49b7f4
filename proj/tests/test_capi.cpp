// Exercises the C API only; no core headers.
#include "toricount/toricount.h"

#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#ifndef TORICOUNT_DATA_DIR
#define TORICOUNT_DATA_DIR "data"
#endif

namespace {

std::string fan_file(const char* name) { return std::string(TORICOUNT_DATA_DIR) + "/fans/" + name + ".json"; }

std::string take(char* s) {
  std::string out = s ? s : "";
  toric_string_free(s);
  return out;
}

struct Fan {
  toric_fan* f = nullptr;
  explicit Fan(const char* name) { REQUIRE(toric_fan_load(fan_file(name).c_str(), &f) == TORIC_OK); }
  ~Fan() { toric_fan_free(f); }
};

struct Query {
  toric_query* q = nullptr;
  explicit Query(uint64_t B) { REQUIRE(toric_query_new(B, &q) == TORIC_OK); }
  ~Query() { toric_query_free(q); }
};

} // namespace

TEST_CASE("capi: fan basics") {
  Fan p2("p2");
  CHECK(toric_fan_dim(p2.f) == 2);
  CHECK(toric_fan_num_rays(p2.f) == 3);
  CHECK(toric_fan_num_cones(p2.f) == 3);
  CHECK(toric_fan_picard_rank(p2.f) == 1);

  char* s = nullptr;
  REQUIRE(toric_fan_serialize(p2.f, &s) == TORIC_OK);
  std::string text = take(s);
  toric_fan* again = nullptr;
  REQUIRE(toric_fan_parse(text.c_str(), &again) == TORIC_OK);
  CHECK(toric_fan_num_rays(again) == 3);
  toric_fan_free(again);

  REQUIRE(toric_fan_cone_json(p2.f, 0, &s) == TORIC_OK);
  CHECK(take(s).find("\"a\"") != std::string::npos);
  CHECK(toric_fan_cone_json(p2.f, 7, &s) == TORIC_ERR_ARGUMENT);
}

TEST_CASE("capi: errors are codes, never exceptions") {
  toric_fan* f = nullptr;
  CHECK(toric_fan_parse("{not json", &f) == TORIC_ERR_PARSE);
  CHECK(f == nullptr);
  CHECK(std::strlen(toric_last_error()) > 0);
  CHECK(toric_fan_load((std::string(TORICOUNT_DATA_DIR) + "/bad/incomplete.json").c_str(), &f) ==
        TORIC_ERR_INVALID_FAN);
  CHECK(std::string(toric_last_error()).find("facet") != std::string::npos);
  CHECK(toric_fan_load("/nonexistent/fan.json", &f) == TORIC_ERR_IO);
  CHECK(toric_fan_dim(nullptr) == 0);
  CHECK(toric_count(nullptr, nullptr, nullptr) == TORIC_ERR_ARGUMENT);
  CHECK(std::string(toric_status_name(TORIC_ERR_LIMIT)) == "limit exceeded");

  char* rep = nullptr;
  int ok = 1;
  REQUIRE(toric_fan_check("{\"rays\":[[1]],\"max_cones\":[[0]]}", &rep, &ok) == TORIC_OK);
  CHECK(ok == 0);
  CHECK(take(rep).find("violations") != std::string::npos);
}

TEST_CASE("capi: height, integrality, chart") {
  Fan p1("p1");
  int64_t x[2] = {3, 5};
  char* h = nullptr;
  REQUIRE(toric_height(p1.f, x, 2, &h) == TORIC_OK);
  CHECK(take(h) == "25");
  int integral = 0;
  REQUIRE(toric_is_integral(p1.f, x, 2, &integral) == TORIC_OK);
  CHECK(integral == 1);
  int64_t y[2] = {2, 4};
  REQUIRE(toric_is_integral(p1.f, y, 2, &integral) == TORIC_OK);
  CHECK(integral == 0);
  int64_t bad[3] = {1, 1, 1};
  CHECK(toric_height(p1.f, bad, 3, &h) == TORIC_ERR_ARGUMENT);
}

TEST_CASE("capi: counting") {
  Fan p1("p1");
  {
    Query q(4);
    toric_query_set_coprime(q.q, 1);
    uint64_t c = 0;
    REQUIRE(toric_count(p1.f, q.q, &c) == TORIC_OK);
    CHECK(c == 3);
  }
  {
    Query q(10000);
    toric_query_set_coprime(q.q, 1);
    toric_query_set_threads(q.q, 3);
    uint64_t c = 0;
    REQUIRE(toric_count(p1.f, q.q, &c) == TORIC_OK);
    CHECK(c == 6087);
  }
  {
    // enumerate agrees with count and can stop early
    Query q(50);
    uint64_t c = 0, seen = 0;
    REQUIRE(toric_count(p1.f, q.q, &c) == TORIC_OK);
    auto cb = [](const uint64_t*, size_t n, uint64_t height, int, void* user) -> int {
      CHECK(n == 2);
      CHECK(height <= 50);
      ++*static_cast<uint64_t*>(user);
      return 0;
    };
    REQUIRE(toric_enumerate(p1.f, q.q, cb, &seen) == TORIC_OK);
    CHECK(seen == c);
    uint64_t stop = 0;
    auto first = [](const uint64_t*, size_t, uint64_t, int, void* user) -> int {
      ++*static_cast<uint64_t*>(user);
      return 1;
    };
    REQUIRE(toric_enumerate(p1.f, q.q, first, &stop) == TORIC_OK);
    CHECK(stop == 1);
  }
  {
    Query q(100);
    const uint64_t xi[2] = {1, 0};
    CHECK(toric_query_set_congruence(q.q, 0, xi, 2) == TORIC_ERR_ARGUMENT);
    REQUIRE(toric_query_set_congruence(q.q, 2, xi, 2) == TORIC_OK);
    const char* lam[1] = {"1/2"};
    REQUIRE(toric_query_set_box(q.q, 0, lam, 1) == TORIC_OK);
    char* js = nullptr;
    REQUIRE(toric_count_json(p1.f, q.q, &js) == TORIC_OK);
    std::string rec = take(js);
    CHECK(rec.find("\"count\"") != std::string::npos);
    CHECK(rec.find("\"wall_time_ms\"") != std::string::npos);
  }
  {
    Query q(1000);
    toric_query_set_max_points(q.q, 10);
    uint64_t c = 0;
    CHECK(toric_count(p1.f, q.q, &c) == TORIC_ERR_LIMIT);
  }
  {
    toric_query* q = nullptr;
    REQUIRE(toric_query_from_json("{\"B\": 4, \"coprime_only\": true}", &q) == TORIC_OK);
    uint64_t c = 0;
    REQUIRE(toric_count(p1.f, q, &c) == TORIC_OK);
    CHECK(c == 3);
    toric_query_free(q);
  }
}

TEST_CASE("capi: constants") {
  Fan p2("p2");
  char* s = nullptr;
  REQUIRE(toric_alpha(p2.f, &s) == TORIC_OK);
  CHECK(take(s) == "1/3");
  size_t a0 = 0;
  REQUIRE(toric_alpha_zero(p2.f, &a0) == TORIC_OK);
  CHECK(a0 == 3);
  REQUIRE(toric_kappa_p(p2.f, 2, &s) == TORIC_OK);
  CHECK(take(s) == "7/8");
  CHECK(toric_kappa_p(p2.f, 4, &s) == TORIC_ERR_ARGUMENT);
  double v = 0, lo = 0, hi = 0;
  REQUIRE(toric_kappa_truncated(p2.f, 1000, &v, &lo, &hi) == TORIC_OK);
  CHECK(lo <= 1 / 1.2020569031595942);
  CHECK(hi >= 1 / 1.2020569031595942);
  CHECK(v == doctest::Approx(1 / 1.2020569031595942).epsilon(1e-5));
  const uint64_t d[3] = {2, 2, 2};
  int64_t mu = 0;
  REQUIRE(toric_mobius(p2.f, d, 3, &mu) == TORIC_OK);
  CHECK(mu == -1);
  REQUIRE(toric_constants_json(p2.f, 100, &s) == TORIC_OK);
  CHECK(take(s).find("\"per_prime\"") != std::string::npos);
}

TEST_CASE("capi: sieves") {
  char* s = nullptr;
  REQUIRE(toric_selberg_json(
              "{\"sequence\":[1,2,3,4,5,6,7,8,9,10],\"primes\":[2,3],\"density\":[\"1/2\",\"1/3\"],\"level\":4,\"mass\":10}",
              &s) == TORIC_OK);
  CHECK(take(s).find("\"sifted\":3") != std::string::npos);

  Fan p1("p1");
  uint64_t c = 0, unc = 0;
  REQUIRE(toric_prime_section_count(p1.f, "X0", 100, 2, &c) == TORIC_OK);
  CHECK(c == 29);
  REQUIRE(toric_subvariety_count(p1.f, "X0 - X1", 100, 2, &c) == TORIC_OK);
  CHECK(c == 10); // (x, x) with x^2 <= 100
  CHECK(toric_subvariety_count(p1.f, "X0 - X0", 100, 2, &c) == TORIC_ERR_ARGUMENT);
  REQUIRE(toric_geometric_sieve(p1.f, "X0", "X1", 2, 100, 0, 2, &c, &unc) == TORIC_OK);
  CHECK(unc == 0);
  CHECK(toric_geometric_sieve(p1.f, "X0", "2*X0", 2, 100, 0, 2, &c, &unc) == TORIC_ERR_HYPOTHESIS);
}
