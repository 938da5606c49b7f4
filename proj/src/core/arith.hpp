#pragma once

// Exact arithmetic helpers shared by every module: GMP-backed big integers and
// rationals, plus saturating 128-bit products used on the counting hot paths.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace toric {

using Int = mpz_class;
using Rat = mpq_class;
using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

// Raised for malformed input or violated preconditions. The C API maps these
// onto status codes; see capi/toricount.cpp.
class Error : public std::runtime_error {
public:
  enum class Kind { Parse, InvalidFan, Hypothesis, Argument, Limit, Io, Internal };

  Error(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

private:
  Kind kind_;
};

[[noreturn]] inline void fail(Error::Kind kind, const std::string& msg) { throw Error(kind, msg); }

inline std::string to_string(const Int& v) { return v.get_str(); }

// Canonical "p/q" (or "p" when q == 1).
inline std::string to_string(const Rat& v) {
  Rat c = v;
  c.canonicalize();
  return c.get_str();
}

Rat parse_rational(std::string_view text);

inline Int to_int(i64 v) {
  Int r;
  mpz_set_si(r.get_mpz_t(), static_cast<long>(v));
  return r;
}

inline Int to_int_u(u64 v) {
  Int r;
  mpz_set_ui(r.get_mpz_t(), static_cast<unsigned long>(v));
  return r;
}

inline bool fits_u64(const Int& v) { return mpz_sgn(v.get_mpz_t()) >= 0 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 64; }

inline u64 to_u64(const Int& v) {
  if (!fits_u64(v)) fail(Error::Kind::Internal, "integer does not fit in 64 bits: " + v.get_str());
  return static_cast<u64>(mpz_get_ui(v.get_mpz_t()));
}

inline i64 to_i64(const Int& v) {
  if (!mpz_fits_slong_p(v.get_mpz_t())) fail(Error::Kind::Internal, "integer does not fit in 64 bits: " + v.get_str());
  return static_cast<i64>(mpz_get_si(v.get_mpz_t()));
}

inline Int pow_int(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

// a * b, clamped to `cap + 1` once the product exceeds cap. Exact whenever the
// true product is <= cap.
inline u128 sat_mul(u128 a, u128 b, u128 cap) {
  if (a == 0 || b == 0) return 0;
  if (a > cap || b > cap) return cap + 1;
  if (a > (cap + 1) / b + 1) return cap + 1;
  u128 p = a * b;
  return p > cap ? cap + 1 : p;
}

inline u128 sat_pow(u128 base, unsigned e, u128 cap) {
  u128 r = 1;
  for (unsigned i = 0; i < e; ++i) {
    r = sat_mul(r, base, cap);
    if (r > cap) return r;
  }
  return r;
}

// Largest x >= 0 with x^k <= n (k >= 1).
u64 iroot(u64 n, unsigned k);

inline u64 gcd_u64(u64 a, u64 b) {
  while (b != 0) {
    u64 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

} // namespace toric
