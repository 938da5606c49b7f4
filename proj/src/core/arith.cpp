#include "arith.hpp"

#include <cctype>

namespace toric {

Rat parse_rational(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) fail(Error::Kind::Parse, "empty rational");
  auto valid_int = [](std::string_view t) {
    std::size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
    if (i == t.size()) return false;
    for (; i < t.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t[i]))) return false;
    return true;
  };
  Rat r;
  auto slash = s.find('/');
  if (slash == std::string::npos) {
    if (!valid_int(s)) fail(Error::Kind::Parse, "not a rational: '" + std::string(text) + "'");
    r = Rat(Int(s[0] == '+' ? s.substr(1) : s));
  } else {
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+')
      fail(Error::Kind::Parse, "not a rational: '" + std::string(text) + "'");
    Int d(den);
    if (d == 0) fail(Error::Kind::Parse, "zero denominator in '" + std::string(text) + "'");
    r = Rat(Int(num[0] == '+' ? num.substr(1) : num), d);
  }
  r.canonicalize();
  return r;
}

u64 iroot(u64 n, unsigned k) {
  if (k == 0) fail(Error::Kind::Internal, "iroot with exponent 0");
  if (k == 1 || n <= 1) return n;
  // Bisection on [0, 2^(64/k) + 1] with saturating powers.
  u64 hi = 1;
  while (sat_pow(hi, k, n) <= n) hi <<= 1;
  u64 lo = hi >> 1;
  while (lo + 1 < hi) {
    u64 mid = lo + (hi - lo) / 2;
    if (sat_pow(mid, k, n) <= n)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

} // namespace toric
