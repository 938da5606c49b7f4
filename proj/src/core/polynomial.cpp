#include "polynomial.hpp"

#include "intmat.hpp"

#include <cctype>
#include <sstream>

namespace toric {

Polynomial Polynomial::constant(std::size_t nvars, const Int& c) {
  Polynomial p(nvars);
  p.add_term(Monomial(nvars, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t nvars, std::size_t index) {
  Polynomial p(nvars);
  Monomial m(nvars, 0);
  m.at(index) = 1;
  p.add_term(m, 1);
  return p;
}

void Polynomial::add_term(const Monomial& m, const Int& c) {
  if (c == 0) return;
  auto [it, fresh] = terms_.emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

bool Polynomial::is_constant() const {
  for (const auto& [m, c] : terms_)
    for (unsigned e : m)
      if (e) return false;
  return true;
}

unsigned Polynomial::degree_in(std::size_t var) const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m[var]);
  return d;
}

unsigned Polynomial::total_degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) {
    unsigned s = 0;
    for (unsigned e : m) s += e;
    d = std::max(d, s);
  }
  return d;
}

Int Polynomial::eval(std::span<const u64> x) const {
  if (x.size() != nvars_) fail(Error::Kind::Argument, "polynomial arity mismatch");
  Int total = 0, t;
  for (const auto& [m, c] : terms_) {
    t = c;
    for (std::size_t i = 0; i < nvars_; ++i)
      for (unsigned k = 0; k < m[i]; ++k) mpz_mul_ui(t.get_mpz_t(), t.get_mpz_t(), static_cast<unsigned long>(x[i]));
    total += t;
  }
  return total;
}

Int Polynomial::eval(std::span<const Int> x) const {
  if (x.size() != nvars_) fail(Error::Kind::Argument, "polynomial arity mismatch");
  Int total = 0;
  for (const auto& [m, c] : terms_) {
    Int t = c;
    for (std::size_t i = 0; i < nvars_; ++i) t *= pow_int(x[i], m[i]);
    total += t;
  }
  return total;
}

std::vector<Int> Polynomial::specialize(std::size_t keep, std::span<const Int> values) const {
  std::vector<Int> out(degree_in(keep) + 1, 0);
  for (const auto& [m, c] : terms_) {
    Int t = c;
    for (std::size_t i = 0; i < nvars_; ++i)
      if (i != keep) t *= pow_int(values[i], m[i]);
    out[m[keep]] += t;
  }
  return out;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  Polynomial r = *this;
  for (const auto& [m, c] : o.terms_) r.add_term(m, c);
  return r;
}

Polynomial Polynomial::operator-() const {
  Polynomial r(nvars_);
  for (const auto& [m, c] : terms_) r.add_term(m, -c);
  return r;
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + (-o); }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  Polynomial r(nvars_);
  for (const auto& [m1, c1] : terms_)
    for (const auto& [m2, c2] : o.terms_) {
      Monomial m(nvars_);
      for (std::size_t i = 0; i < nvars_; ++i) m[i] = m1[i] + m2[i];
      r.add_term(m, c1 * c2);
    }
  return r;
}

Polynomial Polynomial::pow(unsigned e) const {
  Polynomial r = constant(nvars_, 1), b = *this;
  while (e) {
    if (e & 1) r = r * b;
    e >>= 1;
    if (e) b = b * b;
  }
  return r;
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [m, c] = *it;
    Int a = abs(c);
    os << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
    first = false;
    bool any = false;
    std::ostringstream vars;
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (!m[i]) continue;
      vars << (any ? "*" : "") << "X" << i;
      if (m[i] > 1) vars << "^" << m[i];
      any = true;
    }
    if (!any)
      os << a.get_str();
    else if (a == 1)
      os << vars.str();
    else
      os << a.get_str() << "*" << vars.str();
  }
  return os.str();
}

namespace {

class Parser {
public:
  Parser(std::string_view s, std::size_t nvars) : s_(s), nvars_(nvars) {}

  Polynomial parse() {
    Polynomial p = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return p;
  }

private:
  [[noreturn]] void error(const std::string& msg) const {
    fail(Error::Kind::Parse, "polynomial parse error at offset " + std::to_string(pos_) + ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string digits() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) error("expected a number");
    return std::string(s_.substr(start, pos_ - start));
  }

  Polynomial expr() {
    Polynomial p = term();
    while (true) {
      if (eat('+'))
        p = p + term();
      else if (eat('-'))
        p = p - term();
      else
        return p;
    }
  }

  Polynomial term() {
    Polynomial p = unary();
    while (eat('*')) p = p * unary();
    return p;
  }

  Polynomial unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = primary();
    if (eat('^')) {
      std::string e = digits();
      if (e.size() > 4) error("exponent too large");
      return base.pow(static_cast<unsigned>(std::stoul(e)));
    }
    return base;
  }

  Polynomial primary() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial p = expr();
      if (!eat(')')) error("expected ')'");
      return p;
    }
    if (c == 'X' || c == 'x') {
      ++pos_;
      std::string idx = digits();
      if (idx.size() > 4 || std::stoul(idx) >= nvars_)
        error("variable X" + idx + " out of range (" + std::to_string(nvars_) + " variables)");
      return Polynomial::variable(nvars_, std::stoul(idx));
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return Polynomial::constant(nvars_, Int(digits()));
    error("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view s_;
  std::size_t nvars_;
  std::size_t pos_ = 0;
};

} // namespace

Polynomial parse_polynomial(std::string_view text, std::size_t nvars) { return Parser(text, nvars).parse(); }

Int resultant(const std::vector<Int>& f0, const std::vector<Int>& g0) {
  auto trim = [](std::vector<Int> v) {
    while (!v.empty() && v.back() == 0) v.pop_back();
    return v;
  };
  std::vector<Int> f = trim(f0), g = trim(g0);
  if (f.empty() || g.empty()) return 0;
  const std::size_t m = f.size() - 1, n = g.size() - 1;
  if (m == 0 && n == 0) return 1;
  if (m == 0) return pow_int(f[0], n);
  if (n == 0) return pow_int(g[0], m);
  // Sylvester matrix, coefficients highest degree first.
  IntMatrix s(m + n, m + n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k <= m; ++k) s(i, i + k) = f[m - k];
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k <= n; ++k) s(n + i, i + k) = g[n - k];
  return determinant(s);
}

CoprimeWitness coprime_witness(const Polynomial& f, const Polynomial& g) {
  CoprimeWitness w;
  if (f.nvars() != g.nvars()) fail(Error::Kind::Argument, "polynomials over different variable sets");
  if (f.is_zero() && g.is_zero()) {
    w.reason = "both polynomials are zero";
    return w;
  }
  if (f.is_zero() || g.is_zero()) {
    const Polynomial& other = f.is_zero() ? g : f;
    w.coprime = other.is_constant();
    w.reason = w.coprime ? "zero and a nonzero constant" : "gcd(0, h) = h is nonconstant";
    return w;
  }
  // a common integer content is a non-unit common factor in Z[X]
  Int content = 0;
  for (const Polynomial* h : {&f, &g})
    for (const auto& [mono, c] : h->terms()) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), c.get_mpz_t());
  if (content != 1) {
    w.reason = "common integer content " + content.get_str();
    return w;
  }
  const std::size_t n = f.nvars();
  for (std::size_t v = 0; v < n; ++v) {
    const unsigned df = f.degree_in(v), dg = g.degree_in(v);
    if (df == 0 || dg == 0) continue;
    bool found = false;
    // Deterministic sequence of small specialization points.
    for (u64 trial = 0; trial < 64 && !found; ++trial) {
      std::vector<Int> pt(n);
      u64 state = trial * 0x9E3779B97F4A7C15ull + v + 1;
      for (std::size_t i = 0; i < n; ++i) {
        state ^= state >> 29;
        state *= 0xBF58476D1CE4E5B9ull;
        pt[i] = i == v ? Int(0) : Int(static_cast<long>(state % 41) - 20);
      }
      std::vector<Int> fs = f.specialize(v, pt), gs = g.specialize(v, pt);
      if (fs.back() == 0 || gs.back() == 0) continue;
      Int res = resultant(fs, gs);
      if (res != 0) {
        w.entries.push_back({v, pt, res});
        found = true;
      }
    }
    if (!found) {
      w.reason = "resultant in X" + std::to_string(v) + " vanished at every trial point";
      return w;
    }
  }
  w.coprime = true;
  w.reason = w.entries.empty() ? "no variable occurs in both polynomials" : "nonzero specialized resultants";
  return w;
}

} // namespace toric
