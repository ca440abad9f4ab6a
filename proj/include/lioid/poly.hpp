#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lioid {

/// Exact rational scalar. Values are kept canonicalized.
using Rat = mpq_class;

/// Dense exponent vector; entry i is the exponent of variable i.
using Monomial = std::vector<int>;

inline int total_degree(const Monomial& m) {
  int d = 0;
  for (int e : m) d += e;
  return d;
}

inline bool divides(const Monomial& a, const Monomial& b) {
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

/// Term order on monomials over a fixed variable list.
///
/// `precedence` lists variable indices from most to least significant; empty
/// means natural order. `lex` compares significant exponents first; `grlex`
/// compares total degree, then falls back to lex.
struct MonomialOrder {
  enum class Kind { lex, grlex };
  Kind kind = Kind::grlex;
  std::vector<int> precedence;

  /// Strict "a comes before b" (a is larger in the term order).
  bool before(const Monomial& a, const Monomial& b) const {
    if (kind == Kind::grlex) {
      int da = total_degree(a), db = total_degree(b);
      if (da != db) return da > db;
    }
    if (precedence.empty()) {
      for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return a[i] > b[i];
      return false;
    }
    for (int v : precedence)
      if (a[v] != b[v]) return a[v] > b[v];
    return false;
  }

  static MonomialOrder lex(std::vector<int> prec = {}) {
    return MonomialOrder{Kind::lex, std::move(prec)};
  }
  static MonomialOrder grlex(std::vector<int> prec = {}) {
    return MonomialOrder{Kind::grlex, std::move(prec)};
  }
};

/// Sparse multivariate polynomial with exact rational coefficients over a
/// fixed, ordered variable list. At most 16 variables.
class Poly {
 public:
  Poly() = default;

  explicit Poly(std::vector<std::string> vars) : vars_(std::move(vars)) {
    check_vars(vars_);
  }

  static Poly zero(std::vector<std::string> vars) { return Poly(std::move(vars)); }

  static Poly constant(std::vector<std::string> vars, Rat c) {
    Poly p(std::move(vars));
    c.canonicalize();
    if (c != 0) p.terms_[Monomial(p.vars_.size(), 0)] = c;
    return p;
  }

  static Poly variable(const std::vector<std::string>& vars, const std::string& name) {
    Poly p(vars);
    Monomial m(vars.size(), 0);
    m[p.var_index(name)] = 1;
    p.terms_[m] = 1;
    return p;
  }

  static Poly term(std::vector<std::string> vars, Monomial m, Rat c) {
    Poly p(std::move(vars));
    if (m.size() != p.vars_.size()) throw std::invalid_argument("exponent vector length mismatch");
    c.canonicalize();
    if (c != 0) p.terms_[std::move(m)] = c;
    return p;
  }

  const std::vector<std::string>& vars() const { return vars_; }
  const std::map<Monomial, Rat>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int var_index(const std::string& name) const {
    for (size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return static_cast<int>(i);
    throw std::invalid_argument("unknown variable '" + name + "'");
  }

  /// Total degree; -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (auto& [m, c] : terms_) d = std::max(d, total_degree(m));
    return d;
  }

  bool is_homogeneous() const {
    int d = -2;
    for (auto& [m, c] : terms_) {
      if (d == -2) d = total_degree(m);
      else if (total_degree(m) != d) return false;
    }
    return true;
  }

  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0); }

  Rat constant_value() const {
    if (terms_.empty()) return 0;
    Monomial one(vars_.size(), 0);
    auto it = terms_.find(one);
    return it == terms_.end() ? Rat(0) : it->second;
  }

  Poly& operator+=(const Poly& o) {
    same_vars(o);
    for (auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    same_vars(o);
    for (auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }

  friend Poly operator+(Poly a, const Poly& b) { a += b; return a; }
  friend Poly operator-(Poly a, const Poly& b) { a -= b; return a; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    a.same_vars(b);
    Poly r(a.vars_);
    for (auto& [ma, ca] : a.terms_)
      for (auto& [mb, cb] : b.terms_) {
        Monomial m(ma.size());
        for (size_t i = 0; i < m.size(); ++i) m[i] = ma[i] + mb[i];
        r.add_term(m, ca * cb);
      }
    return r;
  }

  Poly operator-() const {
    Poly r(vars_);
    for (auto& [m, c] : terms_) r.terms_[m] = -c;
    return r;
  }

  Poly scaled(const Rat& c) const {
    Poly r(vars_);
    if (c == 0) return r;
    for (auto& [m, k] : terms_) r.terms_[m] = k * c;
    return r;
  }

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.vars_ == b.vars_ && a.terms_ == b.terms_;
  }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  /// d/d(vars[v]).
  Poly partial(int v) const {
    if (v < 0 || v >= static_cast<int>(vars_.size()))
      throw std::invalid_argument("partial: variable index out of range");
    Poly r(vars_);
    for (auto& [m, c] : terms_) {
      if (m[v] == 0) continue;
      Monomial n = m;
      n[v] -= 1;
      r.add_term(n, c * m[v]);
    }
    return r;
  }

  Poly partial(const std::string& name) const { return partial(var_index(name)); }

  Poly pow(int e) const {
    if (e < 0) throw std::invalid_argument("pow: negative exponent");
    Poly r = constant(vars_, 1);
    for (int i = 0; i < e; ++i) r = r * *this;
    return r;
  }

  /// Leading monomial in the given order; nullopt for zero.
  std::optional<Monomial> leading_monomial(const MonomialOrder& ord) const {
    std::optional<Monomial> best;
    for (auto& [m, c] : terms_)
      if (!best || ord.before(m, *best)) best = m;
    return best;
  }

  /// Substitute `value` for variable v. `value` must live over the same list.
  Poly substituted(int v, const Poly& value) const {
    same_vars(value);
    Poly r(vars_);
    for (auto& [m, c] : terms_) {
      Monomial n = m;
      int e = n[v];
      n[v] = 0;
      Poly piece = Poly::term(vars_, n, c) * value.pow(e);
      r += piece;
    }
    return r;
  }

  /// Reinterpret over a variable list that contains the current one.
  Poly with_vars(const std::vector<std::string>& newvars) const {
    check_vars(newvars);
    std::vector<int> where(vars_.size());
    for (size_t i = 0; i < vars_.size(); ++i) {
      auto it = std::find(newvars.begin(), newvars.end(), vars_[i]);
      if (it == newvars.end()) throw std::invalid_argument("with_vars: missing variable " + vars_[i]);
      where[i] = static_cast<int>(it - newvars.begin());
    }
    Poly r(newvars);
    for (auto& [m, c] : terms_) {
      Monomial n(newvars.size(), 0);
      for (size_t i = 0; i < m.size(); ++i) n[where[i]] = m[i];
      r.terms_[n] = c;
    }
    return r;
  }

  /// Drop a variable that no term uses (inverse of with_vars extension).
  Poly without_var(int v) const {
    std::vector<std::string> nv;
    for (size_t i = 0; i < vars_.size(); ++i)
      if (static_cast<int>(i) != v) nv.push_back(vars_[i]);
    Poly r(nv);
    for (auto& [m, c] : terms_) {
      if (m[v] != 0) throw std::invalid_argument("without_var: variable still occurs");
      Monomial n;
      for (size_t i = 0; i < m.size(); ++i)
        if (static_cast<int>(i) != v) n.push_back(m[i]);
      r.terms_[n] = c;
    }
    return r;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto& [m, c] = *it;
      Rat a = c;
      if (first) {
        if (a < 0) { os << "-"; a = -a; }
      } else {
        os << (a < 0 ? " - " : " + ");
        if (a < 0) a = -a;
      }
      first = false;
      bool unit = (a == 1);
      bool anyvar = total_degree(m) > 0;
      if (!unit || !anyvar) os << a.get_str();
      bool need_star = !unit || !anyvar;
      for (size_t i = 0; i < m.size(); ++i) {
        if (m[i] == 0) continue;
        if (need_star) os << "*";
        need_star = true;
        os << vars_[i];
        if (m[i] > 1) os << "^" << m[i];
      }
    }
    return os.str();
  }

 private:
  static void check_vars(const std::vector<std::string>& v) {
    if (v.size() > 16) throw std::invalid_argument("too many variables (max 16)");
    for (size_t i = 0; i < v.size(); ++i)
      for (size_t j = i + 1; j < v.size(); ++j)
        if (v[i] == v[j]) throw std::invalid_argument("duplicate variable " + v[i]);
  }

  void same_vars(const Poly& o) const {
    if (vars_ != o.vars_) throw std::invalid_argument("variable lists differ");
  }

  void add_term(const Monomial& m, const Rat& c) {
    if (c == 0) return;
    auto [it, fresh] = terms_.try_emplace(m, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  std::vector<std::string> vars_;
  std::map<Monomial, Rat> terms_;
};

/// Remainder of p under repeated division by a single nonzero divisor.
/// Every monomial of the result is indivisible by the divisor's leading
/// monomial, so the result is the canonical representative mod the principal
/// ideal, given the order.
inline Poly reduce_mod(const Poly& p, const Poly& divisor, const MonomialOrder& ord,
                       Poly* quotient = nullptr) {
  if (divisor.is_zero()) throw std::invalid_argument("reduce_mod: zero divisor");
  Monomial lead = *divisor.leading_monomial(ord);
  Rat lc = divisor.terms().at(lead);
  Poly r = p;
  Poly q = Poly::zero(p.vars());
  for (;;) {
    std::optional<Monomial> hit;
    for (auto& [m, c] : r.terms())
      if (divides(lead, m) && (!hit || ord.before(m, *hit))) hit = m;
    if (!hit) break;
    Monomial shift(hit->size());
    for (size_t i = 0; i < shift.size(); ++i) shift[i] = (*hit)[i] - lead[i];
    Rat factor = r.terms().at(*hit) / lc;
    Poly piece = Poly::term(p.vars(), shift, factor);
    r -= piece * divisor;
    q += piece;
  }
  if (quotient) *quotient = q;
  return r;
}

/// All exponent vectors of the given total degree, in the term order
/// (largest first).
inline std::vector<Monomial> monomials_of_degree(int nvars, int degree) {
  std::vector<Monomial> out;
  if (degree < 0) return out;
  Monomial m(nvars, 0);
  // lexicographic enumeration by recursion
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == nvars - 1) {
      m[pos] = left;
      out.push_back(m);
      m[pos] = 0;
      return;
    }
    for (int e = left; e >= 0; --e) {
      m[pos] = e;
      self(self, pos + 1, left - e);
    }
    m[pos] = 0;
  };
  if (nvars == 0) {
    if (degree == 0) out.push_back({});
    return out;
  }
  rec(rec, 0, degree);
  return out;
}

/// Basis of the degree-d graded piece of the polynomial ring, sorted by ord.
inline std::vector<Monomial> graded_piece_basis(const std::vector<std::string>& vars, int degree,
                                                const MonomialOrder& ord) {
  auto ms = monomials_of_degree(static_cast<int>(vars.size()), degree);
  std::sort(ms.begin(), ms.end(), [&](const Monomial& a, const Monomial& b) { return ord.before(a, b); });
  return ms;
}

/// Parse "c*x^a*y^b +- ..." with integer coefficients. Whitespace optional.
inline Poly parse_poly(const std::string& text, const std::vector<std::string>& vars) {
  Poly result(vars);
  size_t i = 0;
  auto skip = [&] { while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i; };
  auto fail = [&](const std::string& why) -> std::runtime_error {
    return std::runtime_error("parse error at offset " + std::to_string(i) + ": " + why);
  };
  skip();
  if (i == text.size()) throw fail("empty polynomial");
  bool first = true;
  while (true) {
    skip();
    if (i == text.size()) break;
    int sign = 1;
    if (text[i] == '+' || text[i] == '-') {
      if (text[i] == '-') sign = -1;
      ++i;
    } else if (!first) {
      throw fail("expected '+' or '-'");
    }
    skip();
    // one term: factors separated by '*'
    Rat coeff = sign;
    Monomial m(vars.size(), 0);
    bool any = false;
    while (true) {
      skip();
      if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        size_t j = i;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        coeff *= Rat(text.substr(i, j - i));
        i = j;
        any = true;
      } else if (i < text.size() && (std::isalpha(static_cast<unsigned char>(text[i])) || text[i] == '_')) {
        size_t j = i;
        while (j < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
          ++j;
        std::string name = text.substr(i, j - i);
        i = j;
        int v = -1;
        for (size_t k = 0; k < vars.size(); ++k)
          if (vars[k] == name) v = static_cast<int>(k);
        if (v < 0) throw fail("unknown variable '" + name + "'");
        int e = 1;
        skip();
        if (i < text.size() && text[i] == '^') {
          ++i;
          skip();
          if (i == text.size() || !std::isdigit(static_cast<unsigned char>(text[i])))
            throw fail("expected exponent");
          size_t j2 = i;
          while (j2 < text.size() && std::isdigit(static_cast<unsigned char>(text[j2]))) ++j2;
          e = std::stoi(text.substr(i, j2 - i));
          i = j2;
        }
        m[v] += e;
        any = true;
      } else {
        throw fail("expected coefficient or variable");
      }
      skip();
      if (i < text.size() && text[i] == '*') {
        ++i;
        continue;
      }
      break;
    }
    if (!any) throw fail("empty term");
    result += Poly::term(vars, m, coeff);
    first = false;
  }
  return result;
}

}  // namespace lioid
