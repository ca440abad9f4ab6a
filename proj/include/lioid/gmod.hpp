#pragma once

#include <map>
#include <string>
#include <vector>

#include "poly.hpp"

namespace lioid {

/// Key of a basis generator: homological degree plus ordinal inside that
/// degree. Degrees are <= -1 in complexes; 0 is allowed in the auxiliary
/// untruncated scaffolds.
struct GenKey {
  int degree = 0;
  int ord = 0;

  friend bool operator==(const GenKey& a, const GenKey& b) {
    return a.degree == b.degree && a.ord == b.ord;
  }
  friend bool operator!=(const GenKey& a, const GenKey& b) { return !(a == b); }
  // generators closest to degree -1 come first, then ordinal
  friend bool operator<(const GenKey& a, const GenKey& b) {
    if (a.degree != b.degree) return a.degree > b.degree;
    return a.ord < b.ord;
  }
};

struct Generator {
  std::string label;
  int degree = 0;
  int weight = 0;
};

/// Finite free graded basis with stable per-degree ordering.
class GradedBasis {
 public:
  GenKey add(std::string label, int degree, int weight = 0) {
    auto& row = rows_[degree];
    GenKey k{degree, static_cast<int>(row.size())};
    row.push_back(Generator{std::move(label), degree, weight});
    by_label_.emplace(row.back().label, k);
    return k;
  }

  const Generator& at(GenKey k) const {
    auto it = rows_.find(k.degree);
    if (it == rows_.end() || k.ord < 0 || k.ord >= static_cast<int>(it->second.size()))
      throw std::invalid_argument("no such generator");
    return it->second[k.ord];
  }

  bool has_degree(int degree) const { return rows_.count(degree) > 0; }

  const std::vector<Generator>& degree_row(int degree) const {
    static const std::vector<Generator> empty;
    auto it = rows_.find(degree);
    return it == rows_.end() ? empty : it->second;
  }

  std::vector<int> degrees() const {
    std::vector<int> ds;
    for (auto& [d, row] : rows_)
      if (!row.empty()) ds.push_back(d);
    return ds;
  }

  /// Most negative degree carrying generators; 0 if empty.
  int depth() const {
    int m = 0;
    for (auto& [d, row] : rows_)
      if (!row.empty()) m = std::min(m, d);
    return m;
  }

  GenKey find(const std::string& label) const {
    auto it = by_label_.find(label);
    if (it == by_label_.end()) throw std::invalid_argument("unknown generator '" + label + "'");
    return it->second;
  }

  bool contains(const std::string& label) const { return by_label_.count(label) > 0; }

  std::vector<GenKey> all() const {
    std::vector<GenKey> ks;
    for (auto& [d, row] : rows_)
      for (size_t i = 0; i < row.size(); ++i) ks.push_back(GenKey{d, static_cast<int>(i)});
    std::sort(ks.begin(), ks.end());
    return ks;
  }

  size_t size() const {
    size_t n = 0;
    for (auto& [d, row] : rows_) n += row.size();
    return n;
  }

 private:
  std::map<int, std::vector<Generator>> rows_;
  std::map<std::string, GenKey> by_label_;
};

/// Element of the free module: finite O-combination of generators.
struct ModElt {
  std::map<GenKey, Poly> comps;

  bool is_zero() const { return comps.empty(); }

  void add(GenKey k, const Poly& p) {
    if (p.is_zero()) return;
    auto [it, fresh] = comps.try_emplace(k, p);
    if (!fresh) {
      it->second += p;
      if (it->second.is_zero()) comps.erase(it);
    }
  }

  ModElt& operator+=(const ModElt& o) {
    for (auto& [k, p] : o.comps) add(k, p);
    return *this;
  }
  ModElt& operator-=(const ModElt& o) {
    for (auto& [k, p] : o.comps) add(k, -p);
    return *this;
  }
  friend ModElt operator+(ModElt a, const ModElt& b) { a += b; return a; }
  friend ModElt operator-(ModElt a, const ModElt& b) { a -= b; return a; }

  ModElt scaled(const Poly& f) const {
    ModElt r;
    if (f.is_zero()) return r;
    for (auto& [k, p] : comps) {
      Poly q = p * f;
      if (!q.is_zero()) r.comps.emplace(k, std::move(q));
    }
    return r;
  }

  ModElt scaled(const Rat& c) const {
    ModElt r;
    if (c == 0) return r;
    for (auto& [k, p] : comps) r.comps.emplace(k, p.scaled(c));
    return r;
  }

  ModElt operator-() const { return scaled(Rat(-1)); }

  friend bool operator==(const ModElt& a, const ModElt& b) { return a.comps == b.comps; }
  friend bool operator!=(const ModElt& a, const ModElt& b) { return !(a == b); }

  static ModElt gen(GenKey k, const std::vector<std::string>& vars) {
    ModElt e;
    e.comps.emplace(k, Poly::constant(vars, 1));
    return e;
  }
};

/// Polynomial vector field: finite sum f_v * d/d(vars[v]).
struct Derivation {
  std::map<int, Poly> comps;

  bool is_zero() const { return comps.empty(); }

  void add(int v, const Poly& p) {
    if (p.is_zero()) return;
    auto [it, fresh] = comps.try_emplace(v, p);
    if (!fresh) {
      it->second += p;
      if (it->second.is_zero()) comps.erase(it);
    }
  }

  Derivation& operator+=(const Derivation& o) {
    for (auto& [v, p] : o.comps) add(v, p);
    return *this;
  }
  Derivation& operator-=(const Derivation& o) {
    for (auto& [v, p] : o.comps) add(v, -p);
    return *this;
  }
  friend Derivation operator+(Derivation a, const Derivation& b) { a += b; return a; }
  friend Derivation operator-(Derivation a, const Derivation& b) { a -= b; return a; }

  Derivation scaled(const Poly& f) const {
    Derivation r;
    if (f.is_zero()) return r;
    for (auto& [v, p] : comps) {
      Poly q = p * f;
      if (!q.is_zero()) r.comps.emplace(v, std::move(q));
    }
    return r;
  }

  Derivation operator-() const {
    Derivation r;
    for (auto& [v, p] : comps) r.comps.emplace(v, -p);
    return r;
  }

  friend bool operator==(const Derivation& a, const Derivation& b) { return a.comps == b.comps; }
  friend bool operator!=(const Derivation& a, const Derivation& b) { return !(a == b); }

  /// Apply to a ring element.
  Poly apply(const Poly& f) const {
    Poly r(f.vars());
    for (auto& [v, p] : comps) r += p * f.partial(v);
    return r;
  }

  /// Commutator of vector fields.
  static Derivation bracket(const Derivation& x, const Derivation& y) {
    Derivation r;
    for (auto& [v, p] : y.comps) r.add(v, x.apply(p));
    for (auto& [v, p] : x.comps) r.add(v, -y.apply(p));
    return r;
  }
};

}  // namespace lioid
