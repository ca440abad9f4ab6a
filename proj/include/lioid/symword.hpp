#pragma once

#include <vector>

#include "gmod.hpp"

namespace lioid {

inline bool odd_degree(GenKey k) { return (k.degree & 1) != 0; }

/// Canonically sorted graded-symmetric word of generators. Words compare by
/// arity, then lexicographically on factors.
struct SymWord {
  std::vector<GenKey> factors;

  int arity() const { return static_cast<int>(factors.size()); }

  int degree() const {
    int d = 0;
    for (auto& k : factors) d += k.degree;
    return d;
  }

  friend bool operator==(const SymWord& a, const SymWord& b) { return a.factors == b.factors; }
  friend bool operator!=(const SymWord& a, const SymWord& b) { return !(a == b); }
  friend bool operator<(const SymWord& a, const SymWord& b) {
    if (a.factors.size() != b.factors.size()) return a.factors.size() < b.factors.size();
    return std::lexicographical_compare(a.factors.begin(), a.factors.end(), b.factors.begin(),
                                        b.factors.end());
  }
};

struct NormalizedWord {
  SymWord word;
  int sign = 1;    // +-1; 0 when the word vanishes
  bool is_zero() const { return sign == 0; }
};

/// Sort factors into canonical order, tracking the Koszul sign. A repeated
/// odd-degree factor kills the word.
inline NormalizedWord normalize_word(std::vector<GenKey> f) {
  int sign = 1;
  for (size_t i = 1; i < f.size(); ++i) {
    GenKey x = f[i];
    size_t j = i;
    while (j > 0 && x < f[j - 1]) {
      if (odd_degree(x) && odd_degree(f[j - 1])) sign = -sign;
      f[j] = f[j - 1];
      --j;
    }
    f[j] = x;
  }
  for (size_t i = 1; i < f.size(); ++i)
    if (f[i] == f[i - 1] && odd_degree(f[i])) return NormalizedWord{SymWord{}, 0};
  return NormalizedWord{SymWord{std::move(f)}, sign};
}

/// Koszul sign of extracting the positions in `sel` (ascending) to the front
/// of a word with the given factor keys, preserving the order of the rest.
inline int extraction_sign(const std::vector<GenKey>& factors, const std::vector<int>& sel) {
  int sign = 1;
  std::vector<bool> in(factors.size(), false);
  for (int s : sel) in[s] = true;
  for (int s : sel)
    for (int t = 0; t < s; ++t)
      if (!in[t] && odd_degree(factors[s]) && odd_degree(factors[t])) sign = -sign;
  return sign;
}

/// All (i,j)-shuffles of {0,...,i+j-1}, each given as the sorted i-subset
/// forming the first block.
inline std::vector<std::vector<int>> shuffles(int i, int j) {
  std::vector<std::vector<int>> out;
  int n = i + j;
  std::vector<int> sel(i);
  auto rec = [&](auto&& self, int pos, int next) -> void {
    if (pos == i) {
      out.push_back(sel);
      return;
    }
    for (int v = next; v <= n - (i - pos); ++v) {
      sel[pos] = v;
      self(self, pos + 1, v + 1);
    }
  };
  if (i >= 0 && j >= 0) rec(rec, 0, 0);
  return out;
}

/// Formal O-combination of canonical words (mixed arities allowed).
struct SymElt {
  std::map<SymWord, Poly> terms;

  bool is_zero() const { return terms.empty(); }

  void add(const SymWord& w, const Poly& p) {
    if (p.is_zero()) return;
    auto [it, fresh] = terms.try_emplace(w, p);
    if (!fresh) {
      it->second += p;
      if (it->second.is_zero()) terms.erase(it);
    }
  }

  void add_raw(std::vector<GenKey> factors, const Poly& p) {
    auto nw = normalize_word(std::move(factors));
    if (nw.is_zero()) return;
    add(nw.word, nw.sign > 0 ? p : -p);
  }

  SymElt& operator+=(const SymElt& o) {
    for (auto& [w, p] : o.terms) add(w, p);
    return *this;
  }
  SymElt& operator-=(const SymElt& o) {
    for (auto& [w, p] : o.terms) add(w, -p);
    return *this;
  }

  SymElt scaled(const Poly& f) const {
    SymElt r;
    if (f.is_zero()) return r;
    for (auto& [w, p] : terms) {
      Poly q = p * f;
      if (!q.is_zero()) r.terms.emplace(w, std::move(q));
    }
    return r;
  }

  friend bool operator==(const SymElt& a, const SymElt& b) { return a.terms == b.terms; }
};

/// Extend a generator table (generator -> module element) to words as a
/// degree +1 derivation: sum over slots, replacing the slot by its image.
/// Generators missing from the table map to zero.
inline SymElt derive_word(const SymWord& w, const std::map<GenKey, ModElt>& table,
                          const std::vector<std::string>& vars) {
  SymElt out;
  int prefix = 0;  // parity of degree sum before the slot
  for (size_t s = 0; s < w.factors.size(); ++s) {
    GenKey x = w.factors[s];
    auto it = table.find(x);
    if (it != table.end()) {
      int slot_sign = (prefix & 1) ? -1 : 1;
      for (auto& [g, coeff] : it->second.comps) {
        std::vector<GenKey> f;
        f.reserve(w.factors.size());
        for (size_t t = 0; t < w.factors.size(); ++t) f.push_back(t == s ? g : w.factors[t]);
        out.add_raw(std::move(f), slot_sign > 0 ? coeff : -coeff);
      }
    }
    prefix += x.degree;
  }
  return out;
}

/// All canonical words of the given arity over the basis, optionally filtered
/// by word degree.
inline std::vector<SymWord> words_of_arity(const GradedBasis& basis, int arity,
                                           std::optional<int> degree = std::nullopt) {
  std::vector<GenKey> gens = basis.all();
  std::vector<SymWord> out;
  std::vector<GenKey> cur;
  auto rec = [&](auto&& self, size_t from) -> void {
    if (static_cast<int>(cur.size()) == arity) {
      SymWord w{cur};
      if (!degree || w.degree() == *degree) out.push_back(w);
      return;
    }
    for (size_t i = from; i < gens.size(); ++i) {
      if (!cur.empty() && cur.back() == gens[i] && odd_degree(gens[i])) continue;
      cur.push_back(gens[i]);
      self(self, i);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

/// Render "lbl . lbl . lbl".
inline std::string word_str(const SymWord& w, const GradedBasis& basis) {
  std::string s;
  for (size_t i = 0; i < w.factors.size(); ++i) {
    if (i) s += " . ";
    s += basis.at(w.factors[i]).label;
  }
  return s;
}

}  // namespace lioid
