#pragma once

#include "symword.hpp"

namespace lioid {

/// Evaluation context: the coordinate ring plus the anchor on degree -1
/// generators. The anchor acts as zero on every other generator.
struct EvalContext {
  std::vector<std::string> vars;
  const std::map<GenKey, Derivation>* rho = nullptr;

  Poly rho_apply(GenKey g, const Poly& f) const {
    if (rho && g.degree == -1) {
      auto it = rho->find(g);
      if (it != rho->end()) return it->second.apply(f);
    }
    return Poly::zero(vars);
  }
};

/// Graded symmetric n-ary map of degree `degree`, stored on canonical
/// generator words. Arity-2 tables with the `leibniz` flag evaluate on
/// O-multiples of generators through the anchored two-term rule
///   l2(f g, u h) = f u l2(g,h) + f rho(g)[u] h + (-1)^{|g||h|} u rho(h)[f] g;
/// all other tables extend O-multilinearly.
struct MultiTable {
  int num_args = 1;
  int degree = 1;
  bool leibniz = false;
  std::map<SymWord, ModElt> entries;

  bool is_zero() const { return entries.empty(); }

  void add_entry(const SymWord& w, const ModElt& v) {
    if (v.is_zero()) return;
    auto [it, fresh] = entries.try_emplace(w, v);
    if (!fresh) {
      it->second += v;
      if (it->second.is_zero()) entries.erase(it);
    }
  }

  /// Value on a plain tuple of generators (normalizes the word first).
  ModElt lookup(const std::vector<GenKey>& gens) const {
    auto nw = normalize_word(gens);
    if (nw.is_zero()) return ModElt{};
    auto it = entries.find(nw.word);
    if (it == entries.end()) return ModElt{};
    return nw.sign > 0 ? it->second : -it->second;
  }

  MultiTable& operator+=(const MultiTable& o) {
    for (auto& [w, v] : o.entries) add_entry(w, v);
    return *this;
  }
  MultiTable& operator-=(const MultiTable& o) {
    for (auto& [w, v] : o.entries) add_entry(w, -v);
    return *this;
  }

  MultiTable scaled(const Poly& f) const {
    MultiTable t;
    t.num_args = num_args;
    t.degree = degree;
    t.leibniz = leibniz;
    for (auto& [w, v] : entries) {
      ModElt s = v.scaled(f);
      if (!s.is_zero()) t.entries.emplace(w, std::move(s));
    }
    return t;
  }
};

/// One argument of an evaluation: an O-multiple of a generator.
using Arg = std::pair<GenKey, Poly>;

inline ModElt eval_table(const MultiTable& A, const std::vector<Arg>& args,
                         const EvalContext& ctx) {
  if (static_cast<int>(args.size()) != A.num_args)
    throw std::invalid_argument("eval_table: arity mismatch");
  Poly coeff = Poly::constant(ctx.vars, 1);
  std::vector<GenKey> gens;
  gens.reserve(args.size());
  for (auto& [g, f] : args) {
    gens.push_back(g);
    coeff = coeff * f;
  }
  ModElt out;
  if (!coeff.is_zero()) out = A.lookup(gens).scaled(coeff);
  if (A.leibniz && A.num_args == 2) {
    const auto& [g, f] = args[0];
    const auto& [h, u] = args[1];
    out.add(h, f * ctx.rho_apply(g, u));
    Poly t = u * ctx.rho_apply(h, f);
    if (odd_degree(g) && odd_degree(h)) t = -t;
    out.add(g, t);
  }
  return out;
}

/// Insertion A o B on one word: sum over position subsets S of size
/// num_args(B), with Koszul extraction signs,
///   (A o B)(w) = sum_S eps(S) A(B(w_S), w_rest).
/// The inner value feeds the first slot of A with its O-coefficients.
inline ModElt insertion_on_word(const MultiTable& A, const MultiTable& B, const SymWord& w,
                                const EvalContext& ctx) {
  int p = B.num_args;
  int total = A.num_args + B.num_args - 1;
  if (w.arity() != total) throw std::invalid_argument("insertion_on_word: arity mismatch");
  ModElt out;
  Poly one = Poly::constant(ctx.vars, 1);
  for (auto& S : shuffles(p, total - p)) {
    int eps = extraction_sign(w.factors, S);
    std::vector<bool> in(w.factors.size(), false);
    std::vector<Arg> inner_args;
    for (int s : S) {
      in[s] = true;
      inner_args.push_back({w.factors[s], one});
    }
    ModElt inner = eval_table(B, inner_args, ctx);
    if (inner.is_zero()) continue;
    for (auto& [g, f] : inner.comps) {
      std::vector<Arg> outer_args;
      outer_args.push_back({g, eps > 0 ? f : -f});
      for (size_t t = 0; t < w.factors.size(); ++t)
        if (!in[t]) outer_args.push_back({w.factors[t], one});
      out += eval_table(A, outer_args, ctx);
    }
  }
  return out;
}

/// Materialized insertion over every canonical word of the combined arity.
inline MultiTable rn_insert(const MultiTable& A, const MultiTable& B, const GradedBasis& basis,
                            const EvalContext& ctx) {
  MultiTable T;
  T.num_args = A.num_args + B.num_args - 1;
  T.degree = A.degree + B.degree;
  for (auto& w : words_of_arity(basis, T.num_args)) {
    ModElt v = insertion_on_word(A, B, w, ctx);
    if (!v.is_zero()) T.entries.emplace(w, std::move(v));
  }
  return T;
}

/// Richardson-Nijenhuis bracket [A,B] = A o B - (-1)^{|A||B|} B o A.
inline MultiTable rn_bracket(const MultiTable& A, const MultiTable& B, const GradedBasis& basis,
                             const EvalContext& ctx) {
  MultiTable T = rn_insert(A, B, basis, ctx);
  MultiTable U = rn_insert(B, A, basis, ctx);
  bool flip = (A.degree % 2 != 0) && (B.degree % 2 != 0);
  if (flip) T += U;
  else T -= U;
  return T;
}

/// Left side of the arity-n higher Jacobi identity,
///   J_n = sum_{i=1}^{n} l_{n-i+1} o l_i,
/// materialized on arity-n words. Missing arities count as zero.
inline MultiTable jacobi_identity(const std::map<int, MultiTable>& ells, int n,
                                  const GradedBasis& basis, const EvalContext& ctx) {
  MultiTable J;
  J.num_args = n;
  J.degree = 2;
  for (int i = 1; i <= n; ++i) {
    auto inner = ells.find(i);
    auto outer = ells.find(n - i + 1);
    if (inner == ells.end() || outer == ells.end()) continue;
    J += rn_insert(outer->second, inner->second, basis, ctx);
  }
  return J;
}

/// Jacobiator of a binary bracket: l2 o l2 on arity-3 words.
inline MultiTable jacobiator(const MultiTable& l2, const GradedBasis& basis,
                             const EvalContext& ctx) {
  return rn_insert(l2, l2, basis, ctx);
}

/// Unique coderivation extending X: on a word,
///   delta_X(w) = sum_S eps(S) X(w_S) . w_rest,
/// summed over position subsets S of size num_args(X).
inline SymElt coderivation_apply(const MultiTable& X, const SymWord& w, const EvalContext& ctx) {
  SymElt out;
  int p = X.num_args;
  int total = w.arity();
  if (p > total) return out;
  Poly one = Poly::constant(ctx.vars, 1);
  for (auto& S : shuffles(p, total - p)) {
    int eps = extraction_sign(w.factors, S);
    std::vector<bool> in(w.factors.size(), false);
    std::vector<Arg> args;
    for (int s : S) {
      in[s] = true;
      args.push_back({w.factors[s], one});
    }
    ModElt val = eval_table(X, args, ctx);
    for (auto& [g, f] : val.comps) {
      std::vector<GenKey> factors;
      factors.push_back(g);
      for (size_t t = 0; t < w.factors.size(); ++t)
        if (!in[t]) factors.push_back(w.factors[t]);
      out.add_raw(std::move(factors), eps > 0 ? f : -f);
    }
  }
  return out;
}

}  // namespace lioid
