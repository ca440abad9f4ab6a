#pragma once

#include "page.hpp"

namespace lioid {

/// Degree-0 coalgebra morphism between structures, stored through its Taylor
/// coefficients: coefficient k eats canonical source words of k+1 letters
/// and lands in the target module.
struct TaylorMorphism {
  std::map<int, MultiTable> coeffs;

  int max_index() const {
    int m = -1;
    for (auto& [k, t] : coeffs) m = std::max(m, k);
    return m;
  }

  const MultiTable* coeff(int k) const {
    auto it = coeffs.find(k);
    return it == coeffs.end() ? nullptr : &it->second;
  }

  ModElt apply_word(const SymWord& w) const {
    if (w.factors.empty()) return ModElt{};
    const MultiTable* t = coeff(w.arity() - 1);
    if (!t) return ModElt{};
    return t->lookup(w.factors);
  }

  void set_coeff(int k, MultiTable t) {
    if (t.num_args != k + 1) throw std::invalid_argument("set_coeff: arity mismatch");
    if (t.degree != 0) throw std::invalid_argument("set_coeff: coefficient must have degree 0");
    if (t.is_zero()) coeffs.erase(k);
    else coeffs[k] = std::move(t);
  }
};

inline TaylorMorphism identity_morphism(const Complex& cx) {
  TaylorMorphism phi;
  MultiTable t;
  t.num_args = 1;
  t.degree = 0;
  for (auto& g : cx.basis.all()) t.entries.emplace(SymWord{{g}}, ModElt::gen(g, cx.vars));
  phi.coeffs.emplace(0, std::move(t));
  return phi;
}

/// Visit every unordered partition of w into nonempty blocks exactly once,
/// peeling the block that contains the first remaining letter.  The sign is
/// the Koszul sign of extracting the blocks to the front in peel order;
/// blocks inherit the canonical letter order of w.
template <class F>
inline void for_each_partition_rec(std::vector<GenKey>& remaining, std::vector<SymWord>& blocks,
                                   int sign, F& visit) {
  if (remaining.empty()) {
    visit(blocks, sign);
    return;
  }
  int n = static_cast<int>(remaining.size());
  for (unsigned long mask = 0; mask < (1ul << (n - 1)); ++mask) {
    std::vector<int> sel{0};
    for (int i = 1; i < n; ++i)
      if (mask & (1ul << (i - 1))) sel.push_back(i);
    int eps = extraction_sign(remaining, sel);
    SymWord block;
    std::vector<GenKey> rest;
    size_t si = 0;
    for (int i = 0; i < n; ++i) {
      if (si < sel.size() && sel[si] == i) {
        block.factors.push_back(remaining[i]);
        ++si;
      } else {
        rest.push_back(remaining[i]);
      }
    }
    blocks.push_back(std::move(block));
    for_each_partition_rec(rest, blocks, sign * eps, visit);
    blocks.pop_back();
  }
}

template <class F>
inline void for_each_partition(const SymWord& w, F visit) {
  if (static_cast<int>(w.factors.size()) > 20)
    throw std::invalid_argument("for_each_partition: word too long");
  std::vector<GenKey> remaining = w.factors;
  std::vector<SymWord> blocks;
  for_each_partition_rec(remaining, blocks, 1, visit);
}

/// Image of a word under the coalgebra morphism: the sum over unordered
/// partitions of the product of per-block Taylor coefficients, with Koszul
/// extraction signs.
inline SymElt expand_morphism(const TaylorMorphism& phi, const SymWord& w,
                              const std::vector<std::string>& vars, int cap = 8) {
  if (w.arity() > cap) throw std::invalid_argument("expand_morphism: arity cap exceeded");
  SymElt out;
  for_each_partition(w, [&](const std::vector<SymWord>& blocks, int sign) {
    SymElt prod;
    prod.add(SymWord{}, Poly::constant(vars, sign));
    for (auto& b : blocks) {
      ModElt v = phi.apply_word(b);
      if (v.is_zero()) {
        prod = SymElt{};
        break;
      }
      SymElt next;
      for (auto& [u, c] : prod.terms)
        for (auto& [g, f] : v.comps) {
          std::vector<GenKey> factors = u.factors;
          factors.push_back(g);
          next.add_raw(std::move(factors), c * f);
        }
      prod = std::move(next);
    }
    out += prod;
  });
  return out;
}

/// Arity component of Q applied after the morphism: the sum over partitions
/// of eps times the target bracket of the per-block images.  Block values
/// keep their coefficients so the anchored binary bracket sees them.
inline ModElt morphism_pushforward_bracket(const TaylorMorphism& phi, const SymWord& w,
                                           const OidStructure& tgt) {
  ModElt out;
  for_each_partition(w, [&](const std::vector<SymWord>& blocks, int sign) {
    std::vector<ModElt> vals;
    vals.reserve(blocks.size());
    for (auto& b : blocks) {
      ModElt v = phi.apply_word(b);
      if (v.is_zero()) return;
      vals.push_back(std::move(v));
    }
    out += eval_bracket(tgt, static_cast<int>(vals.size()), vals).scaled(Rat(sign));
  });
  return out;
}

/// Taylor coefficient of Phi.Q' - Q.Phi on one word.
inline ModElt morphism_defect(const TaylorMorphism& phi, const SymWord& w,
                              const std::map<int, MultiTable>& src_tables,
                              const EvalContext& sctx, const OidStructure& tgt) {
  ModElt out;
  for (auto& [j, lj] : src_tables) {
    if (lj.num_args > w.arity()) continue;
    for (auto& [u, c] : coderivation_apply(lj, w, sctx).terms) out += phi.apply_word(u).scaled(c);
  }
  out -= morphism_pushforward_bracket(phi, w, tgt);
  return out;
}

struct MorphismReport {
  std::map<int, MultiTable> residuals;  // word arity -> defect table, degree +1
  std::vector<std::string> anchor_failures;
  std::vector<std::string> hook_failures;
  int checks_run = 0;
  bool ok() const {
    return residuals.empty() && anchor_failures.empty() && hook_failures.empty();
  }
};

/// Morphism equation Phi.Q' = Q.Phi on canonical words of arity up to
/// max_args, plus the anchor and hook rows on degree -1 generators.  The
/// equation on arbitrary O-combinations reduces to these because the defect
/// is O-multilinear once the anchor row holds.
inline MorphismReport check_morphism(const TaylorMorphism& phi, const OidStructure& src,
                                     const OidStructure& tgt, int max_args) {
  if (src.cx.vars != tgt.cx.vars)
    throw std::invalid_argument("check_morphism: base rings differ");
  MorphismReport rep;
  for (auto& gen : src.cx.basis.degree_row(-1)) {
    GenKey g = src.cx.basis.find(gen.label);
    ModElt img = phi.apply_word(SymWord{{g}});
    Derivation want_rho;
    if (auto it = src.rho.find(g); it != src.rho.end()) want_rho = it->second;
    if (!(tgt.apply_rho(img) == want_rho)) rep.anchor_failures.push_back(gen.label);
    if (!(tgt.cx.apply_pi(img) == src.cx.apply_pi(ModElt::gen(g, src.cx.vars))))
      rep.hook_failures.push_back(gen.label);
    rep.checks_run += 2;
  }
  auto src_tables = src.all_tables();
  EvalContext sctx = src.ctx();
  for (int a = 1; a <= max_args; ++a) {
    MultiTable T;
    T.num_args = a;
    T.degree = 1;
    for (auto& w : words_of_arity(src.cx.basis, a)) {
      ModElt v = morphism_defect(phi, w, src_tables, sctx, tgt);
      if (!v.is_zero()) T.entries.emplace(w, std::move(v));
      rep.checks_run += 1;
    }
    if (!T.is_zero()) rep.residuals.emplace(a, std::move(T));
  }
  return rep;
}

/// Composite coalgebra morphism phi after psi, materialized on the words of
/// psi's source up to the given Taylor index.
inline TaylorMorphism compose(const TaylorMorphism& phi, const TaylorMorphism& psi,
                              const Complex& psi_src, int max_index = -1) {
  if (max_index < 0) max_index = (phi.max_index() + 1) * (psi.max_index() + 1) - 1;
  TaylorMorphism out;
  for (int k = 0; k <= max_index; ++k) {
    MultiTable t;
    t.num_args = k + 1;
    t.degree = 0;
    for (auto& w : words_of_arity(psi_src.basis, k + 1)) {
      ModElt v;
      for (auto& [u, c] : expand_morphism(psi, w, psi_src.vars, k + 1).terms)
        v += phi.apply_word(u).scaled(c);
      if (!v.is_zero()) t.entries.emplace(w, std::move(v));
    }
    if (!t.is_zero()) out.coeffs.emplace(k, std::move(t));
  }
  return out;
}

/// Build a morphism from an arbitrary structure into one living on a
/// resolution: the arity-0 coefficient lifts the source hook through the
/// target hook and then chases the differentials; every higher coefficient
/// kills the current defect by one D(theta) = defect solve.
inline TaylorMorphism construct_morphism(const OidStructure& src, const OidStructure& tgt,
                                         int max_args, int weight_cap) {
  const Complex& cs = src.cx;
  const Complex& ct = tgt.cx;
  if (cs.vars != ct.vars) throw std::invalid_argument("construct_morphism: base rings differ");
  if (!ct.weights_valid)
    throw std::invalid_argument("construct_morphism: target carries no weight grading");

  TaylorMorphism phi;
  MultiTable p0;
  p0.num_args = 1;
  p0.degree = 0;
  for (auto& gen : cs.basis.degree_row(-1)) {
    GenKey g = cs.basis.find(gen.label);
    Derivation want = cs.apply_pi(ModElt::gen(g, cs.vars));
    auto sol = lift_through_pi(ct, want, weight_cap);
    if (!sol)
      throw std::runtime_error("construct_morphism: hook of " + gen.label +
                               " has no lift through the target hook");
    if (!sol->is_zero()) p0.entries.emplace(SymWord{{g}}, std::move(*sol));
  }
  for (int deg = -2; deg >= cs.basis.depth(); --deg) {
    for (auto& gen : cs.basis.degree_row(deg)) {
      GenKey g = cs.basis.find(gen.label);
      ModElt rhs;
      if (auto it = cs.d.find(g); it != cs.d.end())
        for (auto& [h, f] : it->second.comps) rhs += p0.lookup({h}).scaled(f);
      if (!ct.basis.has_degree(deg)) {
        if (!rhs.is_zero())
          throw std::runtime_error("construct_morphism: " + gen.label +
                                   " maps below the target depth");
        continue;
      }
      auto sol = lift_through_d(ct, deg, rhs, weight_cap);
      if (!sol)
        throw std::runtime_error("construct_morphism: no chain lift for " + gen.label);
      if (!sol->is_zero()) p0.entries.emplace(SymWord{{g}}, std::move(*sol));
    }
  }
  if (!p0.is_zero()) phi.coeffs.emplace(0, p0);
  for (auto& gen : cs.basis.degree_row(-1)) {
    GenKey g = cs.basis.find(gen.label);
    Derivation want;
    if (auto it = src.rho.find(g); it != src.rho.end()) want = it->second;
    if (!(tgt.apply_rho(p0.lookup({g})) == want))
      throw std::runtime_error("construct_morphism: anchor of " + gen.label +
                               " not reproduced by the hook lift");
  }

  auto src_tables = src.all_tables();
  EvalContext sctx = src.ctx();
  for (int a = 2; a <= max_args; ++a) {
    MultiTable T;
    T.num_args = a;
    T.degree = 1;
    for (auto& w : words_of_arity(cs.basis, a)) {
      ModElt v = morphism_defect(phi, w, src_tables, sctx, tgt);
      if (!v.is_zero()) T.entries.emplace(w, std::move(v));
    }
    if (T.is_zero()) continue;
    SolveReport rep = solve_D(page_of(T), cs, ct, a - 1, weight_cap);
    if (!rep.solved)
      throw solver_error("construct_morphism: arity " + std::to_string(a) + " solve failed: " +
                             (rep.notes.empty() ? "nonzero residual" : rep.notes.front()),
                         rep);
    phi.set_coeff(a - 1, table_of(rep.tau));
  }
  return phi;
}

/// Coderivation along a morphism, determined by its Taylor coefficients and
/// homogeneous degree (-1 for homotopies).
struct TaylorCoderivation {
  int degree = -1;
  TaylorMorphism base;
  std::map<int, MultiTable> coeffs;

  const MultiTable* coeff(int k) const {
    auto it = coeffs.find(k);
    return it == coeffs.end() ? nullptr : &it->second;
  }

  ModElt apply_word(const SymWord& w) const {
    if (w.factors.empty()) return ModElt{};
    auto it = coeffs.find(w.arity() - 1);
    if (it == coeffs.end()) return ModElt{};
    return it->second.lookup(w.factors);
  }
};

/// Coderivation co-Leibniz expansion: one block through the coefficients of
/// H (extracted to the front), the rest through the base morphism.
inline SymElt expand_coderivation(const TaylorCoderivation& H, const SymWord& w,
                                  const std::vector<std::string>& vars, int cap = 8) {
  if (w.arity() > cap) throw std::invalid_argument("expand_coderivation: arity cap exceeded");
  SymElt out;
  int n = w.arity();
  for (unsigned long mask = 1; mask < (1ul << n); ++mask) {
    std::vector<int> sel;
    SymWord hword;
    SymWord rest;
    for (int i = 0; i < n; ++i) {
      if (mask & (1ul << i)) {
        sel.push_back(i);
        hword.factors.push_back(w.factors[i]);
      } else {
        rest.factors.push_back(w.factors[i]);
      }
    }
    int eps = extraction_sign(w.factors, sel);
    ModElt hval = H.apply_word(hword);
    if (hval.is_zero()) continue;
    SymElt tail;
    if (rest.factors.empty()) tail.add(SymWord{}, Poly::constant(vars, 1));
    else tail = expand_morphism(H.base, rest, vars, cap);
    for (auto& [g, f] : hval.comps)
      for (auto& [u, c] : tail.terms) {
        std::vector<GenKey> factors{g};
        factors.insert(factors.end(), u.factors.begin(), u.factors.end());
        out.add_raw(std::move(factors), (f * c).scaled(Rat(eps)));
      }
  }
  return out;
}

/// Taylor coefficient of Q.H + H.Q' along the given base morphism: the
/// right-hand side of the homotopy flow on one word.
inline ModElt flow_rhs(const TaylorCoderivation& H, const TaylorMorphism& base, const SymWord& w,
                       const std::map<int, MultiTable>& src_tables, const EvalContext& sctx,
                       const OidStructure& tgt) {
  ModElt out;
  int n = w.arity();
  for (unsigned long mask = 1; mask < (1ul << n); ++mask) {
    std::vector<int> sel;
    SymWord hword;
    SymWord rest;
    for (int i = 0; i < n; ++i) {
      if (mask & (1ul << i)) {
        sel.push_back(i);
        hword.factors.push_back(w.factors[i]);
      } else {
        rest.factors.push_back(w.factors[i]);
      }
    }
    int eps = extraction_sign(w.factors, sel);
    ModElt hval = H.apply_word(hword);
    if (hval.is_zero()) continue;
    if (rest.factors.empty()) {
      out += eval_bracket(tgt, 1, {hval}).scaled(Rat(eps));
      continue;
    }
    for_each_partition(rest, [&](const std::vector<SymWord>& blocks, int sign) {
      std::vector<ModElt> vals{hval};
      for (auto& b : blocks) {
        ModElt v = base.apply_word(b);
        if (v.is_zero()) return;
        vals.push_back(std::move(v));
      }
      out += eval_bracket(tgt, static_cast<int>(vals.size()), vals).scaled(Rat(eps * sign));
    });
  }
  for (auto& [j, lj] : src_tables) {
    if (lj.num_args > w.arity()) continue;
    for (auto& [u, c] : coderivation_apply(lj, w, sctx).terms) out += H.apply_word(u).scaled(c);
  }
  return out;
}

inline std::vector<std::string> with_t(const std::vector<std::string>& vars) {
  for (auto& v : vars)
    if (v == "t") throw std::invalid_argument("variable name t is reserved for homotopies");
  auto tv = vars;
  tv.push_back("t");
  return tv;
}

inline ModElt lift_mod(const ModElt& x, const std::vector<std::string>& tvars) {
  ModElt r;
  for (auto& [g, f] : x.comps) r.comps.emplace(g, f.with_vars(tvars));
  return r;
}

inline Derivation lift_der(const Derivation& x, const std::vector<std::string>& tvars) {
  Derivation r;
  for (auto& [v, f] : x.comps) r.comps.emplace(v, f.with_vars(tvars));
  return r;
}

inline MultiTable lift_table(const MultiTable& t, const std::vector<std::string>& tvars) {
  MultiTable r;
  r.num_args = t.num_args;
  r.degree = t.degree;
  r.leibniz = t.leibniz;
  for (auto& [w, v] : t.entries) r.entries.emplace(w, lift_mod(v, tvars));
  return r;
}

inline Complex lift_complex(const Complex& cx, const std::vector<std::string>& tvars) {
  Complex r;
  r.vars = tvars;
  r.basis = cx.basis;
  r.weights_valid = cx.weights_valid;
  for (auto& [g, v] : cx.d) r.d.emplace(g, lift_mod(v, tvars));
  for (auto& [g, v] : cx.pi) r.pi.emplace(g, lift_der(v, tvars));
  return r;
}

inline OidStructure lift_structure(const OidStructure& oid, const std::vector<std::string>& tvars) {
  if (oid.modulus)
    throw std::invalid_argument("lift_structure: homotopies over a modulus are not supported");
  OidStructure r;
  r.cx = lift_complex(oid.cx, tvars);
  for (auto& [g, v] : oid.rho) r.rho.emplace(g, lift_der(v, tvars));
  for (auto& [k, t] : oid.brackets) r.brackets.emplace(k, lift_table(t, tvars));
  return r;
}

inline TaylorMorphism lift_morphism(const TaylorMorphism& phi,
                                    const std::vector<std::string>& tvars) {
  TaylorMorphism r;
  for (auto& [k, t] : phi.coeffs) r.coeffs.emplace(k, lift_table(t, tvars));
  return r;
}

/// Antiderivative in vars[tv] vanishing at 0.
inline Poly t_integral(const Poly& p, int tv) {
  Poly r = Poly::zero(p.vars());
  for (auto& [m, c] : p.terms()) {
    Monomial n = m;
    n[tv] += 1;
    r += Poly::term(p.vars(), n, c / Rat(n[tv]));
  }
  return r;
}

inline Poly t_eval(const Poly& p, int tv, const Rat& val) {
  return p.substituted(tv, Poly::constant(p.vars(), val));
}

/// Polynomial-in-t path of morphisms together with the coderivation driving
/// it and the interval it was integrated over.  All tables live over the
/// extended variable list.
struct HomotopyTrace {
  std::vector<std::string> tvars;
  TaylorMorphism phi_t;
  TaylorCoderivation h;
  Rat t_start{0};
  Rat t_end{1};
};

/// Integrate d(phi_t)/dt = Q.H_t + H_t.Q' from the start of the interval,
/// arity by arity: the Taylor index k right-hand side only involves lower
/// indices of phi_t, so each coefficient is an exact t-polynomial integral.
inline HomotopyTrace homotopy_step(const TaylorMorphism& phi, const TaylorCoderivation& hh,
                                   const OidStructure& src, const OidStructure& tgt,
                                   const Rat& t_start, const Rat& t_end, int max_args) {
  if (src.cx.vars != tgt.cx.vars)
    throw std::invalid_argument("homotopy_step: base rings differ");
  if (hh.degree != -1) throw std::invalid_argument("homotopy_step: homotopy must have degree -1");
  HomotopyTrace tr;
  tr.tvars = with_t(src.cx.vars);
  tr.t_start = t_start;
  tr.t_end = t_end;
  int tv = static_cast<int>(tr.tvars.size()) - 1;

  OidStructure ls = lift_structure(src, tr.tvars);
  OidStructure lt = lift_structure(tgt, tr.tvars);
  TaylorCoderivation H;
  H.degree = -1;
  for (auto& [k, t] : hh.coeffs) H.coeffs.emplace(k, lift_table(t, tr.tvars));

  auto src_tables = ls.all_tables();
  EvalContext sctx = ls.ctx();
  TaylorMorphism cur;
  for (int k = 0; k + 1 <= max_args; ++k) {
    MultiTable tk;
    tk.num_args = k + 1;
    tk.degree = 0;
    if (auto* c0 = phi.coeff(k)) tk = lift_table(*c0, tr.tvars);
    for (auto& w : words_of_arity(ls.cx.basis, k + 1)) {
      ModElt r = flow_rhs(H, cur, w, src_tables, sctx, lt);
      if (r.is_zero()) continue;
      ModElt val;
      for (auto& [g, f] : r.comps) {
        Poly F = t_integral(f, tv);
        val.add(g, F - t_eval(F, tv, t_start));
      }
      tk.add_entry(w, val);
    }
    if (!tk.is_zero()) cur.coeffs.emplace(k, std::move(tk));
  }
  H.base = cur;
  tr.phi_t = std::move(cur);
  tr.h = std::move(H);
  return tr;
}

/// Freeze the path at one time: substitute, check t is gone, project back to
/// the original variable list.
inline TaylorMorphism morphism_at(const HomotopyTrace& tr, const Rat& t0) {
  int tv = static_cast<int>(tr.tvars.size()) - 1;
  TaylorMorphism out;
  for (auto& [k, t] : tr.phi_t.coeffs) {
    MultiTable r;
    r.num_args = t.num_args;
    r.degree = t.degree;
    r.leibniz = t.leibniz;
    for (auto& [w, v] : t.entries) {
      ModElt val;
      for (auto& [g, f] : v.comps) val.add(g, t_eval(f, tv, t0).without_var(tv));
      if (!val.is_zero()) r.entries.emplace(w, std::move(val));
    }
    if (!r.is_zero()) out.coeffs.emplace(k, std::move(r));
  }
  return out;
}

/// d(phi_t)/dt - (Q.H + H.Q') on one word over the lifted structures; the
/// path solves the flow iff this vanishes identically on all words.
inline ModElt flow_defect(const TaylorMorphism& phi_t, const TaylorCoderivation& H,
                          const SymWord& w, const OidStructure& lifted_src,
                          const OidStructure& lifted_tgt) {
  int tv = static_cast<int>(lifted_src.cx.vars.size()) - 1;
  ModElt out;
  for (auto& [g, f] : phi_t.apply_word(w).comps) out.add(g, f.partial(tv));
  auto src_tables = lifted_src.all_tables();
  EvalContext sctx = lifted_src.ctx();
  out -= flow_rhs(H, phi_t, w, src_tables, sctx, lifted_tgt);
  return out;
}

}  // namespace lioid
