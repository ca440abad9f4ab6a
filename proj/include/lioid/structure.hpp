#pragma once

#include "complex.hpp"
#include "table.hpp"

namespace lioid {

/// Work modulo the principal ideal (phi), with canonical remainders taken
/// against a fixed monomial order.
struct Reduction {
  Poly phi;
  MonomialOrder order;
};

inline Poly reduced(const Poly& p, const std::optional<Reduction>& r) {
  return r ? reduce_mod(p, r->phi, r->order) : p;
}

inline ModElt reduced(const ModElt& x, const std::optional<Reduction>& r) {
  if (!r) return x;
  ModElt out;
  for (auto& [g, f] : x.comps) out.add(g, reduce_mod(f, r->phi, r->order));
  return out;
}

inline Derivation reduced(const Derivation& x, const std::optional<Reduction>& r) {
  if (!r) return x;
  Derivation out;
  for (auto& [v, f] : x.comps) out.add(v, reduce_mod(f, r->phi, r->order));
  return out;
}

/// Negatively graded Lie infinity-algebroid structure on a free complex:
/// unary bracket = d, anchor rho on degree -1 generators, higher brackets
/// stored as tables on canonical words. An optional modulus makes every
/// axiom check run in O/(phi).
struct OidStructure {
  Complex cx;
  std::map<GenKey, Derivation> rho;
  std::map<int, MultiTable> brackets;  // arities >= 2
  std::optional<Reduction> modulus;

  EvalContext ctx() const { return EvalContext{cx.vars, &rho}; }

  int max_arity_stored() const {
    int m = 1;
    for (auto& [k, t] : brackets) m = std::max(m, k);
    return m;
  }

  /// The unary bracket as a table: d on generators of degree <= -2, zero on
  /// degree -1 (the complex is truncated; the hook is separate data).
  MultiTable ell1() const {
    MultiTable t;
    t.num_args = 1;
    t.degree = 1;
    for (auto& [g, img] : cx.d) t.entries.emplace(SymWord{{g}}, img);
    return t;
  }

  /// Tables for arities 1..max, absent arities meaning zero.
  std::map<int, MultiTable> all_tables() const {
    std::map<int, MultiTable> ts;
    ts.emplace(1, ell1());
    for (auto& [k, t] : brackets) ts.emplace(k, t);
    return ts;
  }

  Derivation apply_rho(const ModElt& x) const {
    Derivation out;
    for (auto& [g, f] : x.comps) {
      auto it = rho.find(g);
      if (it == rho.end()) continue;
      out += it->second.scaled(f);
    }
    return out;
  }
};

/// Bracket evaluation on module elements: multilinear expansion over
/// components, with the anchored two-term rule for arity 2.
inline ModElt eval_bracket(const OidStructure& oid, int k, const std::vector<ModElt>& args) {
  if (static_cast<int>(args.size()) != k) throw std::invalid_argument("eval_bracket: arity mismatch");
  if (k == 1) return oid.cx.apply_d(args[0]);
  auto it = oid.brackets.find(k);
  MultiTable empty;
  const MultiTable* table;
  if (it != oid.brackets.end()) {
    table = &it->second;
  } else {
    empty.num_args = k;
    empty.leibniz = (k == 2);
    table = &empty;
  }
  EvalContext ctx = oid.ctx();
  ModElt out;
  std::vector<Arg> tuple(k, Arg{GenKey{}, Poly::zero(oid.cx.vars)});
  auto rec = [&](auto&& self, int slot) -> void {
    if (slot == k) {
      out += eval_table(*table, tuple, ctx);
      return;
    }
    for (auto& [g, f] : args[slot].comps) {
      tuple[slot] = {g, f};
      self(self, slot + 1);
    }
  };
  rec(rec, 0);
  return out;
}

struct AxiomsReport {
  std::vector<std::string> failures;
  int checks_run = 0;
  bool ok() const { return failures.empty(); }
};

/// Full axiom battery:
///   - chain complex conditions (d.d = 0, pi.d = 0, degree bookkeeping)
///   - higher Jacobi identities per arity n <= max_arity on canonical words
///   - anchor annihilates the image of d in degree -1
///   - anchor and hook both intertwine the binary bracket with the
///     commutator of vector fields.
/// With a modulus set, every residual is reduced before testing for zero.
inline AxiomsReport verify_axioms(const OidStructure& oid, int max_arity) {
  AxiomsReport rep;
  ComplexReport crep = verify_complex(oid.cx);
  for (auto& p : crep.problems) rep.failures.push_back("complex: " + p);
  rep.checks_run += 1;

  const GradedBasis& basis = oid.cx.basis;
  EvalContext ctx = oid.ctx();

  for (auto& [k, t] : oid.brackets) {
    if (t.num_args != k)
      rep.failures.push_back("bracket table " + std::to_string(k) + " has wrong arity field");
    for (auto& [w, v] : t.entries) {
      if (w.arity() != k) {
        rep.failures.push_back("bracket " + std::to_string(k) + " entry with wrong word arity");
        continue;
      }
      for (auto& [g, f] : v.comps)
        if (g.degree != w.degree() + 1)
          rep.failures.push_back("bracket " + std::to_string(k) + " off-degree value at " +
                                 word_str(w, basis));
    }
  }

  auto tables = oid.all_tables();
  for (int n = 1; n <= max_arity; ++n) {
    MultiTable J = jacobi_identity(tables, n, basis, ctx);
    for (auto& [w, v] : J.entries) {
      ModElt r = reduced(v, oid.modulus);
      if (!r.is_zero())
        rep.failures.push_back("jacobi arity " + std::to_string(n) + " fails at " +
                               word_str(w, basis));
    }
    rep.checks_run += 1;
  }

  for (auto& [g, img] : oid.cx.d) {
    if (g.degree != -2) continue;
    Derivation r = reduced(oid.apply_rho(img), oid.modulus);
    if (!r.is_zero())
      rep.failures.push_back("anchor does not kill d(" + basis.at(g).label + ")");
  }
  rep.checks_run += 1;

  auto l2 = oid.brackets.find(2);
  const auto& row = basis.degree_row(-1);
  for (size_t i = 0; i < row.size(); ++i)
    for (size_t j = i + 1; j < row.size(); ++j) {
      GenKey a{-1, static_cast<int>(i)}, b{-1, static_cast<int>(j)};
      ModElt br = l2 != oid.brackets.end() ? l2->second.lookup({a, b}) : ModElt{};
      auto pair_label = [&]() { return basis.at(a).label + ", " + basis.at(b).label; };

      auto ra = oid.rho.find(a), rb = oid.rho.find(b);
      Derivation lhs = oid.apply_rho(br);
      Derivation rhs;
      if (ra != oid.rho.end() && rb != oid.rho.end())
        rhs = Derivation::bracket(ra->second, rb->second);
      if (!reduced(lhs - rhs, oid.modulus).is_zero())
        rep.failures.push_back("anchor not a morphism on (" + pair_label() + ")");

      Derivation hl = reduced(oid.cx.apply_pi(br), oid.modulus);
      Derivation hr;
      auto pa = oid.cx.pi.find(a), pb = oid.cx.pi.find(b);
      if (pa != oid.cx.pi.end() && pb != oid.cx.pi.end())
        hr = Derivation::bracket(pa->second, pb->second);
      if (!reduced(hl - reduced(hr, oid.modulus), oid.modulus).is_zero())
        rep.failures.push_back("hook not a morphism on (" + pair_label() + ")");
    }
  rep.checks_run += 2;
  return rep;
}

/// Twist by a function chi: d is unchanged,
///   rho' = chi rho,  pi' = chi pi,
///   l2'(x,y) = chi l2(x,y) + rho(x)[chi] y + (-1)^{|x||y|} rho(y)[chi] x,
///   lk' = chi^{k-1} lk for k >= 3.
inline OidStructure chi_twist(const OidStructure& oid, const Poly& chi) {
  OidStructure out;
  out.cx = oid.cx;
  out.modulus = oid.modulus;
  for (auto& [g, der] : oid.cx.pi) {
    Derivation s = der.scaled(chi);
    if (!s.is_zero()) out.cx.pi[g] = std::move(s);
    else out.cx.pi.erase(g);
  }
  if (!chi.is_zero())
    for (auto& [g, der] : oid.rho) {
      Derivation s = der.scaled(chi);
      if (!s.is_zero()) out.rho[g] = std::move(s);
    }
  // chi pi may have become zero; drop empty images entirely
  for (auto it = out.cx.pi.begin(); it != out.cx.pi.end();)
    it = it->second.is_zero() ? out.cx.pi.erase(it) : std::next(it);

  EvalContext ctx = oid.ctx();
  for (auto& [k, t] : oid.brackets) {
    MultiTable nt;
    nt.num_args = t.num_args;
    nt.degree = t.degree;
    nt.leibniz = t.leibniz;
    if (k == 2) {
      for (auto& w : words_of_arity(oid.cx.basis, 2)) {
        GenKey x = w.factors[0], y = w.factors[1];
        ModElt v = t.lookup({x, y}).scaled(chi);
        v.add(y, ctx.rho_apply(x, chi));
        Poly s = ctx.rho_apply(y, chi);
        if (odd_degree(x) && odd_degree(y)) s = -s;
        v.add(x, s);
        if (!v.is_zero()) nt.entries.emplace(w, std::move(v));
      }
    } else {
      nt = t.scaled(chi.pow(k - 1));
      nt.leibniz = t.leibniz;
    }
    out.brackets.emplace(k, std::move(nt));
  }
  return out;
}

struct RestrictReport {
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

/// Pass to the quotient O/(phi). Sound precisely when every anchor image
/// preserves the ideal (phi); the returned structure carries the modulus so
/// later verification reduces all residuals.
inline OidStructure restrict_structure(const OidStructure& oid, const Poly& phi,
                                       const MonomialOrder& order, RestrictReport* rep = nullptr) {
  RestrictReport local;
  for (auto& [g, der] : oid.rho) {
    Poly r = reduce_mod(der.apply(phi), phi, order);
    if (!r.is_zero())
      local.failures.push_back("anchor of " + oid.cx.basis.at(g).label +
                               " does not preserve the ideal (" + phi.str() + ")");
  }
  OidStructure out = oid;
  out.modulus = Reduction{phi, order};
  if (rep) *rep = std::move(local);
  else if (!local.failures.empty())
    throw std::domain_error("restrict_structure: " + local.failures.front());
  return out;
}

}  // namespace lioid
