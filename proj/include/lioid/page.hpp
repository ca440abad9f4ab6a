#pragma once

#include "structure.hpp"

namespace lioid {

/// Degree-homogeneous O-multilinear homomorphism table out of words of a
/// fixed arity.  Values on a word of degree t live in the module column
/// t + degree; when that lands at 0 the value sits in the terminal column of
/// vector fields instead (the hook map).
struct PageElement {
  int num_args = 1;
  int degree = 0;
  std::map<SymWord, ModElt> cols;
  std::map<SymWord, Derivation> hook;

  bool is_zero() const { return cols.empty() && hook.empty(); }

  void add_col(const SymWord& w, const ModElt& v) {
    if (v.is_zero()) return;
    auto [it, fresh] = cols.try_emplace(w, v);
    if (!fresh) {
      it->second += v;
      if (it->second.is_zero()) cols.erase(it);
    }
  }

  void add_hook(const SymWord& w, const Derivation& v) {
    if (v.is_zero()) return;
    auto [it, fresh] = hook.try_emplace(w, v);
    if (!fresh) {
      it->second += v;
      if (it->second.is_zero()) hook.erase(it);
    }
  }

  PageElement& operator+=(const PageElement& o) {
    for (auto& [w, v] : o.cols) add_col(w, v);
    for (auto& [w, v] : o.hook) add_hook(w, v);
    return *this;
  }

  PageElement operator-() const {
    PageElement p;
    p.num_args = num_args;
    p.degree = degree;
    for (auto& [w, v] : cols) p.cols.emplace(w, -v);
    for (auto& [w, v] : hook) p.hook.emplace(w, -v);
    return p;
  }

  bool operator==(const PageElement& o) const {
    return num_args == o.num_args && degree == o.degree && cols == o.cols && hook == o.hook;
  }
};

inline PageElement page_of(const MultiTable& t) {
  PageElement p;
  p.num_args = t.num_args;
  p.degree = t.degree;
  p.cols = t.entries;
  return p;
}

inline MultiTable table_of(const PageElement& p, bool leibniz = false) {
  MultiTable t;
  t.num_args = p.num_args;
  t.degree = p.degree;
  t.leibniz = leibniz;
  t.entries = p.cols;
  return t;
}

/// Evaluate a table on the derived word d'(w); the vertical differential.
inline ModElt eval_on_derived(const std::map<SymWord, ModElt>& cols, const SymWord& w,
                              const Complex& cx) {
  ModElt out;
  for (auto& [u, coeff] : derive_word(w, cx.d, cx.vars).terms) {
    auto it = cols.find(u);
    if (it != cols.end()) out += it->second.scaled(coeff);
  }
  return out;
}

inline Derivation hook_on_derived(const std::map<SymWord, Derivation>& hk, const SymWord& w,
                                  const Complex& cx) {
  Derivation out;
  for (auto& [u, coeff] : derive_word(w, cx.d, cx.vars).terms) {
    auto it = hk.find(u);
    if (it != hk.end()) out += it->second.scaled(coeff);
  }
  return out;
}

/// Total differential D = (d or pi after) - (-1)^degree (d' before).  The
/// horizontal composition is zero on hook components, which have no further
/// column to map to.  Words live over cw, values over cv; the two coincide
/// for the one-complex pages of a single structure.
inline PageElement total_D(const PageElement& p, const Complex& cw, const Complex& cv) {
  PageElement out;
  out.num_args = p.num_args;
  out.degree = p.degree + 1;
  int sj = (p.degree % 2 == 0) ? 1 : -1;
  std::set<int> degs;
  for (auto& [w, v] : p.cols) degs.insert(w.degree());
  for (auto& [w, v] : p.hook) degs.insert(w.degree());
  std::set<int> cand;
  for (int t : degs) {
    cand.insert(t);
    cand.insert(t - 1);
  }
  for (int t : cand)
    for (auto& w : words_of_arity(cw.basis, p.num_args, t)) {
      int col = t + p.degree + 1;
      if (col <= -1) {
        ModElt val;
        auto it = p.cols.find(w);
        if (it != p.cols.end()) val = cv.apply_d(it->second);
        ModElt vert = eval_on_derived(p.cols, w, cw);
        if (sj > 0) val -= vert;
        else val += vert;
        out.add_col(w, val);
      } else if (col == 0) {
        Derivation val;
        auto it = p.cols.find(w);
        if (it != p.cols.end()) val = cv.apply_pi(it->second);
        Derivation vert = hook_on_derived(p.hook, w, cw);
        if (sj > 0) val -= vert;
        else val += vert;
        out.add_hook(w, val);
      }
    }
  return out;
}

inline PageElement total_D(const PageElement& p, const Complex& cx) { return total_D(p, cx, cx); }

struct ClosedReport {
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

/// Closedness of a hookless element: (1) values on the shallowest words land
/// in ker(pi); (2) the squares d(p(w)) = (-1)^degree p(d'w) commute.
inline ClosedReport is_closed(const PageElement& p, const Complex& cw, const Complex& cv) {
  if (!p.hook.empty()) throw std::invalid_argument("is_closed: element has a hook component");
  ClosedReport rep;
  PageElement dp = total_D(p, cw, cv);
  for (auto& [w, v] : dp.hook)
    rep.failures.push_back("image escapes ker(pi) at " + word_str(w, cw.basis));
  for (auto& [w, v] : dp.cols)
    rep.failures.push_back("square fails at " + word_str(w, cw.basis));
  return rep;
}

inline ClosedReport is_closed(const PageElement& p, const Complex& cx) {
  return is_closed(p, cx, cx);
}

struct SolveReport {
  bool solved = false;
  PageElement tau;
  PageElement residual;
  std::vector<std::string> notes;
};

/// Raised by the construction engines when a D(tau)=c solve fails.
struct solver_error : std::runtime_error {
  SolveReport report;
  solver_error(const std::string& msg, SolveReport rep)
      : std::runtime_error(msg), report(std::move(rep)) {}
};

/// Solve D(tau) = c by chasing columns from the shallowest words down, one
/// finite weight slice at a time.  c must vanish on columns above
/// -min_column and the certificate is supported on columns below that; the
/// residual is re-evaluated from scratch so solved implies D(tau) = c
/// exactly.  Words range over cw; preimages are taken in cv.
inline SolveReport solve_D(const PageElement& c, const Complex& cw, const Complex& cv,
                           int min_column, int weight_cap) {
  if (!cv.weights_valid)
    throw std::invalid_argument("solve_D: value complex carries no weight grading");
  if (cw.vars != cv.vars) throw std::invalid_argument("solve_D: base rings differ");
  if (c.num_args < 2) throw std::invalid_argument("solve_D: arity must be at least 2");
  SolveReport rep;
  rep.tau.num_args = c.num_args;
  rep.tau.degree = c.degree - 1;
  rep.residual.num_args = c.num_args;
  rep.residual.degree = c.degree;

  for (auto& [w, v] : c.cols)
    if (w.degree() + c.degree > -min_column)
      rep.notes.push_back("support above column " + std::to_string(-min_column) + " at " +
                          word_str(w, cw.basis));
  if (!c.hook.empty() && min_column > 0)
    rep.notes.push_back("hook component present with positive min_column");

  PageElement dc = total_D(c, cw, cv);
  if (!dc.is_zero()) {
    std::string at = dc.cols.empty() ? word_str(dc.hook.begin()->first, cw.basis)
                                     : word_str(dc.cols.begin()->first, cw.basis);
    rep.notes.push_back("input is not D-closed at " + at);
  }
  if (!rep.notes.empty()) {
    rep.residual = c;
    return rep;
  }

  int r = c.degree;
  int s_ch = (r % 2 == 0) ? -1 : 1;  // (-1)^{r-1}, the sign moved to the right-hand side
  int wdepth = cw.basis.depth();
  int vdepth = cv.basis.depth();
  auto shift = cv.pi_shift();

  for (int t = -c.num_args; t >= c.num_args * wdepth; --t) {
    for (auto& w : words_of_arity(cw.basis, c.num_args, t)) {
      ModElt rhs;
      if (auto it = c.cols.find(w); it != c.cols.end()) rhs = it->second;
      ModElt chase = eval_on_derived(rep.tau.cols, w, cw);
      if (s_ch > 0) rhs += chase;
      else rhs -= chase;

      int ceq = t + r;       // column of the equation at this word
      int ct = t + r - 1;    // column where tau(w) lives
      if (ceq == 0) {
        Derivation drhs;
        if (auto it = c.hook.find(w); it != c.hook.end()) drhs = it->second;
        if (!rhs.is_zero()) {
          rep.notes.push_back("module value at hook column at " + word_str(w, cw.basis));
          continue;
        }
        if (!shift) {
          if (!drhs.is_zero())
            rep.notes.push_back("no hook map to lift through at " + word_str(w, cw.basis));
          continue;
        }
        ModElt sol;
        for (auto& [wt, piece] : split_by_weight(drhs, cv.vars)) {
          if (wt - *shift > weight_cap) {
            rep.notes.push_back("weight cap exceeded at " + word_str(w, cw.basis));
            continue;
          }
          Slice<GenKey> src = module_slice(cv, -1, wt - *shift);
          Slice<int> tgt = der_slice(cv, wt);
          auto b = coords_in(piece, tgt);
          if (!b) {
            rep.notes.push_back("hook value escapes its weight slice at " + word_str(w, cw.basis));
            continue;
          }
          QMat mat(tgt.dim(), std::vector<Rat>(src.dim(), Rat(0)));
          for (int coli = 0; coli < src.dim(); ++coli) {
            auto& [g, m] = src.items[coli];
            Derivation img = cv.apply_pi(ModElt::gen(g, cv.vars).scaled(Poly::term(cv.vars, m, 1)));
            auto cc = coords_in(img, tgt);
            if (!cc) throw std::runtime_error("solve_D: pi image escapes slice");
            for (int ri = 0; ri < tgt.dim(); ++ri) mat[ri][coli] = (*cc)[ri];
          }
          auto x = solve_linear(mat, *b);
          if (!x) {
            rep.notes.push_back("no lift through the hook at " + word_str(w, cw.basis));
            continue;
          }
          for (int coli = 0; coli < src.dim(); ++coli)
            if ((*x)[coli] != 0) {
              auto& [g, m] = src.items[coli];
              sol.add(g, Poly::term(cv.vars, m, (*x)[coli]));
            }
        }
        rep.tau.add_col(w, sol);
        continue;
      }
      if (ceq > 0) {
        if (!rhs.is_zero()) rep.notes.push_back("value above the hook column at " + word_str(w, cw.basis));
        continue;
      }
      if (rhs.is_zero()) continue;
      if (ct < vdepth || ct > -(min_column + 1)) {
        rep.notes.push_back("no column available for a preimage at " + word_str(w, cw.basis));
        continue;
      }
      ModElt sol;
      for (auto& [wt, piece] : split_by_weight(rhs, cv.basis)) {
        if (wt > weight_cap) {
          rep.notes.push_back("weight cap exceeded at " + word_str(w, cw.basis));
          continue;
        }
        Slice<GenKey> src = module_slice(cv, ct, wt);
        Slice<GenKey> tgt = module_slice(cv, ceq, wt);
        auto b = coords_in(piece, tgt);
        if (!b) {
          rep.notes.push_back("value escapes its weight slice at " + word_str(w, cw.basis));
          continue;
        }
        QMat mat(tgt.dim(), std::vector<Rat>(src.dim(), Rat(0)));
        for (int coli = 0; coli < src.dim(); ++coli) {
          auto& [g, m] = src.items[coli];
          ModElt img = cv.apply_d(ModElt::gen(g, cv.vars).scaled(Poly::term(cv.vars, m, 1)));
          auto cc = coords_in(img, tgt);
          if (!cc) throw std::runtime_error("solve_D: d image escapes slice");
          for (int ri = 0; ri < tgt.dim(); ++ri) mat[ri][coli] = (*cc)[ri];
        }
        auto x = solve_linear(mat, *b);
        if (!x) {
          rep.notes.push_back("no d-preimage at " + word_str(w, cw.basis) + " weight " + std::to_string(wt));
          continue;
        }
        for (int coli = 0; coli < src.dim(); ++coli)
          if ((*x)[coli] != 0) {
            auto& [g, m] = src.items[coli];
            sol.add(g, Poly::term(cv.vars, m, (*x)[coli]));
          }
      }
      rep.tau.add_col(w, sol);
    }
  }

  PageElement check = total_D(rep.tau, cw, cv);
  PageElement diff = check;
  diff += -c;
  rep.residual = diff;
  rep.solved = rep.notes.empty() && diff.is_zero();
  return rep;
}

inline SolveReport solve_D(const PageElement& c, const Complex& cx, int min_column,
                           int weight_cap) {
  return solve_D(c, cx, cx, min_column, weight_cap);
}

/// The unary bracket as a table: the differential on generators of depth two
/// and below.
inline MultiTable ell1_table(const Complex& cx) {
  MultiTable t;
  t.num_args = 1;
  t.degree = 1;
  for (auto& [g, v] : cx.d) t.entries.emplace(SymWord{{g}}, v);
  return t;
}

/// Lift the vector-field brackets of the degree -1 generators through the
/// hook: u(e_i, e_j) solves pi(u) = [pi e_i, pi e_j] weight slice by weight
/// slice.  The word encoding makes skew-symmetry automatic.
inline std::map<SymWord, ModElt> lift_generator_bracket(const Complex& cx, int weight_cap) {
  std::map<SymWord, ModElt> u;
  for (auto& w : words_of_arity(cx.basis, 2, -2)) {
    Derivation b = Derivation::bracket(cx.pi.at(w.factors[0]), cx.pi.at(w.factors[1]));
    if (b.is_zero()) continue;
    auto sol = lift_through_pi(cx, b, weight_cap);
    if (!sol)
      throw std::runtime_error("lift_generator_bracket: bracket of hooks not in the hook image at " +
                               word_str(w, cx.basis));
    if (!sol->is_zero()) u.emplace(w, std::move(*sol));
  }
  return u;
}

/// Build the bracket hierarchy on an exact weight-graded complex: seed the
/// binary bracket from the generator structure constants, correct it to
/// commute with the differential, then produce each higher bracket from the
/// lower ones by solving D(l_{n+1}) = -sum of insertions.
inline OidStructure construct_structure(const Complex& cx, const std::map<SymWord, ModElt>& u,
                                        int max_arity, int weight_cap) {
  if (max_arity < 2) throw std::invalid_argument("construct_structure: max_arity < 2");
  if (!cx.weights_valid)
    throw std::invalid_argument("construct_structure: complex carries no weight grading");
  for (auto& [dw, h] : homology_dims(cx, weight_cap))
    if (h != 0)
      throw std::invalid_argument("construct_structure: complex not exact at degree " +
                                  std::to_string(dw.first) + " weight " + std::to_string(dw.second));
  for (auto& [w, val] : u) {
    Derivation want = Derivation::bracket(cx.pi.at(w.factors[0]), cx.pi.at(w.factors[1]));
    if (!(cx.apply_pi(val) == want))
      throw std::invalid_argument("construct_structure: u incompatible with the hook at " +
                                  word_str(w, cx.basis));
  }

  OidStructure oid;
  oid.cx = cx;
  oid.rho = cx.pi;
  EvalContext ctx = oid.ctx();
  MultiTable l1 = ell1_table(cx);

  MultiTable l2;
  l2.num_args = 2;
  l2.degree = 1;
  l2.leibniz = true;
  l2.entries = u;
  {
    MultiTable m = rn_bracket(l1, l2, cx.basis, ctx);
    SolveReport rep = solve_D(-page_of(m), cx, 0, weight_cap);
    if (!rep.solved)
      throw solver_error("construct_structure: binary correction failed: " +
                             (rep.notes.empty() ? "nonzero residual" : rep.notes.front()),
                         rep);
    for (auto& [w, v] : rep.tau.cols) l2.add_entry(w, v);
  }
  oid.brackets.emplace(2, l2);

  for (int a = 3; a <= max_arity; ++a) {
    MultiTable rhs;
    rhs.num_args = a;
    rhs.degree = 2;
    for (int i = 2; i <= a - 1; ++i) {
      int j = a + 1 - i;
      if (j < 2) continue;
      rhs += rn_insert(oid.brackets.at(i), oid.brackets.at(j), cx.basis, ctx);
    }
    SolveReport rep = solve_D(-page_of(rhs), cx, a - 2, weight_cap);
    if (!rep.solved)
      throw solver_error("construct_structure: arity " + std::to_string(a) + " solve failed: " +
                             (rep.notes.empty() ? "nonzero residual" : rep.notes.front()),
                         rep);
    MultiTable la = table_of(rep.tau);
    oid.brackets.emplace(a, std::move(la));
  }
  return oid;
}

}  // namespace lioid
