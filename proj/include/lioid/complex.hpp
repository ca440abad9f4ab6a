#pragma once

#include <set>

#include "linalg.hpp"
#include "symword.hpp"

namespace lioid {

/// Finite free complex of O-modules in degrees -1, -2, ..., with the
/// differential d stored on generators of degree <= -2 and the terminal map pi
/// (valued in vector fields) stored on generators of degree -1.
///
/// Generator weights make every slice {weight w} finite dimensional over Q.
/// A vector field f d/dx_v carries weight deg(f) - 1; d preserves weight and
/// pi shifts it by a uniform amount.
struct Complex {
  std::vector<std::string> vars;
  GradedBasis basis;
  std::map<GenKey, ModElt> d;
  std::map<GenKey, Derivation> pi;
  bool weights_valid = true;

  ModElt apply_d(const ModElt& x) const {
    ModElt r;
    for (auto& [g, f] : x.comps) {
      auto it = d.find(g);
      if (it == d.end()) continue;
      r += it->second.scaled(f);
    }
    return r;
  }

  Derivation apply_pi(const ModElt& x) const {
    Derivation r;
    for (auto& [g, f] : x.comps) {
      auto it = pi.find(g);
      if (it == pi.end()) continue;
      r += it->second.scaled(f);
    }
    return r;
  }

  /// Uniform weight shift of pi; nullopt when pi is empty or inhomogeneous.
  std::optional<int> pi_shift() const {
    std::optional<int> shift;
    for (auto& [g, der] : pi) {
      int gw = basis.at(g).weight;
      for (auto& [v, f] : der.comps)
        for (auto& [m, c] : f.terms()) {
          int s = (total_degree(m) - 1) - gw;
          if (!shift) shift = s;
          else if (*shift != s) return std::nullopt;
        }
    }
    return shift;
  }
};

inline std::string index_set_label(const std::string& prefix, const std::vector<int>& zero_based) {
  std::string s = prefix + "[";
  for (size_t i = 0; i < zero_based.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(zero_based[i] + 1);
  }
  s += "]";
  return s;
}

inline std::vector<std::vector<int>> subsets_of_size(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(k);
  auto rec = [&](auto&& self, int pos, int from) -> void {
    if (pos == k) {
      out.push_back(cur);
      return;
    }
    for (int v = from; v <= n - (k - pos); ++v) {
      cur[pos] = v;
      self(self, pos + 1, v + 1);
    }
  };
  if (k >= 0 && k <= n) rec(rec, 0, 0);
  return out;
}

/// Truncated Koszul complex of one polynomial: generators dP[I] for index
/// sets |I| >= 2, placed in degree -(|I|-1), with
///   d(dP[I]) = sum_s (-1)^(s-1) phi_{i_s} dP[I minus i_s]      (|I| >= 3)
///   pi(dP[i,j]) = phi_j d/dx_i - phi_i d/dx_j.
/// Weights: (|I|-2)*(deg phi - 1) when phi is homogeneous.
inline Complex koszul_complex(const Poly& phi) {
  if (phi.is_zero()) throw std::invalid_argument("koszul_complex: phi is zero");
  Complex c;
  c.vars = phi.vars();
  int n = static_cast<int>(c.vars.size());
  int h = phi.degree();
  c.weights_valid = phi.is_homogeneous() && h >= 1;
  std::vector<Poly> dphi;
  for (int v = 0; v < n; ++v) dphi.push_back(phi.partial(v));

  std::map<std::vector<int>, GenKey> key_of;
  for (int size = 2; size <= n; ++size) {
    int degree = -(size - 1);
    int weight = c.weights_valid ? (size - 2) * (h - 1) : 0;
    for (auto& I : subsets_of_size(n, size))
      key_of[I] = c.basis.add(index_set_label("dP", I), degree, weight);
  }
  for (auto& [I, g] : key_of) {
    if (I.size() == 2) {
      Derivation p;
      p.add(I[0], dphi[I[1]]);
      p.add(I[1], -dphi[I[0]]);
      c.pi[g] = std::move(p);
    } else {
      ModElt img;
      for (size_t s = 0; s < I.size(); ++s) {
        std::vector<int> J;
        for (size_t t = 0; t < I.size(); ++t)
          if (t != s) J.push_back(I[t]);
        Poly coeff = (s % 2 == 0) ? dphi[I[s]] : -dphi[I[s]];
        img.add(key_of.at(J), coeff);
      }
      c.d[g] = std::move(img);
    }
  }
  return c;
}

/// Complex for an ideal generated by phis: generators mu[I]@x_a in degree
/// -|I| for nonempty index sets I, with
///   d(mu[I]@x_a) = sum_s (-1)^(s-1) phi_{i_s} mu[I minus i_s]@x_a   (|I| >= 2)
///   pi(mu[i]@x_a) = phi_i d/dx_a.
/// Weights: sum of deg phi_i over I, when every phi_i is homogeneous.
inline Complex ideal_complex(const std::vector<Poly>& phis) {
  if (phis.empty()) throw std::invalid_argument("ideal_complex: no generators");
  Complex c;
  c.vars = phis[0].vars();
  for (auto& p : phis) {
    if (p.vars() != c.vars) throw std::invalid_argument("ideal_complex: variable lists differ");
    if (p.is_zero()) throw std::invalid_argument("ideal_complex: zero ideal generator");
    if (!p.is_homogeneous()) c.weights_valid = false;
  }
  int nv = static_cast<int>(c.vars.size());
  int m = static_cast<int>(phis.size());

  std::map<std::pair<std::vector<int>, int>, GenKey> key_of;
  for (int size = 1; size <= m; ++size) {
    for (auto& I : subsets_of_size(m, size)) {
      int weight = 0;
      if (c.weights_valid)
        for (int i : I) weight += phis[i].degree();
      for (int a = 0; a < nv; ++a) {
        std::string label = index_set_label("mu", I) + "@" + c.vars[a];
        key_of[{I, a}] = c.basis.add(label, -size, weight);
      }
    }
  }
  for (auto& [ia, g] : key_of) {
    const auto& [I, a] = ia;
    if (I.size() == 1) {
      Derivation p;
      p.add(a, phis[I[0]]);
      c.pi[g] = std::move(p);
    } else {
      ModElt img;
      for (size_t s = 0; s < I.size(); ++s) {
        std::vector<int> J;
        for (size_t t = 0; t < I.size(); ++t)
          if (t != s) J.push_back(I[t]);
        Poly coeff = (s % 2 == 0) ? phis[I[s]] : -phis[I[s]];
        img.add(key_of.at({J, a}), coeff);
      }
      c.d[g] = std::move(img);
    }
  }
  return c;
}

struct ComplexReport {
  std::vector<std::string> problems;
  bool ok() const { return problems.empty(); }
};

inline ComplexReport verify_complex(const Complex& c) {
  ComplexReport rep;
  for (auto& [g, img] : c.d) {
    if (g.degree >= -1) rep.problems.push_back("d stored on degree " + std::to_string(g.degree) + " generator " + c.basis.at(g).label);
    for (auto& [t, f] : img.comps)
      if (t.degree != g.degree + 1)
        rep.problems.push_back("d(" + c.basis.at(g).label + ") has component off degree " + std::to_string(g.degree + 1));
  }
  for (auto& [g, der] : c.pi)
    if (g.degree != -1) rep.problems.push_back("pi stored on degree " + std::to_string(g.degree) + " generator " + c.basis.at(g).label);
  for (auto& [g, img] : c.d) {
    if (g.degree <= -3) {
      if (!c.apply_d(img).is_zero())
        rep.problems.push_back("d.d != 0 at " + c.basis.at(g).label);
    } else if (g.degree == -2) {
      if (!c.apply_pi(img).is_zero())
        rep.problems.push_back("pi.d != 0 at " + c.basis.at(g).label);
    }
  }
  if (c.weights_valid) {
    for (auto& [g, img] : c.d) {
      int gw = c.basis.at(g).weight;
      for (auto& [t, f] : img.comps) {
        int tw = c.basis.at(t).weight;
        for (auto& [mon, coeff] : f.terms())
          if (tw + total_degree(mon) != gw)
            rep.problems.push_back("d(" + c.basis.at(g).label + ") not weight preserving");
      }
    }
    if (!c.pi.empty() && !c.pi_shift())
      rep.problems.push_back("pi is not weight homogeneous");
  }
  return rep;
}

/// Finite Q-basis of one weight slice of a free module or of the vector
/// fields: items are (generator, monomial) pairs in a fixed order.
template <typename Key>
struct Slice {
  std::vector<std::pair<Key, Monomial>> items;
  std::map<std::pair<Key, Monomial>, int> index;

  int dim() const { return static_cast<int>(items.size()); }

  void push(const Key& k, const Monomial& m) {
    index[{k, m}] = static_cast<int>(items.size());
    items.push_back({k, m});
  }
};

/// Slice of the module at homological degree `deg` and weight w.
inline Slice<GenKey> module_slice(const Complex& c, int deg, int w) {
  Slice<GenKey> s;
  const auto& row = c.basis.degree_row(deg);
  for (size_t i = 0; i < row.size(); ++i) {
    int mdeg = w - row[i].weight;
    if (mdeg < 0) continue;
    GenKey g{deg, static_cast<int>(i)};
    for (auto& m : monomials_of_degree(static_cast<int>(c.vars.size()), mdeg)) s.push(g, m);
  }
  return s;
}

/// Slice of the vector fields at weight w (coefficients of degree w+1).
inline Slice<int> der_slice(const Complex& c, int w) {
  Slice<int> s;
  int nv = static_cast<int>(c.vars.size());
  if (w + 1 < 0) return s;
  for (int v = 0; v < nv; ++v)
    for (auto& m : monomials_of_degree(nv, w + 1)) s.push(v, m);
  return s;
}

/// Coordinates in a module slice; nullopt if some term falls outside it.
inline std::optional<std::vector<Rat>> coords_in(const ModElt& x, const Slice<GenKey>& s) {
  std::vector<Rat> v(s.items.size(), Rat(0));
  for (auto& [g, f] : x.comps)
    for (auto& [m, c] : f.terms()) {
      auto it = s.index.find({g, m});
      if (it == s.index.end()) return std::nullopt;
      v[it->second] = c;
    }
  return v;
}

inline std::optional<std::vector<Rat>> coords_in(const Derivation& x, const Slice<int>& s) {
  std::vector<Rat> v(s.items.size(), Rat(0));
  for (auto& [var, f] : x.comps)
    for (auto& [m, c] : f.terms()) {
      auto it = s.index.find({var, m});
      if (it == s.index.end()) return std::nullopt;
      v[it->second] = c;
    }
  return v;
}

/// Weight of a homogeneous module element; nullopt for zero or mixed weight.
inline std::optional<int> weight_of(const ModElt& x, const GradedBasis& basis) {
  std::optional<int> w;
  for (auto& [g, f] : x.comps) {
    int gw = basis.at(g).weight;
    for (auto& [m, c] : f.terms()) {
      int t = gw + total_degree(m);
      if (!w) w = t;
      else if (*w != t) return std::nullopt;
    }
  }
  return w;
}

inline std::optional<int> weight_of(const Derivation& x) {
  std::optional<int> w;
  for (auto& [v, f] : x.comps)
    for (auto& [m, c] : f.terms()) {
      int t = total_degree(m) - 1;
      if (!w) w = t;
      else if (*w != t) return std::nullopt;
    }
  return w;
}

/// Decompose into weight-homogeneous pieces.
inline std::map<int, ModElt> split_by_weight(const ModElt& x, const GradedBasis& basis) {
  std::map<int, ModElt> out;
  for (auto& [g, f] : x.comps) {
    int gw = basis.at(g).weight;
    for (auto& [m, c] : f.terms())
      out[gw + total_degree(m)].add(g, Poly::term(f.vars(), m, c));
  }
  return out;
}

inline std::map<int, Derivation> split_by_weight(const Derivation& x,
                                                 const std::vector<std::string>& vars) {
  std::map<int, Derivation> out;
  for (auto& [v, f] : x.comps)
    for (auto& [m, c] : f.terms())
      out[total_degree(m) - 1].add(v, Poly::term(vars, m, c));
  return out;
}

/// Exact homology ranks per (degree, weight <= cap). Degree -1 means
/// ker(pi)/im(d); deeper degrees are ordinary homology of d. Requires valid
/// weights (homogeneous input data).
inline std::map<std::pair<int, int>, int> homology_dims(const Complex& c, int weight_cap) {
  if (!c.weights_valid)
    throw std::invalid_argument("homology_dims: complex carries no weight grading (inhomogeneous data)");
  auto shift = c.pi_shift();
  if (!c.pi.empty() && !shift) throw std::invalid_argument("homology_dims: pi not weight homogeneous");

  std::map<std::pair<int, int>, int> out;
  int depth = c.basis.depth();
  for (int w = 0; w <= weight_cap; ++w) {
    std::map<int, Slice<GenKey>> slices;
    for (int deg = -1; deg >= depth; --deg) slices[deg] = module_slice(c, deg, w);

    auto d_matrix = [&](int deg) -> QMat {
      // map from slice at deg to slice at deg+1 (or to vector fields at deg=-1)
      const auto& src = slices[deg];
      QMat mat;
      if (deg == -1) {
        Slice<int> tgt = der_slice(c, w + (shift ? *shift : 0));
        mat.assign(tgt.dim(), std::vector<Rat>(src.dim(), Rat(0)));
        for (int col = 0; col < src.dim(); ++col) {
          auto& [g, m] = src.items[col];
          auto it = c.pi.find(g);
          if (it == c.pi.end()) continue;
          Derivation img = it->second.scaled(Poly::term(c.vars, m, 1));
          auto coords = coords_in(img, tgt);
          if (!coords) throw std::runtime_error("homology_dims: pi image escapes slice");
          for (int r = 0; r < tgt.dim(); ++r) mat[r][col] = (*coords)[r];
        }
      } else {
        const auto& tgt = slices[deg + 1];
        mat.assign(tgt.dim(), std::vector<Rat>(src.dim(), Rat(0)));
        for (int col = 0; col < src.dim(); ++col) {
          auto& [g, m] = src.items[col];
          auto it = c.d.find(g);
          if (it == c.d.end()) continue;
          ModElt img = it->second.scaled(Poly::term(c.vars, m, 1));
          auto coords = coords_in(img, tgt);
          if (!coords) throw std::runtime_error("homology_dims: d image escapes slice");
          for (int r = 0; r < tgt.dim(); ++r) mat[r][col] = (*coords)[r];
        }
      }
      return mat;
    };

    for (int deg = -1; deg >= depth; --deg) {
      int dim = slices[deg].dim();
      int rank_out = dim ? matrix_rank(d_matrix(deg)) : 0;
      int rank_in = 0;
      if (deg - 1 >= depth && slices[deg - 1].dim() > 0) rank_in = matrix_rank(d_matrix(deg - 1));
      out[{deg, w}] = dim - rank_out - rank_in;
    }
  }
  return out;
}

/// Solve pi(x) = b for x in degree -1, one weight slice at a time.  The
/// minimal solution per slice (free coordinates zero); nullopt when b is not
/// in the image or a slice exceeds the cap.
inline std::optional<ModElt> lift_through_pi(const Complex& c, const Derivation& b,
                                             int weight_cap) {
  ModElt sol;
  if (b.is_zero()) return sol;
  auto shift = c.pi_shift();
  if (!shift) return std::nullopt;
  for (auto& [wt, piece] : split_by_weight(b, c.vars)) {
    if (wt - *shift > weight_cap) return std::nullopt;
    Slice<GenKey> src = module_slice(c, -1, wt - *shift);
    Slice<int> tgt = der_slice(c, wt);
    auto bb = coords_in(piece, tgt);
    if (!bb) return std::nullopt;
    QMat mat(tgt.dim(), std::vector<Rat>(src.dim(), Rat(0)));
    for (int col = 0; col < src.dim(); ++col) {
      auto& [g, m] = src.items[col];
      Derivation img = c.apply_pi(ModElt::gen(g, c.vars).scaled(Poly::term(c.vars, m, 1)));
      auto cc = coords_in(img, tgt);
      if (!cc) throw std::runtime_error("lift_through_pi: image escapes slice");
      for (int r = 0; r < tgt.dim(); ++r) mat[r][col] = (*cc)[r];
    }
    auto x = solve_linear(mat, *bb);
    if (!x) return std::nullopt;
    for (int col = 0; col < src.dim(); ++col)
      if ((*x)[col] != 0) {
        auto& [g, m] = src.items[col];
        sol.add(g, Poly::term(c.vars, m, (*x)[col]));
      }
  }
  return sol;
}

/// Solve d(x) = b for x in module degree `deg`, weight slice by weight
/// slice; nullopt when unsolvable or over the cap.
inline std::optional<ModElt> lift_through_d(const Complex& c, int deg, const ModElt& b,
                                            int weight_cap) {
  ModElt sol;
  for (auto& [wt, piece] : split_by_weight(b, c.basis)) {
    if (wt > weight_cap) return std::nullopt;
    Slice<GenKey> src = module_slice(c, deg, wt);
    Slice<GenKey> tgt = module_slice(c, deg + 1, wt);
    auto bb = coords_in(piece, tgt);
    if (!bb) return std::nullopt;
    QMat mat(tgt.dim(), std::vector<Rat>(src.dim(), Rat(0)));
    for (int col = 0; col < src.dim(); ++col) {
      auto& [g, m] = src.items[col];
      ModElt img = c.apply_d(ModElt::gen(g, c.vars).scaled(Poly::term(c.vars, m, 1)));
      auto cc = coords_in(img, tgt);
      if (!cc) throw std::runtime_error("lift_through_d: image escapes slice");
      for (int r = 0; r < tgt.dim(); ++r) mat[r][col] = (*cc)[r];
    }
    auto x = solve_linear(mat, *bb);
    if (!x) return std::nullopt;
    for (int col = 0; col < src.dim(); ++col)
      if ((*x)[col] != 0) {
        auto& [g, m] = src.items[col];
        sol.add(g, Poly::term(c.vars, m, (*x)[col]));
      }
  }
  return sol;
}

}  // namespace lioid
