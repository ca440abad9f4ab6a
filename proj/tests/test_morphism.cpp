#include <catch2/catch_amalgamated.hpp>

#include "lioid/families.hpp"
#include "lioid/morphism.hpp"

using namespace lioid;

static const std::vector<std::string> XYZ = {"x", "y", "z"};

static OidStructure cubic_koszul() {
  KoszulSpec spec;
  spec.phi = parse_poly("x^3+y^3+z^3", XYZ);
  spec.max_arity = 4;
  return build_koszul_oid(spec);
}

static OidStructure cubic_engine() {
  Complex cx = koszul_complex(parse_poly("x^3+y^3+z^3", XYZ));
  return construct_structure(cx, lift_generator_bracket(cx, 8), 4, 12);
}

static bool same_morphism(const TaylorMorphism& a, const TaylorMorphism& b) {
  if (a.coeffs.size() != b.coeffs.size()) return false;
  for (auto& [k, t] : a.coeffs) {
    const MultiTable* o = b.coeff(k);
    if (!o || !(t.entries == o->entries)) return false;
  }
  return true;
}

// Synthetic two-level fixture: three odd source letters a,b,c and one even
// letter P, images with polynomial coefficients, nonzero index-1 coefficient.
namespace {
const std::vector<std::string> XY = {"x", "y"};
const GenKey a{-1, 0}, b{-1, 1}, c{-1, 2}, P{-2, 0};
const GenKey A{-1, 0}, B{-1, 1}, C{-1, 2}, U{-2, 0}, V{-2, 1}, W{-3, 0};

TaylorMorphism fixture_morphism() {
  TaylorMorphism phi;
  MultiTable p0;
  p0.num_args = 1;
  p0.degree = 0;
  p0.entries.emplace(SymWord{{a}}, ModElt::gen(A, XY));
  p0.entries.emplace(SymWord{{b}}, ModElt::gen(B, XY).scaled(parse_poly("y", XY)));
  p0.entries.emplace(SymWord{{c}}, ModElt::gen(C, XY));
  p0.entries.emplace(SymWord{{P}}, ModElt::gen(U, XY));
  MultiTable p1;
  p1.num_args = 2;
  p1.degree = 0;
  p1.entries.emplace(SymWord{{a, b}}, ModElt::gen(U, XY).scaled(parse_poly("x", XY)));
  p1.entries.emplace(SymWord{{a, c}}, ModElt::gen(U, XY).scaled(parse_poly("y", XY)));
  p1.entries.emplace(SymWord{{b, c}}, ModElt::gen(V, XY));
  p1.entries.emplace(SymWord{{a, P}}, ModElt::gen(W, XY).scaled(parse_poly("x+y", XY)));
  phi.coeffs.emplace(0, std::move(p0));
  phi.coeffs.emplace(1, std::move(p1));
  return phi;
}

GradedBasis fixture_basis() {
  GradedBasis bs;
  bs.add("a", -1, 0);
  bs.add("b", -1, 0);
  bs.add("c", -1, 0);
  bs.add("P", -2, 0);
  return bs;
}
}  // namespace

TEST_CASE("expansion enumerates unordered partitions with extraction signs") {
  TaylorMorphism phi;
  MultiTable p0;
  p0.num_args = 1;
  p0.degree = 0;
  p0.entries.emplace(SymWord{{a}}, ModElt::gen(A, XY));
  p0.entries.emplace(SymWord{{b}}, ModElt::gen(B, XY));
  p0.entries.emplace(SymWord{{c}}, ModElt::gen(C, XY));
  MultiTable p1;
  p1.num_args = 2;
  p1.degree = 0;
  p1.entries.emplace(SymWord{{a, b}}, ModElt::gen(U, XY).scaled(parse_poly("x", XY)));
  p1.entries.emplace(SymWord{{a, c}}, ModElt::gen(U, XY).scaled(parse_poly("y", XY)));
  p1.entries.emplace(SymWord{{b, c}}, ModElt::gen(V, XY));
  phi.coeffs.emplace(0, std::move(p0));
  phi.coeffs.emplace(1, std::move(p1));

  // abc splits as a|b|c, ab|c, ac|b (one odd transposition), a|bc, abc;
  // the last drops since no index-2 coefficient is present
  SymElt want;
  want.add(SymWord{{A, B, C}}, Poly::constant(XY, 1));
  want.add_raw({U, C}, parse_poly("x", XY));
  want.add_raw({U, B}, parse_poly("-y", XY));
  want.add_raw({A, V}, Poly::constant(XY, 1));
  SymElt got = expand_morphism(phi, SymWord{{a, b, c}}, XY);
  CHECK(got.terms == want.terms);
}

TEST_CASE("expansion is comultiplicative") {
  TaylorMorphism phi = fixture_morphism();
  GradedBasis bs = fixture_basis();
  using Tensor = std::map<std::pair<SymWord, SymWord>, Poly>;
  auto tadd = [](Tensor& t, const SymWord& l, const SymWord& r, const Poly& p) {
    auto [it, fresh] = t.try_emplace(std::make_pair(l, r), p);
    if (!fresh) {
      it->second += p;
      if (it->second.is_zero()) t.erase(it);
    }
  };
  auto split = [](const std::vector<GenKey>& f, unsigned long mask, SymWord& l, SymWord& r) {
    for (size_t i = 0; i < f.size(); ++i)
      (mask & (1ul << i) ? l : r).factors.push_back(f[i]);
  };
  auto sel_of = [](size_t n, unsigned long mask) {
    std::vector<int> sel;
    for (size_t i = 0; i < n; ++i)
      if (mask & (1ul << i)) sel.push_back(static_cast<int>(i));
    return sel;
  };
  for (int arity = 2; arity <= 3; ++arity)
    for (auto& w : words_of_arity(bs, arity)) {
      Tensor lhs, rhs;
      for (auto& [u, cu] : expand_morphism(phi, w, XY).terms) {
        size_t n = u.factors.size();
        for (unsigned long m = 1; m + 1 < (1ul << n); ++m) {
          SymWord l, r;
          split(u.factors, m, l, r);
          int eps = extraction_sign(u.factors, sel_of(n, m));
          tadd(lhs, l, r, cu.scaled(Rat(eps)));
        }
      }
      size_t n = w.factors.size();
      for (unsigned long m = 1; m + 1 < (1ul << n); ++m) {
        SymWord l, r;
        split(w.factors, m, l, r);
        int eps = extraction_sign(w.factors, sel_of(n, m));
        for (auto& [p, cp] : expand_morphism(phi, l, XY).terms)
          for (auto& [q, cq] : expand_morphism(phi, r, XY).terms)
            tadd(rhs, p, q, (cp * cq).scaled(Rat(eps)));
      }
      INFO("word " << word_str(w, bs));
      CHECK(lhs == rhs);
    }
}

TEST_CASE("composition with identities and coefficient formulas") {
  TaylorMorphism phi = fixture_morphism();
  Complex src;
  src.vars = XY;
  src.basis = fixture_basis();
  TaylorMorphism id_src = identity_morphism(src);

  CHECK(same_morphism(compose(phi, id_src, src), phi));

  Complex tgt;
  tgt.vars = XY;
  tgt.basis.add("A", -1, 0);
  tgt.basis.add("B", -1, 0);
  tgt.basis.add("C", -1, 0);
  tgt.basis.add("U", -2, 0);
  tgt.basis.add("V", -2, 0);
  tgt.basis.add("W", -3, 0);
  CHECK(same_morphism(compose(identity_morphism(tgt), phi, src), phi));

  // index-1 coefficient of a composite: phi1 over the paired arity-0 images
  // plus phi0 over the index-1 image
  TaylorMorphism psi;
  MultiTable q0;
  q0.num_args = 1;
  q0.degree = 0;
  q0.entries.emplace(SymWord{{a}}, ModElt::gen(a, XY).scaled(parse_poly("x", XY)));
  q0.entries.emplace(SymWord{{b}}, ModElt::gen(b, XY) + ModElt::gen(c, XY));
  q0.entries.emplace(SymWord{{c}}, ModElt::gen(c, XY));
  q0.entries.emplace(SymWord{{P}}, ModElt::gen(P, XY).scaled(parse_poly("y", XY)));
  MultiTable q1;
  q1.num_args = 2;
  q1.degree = 0;
  q1.entries.emplace(SymWord{{a, b}}, ModElt::gen(P, XY).scaled(parse_poly("x*y", XY)));
  psi.coeffs.emplace(0, std::move(q0));
  psi.coeffs.emplace(1, std::move(q1));

  TaylorMorphism comp = compose(phi, psi, src);
  const MultiTable* c0 = comp.coeff(0);
  REQUIRE(c0 != nullptr);
  for (auto& g : src.basis.all()) {
    ModElt want;
    for (auto& [h, f] : psi.coeff(0)->lookup({g}).comps)
      want += phi.apply_word(SymWord{{h}}).scaled(f);
    CHECK(c0->lookup({g}) == want);
  }
  const MultiTable* c1 = comp.coeff(1);
  REQUIRE(c1 != nullptr);
  for (auto& w : words_of_arity(src.basis, 2)) {
    ModElt want;
    for (auto& [u, cu] : expand_morphism(psi, w, XY).terms) want += phi.apply_word(u).scaled(cu);
    INFO("word " << word_str(w, src.basis));
    CHECK(c1->lookup(w.factors) == want);
  }
}

TEST_CASE("identity verifies as a strict morphism") {
  OidStructure k = cubic_koszul();
  MorphismReport rep = check_morphism(identity_morphism(k.cx), k, k, 3);
  CHECK(rep.ok());
  CHECK(rep.checks_run > 10);
}

TEST_CASE("doubling the identity breaks anchor, hook, and binary rows") {
  OidStructure k = cubic_koszul();
  TaylorMorphism twice = identity_morphism(k.cx);
  MultiTable doubled = twice.coeffs.at(0).scaled(Poly::constant(XYZ, 2));
  twice.coeffs[0] = doubled;
  MorphismReport rep = check_morphism(twice, k, k, 2);
  CHECK_FALSE(rep.ok());
  CHECK(rep.anchor_failures.size() == 3);
  CHECK(rep.hook_failures.size() == 3);
  CHECK(rep.residuals.count(2) == 1);
}

TEST_CASE("the defect of an anchor-compatible map is bilinear over the ring") {
  OidStructure k = cubic_koszul();
  TaylorMorphism phi = identity_morphism(k.cx);
  MultiTable junk;
  junk.num_args = 2;
  junk.degree = 0;
  GenKey g12 = k.cx.basis.find("dP[1,2]");
  GenKey g13 = k.cx.basis.find("dP[1,3]");
  GenKey g23 = k.cx.basis.find("dP[2,3]");
  GenKey top = k.cx.basis.find("dP[1,2,3]");
  junk.entries.emplace(SymWord{{g12, g13}}, ModElt::gen(top, XYZ).scaled(parse_poly("x*y", XYZ)));
  junk.entries.emplace(SymWord{{g12, g23}}, ModElt::gen(top, XYZ).scaled(parse_poly("z", XYZ)));
  phi.coeffs.emplace(1, junk);

  auto ap0 = [&](const ModElt& v) {
    ModElt r;
    for (auto& [g, f] : v.comps) r += phi.apply_word(SymWord{{g}}).scaled(f);
    return r;
  };
  auto ap1 = [&](const ModElt& xv, const ModElt& yv) {
    ModElt r;
    const MultiTable* t1 = phi.coeff(1);
    if (!t1) return r;
    for (auto& [g, f] : xv.comps)
      for (auto& [h, f2] : yv.comps) r += t1->lookup({g, h}).scaled(f * f2);
    return r;
  };
  auto defect2 = [&](const ModElt& xv, const ModElt& yv) {
    ModElt r = ap0(eval_bracket(k, 2, {xv, yv}));
    r -= eval_bracket(k, 2, {ap0(xv), ap0(yv)});
    r -= k.cx.apply_d(ap1(xv, yv));
    return r;
  };

  auto src_tables = k.all_tables();
  EvalContext sctx = k.ctx();
  std::vector<GenKey> gens{g12, g13, g23};
  Poly f = parse_poly("x^2-3*y+z", XYZ);
  bool some_nonzero = false;
  for (auto& gx : gens)
    for (auto& gy : gens) {
      ModElt xv = ModElt::gen(gx, XYZ);
      ModElt yv = ModElt::gen(gy, XYZ);
      ModElt base = defect2(xv, yv);
      if (!base.is_zero()) some_nonzero = true;
      if (gx < gy)
        CHECK(base == morphism_defect(phi, SymWord{{gx, gy}}, src_tables, sctx, k));
      CHECK(defect2(xv.scaled(f), yv) == base.scaled(f));
      CHECK(defect2(xv, yv.scaled(f)) == base.scaled(f));
    }
  CHECK(some_nonzero);
}

TEST_CASE("construction finds a verified morphism between the two cubic models") {
  OidStructure eng = cubic_engine();
  OidStructure exp = cubic_koszul();

  TaylorMorphism m = construct_morphism(eng, exp, 3, 12);
  MorphismReport rep = check_morphism(m, eng, exp, 3);
  INFO((rep.ok() ? "" : "first residual arity " + std::to_string(rep.residuals.begin()->first)));
  CHECK(rep.ok());
  for (auto& gen : eng.cx.basis.degree_row(-1)) {
    GenKey g = eng.cx.basis.find(gen.label);
    CHECK(exp.cx.apply_pi(m.coeff(0)->lookup({g})) ==
          eng.cx.apply_pi(ModElt::gen(g, XYZ)));
  }

  TaylorMorphism back = construct_morphism(exp, eng, 3, 12);
  CHECK(check_morphism(back, exp, eng, 3).ok());

  TaylorMorphism round = compose(back, m, eng.cx);
  CHECK(check_morphism(round, eng, eng, 3).ok());
}

TEST_CASE("time calculus primitives") {
  CHECK_THROWS_AS(with_t({"u", "t"}), std::invalid_argument);
  auto tv = with_t(XY);
  REQUIRE(tv.size() == 3);
  Poly p = parse_poly("3*x*t^2+t", tv);
  Poly F = t_integral(p, 2);
  CHECK(F.scaled(Rat(2)) == parse_poly("2*x*t^3+t^2", tv));
  CHECK(F.partial(2) == p);
  CHECK(t_eval(F, 2, Rat(1)).scaled(Rat(2)) == parse_poly("2*x+1", tv));
  CHECK(t_eval(F, 2, Rat(0)).is_zero());
}

TEST_CASE("zero homotopy leaves the morphism constant") {
  OidStructure k = cubic_koszul();
  TaylorMorphism id = identity_morphism(k.cx);
  TaylorCoderivation none;
  HomotopyTrace tr = homotopy_step(id, none, k, k, Rat(0), Rat(1), 3);
  CHECK(same_morphism(morphism_at(tr, Rat(0)), id));
  CHECK(same_morphism(morphism_at(tr, Rat(1)), id));
  CHECK(same_morphism(morphism_at(tr, Rat(7, 3)), id));
}

TEST_CASE("the flow of a chain homotopy moves the arity-0 coefficient as expected") {
  OidStructure k = cubic_koszul();
  GenKey g12 = k.cx.basis.find("dP[1,2]");
  GenKey top = k.cx.basis.find("dP[1,2,3]");
  MultiTable ht;
  ht.num_args = 1;
  ht.degree = -1;
  ht.entries.emplace(SymWord{{g12}}, ModElt::gen(top, XYZ).scaled(parse_poly("x", XYZ)));
  TaylorCoderivation hh;
  hh.degree = -1;
  hh.coeffs.emplace(0, ht);

  TaylorMorphism id = identity_morphism(k.cx);
  HomotopyTrace tr = homotopy_step(id, hh, k, k, Rat(0), Rat(1), 3);

  OidStructure lk = lift_structure(k, tr.tvars);
  MultiTable lht = lift_table(ht, tr.tvars);
  Poly t = Poly::variable(tr.tvars, "t");
  for (auto& g : k.cx.basis.all()) {
    ModElt want = ModElt::gen(g, tr.tvars);
    want += lk.cx.apply_d(lht.lookup({g})).scaled(t);
    if (auto it = lk.cx.d.find(g); it != lk.cx.d.end())
      for (auto& [h, f] : it->second.comps) want += lht.lookup({h}).scaled(f * t);
    CHECK(tr.phi_t.coeff(0)->lookup({g}) == want);
  }

  // the path stays a strict morphism identically in t
  MorphismReport rep = check_morphism(tr.phi_t, lk, lk, 3);
  CHECK(rep.ok());

  // the integrated path really solves the flow equation
  for (int arity = 1; arity <= 3; ++arity)
    for (auto& w : words_of_arity(lk.cx.basis, arity)) {
      INFO("word " << word_str(w, lk.cx.basis));
      CHECK(flow_defect(tr.phi_t, tr.h, w, lk, lk).is_zero());
    }

  // endpoint over the original ring is again a morphism, distinct from the start
  TaylorMorphism end = morphism_at(tr, Rat(1));
  CHECK_FALSE(same_morphism(end, id));
  CHECK(check_morphism(end, k, k, 3).ok());

  // flowing back along the negated homotopy returns to the identity
  TaylorCoderivation back;
  back.degree = -1;
  back.coeffs.emplace(0, ht.scaled(Poly::constant(XYZ, -1)));
  HomotopyTrace rtr = homotopy_step(end, back, k, k, Rat(0), Rat(1), 3);
  CHECK(same_morphism(morphism_at(rtr, Rat(1)), id));
}
