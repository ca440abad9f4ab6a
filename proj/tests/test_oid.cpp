#include <catch2/catch_amalgamated.hpp>

#include "lioid/families.hpp"

using namespace lioid;

static const std::vector<std::string> XYZ = {"x", "y", "z"};

static KoszulSpec kspec(const std::string& phi, const std::vector<std::string>& vars,
                        int arity = 4) {
  return KoszulSpec{parse_poly(phi, vars), 0, arity};
}

TEST_CASE("wedge family binary values") {
  OidStructure oid = build_koszul_oid(kspec("x^3+y^3+z^3", XYZ, 3));
  GenKey g12 = oid.cx.basis.find("dP[1,2]");
  GenKey g13 = oid.cx.basis.find("dP[1,3]");
  GenKey g23 = oid.cx.basis.find("dP[2,3]");
  auto& l2 = oid.brackets.at(2);

  ModElt v = l2.lookup({g12, g13});
  ModElt expect;
  expect.add(g23, parse_poly("6*x", XYZ));
  CHECK(v == expect);
  CHECK(l2.lookup({g13, g12}) == -v);
  CHECK(l2.lookup({g12, g12}).is_zero());

  // rho(l2(a,b)) = [rho a, rho b], the check that pins the arity-2 twist
  Derivation lhs = oid.apply_rho(v);
  Derivation rhs = Derivation::bracket(oid.rho.at(g12), oid.rho.at(g13));
  CHECK(lhs == rhs);
}

TEST_CASE("anchored two-term evaluation") {
  OidStructure oid = build_koszul_oid(kspec("x^3+y^3+z^3", XYZ, 2));
  GenKey g12 = oid.cx.basis.find("dP[1,2]");
  ModElt e = ModElt::gen(g12, XYZ);
  ModElt xe = e.scaled(parse_poly("x", XYZ));
  // l2(e, x e) = rho(e)[x] e since l2(e,e) = 0
  ModElt v = eval_bracket(oid, 2, {e, xe});
  ModElt expect = e.scaled(parse_poly("3*y^2", XYZ));
  CHECK(v == expect);
  // swapping two odd arguments negates the anchored terms
  CHECK(eval_bracket(oid, 2, {xe, e}) == -v);
}

TEST_CASE("wedge family axioms, arity 3") {
  for (auto phi : {"x^2+y^2+z^2", "x^3+y^3+z^3", "x*y*z", "x^2*y+z^2"}) {
    OidStructure oid = build_koszul_oid(kspec(phi, XYZ, 3));
    AxiomsReport rep = verify_axioms(oid, 3);
    INFO("phi = " << phi << (rep.ok() ? "" : ": " + rep.failures.front()));
    CHECK(rep.ok());
  }
}

TEST_CASE("ternary table collapses in three variables") {
  // with three variables the only arity-3 word is dP[1,2].dP[1,3].dP[2,3],
  // and its two surviving index choices cancel for every phi
  OidStructure oid = build_koszul_oid(kspec("x*y*z + x^3+y^3+z^3", XYZ, 3));
  CHECK(oid.brackets.at(3).is_zero());
  CHECK(verify_axioms(oid, 3).ok());
}

TEST_CASE("flipped binary table fails the anchor morphism") {
  OidStructure bad = build_koszul_oid(kspec("x^3+y^3+z^3", XYZ, 2));
  bad.brackets.at(2) = bad.brackets.at(2).scaled(Poly::constant(XYZ, -1));
  AxiomsReport rep = verify_axioms(bad, 2);
  CHECK_FALSE(rep.ok());
}

TEST_CASE("four variables, arity 4") {
  std::vector<std::string> v4 = {"x", "y", "z", "w"};
  OidStructure oid = build_koszul_oid(kspec("x*y*z*w", v4, 4));
  GenKey g12 = oid.cx.basis.find("dP[1,2]");
  GenKey g13 = oid.cx.basis.find("dP[1,3]");
  GenKey g24 = oid.cx.basis.find("dP[2,4]");
  ModElt t = oid.brackets.at(3).lookup({g12, g13, g24});
  ModElt expect;
  expect.add(oid.cx.basis.find("dP[1,2,4]"), parse_poly("w", v4));
  expect.add(oid.cx.basis.find("dP[1,2,3]"), parse_poly("-z", v4));
  CHECK(t == expect);
  // the 4-ary choices cancel pairwise for this phi
  CHECK(oid.brackets.at(4).is_zero());
  AxiomsReport rep = verify_axioms(oid, 4);
  INFO((rep.ok() ? std::string() : rep.failures.front()));
  CHECK(rep.ok());
  // flipping the ternary table must break the arity-3 identity
  OidStructure bad = oid;
  bad.brackets.at(3) = bad.brackets.at(3).scaled(Poly::constant(v4, -1));
  CHECK_FALSE(verify_axioms(bad, 3).ok());
}

TEST_CASE("five variables carry a nonzero 4-ary bracket") {
  std::vector<std::string> v5 = {"x", "y", "z", "w", "u"};
  OidStructure oid = build_koszul_oid(kspec("x*y*z*w*u", v5, 4));
  GenKey g12 = oid.cx.basis.find("dP[1,2]");
  GenKey g13 = oid.cx.basis.find("dP[1,3]");
  GenKey g24 = oid.cx.basis.find("dP[2,4]");
  GenKey g35 = oid.cx.basis.find("dP[3,5]");
  ModElt q = oid.brackets.at(4).lookup({g12, g13, g24, g35});
  ModElt expect;
  expect.add(oid.cx.basis.find("dP[1,2,3,4]"), parse_poly("w", v5));
  expect.add(oid.cx.basis.find("dP[1,2,3,5]"), parse_poly("-u", v5));
  CHECK(q == expect);
  AxiomsReport rep = verify_axioms(oid, 4);
  INFO((rep.ok() ? std::string() : rep.failures.front()));
  CHECK(rep.ok());
  // flipping the 4-ary table must break the arity-4 identity
  OidStructure bad = oid;
  bad.brackets.at(4) = bad.brackets.at(4).scaled(Poly::constant(v5, -1));
  CHECK_FALSE(verify_axioms(bad, 4).ok());
}

TEST_CASE("monomial cubic ternary values") {
  OidStructure oid = build_koszul_oid(kspec("x*y*z", XYZ, 3));
  GenKey g12 = oid.cx.basis.find("dP[1,2]");
  GenKey g13 = oid.cx.basis.find("dP[1,3]");
  GenKey g23 = oid.cx.basis.find("dP[2,3]");
  // the two surviving index choices cancel
  CHECK(oid.brackets.at(3).lookup({g12, g13, g23}).is_zero());
}

TEST_CASE("ideal family values and axioms") {
  std::vector<std::string> xy = {"x", "y"};
  IdealSpec spec{{parse_poly("x^2", xy), parse_poly("x*y", xy), parse_poly("y^2", xy)}, 3};
  OidStructure oid = build_ideal_oid(spec);

  GenKey m1x = oid.cx.basis.find("mu[1]@x");
  GenKey m2y = oid.cx.basis.find("mu[2]@y");
  ModElt v = oid.brackets.at(2).lookup({m1x, m2y});
  ModElt expect;
  expect.add(oid.cx.basis.find("mu[1]@y"), parse_poly("y", xy));
  CHECK(v == expect);

  AxiomsReport rep = verify_axioms(oid, 3);
  INFO((rep.ok() ? std::string() : rep.failures.front()));
  CHECK(rep.ok());
}

TEST_CASE("single regular generator gives a Lie algebroid") {
  IdealSpec spec{{parse_poly("x^2+y^2+z^2", XYZ)}, 4};
  OidStructure oid = build_ideal_oid(spec);
  CHECK(oid.brackets.at(3).is_zero());
  CHECK(oid.brackets.at(4).is_zero());
  CHECK(verify_axioms(oid, 4).ok());
}

TEST_CASE("twist by a function") {
  OidStructure oid = build_koszul_oid(kspec("x^2+y^2+z^2", XYZ, 3));

  OidStructure unit = chi_twist(oid, Poly::constant(XYZ, 1));
  CHECK(unit.brackets.at(2).entries == oid.brackets.at(2).entries);
  CHECK(unit.brackets.at(3).entries == oid.brackets.at(3).entries);
  CHECK(unit.cx.pi == oid.cx.pi);
  CHECK(unit.rho == oid.rho);

  OidStructure zero = chi_twist(oid, Poly::zero(XYZ));
  CHECK(zero.brackets.at(2).is_zero());
  CHECK(zero.rho.empty());
  CHECK(verify_axioms(zero, 3).ok());

  OidStructure tx = chi_twist(oid, parse_poly("x", XYZ));
  AxiomsReport rep = verify_axioms(tx, 3);
  INFO((rep.ok() ? std::string() : rep.failures.front()));
  CHECK(rep.ok());

  // frozen value: l2'(dP[1,2], dP[1,3]) for chi = x over the quadric
  GenKey g12 = oid.cx.basis.find("dP[1,2]");
  GenKey g13 = oid.cx.basis.find("dP[1,3]");
  ModElt v = tx.brackets.at(2).lookup({g12, g13});
  ModElt expect = oid.brackets.at(2).lookup({g12, g13}).scaled(parse_poly("x", XYZ));
  expect.add(g13, oid.rho.at(g12).apply(parse_poly("x", XYZ)));
  expect -= ModElt::gen(g12, XYZ).scaled(oid.rho.at(g13).apply(parse_poly("x", XYZ)));
  CHECK(v == expect);
}

TEST_CASE("restriction to the zero locus") {
  Poly phi = parse_poly("x^3+y^3+z^3", XYZ);
  OidStructure oid = build_koszul_oid(KoszulSpec{phi, 0, 3});
  RestrictReport rrep;
  OidStructure res = restrict_structure(oid, phi, MonomialOrder::grlex({0, 1, 2}), &rrep);
  REQUIRE(rrep.ok());
  REQUIRE(res.modulus);
  AxiomsReport rep = verify_axioms(res, 3);
  INFO((rep.ok() ? std::string() : rep.failures.front()));
  CHECK(rep.ok());

  // a structure whose anchor does not preserve the ideal is rejected
  RestrictReport bad;
  restrict_structure(oid, parse_poly("x", XYZ), MonomialOrder::grlex({0, 1, 2}), &bad);
  CHECK_FALSE(bad.ok());
}

TEST_CASE("anchorless scaffold identities") {
  std::vector<std::string> xy = {"x", "y"};
  PoissonReport r1 = poisson_infinity_check(KoszulSpec{parse_poly("x^2+y^2", xy), 0, 4});
  INFO((r1.ok() ? std::string() : r1.failures.front()));
  CHECK(r1.ok());
  CHECK(r1.words_checked > 0);

  PoissonReport r2 = poisson_infinity_check(KoszulSpec{parse_poly("x^3+y^3+z^3", XYZ), 0, 3});
  INFO((r2.ok() ? std::string() : r2.failures.front()));
  CHECK(r2.ok());

  PoissonReport r3 =
      poisson_infinity_check(IdealSpec{{parse_poly("x^2", xy), parse_poly("x*y", xy)}, 4});
  CHECK(r3.ok());
}

TEST_CASE("scaffold brackets vanish beyond the polynomial degree") {
  std::vector<std::string> xy = {"x", "y"};
  KoszulSpec spec{parse_poly("x^2+y^2", xy), 0, 3};
  Scaffold sc = build_scaffold(spec);
  std::vector<PartialCache> pcs;
  pcs.emplace_back(spec.phi);
  GenKey d1 = sc.basis.find("dP[1]");
  NaryValue v = sc.eval(3, {d1, d1, d1}, pcs);
  CHECK(v.gens.is_zero());
  CHECK(v.scalar.is_zero());
  // and the scalar column at arity 2 is the Hessian entry
  NaryValue h = sc.eval(2, {d1, d1}, pcs);
  CHECK(h.scalar == parse_poly("2", xy));
}
