#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "lioid/families.hpp"
#include "lioid/page.hpp"

using namespace lioid;

static const std::vector<std::string> XYZ = {"x", "y", "z"};
static const std::vector<std::string> XYZW = {"x", "y", "z", "w"};

static PageElement random_page(std::mt19937& rng, const Complex& cx, int arity, int degree) {
  PageElement p;
  p.num_args = arity;
  p.degree = degree;
  std::uniform_int_distribution<int> coeff(-2, 2);
  std::uniform_int_distribution<int> small(0, 2);
  int nv = static_cast<int>(cx.vars.size());
  auto rand_poly = [&]() {
    Monomial m(nv, 0);
    int md = small(rng);
    for (int d = 0; d < md; ++d) m[small(rng) % nv]++;
    return Poly::term(cx.vars, m, Rat(coeff(rng)));
  };
  for (auto& w : words_of_arity(cx.basis, arity)) {
    int col = w.degree() + degree;
    if (col <= -1 && cx.basis.has_degree(col)) {
      ModElt v;
      const auto& row = cx.basis.degree_row(col);
      for (size_t i = 0; i < row.size(); ++i) {
        if (small(rng) != 0) continue;
        v.add(GenKey{col, static_cast<int>(i)}, rand_poly());
      }
      p.add_col(w, v);
    } else if (col == 0) {
      Derivation v;
      for (int var = 0; var < nv; ++var) {
        if (small(rng) != 0) continue;
        v.add(var, rand_poly());
      }
      p.add_hook(w, v);
    }
  }
  return p;
}

TEST_CASE("total differential squares to zero") {
  Complex cx = koszul_complex(parse_poly("x*y*z*w", XYZW));
  std::mt19937 rng(5150);
  for (int degree = 0; degree <= 2; ++degree)
    for (int trial = 0; trial < 8; ++trial) {
      PageElement p = random_page(rng, cx, 2, degree);
      INFO("degree " << degree << " trial " << trial);
      CHECK(total_D(total_D(p, cx), cx).is_zero());
    }
}

TEST_CASE("bracketing with the unary table computes the horizontal part") {
  Complex cx = koszul_complex(parse_poly("x*y*z*w", XYZW));
  EvalContext ctx{cx.vars, nullptr};
  MultiTable l1 = ell1_table(cx);
  std::mt19937 rng(31);
  for (int degree = 0; degree <= 1; ++degree)
    for (int trial = 0; trial < 8; ++trial) {
      PageElement p = random_page(rng, cx, 2, degree);
      p.hook.clear();
      MultiTable t = table_of(p);
      PageElement via_bracket = page_of(rn_bracket(l1, t, cx.basis, ctx));
      INFO("degree " << degree << " trial " << trial);
      CHECK(via_bracket.cols == total_D(p, cx).cols);
    }
}

TEST_CASE("hook components have no horizontal image") {
  Complex cx = koszul_complex(parse_poly("x*y*z*w", XYZW));
  GenKey g12 = cx.basis.find("dP[1,2]");
  GenKey g13 = cx.basis.find("dP[1,3]");
  GenKey g123 = cx.basis.find("dP[1,2,3]");

  PageElement p;
  p.num_args = 2;
  p.degree = 2;
  Derivation h;
  h.add(0, Poly::constant(XYZW, 1));
  p.add_hook(SymWord{{g12, g13}}, h);

  PageElement dp = total_D(p, cx);
  CHECK(dp.cols.empty());
  // d'(dP[1,2].dP[1,2,3]) hits dP[1,2].dP[1,3] with coefficient x z w
  Derivation expect;
  expect.add(0, -parse_poly("x*z*w", XYZW));
  CHECK(dp.hook.at(SymWord{{g12, g123}}) == expect);
}

TEST_CASE("closedness report rejects hook input and grades failures") {
  Complex cx = koszul_complex(parse_poly("x*y*z*w", XYZW));
  PageElement p;
  p.num_args = 2;
  p.degree = 2;
  Derivation h;
  h.add(0, Poly::constant(XYZW, 1));
  p.add_hook(SymWord{{cx.basis.find("dP[1,2]"), cx.basis.find("dP[1,3]")}}, h);
  CHECK_THROWS_AS(is_closed(p, cx), std::invalid_argument);

  PageElement q;
  q.num_args = 2;
  q.degree = 1;
  q.add_col(SymWord{{cx.basis.find("dP[1,2]"), cx.basis.find("dP[1,3]")}},
            ModElt::gen(cx.basis.find("dP[1,4]"), XYZW));
  ClosedReport rep = is_closed(q, cx);
  REQUIRE_FALSE(rep.ok());
  CHECK(rep.failures.front().find("ker(pi)") != std::string::npos);
}

TEST_CASE("jacobiator of the quartic binary bracket") {
  OidStructure oid = build_koszul_oid({parse_poly("x*y*z*w", XYZW), 0, 3});
  const Complex& cx = oid.cx;
  EvalContext ctx = oid.ctx();
  MultiTable l2 = oid.brackets.at(2);
  MultiTable jac = jacobiator(l2, cx.basis, ctx);
  REQUIRE_FALSE(jac.is_zero());

  // twice the jacobiator is the self bracket
  MultiTable twice = rn_bracket(l2, l2, cx.basis, ctx);
  CHECK(twice.entries == jac.scaled(Poly::constant(XYZW, 2)).entries);

  // the jacobiator is a closed page element
  ClosedReport crep = is_closed(page_of(jac), cx);
  INFO((crep.ok() ? "" : crep.failures.front()));
  CHECK(crep.ok());

  // and the stored ternary bracket trivializes it
  PageElement dl3 = total_D(page_of(oid.brackets.at(3)), cx);
  CHECK(dl3 == -page_of(jac));
}

TEST_CASE("solving for the ternary bracket from the jacobiator") {
  OidStructure oid = build_koszul_oid({parse_poly("x*y*z*w", XYZW), 0, 2});
  const Complex& cx = oid.cx;
  MultiTable l2 = oid.brackets.at(2);
  MultiTable jac = jacobiator(l2, cx.basis, oid.ctx());

  SolveReport rep = solve_D(-page_of(jac), cx, 1, 15);
  INFO((rep.notes.empty() ? "" : rep.notes.front()));
  REQUIRE(rep.solved);
  CHECK(rep.residual.is_zero());
  for (auto& [w, v] : rep.tau.cols) CHECK(w.degree() + rep.tau.degree <= -2);

  // certificate is judged by its residual, not by matching any particular
  // representative; plugging it in as l3 must close the axioms
  OidStructure built;
  built.cx = cx;
  built.rho = cx.pi;
  built.brackets.emplace(2, l2);
  built.brackets.emplace(3, table_of(rep.tau));
  AxiomsReport arep = verify_axioms(built, 3);
  INFO((arep.ok() ? "" : arep.failures.front()));
  CHECK(arep.ok());
}

TEST_CASE("solver refuses inputs that are not closed") {
  OidStructure oid = build_koszul_oid({parse_poly("x*y*z*w", XYZW), 0, 2});
  const Complex& cx = oid.cx;
  MultiTable jac = jacobiator(oid.brackets.at(2), cx.basis, oid.ctx());
  PageElement c = -page_of(jac);
  SymWord w{{cx.basis.find("dP[1,2]"), cx.basis.find("dP[1,3]"), cx.basis.find("dP[1,4]")}};
  c.add_col(w, ModElt::gen(cx.basis.find("dP[1,2]"), XYZW).scaled(parse_poly("x", XYZW)));

  SolveReport rep = solve_D(c, cx, 1, 15);
  CHECK_FALSE(rep.solved);
  REQUIRE_FALSE(rep.notes.empty());
  CHECK(rep.notes.front().find("not D-closed") != std::string::npos);
}

TEST_CASE("zero input solves to the zero certificate") {
  Complex cx = koszul_complex(parse_poly("x^3+y^3+z^3", XYZ));
  PageElement z;
  z.num_args = 3;
  z.degree = 2;
  SolveReport rep = solve_D(z, cx, 1, 10);
  CHECK(rep.solved);
  CHECK(rep.tau.is_zero());
  CHECK(rep.residual.is_zero());
}

TEST_CASE("construction on the cubic resolution") {
  Complex cx = koszul_complex(parse_poly("x^3+y^3+z^3", XYZ));
  auto u = lift_generator_bracket(cx, 8);
  REQUIRE_FALSE(u.empty());
  OidStructure oid = construct_structure(cx, u, 4, 8);
  AxiomsReport rep = verify_axioms(oid, 4);
  INFO((rep.ok() ? "" : rep.failures.front()));
  CHECK(rep.ok());
  CHECK(oid.brackets.at(2).leibniz);
}

TEST_CASE("a single regular generator gives a Lie algebroid") {
  Complex cx = ideal_complex({parse_poly("x^2+y^2+z^2", XYZ)});
  auto u = lift_generator_bracket(cx, 8);
  OidStructure oid = construct_structure(cx, u, 4, 8);
  AxiomsReport rep = verify_axioms(oid, 4);
  INFO((rep.ok() ? "" : rep.failures.front()));
  CHECK(rep.ok());
  // the jacobiator lands in ker(pi) = 0, so the minimal certificate is zero
  // on every product of depth -1 generators
  CHECK(oid.brackets.at(3).is_zero());
  CHECK(oid.brackets.at(4).is_zero());
}

TEST_CASE("abelian anchor with no structure constants") {
  std::vector<std::string> xy = {"x", "y"};
  Complex cx;
  cx.vars = xy;
  GenKey e = cx.basis.add("e", -1, 1);
  Derivation pe;
  pe.add(0, parse_poly("x", xy));
  cx.pi[e] = pe;

  OidStructure oid = construct_structure(cx, {}, 3, 6);
  ModElt me = ModElt::gen(e, xy);
  ModElt v = eval_bracket(oid, 2, {me.scaled(parse_poly("x", xy)), me.scaled(parse_poly("y", xy))});
  CHECK(v == me.scaled(parse_poly("-x*y", xy)));
  CHECK(oid.brackets.at(3).is_zero());
  CHECK(verify_axioms(oid, 3).ok());
}

TEST_CASE("construction rejects bad inputs") {
  std::vector<std::string> xs = {"x"};
  Complex stub;
  stub.vars = xs;
  stub.basis.add("e", -1, 1);
  CHECK_THROWS_AS(construct_structure(stub, {}, 2, 4), std::invalid_argument);

  Complex cx = koszul_complex(parse_poly("x^3+y^3+z^3", XYZ));
  GenKey g12 = cx.basis.find("dP[1,2]");
  GenKey g13 = cx.basis.find("dP[1,3]");
  std::map<SymWord, ModElt> bad;
  bad[SymWord{{g12, g13}}] = ModElt::gen(cx.basis.find("dP[2,3]"), XYZ);
  CHECK_THROWS_AS(construct_structure(cx, bad, 2, 8), std::invalid_argument);
}
