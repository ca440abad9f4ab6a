#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lioid/families.hpp"
#include "lioid/io.hpp"

using namespace lioid;

namespace {

constexpr int kOk = 0;
constexpr int kResidual = 1;
constexpr int kBadInput = 2;
constexpr int kSolver = 3;

std::vector<std::string> split_list(const std::string& csv, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : csv) {
    if (c == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

MonomialOrder order_flag(const std::string& name) {
  if (name == "lex") return MonomialOrder::lex();
  if (name == "grlex") return MonomialOrder::grlex();
  throw io_error("--order", "expected lex or grlex");
}

Poly cli_poly(const std::string& text, const std::vector<std::string>& vars, const char* flag) {
  try {
    return parse_poly(text, vars);
  } catch (const std::exception& e) {
    throw io_error(flag, e.what());
  }
}

/// Uniform verdict printing: one human line per failure, or a single JSON
/// object with --json. Returns the exit code.
int emit(const std::string& verb, bool ok, const std::vector<std::string>& failures,
         int checks_run, bool as_json, const Json& extra = Json::object()) {
  if (as_json) {
    Json j = extra;
    j["verb"] = verb;
    j["ok"] = ok;
    j["checks_run"] = checks_run;
    j["failures"] = failures;
    std::cout << j.dump(2) << "\n";
  } else {
    for (auto& f : failures) std::cout << verb << ": FAIL " << f << "\n";
    std::cout << verb << ": " << checks_run << " checks, "
              << (ok ? "all passed" : std::to_string(failures.size()) + " failed") << "\n";
  }
  return ok ? kOk : kResidual;
}

OidStructure family_oid(const std::string& family, const std::string& phi_str,
                        const std::string& phis_str, const std::vector<std::string>& vars,
                        int max_arity) {
  if (family == "koszul") {
    if (phi_str.empty()) throw io_error("--phi", "required for the koszul family");
    KoszulSpec spec;
    spec.phi = cli_poly(phi_str, vars, "--phi");
    spec.max_arity = max_arity;
    return build_koszul_oid(spec);
  }
  if (family == "ideal") {
    if (phis_str.empty()) throw io_error("--phis", "required for the ideal family");
    IdealSpec spec;
    for (auto& s : split_list(phis_str, ';')) spec.phis.push_back(cli_poly(s, vars, "--phis"));
    spec.max_arity = max_arity;
    return build_ideal_oid(spec);
  }
  throw io_error("--family", "expected koszul or ideal");
}

Complex family_complex(const std::string& family, const std::string& phi_str,
                       const std::string& phis_str, const std::vector<std::string>& vars) {
  if (family == "koszul") {
    if (phi_str.empty()) throw io_error("--phi", "required for the koszul family");
    return koszul_complex(cli_poly(phi_str, vars, "--phi"));
  }
  if (family == "ideal") {
    if (phis_str.empty()) throw io_error("--phis", "required for the ideal family");
    std::vector<Poly> phis;
    for (auto& s : split_list(phis_str, ';')) phis.push_back(cli_poly(s, vars, "--phis"));
    return ideal_complex(phis);
  }
  throw io_error("--family", "expected koszul or ideal");
}

void write_or_print(const std::string& out, const Json& j) {
  if (out.empty()) std::cout << j.dump(2) << "\n";
  else write_json(out, j);
}

int run_verify(const std::string& file, int max_arity, bool as_json) {
  OidStructure oid = structure_of(read_json(file));
  AxiomsReport rep = verify_axioms(oid, max_arity);
  return emit("verify", rep.ok(), rep.failures, rep.checks_run, as_json);
}

int run_morphism_report(const MorphismReport& rep, bool as_json, const char* verb) {
  std::vector<std::string> failures;
  for (auto& g : rep.anchor_failures) failures.push_back("anchor residual at " + g);
  for (auto& g : rep.hook_failures) failures.push_back("hook residual at " + g);
  for (auto& [a, t] : rep.residuals)
    failures.push_back("arity " + std::to_string(a) + " residual on " +
                       std::to_string(t.entries.size()) + " words");
  return emit(verb, rep.ok(), failures, rep.checks_run, as_json);
}

bool same_basis(const GradedBasis& a, const GradedBasis& b) {
  return basis_json(a) == basis_json(b);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact engine for graded bracket hierarchies on free resolutions"};
  app.require_subcommand(1);

  std::string file, second, out, family = "koszul", phi_str, phis_str, vars_csv, chi_str;
  std::string order_name = "grlex", with_file, check_file, from_str = "0", to_str = "1";
  int max_arity = 4, weight_cap = 10;
  bool as_json = false;

  auto add_common = [&](CLI::App* sub, bool arity = true) {
    sub->add_flag("--json", as_json, "machine-readable report");
    if (arity) sub->add_option("--max-arity", max_arity, "largest bracket arity handled");
  };

  CLI::App* build = app.add_subcommand("build", "write a family structure as JSON");
  build->add_option("--family", family, "koszul or ideal");
  build->add_option("--phi", phi_str, "polynomial for the koszul family");
  build->add_option("--phis", phis_str, "semicolon-separated ideal generators");
  build->add_option("--vars", vars_csv, "comma-separated variable names")->required();
  build->add_option("-o,--out", out, "output file (stdout if absent)");
  add_common(build);

  CLI::App* verify = app.add_subcommand("verify", "run the axiom battery on a structure file");
  verify->add_option("file", file, "structure JSON")->required();
  add_common(verify);

  CLI::App* construct = app.add_subcommand("construct", "solve for a structure on a family complex");
  construct->add_option("--family", family, "koszul or ideal");
  construct->add_option("--phi", phi_str, "polynomial for the koszul family");
  construct->add_option("--phis", phis_str, "semicolon-separated ideal generators");
  construct->add_option("--vars", vars_csv, "comma-separated variable names")->required();
  construct->add_option("--weight-cap", weight_cap, "largest coefficient weight solved for");
  construct->add_option("-o,--out", out, "output file (stdout if absent)");
  add_common(construct);

  CLI::App* morphism = app.add_subcommand("morphism", "construct or check a morphism between two structure files");
  morphism->add_option("source", file, "source structure JSON")->required();
  morphism->add_option("target", second, "target structure JSON")->required();
  morphism->add_option("--check", check_file, "verify this morphism file instead of constructing");
  morphism->add_option("--weight-cap", weight_cap, "largest coefficient weight solved for");
  morphism->add_option("-o,--out", out, "output file for the constructed morphism");
  add_common(morphism);

  CLI::App* restrict_cmd = app.add_subcommand("restrict", "pass to the quotient by a principal ideal");
  restrict_cmd->add_option("file", file, "structure JSON")->required();
  restrict_cmd->add_option("--phi", phi_str, "ideal generator")->required();
  restrict_cmd->add_option("--order", order_name, "monomial order for remainders (lex or grlex)");
  restrict_cmd->add_option("-o,--out", out, "output file (stdout if absent)");
  add_common(restrict_cmd, false);

  CLI::App* twist = app.add_subcommand("twist", "rescale the anchor and brackets by a function");
  twist->add_option("file", file, "structure JSON")->required();
  twist->add_option("--chi", chi_str, "twisting function")->required();
  twist->add_option("-o,--out", out, "output file (stdout if absent)");
  add_common(twist, false);

  CLI::App* rn = app.add_subcommand("rn", "evaluate the graded Jacobi combinations per arity");
  rn->add_option("file", file, "structure JSON")->required();
  add_common(rn);

  CLI::App* homology = app.add_subcommand("homology", "weight-sliced homology dimensions of the complex");
  homology->add_option("file", file, "structure JSON")->required();
  homology->add_option("--weight-cap", weight_cap, "largest weight slice inspected")->required();
  add_common(homology, false);

  CLI::App* homotopy = app.add_subcommand("homotopy", "flow the identity morphism along a homotopy");
  homotopy->add_option("file", file, "structure JSON")->required();
  homotopy->add_option("--with", with_file, "coderivation JSON driving the flow")->required();
  homotopy->add_option("--from", from_str, "flow start time");
  homotopy->add_option("--to", to_str, "flow end time");
  homotopy->add_option("-o,--out", out, "output file for the trace");
  add_common(homotopy);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kBadInput;
  }

  try {
    if (build->parsed()) {
      auto vars = split_list(vars_csv, ',');
      OidStructure oid = family_oid(family, phi_str, phis_str, vars, max_arity);
      write_or_print(out, structure_json(oid));
      return kOk;
    }

    if (verify->parsed()) return run_verify(file, max_arity, as_json);

    if (construct->parsed()) {
      auto vars = split_list(vars_csv, ',');
      Complex cx = family_complex(family, phi_str, phis_str, vars);
      OidStructure oid = construct_structure(cx, lift_generator_bracket(cx, weight_cap),
                                             max_arity, weight_cap);
      AxiomsReport rep = verify_axioms(oid, max_arity);
      if (out.empty()) {
        std::cout << structure_json(oid).dump(2) << "\n";
        return rep.ok() ? kOk : kResidual;
      }
      write_json(out, structure_json(oid));
      return emit("construct", rep.ok(), rep.failures, rep.checks_run, as_json);
    }

    if (morphism->parsed()) {
      OidStructure src = structure_of(read_json(file));
      OidStructure tgt = structure_of(read_json(second));
      if (!check_file.empty()) {
        MorphismFile mf = morphism_of(read_json(check_file));
        if (mf.vars != src.cx.vars) throw io_error(check_file, "ring mismatch with the source");
        if (!same_basis(mf.source, src.cx.basis) || !same_basis(mf.target, tgt.cx.basis))
          throw io_error(check_file, "bases do not match the given structures");
        return run_morphism_report(check_morphism(mf.phi, src, tgt, max_arity), as_json,
                                   "morphism");
      }
      TaylorMorphism m = construct_morphism(src, tgt, max_arity, weight_cap);
      if (!out.empty())
        write_json(out, morphism_json(m, src.cx.vars, src.cx.basis, tgt.cx.basis));
      return run_morphism_report(check_morphism(m, src, tgt, max_arity), as_json, "morphism");
    }

    if (restrict_cmd->parsed()) {
      OidStructure oid = structure_of(read_json(file));
      Poly phi = cli_poly(phi_str, oid.cx.vars, "--phi");
      RestrictReport rep;
      OidStructure res = restrict_structure(oid, phi, order_flag(order_name), &rep);
      if (!rep.ok()) return emit("restrict", false, rep.failures, 1, as_json);
      write_or_print(out, structure_json(res));
      return out.empty() ? kOk : emit("restrict", true, {}, 1, as_json);
    }

    if (twist->parsed()) {
      OidStructure oid = structure_of(read_json(file));
      write_or_print(out, structure_json(chi_twist(oid, cli_poly(chi_str, oid.cx.vars, "--chi"))));
      return kOk;
    }

    if (rn->parsed()) {
      OidStructure oid = structure_of(read_json(file));
      auto tables = oid.all_tables();
      EvalContext ctx = oid.ctx();
      std::vector<std::string> failures;
      int checks = 0;
      for (int n = 1; n <= max_arity; ++n) {
        MultiTable J = jacobi_identity(tables, n, oid.cx.basis, ctx);
        for (auto& [w, v] : J.entries) {
          ++checks;
          if (!reduced(v, oid.modulus).is_zero())
            failures.push_back("arity " + std::to_string(n) + " Jacobi residual at " +
                               word_str(w, oid.cx.basis));
        }
        checks += static_cast<int>(words_of_arity(oid.cx.basis, n).size() - J.entries.size());
      }
      return emit("rn", failures.empty(), failures, checks, as_json);
    }

    if (homology->parsed()) {
      OidStructure oid = structure_of(read_json(file));
      auto dims = homology_dims(oid.cx, weight_cap);
      std::vector<std::string> failures;
      Json table = Json::array();
      for (auto& [dw, h] : dims) {
        table.push_back(Json{{"degree", dw.first}, {"weight", dw.second}, {"dim", h}});
        if (h != 0)
          failures.push_back("homology dimension " + std::to_string(h) + " at degree " +
                             std::to_string(dw.first) + " weight " + std::to_string(dw.second));
        if (!as_json)
          std::cout << "homology: degree " << dw.first << " weight " << dw.second << " dim "
                    << h << "\n";
      }
      return emit("homology", failures.empty(), failures, static_cast<int>(dims.size()),
                  as_json, Json{{"dims", table}});
    }

    if (homotopy->parsed()) {
      OidStructure oid = structure_of(read_json(file));
      CoderivationFile cf = coderivation_of(read_json(with_file));
      if (cf.vars != oid.cx.vars) throw io_error(with_file, "ring mismatch with the structure");
      if (!same_basis(cf.source, oid.cx.basis) || !same_basis(cf.target, oid.cx.basis))
        throw io_error(with_file, "basis does not match the structure");
      Rat a = rat_of(from_str, "--from");
      Rat b = rat_of(to_str, "--to");
      HomotopyTrace tr =
          homotopy_step(identity_morphism(oid.cx), cf.h, oid, oid, a, b, max_arity);
      if (!out.empty()) write_json(out, trace_json(tr, oid.cx.basis, oid.cx.basis));
      OidStructure lifted = lift_structure(oid, tr.tvars);
      return run_morphism_report(check_morphism(tr.phi_t, lifted, lifted, max_arity), as_json,
                                 "homotopy");
    }
  } catch (const solver_error& e) {
    std::cerr << "lioid: solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const io_error& e) {
    std::cerr << "lioid: " << e.what() << "\n";
    return kBadInput;
  } catch (const std::runtime_error& e) {
    std::cerr << "lioid: solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "lioid: " << e.what() << "\n";
    return kBadInput;
  }
  return kBadInput;
}
