#pragma once

#include <algorithm>
#include <fstream>

#include <json.hpp>

#include "morphism.hpp"

namespace lioid {

using Json = nlohmann::json;

/// Parse or schema failure, tagged with the JSON path of the offending node.
struct io_error : std::runtime_error {
  io_error(const std::string& path, const std::string& what)
      : std::runtime_error(path + ": " + what) {}
};

inline const Json& req(const Json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw io_error(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw io_error(path + "/" + key, "missing");
  return *it;
}

inline const Json& obj(const Json& j, const char* key, const std::string& path) {
  const Json& v = req(j, key, path);
  if (!v.is_object()) throw io_error(path + "/" + key, "expected an object");
  return v;
}

inline std::string str_of(const Json& j, const std::string& path) {
  if (!j.is_string()) throw io_error(path, "expected a string");
  return j.get<std::string>();
}

inline int int_of(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw io_error(path, "expected an integer");
  return j.get<int>();
}

inline Rat rat_of(const std::string& s, const std::string& path) {
  try {
    Rat r(s);
    if (r.get_den() == 0) throw std::invalid_argument("zero denominator");
    r.canonicalize();
    return r;
  } catch (const std::exception&) {
    throw io_error(path, "bad rational '" + s + "'");
  }
}

inline std::string rat_str(const Rat& r) { return r.get_str(); }

inline Json poly_json(const Poly& p) {
  Json terms = Json::array();
  for (auto& [m, c] : p.terms()) terms.push_back(Json{{"c", rat_str(c)}, {"e", m}});
  return terms;
}

inline Poly poly_of(const Json& j, const std::vector<std::string>& vars,
                    const std::string& path) {
  if (!j.is_array()) throw io_error(path, "expected a term array");
  Poly p = Poly::zero(vars);
  int i = 0;
  for (auto& t : j) {
    std::string tp = path + "/" + std::to_string(i++);
    Rat c = rat_of(str_of(req(t, "c", tp), tp + "/c"), tp + "/c");
    const Json& ej = req(t, "e", tp);
    if (!ej.is_array() || ej.size() != vars.size())
      throw io_error(tp + "/e", "expected " + std::to_string(vars.size()) + " exponents");
    Monomial m;
    int k = 0;
    for (auto& e : ej) {
      int v = int_of(e, tp + "/e/" + std::to_string(k++));
      if (v < 0) throw io_error(tp + "/e", "negative exponent");
      m.push_back(v);
    }
    p += Poly::term(vars, m, c);
  }
  return p;
}

inline Json basis_json(const GradedBasis& basis) {
  Json rows = Json::array();
  for (auto& g : basis.all()) {
    const Generator& gen = basis.at(g);
    rows.push_back(Json{{"degree", gen.degree}, {"label", gen.label}, {"weight", gen.weight}});
  }
  return rows;
}

inline GradedBasis basis_of(const Json& j, const std::string& path) {
  if (!j.is_array()) throw io_error(path, "expected a generator array");
  GradedBasis basis;
  int i = 0;
  for (auto& row : j) {
    std::string rp = path + "/" + std::to_string(i++);
    std::string label = str_of(req(row, "label", rp), rp + "/label");
    int degree = int_of(req(row, "degree", rp), rp + "/degree");
    int weight = int_of(req(row, "weight", rp), rp + "/weight");
    if (degree >= 0) throw io_error(rp + "/degree", "generators live in negative degrees");
    if (basis.contains(label)) throw io_error(rp + "/label", "duplicate label '" + label + "'");
    basis.add(label, degree, weight);
  }
  return basis;
}

inline Json mod_json(const ModElt& x, const GradedBasis& basis) {
  Json o = Json::object();
  for (auto& [g, f] : x.comps) o[basis.at(g).label] = poly_json(f);
  return o;
}

inline ModElt mod_of(const Json& j, const GradedBasis& basis,
                     const std::vector<std::string>& vars, const std::string& path) {
  if (!j.is_object()) throw io_error(path, "expected a generator->poly object");
  ModElt x;
  for (auto& [label, pj] : j.items()) {
    if (!basis.contains(label)) throw io_error(path + "/" + label, "unknown generator");
    Poly f = poly_of(pj, vars, path + "/" + label);
    if (!f.is_zero()) x.add(basis.find(label), f);
  }
  return x;
}

inline Json der_json(const Derivation& x, const std::vector<std::string>& vars) {
  Json o = Json::object();
  for (auto& [v, f] : x.comps) o[vars.at(v)] = poly_json(f);
  return o;
}

inline Derivation der_of(const Json& j, const std::vector<std::string>& vars,
                         const std::string& path) {
  if (!j.is_object()) throw io_error(path, "expected a variable->poly object");
  Derivation x;
  for (auto& [name, pj] : j.items()) {
    auto it = std::find(vars.begin(), vars.end(), name);
    if (it == vars.end()) throw io_error(path + "/" + name, "unknown variable");
    Poly f = poly_of(pj, vars, path + "/" + name);
    if (!f.is_zero()) x.add(static_cast<int>(it - vars.begin()), f);
  }
  return x;
}

inline std::string word_key(const SymWord& w, const GradedBasis& basis) {
  return word_str(w, basis);
}

/// Parse "a . b . c" against the basis and bring it to canonical order,
/// reporting the Koszul sign (0 when an odd letter repeats).
inline NormalizedWord word_of(const std::string& key, const GradedBasis& basis,
                              const std::string& path) {
  std::vector<GenKey> factors;
  size_t pos = 0;
  while (pos <= key.size()) {
    size_t next = key.find(" . ", pos);
    std::string label = key.substr(pos, next == std::string::npos ? next : next - pos);
    if (!basis.contains(label)) throw io_error(path, "unknown generator '" + label + "'");
    factors.push_back(basis.find(label));
    if (next == std::string::npos) break;
    pos = next + 3;
  }
  return normalize_word(std::move(factors));
}

inline Json table_entries_json(const MultiTable& t, const GradedBasis& words,
                               const GradedBasis& values) {
  Json o = Json::object();
  for (auto& [w, v] : t.entries) o[word_key(w, words)] = mod_json(v, values);
  return o;
}

inline MultiTable table_of_json(const Json& j, int num_args, int degree, bool leibniz,
                                const GradedBasis& words, const GradedBasis& values,
                                const std::vector<std::string>& vars, const std::string& path) {
  if (!j.is_object()) throw io_error(path, "expected a word->value object");
  MultiTable t;
  t.num_args = num_args;
  t.degree = degree;
  t.leibniz = leibniz;
  for (auto& [key, vj] : j.items()) {
    NormalizedWord nw = word_of(key, words, path + "/" + key);
    if (static_cast<int>(nw.word.factors.size()) != num_args && !nw.is_zero())
      throw io_error(path + "/" + key, "expected " + std::to_string(num_args) + " factors");
    ModElt v = mod_of(vj, values, vars, path + "/" + key);
    if (nw.is_zero() || v.is_zero()) continue;
    t.add_entry(nw.word, nw.sign > 0 ? v : -v);
  }
  return t;
}

inline Json order_json(const MonomialOrder& o) {
  Json j = Json::object();
  j["kind"] = o.kind == MonomialOrder::Kind::lex ? "lex" : "grlex";
  if (!o.precedence.empty()) j["precedence"] = o.precedence;
  return j;
}

inline MonomialOrder order_of(const Json& j, const std::string& path) {
  std::string kind = str_of(req(j, "kind", path), path + "/kind");
  MonomialOrder o;
  if (kind == "lex") o = MonomialOrder::lex();
  else if (kind == "grlex") o = MonomialOrder::grlex();
  else throw io_error(path + "/kind", "expected lex or grlex");
  if (j.contains("precedence")) {
    const Json& pj = j.at("precedence");
    if (!pj.is_array()) throw io_error(path + "/precedence", "expected an array");
    for (auto& e : pj) o.precedence.push_back(int_of(e, path + "/precedence"));
  }
  return o;
}

inline std::vector<std::string> vars_of(const Json& ring, const std::string& path) {
  const Json& vj = req(ring, "vars", path);
  if (!vj.is_array() || vj.empty()) throw io_error(path + "/vars", "expected a variable array");
  std::vector<std::string> vars;
  int i = 0;
  for (auto& v : vj) vars.push_back(str_of(v, path + "/vars/" + std::to_string(i++)));
  return vars;
}

inline Json structure_json(const OidStructure& oid) {
  const Complex& cx = oid.cx;
  Json j;
  j["kind"] = "structure";
  j["ring"] = Json{{"vars", cx.vars}};
  if (oid.modulus) {
    j["ring"]["modulus"] =
        Json{{"phi", poly_json(oid.modulus->phi)}, {"order", order_json(oid.modulus->order)}};
  }
  j["basis"] = basis_json(cx.basis);
  j["weights_valid"] = cx.weights_valid;
  Json d = Json::object();
  for (auto& [g, v] : cx.d)
    if (!v.is_zero()) d[cx.basis.at(g).label] = mod_json(v, cx.basis);
  j["d"] = d;
  Json pi = Json::object();
  for (auto& [g, v] : cx.pi)
    if (!v.is_zero()) pi[cx.basis.at(g).label] = der_json(v, cx.vars);
  j["pi"] = pi;
  Json rho = Json::object();
  for (auto& [g, v] : oid.rho)
    if (!v.is_zero()) rho[cx.basis.at(g).label] = der_json(v, cx.vars);
  j["rho"] = rho;
  Json brackets = Json::object();
  for (auto& [k, t] : oid.brackets)
    brackets[std::to_string(k)] =
        Json{{"leibniz", t.leibniz}, {"entries", table_entries_json(t, cx.basis, cx.basis)}};
  j["brackets"] = brackets;
  return j;
}

inline OidStructure structure_of(const Json& j) {
  if (str_of(req(j, "kind", ""), "/kind") != "structure")
    throw io_error("/kind", "expected a structure file");
  OidStructure oid;
  const Json& ring = req(j, "ring", "");
  oid.cx.vars = vars_of(ring, "/ring");
  oid.cx.basis = basis_of(req(j, "basis", ""), "/basis");
  const Json& wv = req(j, "weights_valid", "");
  if (!wv.is_boolean()) throw io_error("/weights_valid", "expected a boolean");
  oid.cx.weights_valid = wv.get<bool>();
  const auto& vars = oid.cx.vars;
  const auto& basis = oid.cx.basis;
  for (auto& [label, vj] : obj(j, "d", "").items()) {
    if (!basis.contains(label)) throw io_error("/d/" + label, "unknown generator");
    ModElt v = mod_of(vj, basis, vars, "/d/" + label);
    if (!v.is_zero()) oid.cx.d.emplace(basis.find(label), std::move(v));
  }
  for (auto& [label, vj] : obj(j, "pi", "").items()) {
    if (!basis.contains(label)) throw io_error("/pi/" + label, "unknown generator");
    Derivation v = der_of(vj, vars, "/pi/" + label);
    if (!v.is_zero()) oid.cx.pi.emplace(basis.find(label), std::move(v));
  }
  for (auto& [label, vj] : obj(j, "rho", "").items()) {
    if (!basis.contains(label)) throw io_error("/rho/" + label, "unknown generator");
    Derivation v = der_of(vj, vars, "/rho/" + label);
    if (!v.is_zero()) oid.rho.emplace(basis.find(label), std::move(v));
  }
  for (auto& [ks, tj] : obj(j, "brackets", "").items()) {
    int k = 0;
    try {
      k = std::stoi(ks);
    } catch (const std::exception&) {
      throw io_error("/brackets/" + ks, "expected a numeric arity key");
    }
    if (k < 2) throw io_error("/brackets/" + ks, "arities start at 2");
    const Json& lj = req(tj, "leibniz", "/brackets/" + ks);
    if (!lj.is_boolean()) throw io_error("/brackets/" + ks + "/leibniz", "expected a boolean");
    MultiTable t = table_of_json(req(tj, "entries", "/brackets/" + ks), k, 1, lj.get<bool>(),
                                 basis, basis, vars, "/brackets/" + ks + "/entries");
    oid.brackets.emplace(k, std::move(t));
  }
  if (ring.contains("modulus")) {
    const Json& mj = ring.at("modulus");
    Poly phi = poly_of(req(mj, "phi", "/ring/modulus"), vars, "/ring/modulus/phi");
    if (phi.is_zero()) throw io_error("/ring/modulus/phi", "zero modulus");
    oid.modulus = Reduction{phi, order_of(req(mj, "order", "/ring/modulus"), "/ring/modulus/order")};
  }
  return oid;
}

inline Json coeffs_json(const std::map<int, MultiTable>& coeffs, const GradedBasis& words,
                        const GradedBasis& values) {
  Json o = Json::object();
  for (auto& [k, t] : coeffs) o[std::to_string(k)] = table_entries_json(t, words, values);
  return o;
}

inline std::map<int, MultiTable> coeffs_of(const Json& j, int degree, const GradedBasis& words,
                                           const GradedBasis& values,
                                           const std::vector<std::string>& vars,
                                           const std::string& path) {
  if (!j.is_object()) throw io_error(path, "expected an index->table object");
  std::map<int, MultiTable> coeffs;
  for (auto& [ks, tj] : j.items()) {
    int k = 0;
    try {
      k = std::stoi(ks);
    } catch (const std::exception&) {
      throw io_error(path + "/" + ks, "expected a numeric index key");
    }
    if (k < 0) throw io_error(path + "/" + ks, "negative index");
    MultiTable t =
        table_of_json(tj, k + 1, degree, false, words, values, vars, path + "/" + ks);
    if (!t.is_zero()) coeffs.emplace(k, std::move(t));
  }
  return coeffs;
}

struct MorphismFile {
  std::vector<std::string> vars;
  GradedBasis source;
  GradedBasis target;
  TaylorMorphism phi;
};

inline Json morphism_json(const TaylorMorphism& phi, const std::vector<std::string>& vars,
                          const GradedBasis& source, const GradedBasis& target) {
  Json j;
  j["kind"] = "morphism";
  j["ring"] = Json{{"vars", vars}};
  j["source"] = basis_json(source);
  j["target"] = basis_json(target);
  j["coeffs"] = coeffs_json(phi.coeffs, source, target);
  return j;
}

inline MorphismFile morphism_of(const Json& j) {
  if (str_of(req(j, "kind", ""), "/kind") != "morphism")
    throw io_error("/kind", "expected a morphism file");
  MorphismFile f;
  f.vars = vars_of(req(j, "ring", ""), "/ring");
  f.source = basis_of(req(j, "source", ""), "/source");
  f.target = basis_of(req(j, "target", ""), "/target");
  f.phi.coeffs = coeffs_of(req(j, "coeffs", ""), 0, f.source, f.target, f.vars, "/coeffs");
  return f;
}

struct CoderivationFile {
  std::vector<std::string> vars;
  GradedBasis source;
  GradedBasis target;
  TaylorCoderivation h;
};

inline Json coderivation_json(const TaylorCoderivation& h, const std::vector<std::string>& vars,
                              const GradedBasis& source, const GradedBasis& target) {
  Json j;
  j["kind"] = "coderivation";
  j["degree"] = h.degree;
  j["ring"] = Json{{"vars", vars}};
  j["source"] = basis_json(source);
  j["target"] = basis_json(target);
  j["coeffs"] = coeffs_json(h.coeffs, source, target);
  return j;
}

inline CoderivationFile coderivation_of(const Json& j) {
  if (str_of(req(j, "kind", ""), "/kind") != "coderivation")
    throw io_error("/kind", "expected a coderivation file");
  CoderivationFile f;
  f.vars = vars_of(req(j, "ring", ""), "/ring");
  f.source = basis_of(req(j, "source", ""), "/source");
  f.target = basis_of(req(j, "target", ""), "/target");
  f.h.degree = int_of(req(j, "degree", ""), "/degree");
  f.h.coeffs =
      coeffs_of(req(j, "coeffs", ""), f.h.degree, f.source, f.target, f.vars, "/coeffs");
  return f;
}

inline Json trace_json(const HomotopyTrace& tr, const GradedBasis& source,
                       const GradedBasis& target) {
  Json j;
  j["kind"] = "trace";
  j["ring"] = Json{{"vars", tr.tvars}};
  j["source"] = basis_json(source);
  j["target"] = basis_json(target);
  j["t_start"] = rat_str(tr.t_start);
  j["t_end"] = rat_str(tr.t_end);
  j["phi_t"] = coeffs_json(tr.phi_t.coeffs, source, target);
  j["h"] = Json{{"degree", tr.h.degree}, {"coeffs", coeffs_json(tr.h.coeffs, source, target)}};
  return j;
}

inline Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error(path, "cannot open for reading");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw io_error(path, e.what());
  }
}

inline void write_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw io_error(path, "cannot open for writing");
  out << j.dump(2) << "\n";
  if (!out) throw io_error(path, "write failed");
}

}  // namespace lioid
