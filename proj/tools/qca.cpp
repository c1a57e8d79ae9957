#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "qca/collapsibility.hpp"
#include "qca/paths.hpp"
#include "qca/report.hpp"
#include "qca/semicomplete.hpp"

using namespace qca;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Globals {
  bool json_out = false;
  std::size_t budget_elements = Budget{}.max_elements;
  std::size_t budget_nodes = Budget{}.max_nodes;
  bool no_equality = false;
  std::uint64_t seed = 1;

  Budget budget() const {
    Budget b;
    b.max_elements = budget_elements;
    b.max_nodes = budget_nodes;
    return b;
  }
};

// "1,2;2,1" -> {(1,2),(2,1)}
std::vector<Tuple> parse_tuples(const std::string& s) {
  std::vector<Tuple> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ';')) {
    Tuple t;
    std::stringstream ps(part);
    std::string v;
    while (std::getline(ps, v, ',')) {
      try {
        t.push_back(std::stoi(v));
      } catch (const std::logic_error&) {
        throw Error("invalid_argument", "bad tuple element '" + v + "'");
      }
    }
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

Tuple parse_tuple(const std::string& s) {
  auto ts = parse_tuples(s);
  if (ts.size() != 1) throw Error("invalid_argument", "expected one tuple, got '" + s + "'");
  return ts[0];
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("input_error", "cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json adversaries_json(const AdversarySet& s) {
  json a = json::array();
  for (const auto& O : s.adversaries) a.push_back(O.tuples);
  return json{{"m", s.m}, {"width", s.width()}, {"adversaries", a}};
}

json verdict_cert(const json& ref, const CollapsibilityVerdict& v, int x, int p, int n) {
  if (v.answer == Answer::Yes && v.certificate) {
    json c{{"structure", ref}, {"table", op_to_json(*v.certificate)}};
    if (v.method == "hubie") {
      c["kind"] = "hubie";
      c["source"] = x;
    } else {
      c["kind"] = "polymorphism";
      c["tags"] = json::array({v.method == "maltsev" ? "maltsev" : "near_unanimity(" + std::to_string(v.certificate->k) + ")"});
    }
    return c;
  }
  if (v.answer == Answer::No && v.method == "generation")
    return json{{"kind", "non_membership"},
                {"structure", ref},
                {"generators", upsilon(n, v.m, p, {x}).union_tuples()},
                {"target", v.counterexample}};
  return nullptr;
}

// Flattened "key: value" lines for human output.
void print_human(const json& j, const std::string& prefix, std::ostream& os) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) print_human(v, prefix.empty() ? k : prefix + "." + k, os);
  } else if (j.is_string()) {
    os << prefix << ": " << j.get<std::string>() << "\n";
  } else {
    os << prefix << ": " << j.dump() << "\n";
  }
}

struct Report {
  json result = json::object();
  json certificates = json::array();
  json inputs = json::object();
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantified constraint algebra toolkit"};
  app.fallthrough();
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json", g.json_out, "JSON output");
  app.add_option("--budget-elements", g.budget_elements, "Maximum product elements")->check(CLI::PositiveNumber);
  app.add_option("--budget-nodes", g.budget_nodes, "Maximum search nodes per solver call")->check(CLI::PositiveNumber);
  app.add_flag("--no-equality", g.no_equality, "Reject equality atoms in sentences");
  app.add_option("--seed", g.seed, "Seed for sampled probes");
  app.set_version_flag("--version", kVersion);

  Report rep;
  std::function<void()> action;
  auto on = [&](CLI::App* sub, std::function<void()> fn) { sub->callback([&action, fn]() { action = fn; }); };

  // shared argument holders
  std::string beta, structure_arg, table_arg, gens_arg, target_arg, family = "upsilon", sources_arg = "1",
                                                                     sentence_arg, sentence_file, filter, report_path;
  bool constants = false;
  int y = 0, m = 2, k = 3, p = 1, x = 1, limit = 10, max_size = 4, samples = 50, m_budget = 3, arity_budget = 3,
      n_arg = 0, max_u = 2, max_e = 2, max_atoms = 2;
  std::optional<int> source_opt;

  auto add_structure = [&](CLI::App* sub) {
    sub->add_option("structure", structure_arg, "Structure file or beta:<word>")->required();
    sub->add_flag("--constants", constants, "Name every element by a constant");
  };
  auto ref = [&]() { return structure_ref(structure_arg, constants); };
  auto load = [&]() {
    json r = ref();
    rep.inputs["structure"] = r;
    return resolve_structure(r);
  };
  auto sentence = [&](const Structure& A) {
    std::string text = !sentence_file.empty() ? read_text(sentence_file) : sentence_arg;
    if (text.empty()) throw Error("invalid_argument", "give --sentence or --sentence-file");
    rep.inputs["sentence"] = text;
    return parse_sentence(text, A.signature(), !g.no_equality);
  };
  auto sources = [&]() {
    std::vector<int> B;
    for (const auto& t : parse_tuples(sources_arg))
      for (int v : t) B.push_back(v);
    return B;
  };
  auto family_of = [&]() {
    if (family == "upsilon") return AdversaryFamily::make_upsilon(p, sources());
    if (family == "sigma") return AdversaryFamily::make_sigma(p);
    if (family == "full") return AdversaryFamily::make_full();
    throw Error("invalid_argument", "unknown family '" + family + "'");
  };
  auto add_family = [&](CLI::App* sub) {
    sub->add_option("--family", family, "upsilon, sigma or full");
    sub->add_option("--p", p, "Family parameter p");
    sub->add_option("--B", sources_arg, "Source elements, comma separated");
    sub->add_option("--m", m, "Adversary length");
  };

  // path
  auto* path = app.add_subcommand("path", "Partially reflexive paths");
  path->require_subcommand(1);
  {
    auto* c = path->add_subcommand("classify", "Loop-connected / quasi-loop-connected classification");
    c->add_option("beta", beta)->required();
    on(c, [&]() {
      auto pc = classify_path(beta);
      rep.result = {{"kind", to_string(pc.kind)}, {"form", pc.form}, {"a", pc.a}, {"b", pc.b},
                    {"alpha", pc.alpha}, {"reversed", pc.reversed}, {"normalized", pc.normalized}};
    });
    auto* v = path->add_subcommand("verdict", "Gap and complexity verdict");
    v->add_option("beta", beta)->required();
    v->add_flag("--constants", constants);
    on(v, [&]() {
      auto pv = path_verdict(beta, constants);
      rep.result = {{"gap", pv.gap}, {"complexity", pv.complexity}};
    });
    auto* f = path->add_subcommand("fy", "Binary polymorphism f_y");
    f->add_option("--beta", beta)->required();
    f->add_option("--y", y)->required();
    on(f, [&]() {
      auto b = binary_fy(beta, y);
      json rows = json::array();
      for (int r = 1; r <= b.table.n; ++r) {
        json row = json::array();
        for (int c2 = 1; c2 <= b.table.n; ++c2) row.push_back(b.table({r, c2}));
        rows.push_back(row);
      }
      rep.result = {{"beta", b.beta}, {"y", y}, {"matrix", rows}, {"anchor", {b.anchor.first, b.anchor.second}}};
      rep.certificates.push_back({{"kind", "polymorphism"},
                                  {"structure", json{{"beta", b.beta}, {"constants", true}}},
                                  {"table", op_to_json(b.table)}});
    });
    auto* gen = path->add_subcommand("generators", "Listed generating tuples of A^m");
    gen->add_option("beta", beta)->required();
    gen->add_option("--m", m);
    on(gen, [&]() { rep.result = {{"m", m}, {"generators", generating_tuples(beta, m)}}; });
    auto* w = path->add_subcommand("egp-witness", "Exponential generation witness");
    w->add_option("beta", beta)->required();
    w->add_option("--m", m);
    on(w, [&]() {
      auto e = path_egp_witness(beta, m);
      rep.result = {{"p", e.p},     {"q", e.q},           {"mu", e.mu},
                    {"tau", e.tau}, {"relation", e.relation}, {"sentence", e.sentence.to_string()},
                    {"falsifier", e.falsifier}, {"used_fallback", e.used_fallback}};
      rep.certificates.push_back({{"kind", "egp_witness"},
                                  {"expanded", serialize_structure(e.expanded)},
                                  {"sentence", e.sentence.to_string()},
                                  {"falsifier", e.falsifier},
                                  {"checked", e.checked}});
    });
  }

  // semi
  auto* semi = app.add_subcommand("semi", "Semicomplete digraphs");
  semi->require_subcommand(1);
  {
    auto* a = semi->add_subcommand("analyze", "Sources, sinks, smoothness and cycle census");
    add_structure(a);
    on(a, [&]() {
      auto r = analyze_semicomplete(load());
      rep.result = {{"semicomplete", r.is_semicomplete}, {"tournament", r.is_tournament},
                    {"sources", r.sources},              {"sinks", r.sinks},
                    {"smooth", r.is_smooth},             {"cycle_census", r.cycle_census == 2 ? "2+" : std::to_string(r.cycle_census)},
                    {"smooth_part", r.smooth_part}};
    });
    auto* s = semi->add_subcommand("sofg", "The graph S(G)");
    add_structure(s);
    on(s, [&]() {
      Structure G = load();
      auto op = order_partition(G);
      rep.result = {{"s_of_g", serialize_structure(s_of_g(G))},
                    {"min", op.v_min}, {"max", op.v_max}, {"both", op.v_both}, {"none", op.v_none}};
    });
    auto* ns = semi->add_subcommand("novisad", "Novi Sad property");
    add_structure(ns);
    on(ns, [&]() {
      auto r = novi_sad(load());
      rep.result = {{"holds", r.has_value()}};
      if (r) rep.result.update({{"p", r->p}, {"q", r->q}, {"p_prime", r->p_prime}, {"q_prime", r->q_prime}});
    });
    auto* h = semi->add_subcommand("hubie", "Hubie polymorphism construction");
    add_structure(h);
    on(h, [&]() {
      auto r = semicomplete_hubie(load());
      rep.result = {{"found", r.has_value()}};
      if (r) {
        rep.result.update({{"construction", r->construction}, {"hubie_elements", r->hubie_elements},
                           {"table", op_to_json(r->table)}});
        for (int e : r->hubie_elements)
          rep.certificates.push_back(
              {{"kind", "hubie"}, {"structure", ref()}, {"table", op_to_json(r->table)}, {"source", e}});
      }
    });
    auto* v = semi->add_subcommand("verdict", "PGP or EGP");
    add_structure(v);
    on(v, [&]() { rep.result = {{"gap", semicomplete_verdict(load())}}; });
    auto* w = semi->add_subcommand("egp-witness", "Exponential generation witness");
    add_structure(w);
    w->add_option("--m", m);
    on(w, [&]() {
      auto e = semicomplete_egp_witness(load(), m);
      rep.result = {{"tau", e.tau}, {"relation", e.relation}, {"sentence", e.sentence.to_string()},
                    {"falsifier", e.falsifier}, {"smooth_part", e.smooth_part}};
      rep.certificates.push_back({{"kind", "egp_witness"},
                                  {"expanded", serialize_structure(e.expanded)},
                                  {"sentence", e.sentence.to_string()},
                                  {"falsifier", e.falsifier},
                                  {"checked", e.checked}});
    });
  }

  // poly
  auto* poly = app.add_subcommand("poly", "Polymorphisms");
  poly->require_subcommand(1);
  {
    auto* c = poly->add_subcommand("check", "Is the table a polymorphism");
    add_structure(c);
    c->add_option("table", table_arg, "Operation table file")->required();
    on(c, [&]() {
      Structure A = load();
      OpTable f = parse_op_table(read_text(table_arg));
      auto viol = polymorphism_violation(f, A);
      rep.result = {{"polymorphism", !viol.has_value()}, {"tags", classify_operation(f)}};
      if (viol) rep.result["violation"] = *viol;
      else rep.certificates.push_back({{"kind", "polymorphism"}, {"structure", ref()}, {"table", op_to_json(f)}});
    });
    auto* e = poly->add_subcommand("enumerate", "Enumerate polymorphisms");
    add_structure(e);
    e->add_option("--arity", k);
    e->add_option("--filter", filter, "majority, maltsev, dual_discriminator, idempotent, ...");
    e->add_option("--limit", limit);
    on(e, [&]() {
      auto r = enumerate_polymorphisms(load(), k, filter, limit, g.budget());
      json ts = json::array();
      for (const auto& f : r.tables) {
        ts.push_back(op_to_json(f));
        json cert{{"kind", "polymorphism"}, {"structure", ref()}, {"table", op_to_json(f)}};
        if (!filter.empty()) cert["tags"] = json::array({filter});
        rep.certificates.push_back(cert);
      }
      rep.result = {{"count", r.tables.size()}, {"truncated", r.truncated}, {"tables", ts}};
    });
    auto* h = poly->add_subcommand("find-hubie", "Search a Hubie polymorphism");
    add_structure(h);
    h->add_option("--source", x);
    h->add_option("--arity", k);
    on(h, [&]() {
      auto f = find_hubie_polymorphism(load(), x, k, g.budget());
      rep.result = {{"found", f.has_value()}, {"complete", true}};
      if (f) {
        rep.result["table"] = op_to_json(*f);
        rep.certificates.push_back({{"kind", "hubie"}, {"structure", ref()}, {"table", op_to_json(*f)}, {"source", x}});
      }
    });
    auto* cl = poly->add_subcommand("classify", "Identities satisfied by a table");
    cl->add_option("table", table_arg)->required();
    on(cl, [&]() { rep.result = {{"tags", classify_operation(parse_op_table(read_text(table_arg)))}}; });
  }

  // power
  auto* power_cmd = app.add_subcommand("power", "Subpowers");
  power_cmd->require_subcommand(1);
  {
    auto* mb = power_cmd->add_subcommand("member", "Subpower membership");
    add_structure(mb);
    mb->add_option("--gens", gens_arg, "Generators, e.g. 1,1;1,2")->required();
    mb->add_option("--target", target_arg)->required();
    on(mb, [&]() {
      Structure A = load();
      auto S = parse_tuples(gens_arg);
      Tuple t = parse_tuple(target_arg);
      auto r = subpower_membership(A, S, t, g.budget());
      rep.result = {{"answer", to_string(r.answer)}, {"note", r.note}};
      if (r.certificate)
        rep.certificates.push_back({{"kind", "membership"}, {"structure", ref()}, {"generators", r.certificate->generators},
                                    {"target", r.certificate->target}, {"table", op_to_json(r.certificate->f)}});
      if (r.answer == Answer::No)
        rep.certificates.push_back({{"kind", "non_membership"}, {"structure", ref()}, {"generators", S}, {"target", t}});
    });
    auto* ge = power_cmd->add_subcommand("generates", "Does S generate A^m");
    add_structure(ge);
    ge->add_option("--gens", gens_arg)->required();
    ge->add_option("--m", m);
    on(ge, [&]() {
      auto S = parse_tuples(gens_arg);
      auto r = generates_full_power(load(), S, m, g.budget());
      rep.result = {{"answer", to_string(r.answer)}, {"note", r.note}};
      if (r.counterexample) {
        rep.result["counterexample"] = *r.counterexample;
        rep.certificates.push_back(
            {{"kind", "non_membership"}, {"structure", ref()}, {"generators", S}, {"target", *r.counterexample}});
      }
    });
    auto* mg = power_cmd->add_subcommand("min-gen", "Smallest generating set of A^m");
    add_structure(mg);
    mg->add_option("--m", m);
    mg->add_option("--max-size", max_size);
    on(mg, [&]() {
      auto r = min_generating_size(load(), m, max_size, 200000, g.budget());
      rep.result = {{"size", r.size ? json(*r.size) : json(nullptr)},
                    {"witness", r.witness},
                    {"subsets_checked", r.subsets_checked},
                    {"note", r.note}};
    });
  }

  // adv
  auto* adv = app.add_subcommand("adv", "Adversaries");
  adv->require_subcommand(1);
  {
    auto* mk = adv->add_subcommand("make", "Emit a family member");
    add_family(mk);
    mk->add_option("--n", n_arg)->required();
    on(mk, [&]() {
      auto fam = family_of();
      auto s = fam.emit(n_arg, m);
      rep.result = adversaries_json(s);
      rep.result.update({{"family", to_string(fam.kind)}, {"width_bound", fam.width_bound},
                         {"degenerate", is_degenerate(s)}});
    });
    auto* pj = adv->add_subcommand("projective", "m-projectivity check");
    add_family(pj);
    pj->add_option("--n", n_arg)->required();
    on(pj, [&]() {
      auto r = check_projectivity(family_of(), n_arg, m);
      rep.result = {{"projective", r.projective}};
      if (r.failing) rep.result["failing"] = r.failing->tuples;
    });
    auto* c2 = adv->add_subcommand("canonical-pi2", "Canonical Pi2 sentence");
    add_structure(c2);
    add_family(c2);
    on(c2, [&]() {
      Structure A = load();
      auto s = family_of().emit(A.n, m);
      auto phi = canonical_pi2(s, A, g.budget());
      rep.result = {{"universals", phi.num_universals()}, {"existentials", phi.num_existentials()},
                    {"atoms", phi.atoms.size()}, {"sentence", phi.to_string()}};
    });
    auto* cu = adv->add_subcommand("canonical-unbounded", "Canonical sentence over consistent maps");
    add_structure(cu);
    add_family(cu);
    on(cu, [&]() {
      Structure A = load();
      auto s = family_of().emit(A.n, m);
      rep.result = {{"factors", unbounded_factor_count(s, A.n)}};
      auto phi = canonical_unbounded(A.n, s, A, g.budget());
      rep.result.update({{"universals", phi.num_universals()}, {"existentials", phi.num_existentials()},
                         {"sentence", phi.to_string()}});
    });
  }

  // collapse
  auto* col = app.add_subcommand("collapse", "Collapsibility");
  col->require_subcommand(1);
  {
    auto* d = col->add_subcommand("decide", "Singleton-source p-collapsibility");
    add_structure(d);
    d->add_option("--source", x);
    d->add_option("--p", p);
    d->add_option("--m-budget", m_budget);
    d->add_option("--arity-budget", arity_budget);
    on(d, [&]() {
      Structure A = load();
      CollapseBudgets b{arity_budget, m_budget, g.budget()};
      auto v = decide_collapsible_singleton(A, x, p, b);
      rep.result = {{"answer", to_string(v.answer)}, {"method", v.method}, {"note", v.note}};
      if (v.answer == Answer::No && v.method == "generation") rep.result.update({{"m", v.m}, {"t", v.counterexample}});
      json c = verdict_cert(ref(), v, x, p, A.n);
      if (!c.is_null()) rep.certificates.push_back(c);
    });
    auto* z = col->add_subcommand("zero", "0-collapsibility via simple A-shes");
    add_structure(z);
    z->add_option("--source", source_opt);
    on(z, [&]() {
      auto s = decide_zero_collapsible(load(), source_opt);
      rep.result = {{"collapsible", s.has_value()}};
      if (s) {
        rep.result.update({{"source", s->source}, {"images", s->images}});
        rep.certificates.push_back({{"kind", "shop"}, {"structure", ref()}, {"images", s->images}});
      }
    });
    auto* pr = col->add_subcommand("probe", "Compare full and restricted truth on sampled sentences");
    add_structure(pr);
    pr->add_option("--p", p);
    pr->add_option("--B", sources_arg);
    pr->add_option("--samples", samples);
    pr->add_option("--max-universals", max_u);
    pr->add_option("--max-existentials", max_e);
    pr->add_option("--max-atoms", max_atoms);
    on(pr, [&]() {
      Structure A = load();
      std::mt19937_64 rng(g.seed);
      std::vector<PHSentence> sample;
      bool with_c = !A.constants.empty();
      for (int i = 0; i < samples; ++i)
        sample.push_back(random_sentence(rng, A.signature(), max_u, max_e, max_atoms, with_c, A.n));
      auto r = probe_collapsibility_logical(A, p, sources(), sample, g.budget());
      json ds = json::array();
      for (const auto& dsc : r.discrepancies)
        ds.push_back({{"sentence", sample[dsc.index].to_string()}, {"full", dsc.full}, {"restricted", dsc.restricted}});
      rep.result = {{"sentences", r.sentences}, {"agreements", r.agreements}, {"discrepancies", ds}, {"seed", g.seed}};
    });
    auto* rb = col->add_subcommand("rainbow", "Rainbow lift");
    add_structure(rb);
    rb->add_option("--C", sources_arg, "Elements, comma separated")->required();
    on(rb, [&]() {
      auto [L, e] = rainbow_lift(load(), sources());
      rep.result = {{"domain", L.n}, {"element", e}, {"tuple", L.element_tuple(e)}};
    });
  }

  // qcsp
  auto* q = app.add_subcommand("qcsp", "Quantified constraint satisfaction");
  q->require_subcommand(1);
  {
    auto add_sentence = [&](CLI::App* sub) {
      sub->add_option("--sentence", sentence_arg, "Sentence text");
      sub->add_option("--sentence-file", sentence_file, "Sentence file");
    };
    auto* s = q->add_subcommand("solve", "Full game semantics");
    add_structure(s);
    add_sentence(s);
    on(s, [&]() {
      Structure A = load();
      rep.result = {{"holds", solve_qcsp(A, sentence(A), g.budget())}};
    });
    auto* r = q->add_subcommand("restricted", "Truth against an adversary family");
    add_structure(r);
    add_sentence(r);
    add_family(r);
    on(r, [&]() {
      Structure A = load();
      auto phi = sentence(A);
      auto s2 = family_of().emit(A.n, phi.num_universals());
      rep.result = {{"holds", models_restricted(A, phi, s2, g.budget())}, {"width", s2.width()}};
    });
    auto* rd = q->add_subcommand("reduce", "QCSP to CSP reduction");
    add_structure(rd);
    add_sentence(rd);
    add_family(rd);
    on(rd, [&]() {
      Structure A = load();
      auto phi = sentence(A);
      auto s2 = family_of().emit(A.n, phi.num_universals());
      auto red = qcsp_to_csp(A, phi, s2);
      rep.result = {{"instances", red.instances.size()}, {"merges", red.merges.size()},
                    {"satisfiable", reduct_satisfiable(A, red, g.budget())}, {"csp", red.serialize(A)}};
    });
  }

  auto* vr = app.add_subcommand("verify-report", "Re-verify the certificates of a JSON report");
  vr->add_option("report", report_path)->required();
  on(vr, [&]() {
    json in;
    try {
      in = json::parse(read_text(report_path));
    } catch (const json::parse_error& e) {
      throw Error("schema_mismatch", e.what());
    }
    auto r = verify_report(in, g.budget());
    rep.result = {{"valid", r.valid}, {"checked", r.checked}, {"failures", r.failures}};
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  std::vector<std::string> echo(argv + 1, argv + argc);
  auto start = std::chrono::steady_clock::now();
  int code = 0;
  json out;
  try {
    action();
  } catch (const BudgetExceeded& e) {
    code = 2;
    out["error"] = {{"code", e.code()}, {"message", e.what()}};
  } catch (const Error& e) {
    code = 1;
    out["error"] = {{"code", e.code()}, {"message", e.what()}};
  } catch (const json::exception& e) {
    code = 1;
    out["error"] = {{"code", "schema_mismatch"}, {"message", e.what()}};
  }
  auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  out["tool"] = "qca";
  out["version"] = kVersion;
  out["command"] = echo;
  out["budget"] = {{"max_elements", g.budget_elements}, {"max_nodes", g.budget_nodes}};
  out["inputs"] = rep.inputs;
  if (code == 0) {
    out["result"] = rep.result;
    out["certificates"] = rep.certificates;
  }
  out["timing_ms"] = std::round(ms * 1000) / 1000;

  if (g.json_out) {
    std::cout << out.dump(2) << "\n";
  } else if (code != 0) {
    std::cerr << "error [" << out["error"]["code"].get<std::string>() << "]: " << out["error"]["message"].get<std::string>()
              << "\n";
  } else {
    print_human(out["result"], "", std::cout);
    if (!rep.certificates.empty()) std::cout << "certificates: " << rep.certificates.size() << "\n";
  }
  return code;
}
