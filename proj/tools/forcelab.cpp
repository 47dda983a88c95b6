// forcelab command line: validation, constructions, lemma sweeps and emission.
//
// Exit status: 0 everything held, 1 a validation failure or counterexample
// (certificate on stdout), 2 usage, input or parse error (stderr).

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "forcelab/dsl.hpp"
#include "forcelab/lab.hpp"
#include "json.hpp"

using namespace forcelab;
using nlohmann::ordered_json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  int max_elements = 4096;
  bool json = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

dsl::Document load(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return ends_with(path, ".json") ? dsl::parse_json(text) : dsl::parse(text);
  } catch (const dsl::ParseError& e) {
    throw UsageError(path + ":" + e.what());
  }
}

dsl::Resolved resolve(const dsl::Document& doc, const std::string& path, const Globals& g) {
  try {
    dsl::Resolved r = dsl::resolve(doc);
    for (const auto& [name, P] : r.posets)
      if (P->size() > g.max_elements)
        throw UsageError(path + ": poset '" + name + "' has " + std::to_string(P->size()) +
                         " elements, above --max-elements " + std::to_string(g.max_elements));
    return r;
  } catch (const dsl::ParseError& e) {
    throw UsageError(path + ":" + e.what());
  }
}

template <class Map>
const typename Map::mapped_type& lookup(const Map& m, const std::string& name, const char* kind) {
  auto it = m.find(name);
  if (it == m.end()) throw UsageError(std::string("no ") + kind + " named '" + name + "'");
  return it->second;
}

std::vector<std::string> labels(const Poset& P, const std::vector<int>& idx) {
  std::vector<std::string> out;
  for (int i : idx) out.push_back(i >= 0 && i < P.size() ? P.label(i) : std::to_string(i));
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : " ") + s;
  return out;
}

ordered_json failure_json(const ClauseFailure& f, const Poset& P) {
  ordered_json j{{"clause", f.clause}, {"witness", labels(P, f.witness)}};
  if (f.relation >= 0) j["relation"] = f.relation;
  if (f.level >= 0) j["level"] = f.level;
  if (!f.detail.empty()) j["detail"] = f.detail;
  return j;
}

std::string failure_text(const ClauseFailure& f, const Poset& P) {
  std::string s = f.clause;
  if (f.relation >= 0) s += " (E" + std::to_string(f.relation) + ")";
  if (f.level >= 0) s += " at level " + std::to_string(f.level);
  if (!f.witness.empty()) s += " witness: " + join(labels(P, f.witness));
  if (!f.detail.empty()) s += " [" + f.detail + "]";
  return s;
}

std::string atoms_text(AtomSet s, int atoms) {
  std::string out = "{";
  for (int a = 0; a < atoms; ++a)
    if (s >> a & 1) out += (out.size() > 1 ? "," : "") + std::to_string(a);
  return out + "}";
}

// ---------------------------------------------------------------- commands

int cmd_check(const std::vector<std::string>& files, const Globals& g) {
  bool ok = true;
  ordered_json all = ordered_json::array();
  for (const auto& path : files) {
    const dsl::Document doc = load(path);
    const dsl::Resolved r = resolve(doc, path, g);
    ordered_json entries = ordered_json::array();
    std::ostringstream text;
    for (const auto& decl : doc.declarations) {
      const std::string& name = dsl::name_of(decl);
      const std::string kind = dsl::kind_of(decl);
      ordered_json e{{"kind", kind}, {"name", name}};
      if (kind == "poset" || kind == "hechler" || kind == "amalgam") {
        const auto& P = r.posets.at(name);
        const int atoms = regular_open_completion(P).atom_count;
        e["elements"] = P->size();
        e["atoms"] = atoms;
        e["status"] = "ok";
        text << kind << " " << name << ": ok (" << P->size() << " elements, " << atoms << " atoms)\n";
        if (kind == "amalgam") {
          const bool ident = check_identification(r.amalgams.at(name));
          e["identification"] = ident;
          if (!ident) {
            e["status"] = "fail";
            ok = false;
            text << "amalgam " << name << ": FAIL identification\n";
          }
        }
      } else if (kind == "map") {
        const bool complete = is_complete_suborder_via_reductions(r.maps.at(name));
        e["status"] = "ok";
        e["complete_suborder"] = complete;
        text << "map " << name << ": ok (" << (complete ? "complete suborder" : "not a complete suborder") << ")\n";
      } else if (kind == "sweet") {
        const SweetModel& m = r.sweets.at(name);
        const SweetReport rep = validate_sweet(m);
        e["status"] = rep.holds() ? "ok" : "fail";
        ordered_json fails = ordered_json::array();
        for (const auto& f : rep.failures) fails.push_back(failure_json(f, *m.poset()));
        e["failures"] = fails;
        if (rep.holds()) {
          text << "sweet " << name << ": ok\n";
        } else {
          ok = false;
          for (const auto& f : rep.failures) text << "sweet " << name << ": FAIL " << failure_text(f, *m.poset()) << "\n";
        }
      } else if (kind == "tower") {
        const Tower& t = r.towers.at(name);
        const SweetReport rep = validate_tower(t);
        e["status"] = rep.holds() ? "ok" : "fail";
        e["levels"] = t.length();
        ordered_json fails = ordered_json::array();
        for (const auto& f : rep.failures) fails.push_back(failure_json(f, *t.top()));
        e["failures"] = fails;
        if (rep.holds()) {
          text << "tower " << name << ": ok (" << t.length() << " levels)\n";
        } else {
          ok = false;
          for (const auto& f : rep.failures) text << "tower " << name << ": FAIL " << f.clause << " level " << f.level
                                                   << (f.detail.empty() ? "" : " [" + f.detail + "]") << "\n";
        }
      }
      entries.push_back(std::move(e));
    }
    if (g.json)
      all.push_back({{"file", path}, {"declarations", entries}});
    else
      std::cout << "== " << path << "\n" << text.str();
  }
  if (g.json) std::cout << all.dump(2) << "\n";
  return ok ? 0 : 1;
}

int cmd_completion(const std::string& file, const std::string& name, const Globals& g) {
  const dsl::Resolved r = resolve(load(file), file, g);
  const PosetRef& P = lookup(r.posets, name, "poset");
  const CompleteAlgebra c = regular_open_completion(P);
  if (g.json) {
    ordered_json values = ordered_json::object();
    for (int p = 0; p < P->size(); ++p) {
      std::vector<int> atoms;
      for (int a = 0; a < c.atom_count; ++a)
        if (c.dense_map[p] >> a & 1) atoms.push_back(a);
      values[P->label(p)] = atoms;
    }
    std::cout << ordered_json{{"poset", name}, {"atoms", c.atom_count}, {"dense_map", values}}.dump(2) << "\n";
  } else {
    std::cout << "atoms: " << c.atom_count << "\n";
    for (int p = 0; p < P->size(); ++p) std::cout << P->label(p) << " -> " << atoms_text(c.dense_map[p], c.atom_count) << "\n";
  }
  return 0;
}

int cmd_amalgamate(const std::string& file, const std::string& name, const std::string& format, const Globals& g) {
  const dsl::Resolved r = resolve(load(file), file, g);
  const AmalgamInstance& inst = lookup(r.amalgams, name, "amalgam");
  const bool ident = check_identification(inst);
  const bool left = is_complete_suborder_via_reductions(inst.inj_left);
  const bool right = is_complete_suborder_via_reductions(inst.inj_right);
  if (format == "dot") {
    std::cout << dsl::emit_dot(*inst.amalgam, name);
  } else if (format == "json" || g.json) {
    dsl::Document d;
    d.declarations.push_back(dsl::poset_decl(*inst.amalgam, name));
    std::cout << ordered_json{{"amalgam", name},
                              {"elements", inst.amalgam->size()},
                              {"atoms", inst.completion.atom_count},
                              {"left_complete", left},
                              {"right_complete", right},
                              {"identification", ident},
                              {"poset", ordered_json::parse(dsl::emit_json(d))}}
                     .dump(2)
              << "\n";
  } else {
    dsl::Document d;
    d.declarations.push_back(dsl::poset_decl(*inst.amalgam, name));
    std::cout << "# " << inst.amalgam->size() << " conditions, " << inst.completion.atom_count
              << " atoms; injections complete: " << (left && right ? "yes" : "no")
              << "; identification: " << (ident ? "yes" : "no") << "\n"
              << dsl::emit_dsl(d);
  }
  return ident && left && right ? 0 : 1;
}

int cmd_sweet_validate(const std::string& file, const std::string& name, const std::string& extends,
                       const Globals& g) {
  const dsl::Document doc = load(file);
  const dsl::Resolved r = resolve(doc, file, g);
  const SweetModel& m = lookup(r.sweets, name, "sweetness model");
  SweetReport rep = validate_sweet(m);
  const Poset* witness_poset = m.poset().get();
  std::string what = "sweet " + name;
  std::vector<SweetModel> involved{m};
  if (!extends.empty()) {
    const SweetModel& m2 = lookup(r.sweets, extends, "sweetness model");
    involved.push_back(m2);
    try {
      rep = validate_extends(m, m2);
    } catch (const InputError& e) {
      throw UsageError(e.what());
    }
    witness_poset = m2.poset().get();
    what = name + " < " + extends;
  }
  if (g.json) {
    ordered_json fails = ordered_json::array();
    for (const auto& f : rep.failures) fails.push_back(failure_json(f, *witness_poset));
    std::cout << ordered_json{{"check", what}, {"checked", rep.checked}, {"holds", rep.holds()}, {"failures", fails}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << what << ": " << (rep.holds() ? "ok" : "FAIL") << "\n";
    for (const auto& f : rep.failures) std::cout << "  " << failure_text(f, *witness_poset) << "\n";
    if (!rep.holds()) std::cout << "# certificate\n" << lab::certificate(involved);
  }
  return rep.holds() ? 0 : 1;
}

std::vector<int> parse_indices(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError("bad index list '" + s + "'");
    }
  }
  return out;
}

int cmd_tower_leq(const std::string& file, const std::string& a, const std::string& b, const std::string& witness,
                  const Globals& g) {
  const dsl::Resolved r = resolve(load(file), file, g);
  const Tower& t1 = lookup(r.towers, a, "tower");
  const Tower& t2 = lookup(r.towers, b, "tower");
  const TowerLeqWitness c = witness.empty() ? TowerLeqWitness::all(t1.length()) : TowerLeqWitness{parse_indices(witness)};
  TowerLeqReport rep;
  try {
    rep = tower_leq(t1, t2, c);
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  auto witness_labels = [&](const ClauseFailure& f) {
    if (f.clause == "quotient-forcing" && f.witness.size() == 2)
      return std::vector<std::string>{t1.poset(f.level)->label(f.witness[0]), t1.top()->label(f.witness[1])};
    const Poset& P = f.level >= 0 ? *t2.poset(f.level) : *t2.top();
    return labels(P, f.witness);
  };
  if (g.json) {
    ordered_json fails = ordered_json::array();
    for (const auto& f : rep.report.failures) {
      ordered_json j{{"clause", f.clause}, {"level", f.level}, {"witness", witness_labels(f)}};
      if (!f.detail.empty()) j["detail"] = f.detail;
      fails.push_back(j);
    }
    std::cout << ordered_json{{"lhs", a},
                              {"rhs", b},
                              {"C", c.C},
                              {"holds", rep.holds()},
                              {"failures", fails},
                              {"reading_divergences", rep.divergences.size()}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << a << " <= " << b << ": " << (rep.holds() ? "ok" : "FAIL") << "\n";
    for (const auto& f : rep.report.failures)
      std::cout << "  " << f.clause << " at level " << f.level << " witness: " << join(witness_labels(f))
                << (f.detail.empty() ? "" : " [" + f.detail + "]") << "\n";
    if (!rep.divergences.empty()) std::cout << "  reading divergences: " << rep.divergences.size() << "\n";
  }
  return rep.holds() ? 0 : 1;
}

struct VerifyArgs {
  std::string lemma;
  std::string caps;
  std::optional<long long> budget;
  int jobs = 0;
  bool timing = false;
  bool serial = false;
  std::vector<std::string> fixtures;
};

int cap_value(const std::string& caps, int fallback) {
  if (caps.empty()) return fallback;
  const auto v = parse_indices(caps);
  if (v.size() != 1) throw UsageError("expected one cap, got '" + caps + "'");
  return v[0];
}

int cmd_verify(const VerifyArgs& a, const Globals& g, bool max_elements_given) {
  lab::RunOptions opt;
  opt.seed = g.seed;
  if (a.budget) {
    if (*a.budget <= 0) throw UsageError("--budget must be positive");
    opt.budget = std::chrono::milliseconds(*a.budget);
  }
  opt.jobs = a.jobs;
  opt.mode = a.serial ? lab::Mode::Serial : lab::Mode::Parallel;
  lab::Report rep;
  try {
    if (a.lemma == "bcd") {
      rep = lab::verify_bcd(cap_value(a.caps, 4), opt);
    } else if (a.lemma == "amalgam") {
      lab::AmalgamCaps caps;
      if (!a.caps.empty()) {
        const auto v = parse_indices(a.caps);
        if (v.size() != 2) throw UsageError("amalgam caps are BASE,FACTOR");
        caps = {v[0], v[1]};
      }
      rep = lab::verify_amalgam_claims(caps, opt);
    } else if (a.lemma == "embedding") {
      rep = lab::verify_embedding_criteria(cap_value(a.caps, max_elements_given ? g.max_elements : 5), opt);
    } else if (a.lemma == "sweet") {
      lab::SweetCorpus corpus;
      corpus.random_triples = cap_value(a.caps, 1000);
      for (const auto& f : a.fixtures) {
        const dsl::Document doc = load(f);
        lab::add_document(corpus, f, resolve(doc, f, g));
      }
      rep = lab::verify_sweet_laws(corpus, opt);
    } else {
      throw UsageError("unknown lemma '" + a.lemma + "' (bcd, amalgam, sweet, embedding)");
    }
  } catch (const InputError& e) {
    throw UsageError(e.what());
  }
  std::cout << rep.to_json(a.timing);
  if (rep.verdict() == "incomplete") std::cerr << "budget exhausted before the sweep completed\n";
  return rep.passed() ? 0 : 1;
}

int cmd_emit(const std::string& file, const std::string& format, const Globals& g) {
  const dsl::Document doc = load(file);
  if (format == "dsl") {
    std::cout << dsl::emit_dsl(doc);
  } else if (format == "json") {
    std::cout << dsl::emit_json(doc);
  } else {
    resolve(doc, file, g);
    try {
      std::cout << dsl::emit_dot(doc);
    } catch (const dsl::ParseError& e) {
      throw UsageError(file + ":" + e.what());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forcelab: finite forcing notions, completions, amalgams and sweetness models"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->default_val(0);
  auto* max_opt = app.add_option("--max-elements", g.max_elements, "Largest poset accepted (and embedding sweep cap)")
                      ->check(CLI::PositiveNumber);
  app.add_flag("--json", g.json, "Structured output");

  std::vector<std::string> files;
  auto* check = app.add_subcommand("check", "Validate every declaration of the given files");
  check->add_option("files", files, "DSL or JSON documents")->required()->check(CLI::ExistingFile);

  std::string file, name, other, format = "dsl", witness, extends;
  auto* completion = app.add_subcommand("completion", "Atoms of the regular-open completion of a poset");
  completion->add_option("file", file)->required()->check(CLI::ExistingFile);
  completion->add_option("poset", name)->required();

  auto* amalgamate = app.add_subcommand("amalgamate", "Build a declared amalgam and check its claims");
  amalgamate->add_option("file", file)->required()->check(CLI::ExistingFile);
  amalgamate->add_option("amalgam", name)->required();
  amalgamate->add_option("--format", format)->check(CLI::IsMember({"dsl", "json", "dot"}));

  auto* sweet = app.add_subcommand("sweet-validate", "Validate a sweetness model, or an extension with --extends");
  sweet->add_option("file", file)->required()->check(CLI::ExistingFile);
  sweet->add_option("model", name)->required();
  sweet->add_option("--extends", extends, "Check that this model extends into the named one");

  auto* leq = app.add_subcommand("tower-leq", "Decide T1 <= T2");
  leq->add_option("file", file)->required()->check(CLI::ExistingFile);
  leq->add_option("lhs", name)->required();
  leq->add_option("rhs", other)->required();
  leq->add_option("--witness", witness, "Comma-separated index set C (default: every level)");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run a lemma sweep and print its report");
  verify->add_option("lemma", va.lemma, "bcd | amalgam | sweet | embedding")->required();
  verify->add_option("--caps", va.caps,
                     "bcd: max atoms; amalgam: BASE,FACTOR; embedding: size cap; sweet: random triples");
  verify->add_option("--budget", va.budget, "Milliseconds (default FORCELAB_BUDGET_MS or 60000)");
  verify->add_option("--jobs", va.jobs, "Worker threads (0: all)")->check(CLI::NonNegativeNumber);
  verify->add_flag("--timing", va.timing, "Include elapsed_ms in the report");
  verify->add_flag("--serial", va.serial, "Use the serial reference sweep");
  verify->add_option("--fixtures", va.fixtures, "Documents whose models join the sweet corpus")
      ->check(CLI::ExistingFile);

  auto* emit = app.add_subcommand("emit", "Print a document as canonical DSL, JSON or DOT");
  emit->add_option("file", file)->required()->check(CLI::ExistingFile);
  emit->add_option("--format", format)->check(CLI::IsMember({"dsl", "json", "dot"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*check) return cmd_check(files, g);
    if (*completion) return cmd_completion(file, name, g);
    if (*amalgamate) return cmd_amalgamate(file, name, format, g);
    if (*sweet) return cmd_sweet_validate(file, name, extends, g);
    if (*leq) return cmd_tower_leq(file, name, other, witness, g);
    if (*verify) return cmd_verify(va, g, max_opt->count() > 0);
    if (*emit) return cmd_emit(file, format, g);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
