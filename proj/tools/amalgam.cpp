// amalgam: command-line front end. Exit codes: 0 ok, 1 domain error, 2 usage error.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "amalgam/classify.hpp"
#include "amalgam/coxeter.hpp"
#include "amalgam/diagram.hpp"
#include "amalgam/enumerate.hpp"
#include "amalgam/error.hpp"
#include "amalgam/growth.hpp"
#include "amalgam/presentation.hpp"
#include "json.hpp"

namespace {

using namespace amalgam;
using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  bool json = false;
  std::string input;
  std::string output;
  std::string flavor = "ct";
  std::optional<long long> q;
  std::string strategy = "table";
  std::string method = "hlt";
  std::string subgroup = "trivial";
  std::vector<std::string> relators;
  std::string relator_file;
  std::string csv;
  std::string theta;
  std::optional<std::size_t> max_cosets;
  std::optional<std::size_t> class_index;
  std::size_t radius = 10;
  bool cover = false;
  bool simplify = false;
  bool emit = false;
  std::string format = "neutral";
};

// Current file, so parse errors can name it.
std::string g_current_file;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  g_current_file = path;
  return out.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw DomainError("cannot write " + path);
}

std::string extension(const std::string& path) { return std::filesystem::path(path).extension().string(); }

oracle::Flavor parse_flavor(const std::string& s) {
  if (s == "ct" || s == "CT") return oracle::Flavor::CurtisTits;
  if (s == "phan" || s == "Phan") return oracle::Flavor::Phan;
  throw UsageError("unknown flavor '" + s + "' (expected ct or phan)");
}

long long require_q(const Options& o) {
  if (!o.q) throw UsageError("--q is required");
  return *o.q;
}

std::string vertex_list(const diagram::Diagram& d, const std::vector<std::size_t>& vs, const char* sep = " ") {
  std::string out;
  for (std::size_t k = 0; k < vs.size(); ++k) out += (k ? sep : "") + d.id(vs[k]);
  return out;
}

std::string edge_name(const diagram::Diagram& d, const diagram::ExcessEdge& e) { return d.id(e.i) + "-" + d.id(e.j); }

std::string decimal(const mpq_class& x) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(9) << x.get_d();
  return out.str();
}

std::string yes(bool b) { return b ? "true" : "false"; }

/// A .desc file, or a diagram with --flavor/--q and trivial delta.
classify::AmalgamDescriptor load_descriptor(const Options& o) {
  const std::string text = read_file(o.input);
  if (extension(o.input) == ".desc") return classify::parse_descriptor(text);
  return classify::make_descriptor(parse_flavor(o.flavor), require_q(o), diagram::parse_diagram(text));
}

presentation::Presentation load_presentation(const Options& o) {
  presentation::Presentation p;
  if (extension(o.input) == ".pres") {
    p = presentation::parse_neutral(read_file(o.input));
  } else {
    p = presentation::amalgam_presentation(load_descriptor(o), presentation::parse_strategy(o.strategy));
  }
  std::string extra;
  for (const auto& r : o.relators) extra += r + "\n";
  if (!o.relator_file.empty()) extra += read_file(o.relator_file);
  if (!extra.empty()) {
    g_current_file = "relators";
    p = presentation::add_relators(p, extra);
  }
  if (o.simplify) p = presentation::simplify(p);
  return p;
}

struct Report {
  std::ostringstream text;
  Json json = Json::object();
};

int cmd_check(const Options& o, Report& r) {
  const auto d = diagram::parse_diagram(read_file(o.input));
  const auto sub = diagram::classify_subdiagrams(d, static_cast<int>(o.q.value_or(2)));
  const bool connected = d.connected();
  r.json["name"] = d.name();
  r.json["vertices"] = d.size();
  r.json["edges"] = d.edges().size();
  r.json["connected"] = connected;
  r.json["three_spherical"] = sub.three_spherical;
  Json triples = Json::array();
  for (const auto& t : sub.offending_triples) triples.push_back(vertex_list(d, t));
  r.json["offending_triples"] = triples;
  r.json["has_C2_2"] = sub.has_C2_2;
  r.text << "name: " << d.name() << "\n"
         << "vertices: " << d.size() << "\n"
         << "edges: " << d.edges().size() << "\n"
         << "connected: " << yes(connected) << "\n"
         << "3-spherical: " << yes(sub.three_spherical) << "\n";
  for (const auto& t : sub.offending_triples) r.text << "  infinite triple: " << vertex_list(d, t) << "\n";
  r.text << "C2(2) subdiagram: " << yes(sub.has_C2_2) << "\n";
  if (connected) {
    const auto span = diagram::spanning_tree_and_loops(d);
    const auto tree = classify::tree_condition_violations(d, span);
    Json loops = Json::array();
    r.text << "excess edges: " << span.r << "\n";
    for (std::size_t s = 0; s < span.r; ++s) {
      r.text << "  " << edge_name(d, span.excess[s]) << " loop " << vertex_list(d, span.loops[s]) << "\n";
      loops.push_back({{"edge", edge_name(d, span.excess[s])}, {"loop", vertex_list(d, span.loops[s])}});
    }
    r.json["excess"] = loops;
    r.json["tree_conditions"] = tree.empty();
    r.text << "tree conditions: " << (tree.empty() ? "ok" : "violated") << "\n";
    for (const auto& v : tree) r.text << "  " << v << "\n";
  }
  return 0;
}

std::string delta_text(const classify::AmalgamDescriptor& a) {
  if (a.delta.empty()) return "(no excess edges)";
  std::string out;
  for (std::size_t s = 0; s < a.delta.size(); ++s) {
    out += (s ? " " : "") + edge_name(a.diagram, a.span.excess[s]) + "=" + classify::to_string(a.delta[s]);
  }
  return out;
}

int cmd_classify(const Options& o, Report& r) {
  const auto d = diagram::parse_diagram(read_file(o.input));
  const auto flavor = parse_flavor(o.flavor);
  const auto classes = classify::enumerate_delta_classes(d, flavor, require_q(o));
  const bool ct = flavor == oracle::Flavor::CurtisTits;
  std::size_t orientable = 0;
  Json list = Json::array();
  std::ostringstream lines;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    Json entry;
    entry["delta"] = delta_text(classes[k]);
    lines << "class " << k + 1 << ": " << delta_text(classes[k]);
    if (ct) {
      const bool ok = classify::orientability(classes[k]).orientable;
      orientable += ok ? 1 : 0;
      entry["orientable"] = ok;
      lines << (ok ? " orientable" : " non-orientable");
    }
    lines << "\n";
    list.push_back(entry);
  }
  r.json["flavor"] = oracle::to_string(flavor);
  r.json["q"] = require_q(o);
  r.json["classes"] = classes.size();
  if (ct) {
    r.json["orientable"] = orientable;
    r.json["non_orientable"] = classes.size() - orientable;
  }
  r.json["deltas"] = list;
  r.text << classes.size() << (classes.size() == 1 ? " class" : " classes");
  if (ct) r.text << ": " << orientable << " orientable, " << classes.size() - orientable << " non-orientable";
  r.text << "\n" << lines.str();
  return 0;
}

int cmd_cover(const Options& o, Report& r) {
  classify::AmalgamDescriptor a;
  if (extension(o.input) == ".desc") {
    a = classify::parse_descriptor(read_file(o.input));
  } else {
    const auto d = diagram::parse_diagram(read_file(o.input));
    const auto classes = classify::enumerate_delta_classes(d, oracle::Flavor::CurtisTits, require_q(o));
    std::size_t pick = 0;
    if (o.class_index) {
      if (*o.class_index < 1 || *o.class_index > classes.size()) {
        throw DomainError("class " + std::to_string(*o.class_index) + " out of range 1.." + std::to_string(classes.size()));
      }
      pick = *o.class_index - 1;
    } else {
      for (std::size_t k = 0; k < classes.size(); ++k) {
        if (!classify::orientability(classes[k]).orientable) {
          pick = k;
          break;
        }
      }
    }
    a = classes.at(pick);
  }
  const auto orient = classify::orientability(a);
  const auto c = orient.orientable ? diagram::trivial_double_cover(a.diagram) : diagram::double_cover(a.diagram, orient.omega_star);
  const std::string problem = diagram::check_cover(c);
  if (!problem.empty()) throw DomainError("cover check failed: " + problem);
  bool fixed_point_free = true;
  for (std::size_t v = 0; v < c.deck.size(); ++v) fixed_point_free = fixed_point_free && c.deck[v] != v;
  const auto lifted = classify::lift_to_cover(a, c);
  const bool lift_orientable = classify::orientability(lifted).orientable;

  r.text << "delta: " << delta_text(a) << "\n"
         << "base: " << a.diagram.size() << " vertices, " << a.diagram.edges().size() << " edges\n"
         << "cover: " << c.cover.size() << " vertices, " << c.cover.edges().size() << " edges"
         << (orient.orientable ? " (two disjoint copies)" : "") << "\n"
         << "deck: " << (fixed_point_free ? "fixed-point-free" : "has fixed points") << "\n";
  Json loops = Json::array();
  for (std::size_t s = 0; s < a.span.r; ++s) {
    const auto& loop = a.span.loops[s];
    const auto fiber = diagram::loop_fiber_type(c, loop, diagram::omega_of_loop(c, loop));
    Json cycles = Json::array();
    r.text << "loop " << s + 1 << " (" << vertex_list(a.diagram, loop) << "): " << diagram::to_string(fiber.type);
    for (const auto& cyc : fiber.cycles) {
      r.text << " [" << vertex_list(c.cover, cyc) << "]";
      cycles.push_back(vertex_list(c.cover, cyc));
    }
    r.text << "\n";
    loops.push_back({{"loop", vertex_list(a.diagram, loop)}, {"fiber", diagram::to_string(fiber.type)}, {"cycles", cycles}});
  }
  r.text << "lift: " << (lift_orientable ? "orientable" : "non-orientable") << "\n";
  r.json["delta"] = delta_text(a);
  r.json["base_vertices"] = a.diagram.size();
  r.json["base_edges"] = a.diagram.edges().size();
  r.json["connected_cover"] = !orient.orientable;
  r.json["cover_vertices"] = c.cover.size();
  r.json["cover_edges"] = c.cover.edges().size();
  r.json["deck_fixed_point_free"] = fixed_point_free;
  r.json["loops"] = loops;
  r.json["lift_orientable"] = lift_orientable;
  if (o.emit) {
    const std::string desc = classify::emit_descriptor(lifted);
    r.text << "\n" << desc;
    r.json["lifted"] = desc;
  }
  return 0;
}

int cmd_growth(const Options& o, Report& r) {
  const auto d = diagram::parse_diagram(read_file(o.input), diagram::LabelPolicy::general);
  const auto g = growth::growth_series(d);
  const auto coeffs = growth::series_coefficients(g, o.radius);
  const auto rate = growth::growth_rate(g);
  Json cs = Json::array();
  r.text << "series: " << growth::to_string(g) << "\ncoefficients:";
  for (const auto& c : coeffs) {
    r.text << " " << c.get_str();
    cs.push_back(c.get_str());
  }
  r.text << "\n";
  r.json["numerator"] = growth::to_string(g.numerator);
  r.json["denominator"] = growth::to_string(g.denominator);
  r.json["coefficients"] = cs;
  r.json["finite_type"] = rate.finite_type;
  if (rate.finite_type) {
    r.text << "finite type: true\n";
  } else {
    r.text << "rho: " << rate.rho.to_string() << " ~ " << decimal(rate.rho.lo) << "\n"
           << "omega: " << rate.omega.to_string() << " ~ " << decimal(rate.omega.lo) << "\n";
    r.json["rho"] = {rate.rho.lo.get_str(), rate.rho.hi.get_str()};
    r.json["omega"] = {rate.omega.lo.get_str(), rate.omega.hi.get_str()};
  }
  return 0;
}

int cmd_lattice(const Options& o, Report& r) {
  const auto d = diagram::parse_diagram(read_file(o.input), diagram::LabelPolicy::general);
  const long long q = require_q(o);
  const auto rep = growth::lattice_check(d, q);
  r.text << "q=" << q << "\n"
         << "converges=" << yes(rep.series_converges_at_1_over_q) << "\n"
         << "boundary=" << yes(rep.boundary) << "\n"
         << "paper_bound=" << yes(rep.paper_bound_satisfied) << "\n";
  r.json["q"] = q;
  r.json["converges"] = rep.series_converges_at_1_over_q;
  r.json["boundary"] = rep.boundary;
  r.json["paper_bound"] = rep.paper_bound_satisfied;
  r.json["finite_type"] = rep.rate.finite_type;
  if (!rep.rate.finite_type) {
    r.text << "omega=" << rep.rate.omega.to_string() << " ~ " << decimal(rep.rate.omega.lo) << "\n";
    r.json["omega"] = {rep.rate.omega.lo.get_str(), rep.rate.omega.hi.get_str()};
  }
  return 0;
}

int cmd_twisted(const Options& o, Report& r) {
  auto d = diagram::parse_diagram(read_file(o.input));
  coxeter::DiagramInvolution theta;
  if (o.cover) {
    if (!o.theta.empty()) throw UsageError("--theta and --cover are exclusive");
    const auto span = diagram::spanning_tree_and_loops(d);
    const auto c = diagram::double_cover(d, std::vector<int>(span.r, 1));
    d = c.cover;
    theta.assign(c.deck.begin(), c.deck.end());
  } else {
    if (o.theta.empty()) throw UsageError("twisted needs --theta or --cover");
    theta.assign(d.size(), -1);
    std::stringstream pairs(o.theta);
    std::string item;
    while (std::getline(pairs, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw UsageError("--theta expects id=id pairs");
      const std::size_t a = d.require_index(item.substr(0, eq));
      const std::size_t b = d.require_index(item.substr(eq + 1));
      theta[a] = static_cast<int>(b);
      theta[b] = static_cast<int>(a);
    }
    for (int t : theta) {
      if (t < 0) throw DomainError("--theta does not cover every vertex");
    }
  }
  const coxeter::CoxeterSystem sys(d);
  const auto rep = coxeter::twisted_involutions(sys, theta, o.radius);
  std::vector<std::size_t> by_length(o.radius + 1, 0);
  bool even = true;
  bool halves = true;
  for (const auto& u : rep.inv) {
    ++by_length[u.size()];
    even = even && u.size() % 2 == 0;
    const auto w = coxeter::twisted_decomposition(sys, theta, u);
    halves = halves && 2 * sys.length(w) == u.size();
  }
  Json counts = Json::array();
  r.text << "vertices: " << d.size() << "\nradius: " << o.radius << "\ncounts:";
  for (auto c : by_length) {
    r.text << " " << c;
    counts.push_back(c);
  }
  r.text << "\n"
         << "inv=" << rep.inv.size() << " delta=" << rep.delta_image.size() << "\n"
         << "equal=" << yes(rep.equal_up_to_R) << "\n"
         << "even_lengths=" << yes(even) << "\n"
         << "half_length_decomposition=" << yes(halves) << "\n";
  r.json["vertices"] = d.size();
  r.json["radius"] = o.radius;
  r.json["counts"] = counts;
  r.json["inv"] = rep.inv.size();
  r.json["delta"] = rep.delta_image.size();
  r.json["equal"] = rep.equal_up_to_R;
  r.json["even_lengths"] = even;
  r.json["half_length_decomposition"] = halves;
  return 0;
}

Json presentation_json(const presentation::Presentation& p) {
  Json gens = Json::array();
  for (const auto& g : p.generators) gens.push_back(g.name);
  Json rels = Json::array();
  for (const auto& w : p.relators) rels.push_back(presentation::word_to_string(p, w));
  return {{"source", p.source}, {"field", p.q}, {"strategy", p.strategy}, {"generators", gens}, {"relators", rels}};
}

void emit_text(const Options& o, Report& r, const std::string& text, const presentation::Presentation& p) {
  if (!o.output.empty()) {
    write_file(o.output, text);
    r.text << "wrote " << o.output << ": " << p.generators.size() << " generators, " << p.relators.size() << " relators\n";
    r.json = {{"output", o.output}, {"generators", p.generators.size()}, {"relators", p.relators.size()}};
  } else {
    r.text << text;
    r.json = presentation_json(p);
  }
}

int cmd_present(const Options& o, Report& r) {
  const auto p = load_presentation(o);
  if (o.format != "neutral" && o.format != "gap") throw UsageError("--format must be neutral or gap");
  emit_text(o, r, o.format == "gap" ? presentation::export_gap(p) : presentation::export_neutral(p), p);
  return 0;
}

int cmd_export_gap(const Options& o, Report& r) {
  const auto p = load_presentation(o);
  emit_text(o, r, presentation::export_gap(p), p);
  if (o.output.empty()) r.json["gap"] = presentation::export_gap(p);
  return 0;
}

int cmd_abelianize(const Options& o, Report& r) {
  const auto p = load_presentation(o);
  const auto ab = presentation::abelianization(p);
  r.text << "generators: " << p.generators.size() << "\nrelators: " << p.relators.size() << "\n"
         << "abelianization: " << ab.to_string() << "\n"
         << "trivial: " << yes(ab.trivial()) << "\n";
  Json factors = Json::array();
  for (const auto& f : ab.factors) factors.push_back(f.get_str());
  r.json["generators"] = p.generators.size();
  r.json["relators"] = p.relators.size();
  r.json["invariants"] = factors;
  r.json["trivial"] = ab.trivial();
  return 0;
}

int cmd_enumerate(const Options& o, Report& r) {
  const auto p = load_presentation(o);
  g_current_file = "--subgroup";
  const auto h = enumerate::parse_subgroup(p, o.subgroup);
  const std::size_t cap = o.max_cosets ? *o.max_cosets : enumerate::max_cosets_from_env();
  const auto method = enumerate::parse_strategy(o.method);
  const auto t = enumerate::todd_coxeter(p, h, cap, method);
  r.json["method"] = enumerate::to_string(method);
  r.json["max_cosets"] = cap;
  r.json["status"] = t.complete() ? "complete" : "overflow";
  r.json["index"] = t.index;
  r.json["log"] = enumerate::run_log(t);
  if (!t.complete()) {
    r.text << "log: " << enumerate::run_log(t) << "\n";
    throw DomainError("coset enumeration exceeded " + std::to_string(cap) + " cosets");
  }
  const bool verified = enumerate::verify_table(t, p);
  r.json["verified"] = verified;
  r.text << "index " << t.index << "\n"
         << "verified: " << yes(verified) << "\n"
         << "log: " << enumerate::run_log(t) << "\n";
  if (!o.csv.empty()) write_file(o.csv, enumerate::export_csv(t, p));
  return verified ? 0 : 1;
}

void add_input(CLI::App* sub, Options& o) { sub->add_option("input", o.input, "input file")->required(); }

void add_presentation_options(CLI::App* sub, Options& o) {
  add_input(sub, o);
  sub->add_option("--flavor", o.flavor, "ct or phan, for diagram inputs");
  sub->add_option("--q", o.q, "field size, for diagram inputs");
  sub->add_option("--strategy", o.strategy, "table or steinberg")->check(CLI::IsMember({"table", "steinberg"}));
  sub->add_option("--relator", o.relators, "extra relator, repeatable");
  sub->add_option("--relators", o.relator_file, "file of extra relators, one per line");
  sub->add_flag("--simplify", o.simplify, "Tietze pass on element generators");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curtis-Tits and Phan amalgams: diagrams, classification, growth and presentations"};
  app.require_subcommand(1);
  Options o;
  app.add_flag("--json", o.json, "machine-readable output");
  app.fallthrough();

  auto* check = app.add_subcommand("check", "diagram gates: 3-sphericity, C2(2), spanning tree");
  add_input(check, o);
  check->add_option("--q", o.q, "field size for the C2(2) gate");

  auto* classify = app.add_subcommand("classify", "delta classes and orientability");
  add_input(classify, o);
  classify->add_option("--flavor", o.flavor, "ct or phan")->check(CLI::IsMember({"ct", "phan", "CT", "Phan"}));
  classify->add_option("--q", o.q, "field size")->required();

  auto* cover = app.add_subcommand("cover", "double cover and lifted amalgam");
  add_input(cover, o);
  cover->add_option("--q", o.q, "field size, for diagram inputs");
  cover->add_option("--class", o.class_index, "1-based class of a diagram input (default: first non-orientable)");
  cover->add_flag("--emit", o.emit, "print the lifted descriptor");

  auto* growth = app.add_subcommand("growth", "growth series, coefficients and growth rate");
  add_input(growth, o);
  growth->add_option("--radius", o.radius, "number of coefficients minus one");

  auto* lattice = app.add_subcommand("lattice", "convergence of the series at 1/q");
  add_input(lattice, o);
  lattice->add_option("--q", o.q, "field size")->required();

  auto* twisted = app.add_subcommand("twisted", "twisted involutions versus the delta image");
  add_input(twisted, o);
  twisted->add_option("--theta", o.theta, "diagram involution as id=id pairs");
  twisted->add_flag("--cover", o.cover, "use the double cover of the diagram with its deck involution");
  twisted->add_option("--radius", o.radius, "length bound");

  auto* present = app.add_subcommand("present", "presentation of the universal completion");
  add_presentation_options(present, o);
  present->add_option("--format", o.format, "neutral or gap");
  present->add_option("-o,--output", o.output, "write to a file");

  auto* abelianize = app.add_subcommand("abelianize", "abelian invariants");
  add_presentation_options(abelianize, o);

  auto* enumerate = app.add_subcommand("enumerate", "Todd-Coxeter coset enumeration");
  add_presentation_options(enumerate, o);
  enumerate->add_option("--subgroup", o.subgroup, "'trivial' or words separated by commas");
  enumerate->add_option("--method", o.method, "hlt or felsch")->check(CLI::IsMember({"hlt", "felsch"}));
  enumerate->add_option("--max-cosets", o.max_cosets, "coset cap (default AMALGAM_MAX_COSETS or 5000000)");
  enumerate->add_option("--csv", o.csv, "write the coset table");

  auto* gap = app.add_subcommand("export-gap", "GAP input file");
  add_presentation_options(gap, o);
  gap->add_option("-o,--output", o.output, "write to a file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Report r;
  int code = 0;
  auto flush = [&] {
    if (o.json) {
      std::cout << r.json.dump(2) << "\n";
    } else {
      std::cout << r.text.str();
    }
  };
  try {
    const std::string name = app.get_subcommands().front()->get_name();
    if (name == "check") code = cmd_check(o, r);
    else if (name == "classify") code = cmd_classify(o, r);
    else if (name == "cover") code = cmd_cover(o, r);
    else if (name == "growth") code = cmd_growth(o, r);
    else if (name == "lattice") code = cmd_lattice(o, r);
    else if (name == "twisted") code = cmd_twisted(o, r);
    else if (name == "present") code = cmd_present(o, r);
    else if (name == "abelianize") code = cmd_abelianize(o, r);
    else if (name == "enumerate") code = cmd_enumerate(o, r);
    else if (name == "export-gap") code = cmd_export_gap(o, r);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << g_current_file << ": " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    if (o.json) {
      r.json["error"] = e.what();
      flush();
    } else {
      std::cout << r.text.str();
    }
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  flush();
  return code;
}
