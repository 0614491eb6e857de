#include "amalgam/classify.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <sstream>

#include "amalgam/error.hpp"
#include "amalgam/field.hpp"

namespace amalgam::classify {

using diagram::Diagram;

namespace {

int mod(long long x, int m) {
  const long long r = x % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

bool power_of_two(int x) { return x > 0 && (x & (x - 1)) == 0; }

std::pair<int, int> split_prime_power(long long q) {
  const auto pf = oracle::prime_power(q);
  if (!pf) throw DomainError(std::to_string(q) + " is not a prime power");
  return *pf;
}

}  // namespace

CoefficientGroup coefficient_group(Flavor flavor, long long q, int e) {
  if (e < 1) throw DomainError("field degree e must be >= 1");
  const auto [p, f] = split_prime_power(q);
  CoefficientGroup g;
  g.flavor = flavor;
  g.q = q;
  g.p = p;
  g.f = f;
  g.e = e;
  if (flavor == Flavor::CurtisTits) {
    g.modulus = f * e;
    for (int t = 0; t < 2; ++t) {
      for (int k = 0; k < g.modulus; ++k) g.elements.push_back({k, t});
    }
  } else {
    g.modulus = 2 * f * e;
    for (int k = 0; k < g.modulus; ++k) g.elements.push_back({k, 0});
  }
  return g;
}

CoefficientElement compose(const CoefficientElement& a, const CoefficientElement& b, int modulus) {
  return {mod(static_cast<long long>(a.frobenius_exponent) + b.frobenius_exponent, modulus), a.tau_bit ^ b.tau_bit};
}

CoefficientElement inverse(const CoefficientElement& a, int modulus) {
  return {mod(-static_cast<long long>(a.frobenius_exponent), modulus), a.tau_bit};
}

std::string to_string(const CoefficientElement& c) {
  if (c.frobenius_exponent == 0 && c.tau_bit == 0) return "id";
  std::string s;
  if (c.frobenius_exponent != 0) s = "frob^" + std::to_string(c.frobenius_exponent);
  if (c.tau_bit) s += s.empty() ? "tau" : "*tau";
  return s;
}

int AmalgamDescriptor::modulus(std::size_t s) const {
  const auto [p, f] = split_prime_power(q);
  const int e = diagram.vertices().at(span.excess.at(s).i).field_degree;
  return flavor == Flavor::CurtisTits ? f * e : 2 * f * e;
}

std::vector<std::string> tree_condition_violations(const Diagram& d, const diagram::SpanningData& span) {
  std::vector<std::string> out;
  for (std::size_t s = 0; s < span.r; ++s) {
    const auto& x = span.excess[s];
    const std::string name = d.id(x.i) + "-" + d.id(x.j);
    if (d.label(x.i, x.j) != 3) out.push_back("excess edge " + name + " is not of type A2");
    const int ei = d.vertices()[x.i].field_degree;
    const int ej = d.vertices()[x.j].field_degree;
    if (ei != ej) {
      out.push_back("excess edge " + name + " joins field degrees " + std::to_string(ei) + " and " + std::to_string(ej));
      continue;
    }
    if (!power_of_two(ei)) out.push_back("excess edge " + name + ": e_s = " + std::to_string(ei) + " is not a power of 2");
    for (auto v : span.loops[s]) {
      const int ev = d.vertices()[v].field_degree;
      if (ev % ei != 0 || !power_of_two(ev / ei)) {
        out.push_back("loop of " + name + " passes vertex " + d.id(v) + " of degree " + std::to_string(ev));
      }
    }
  }
  return out;
}

void validate(const AmalgamDescriptor& a) {
  split_prime_power(a.q);
  if (!a.diagram.connected()) throw DomainError("diagram is disconnected");
  if (a.delta.size() != a.span.r) {
    throw DomainError("delta has " + std::to_string(a.delta.size()) + " entries, cycle rank is " +
                      std::to_string(a.span.r));
  }
  const auto report = diagram::classify_subdiagrams(a.diagram, static_cast<int>(std::min<long long>(a.q, 1 << 30)));
  if (!report.three_spherical) throw DomainError("diagram is not 3-spherical");
  if (a.flavor == Flavor::CurtisTits) {
    if (report.has_C2_2) throw DomainError("Curtis-Tits amalgams exclude C2(2) subdiagrams");
    const auto bad = tree_condition_violations(a.diagram, a.span);
    if (!bad.empty()) throw DomainError("tree condition violated: " + bad.front());
  } else {
    for (const auto& v : a.diagram.vertices()) {
      if (v.field_degree != 1) throw DomainError("Phan amalgams need field degree 1 at every vertex");
    }
  }
  for (std::size_t s = 0; s < a.delta.size(); ++s) {
    const auto& c = a.delta[s];
    if (c.tau_bit != 0 && c.tau_bit != 1) throw DomainError("tau bit must be 0 or 1");
    if (a.flavor == Flavor::Phan && c.tau_bit != 0) throw DomainError("Phan coefficients carry no tau");
    if (c.frobenius_exponent < 0 || c.frobenius_exponent >= a.modulus(s)) {
      throw DomainError("Frobenius exponent " + std::to_string(c.frobenius_exponent) + " not reduced modulo " +
                        std::to_string(a.modulus(s)));
    }
  }
}

AmalgamDescriptor make_descriptor(Flavor flavor, long long q, const Diagram& d, std::vector<CoefficientElement> delta) {
  AmalgamDescriptor a;
  a.flavor = flavor;
  a.q = q;
  a.diagram = d;
  a.span = diagram::spanning_tree_and_loops(d);
  a.delta = delta.empty() ? std::vector<CoefficientElement>(a.span.r) : std::move(delta);
  validate(a);
  return a;
}

std::vector<AmalgamDescriptor> enumerate_delta_classes(const Diagram& d, Flavor flavor, long long q) {
  const AmalgamDescriptor base = make_descriptor(flavor, q, d);
  std::vector<CoefficientGroup> groups;
  for (const auto& x : base.span.excess) groups.push_back(coefficient_group(flavor, q, d.vertices()[x.i].field_degree));
  std::vector<AmalgamDescriptor> out;
  std::vector<std::size_t> digit(groups.size(), 0);
  while (true) {
    AmalgamDescriptor a = base;
    for (std::size_t s = 0; s < groups.size(); ++s) a.delta[s] = groups[s].elements[digit[s]];
    out.push_back(std::move(a));
    // odometer, last excess edge fastest
    std::size_t s = groups.size();
    while (s > 0) {
      --s;
      if (++digit[s] < groups[s].order()) break;
      digit[s] = 0;
      if (s == 0) return out;
    }
    if (groups.empty()) return out;
  }
}

Orientability orientability(const AmalgamDescriptor& a) {
  if (a.flavor != Flavor::CurtisTits) throw DomainError("orientability is defined for Curtis-Tits descriptors only");
  Orientability o;
  for (const auto& c : a.delta) {
    o.omega_star.push_back(c.tau_bit);
    if (c.tau_bit) o.orientable = false;
  }
  return o;
}

AmalgamDescriptor phan_restriction(const AmalgamDescriptor& ct) {
  if (ct.flavor != Flavor::CurtisTits) throw DomainError("phan_restriction expects a Curtis-Tits descriptor");
  const auto [p, F] = split_prime_power(ct.q);
  if (F % 2 != 0) throw DomainError("base field F_" + std::to_string(ct.q) + " is not a square");
  long long q = 1;
  for (int k = 0; k < F / 2; ++k) q *= p;
  AmalgamDescriptor phan = ct;
  phan.flavor = Flavor::Phan;
  phan.q = q;
  for (std::size_t s = 0; s < ct.delta.size(); ++s) {
    const int m = ct.modulus(s);  // = 2 f e, sigma = m/2
    const auto& c = ct.delta[s];
    phan.delta[s] = {mod(c.frobenius_exponent + static_cast<long long>(c.tau_bit) * (m / 2), m), 0};
  }
  validate(phan);
  return phan;
}

std::vector<AmalgamDescriptor> phan_fiber(const AmalgamDescriptor& phan) {
  if (phan.flavor != Flavor::Phan) throw DomainError("phan_fiber expects a Phan descriptor");
  validate(phan);
  AmalgamDescriptor ct = phan;
  ct.flavor = Flavor::CurtisTits;
  ct.q = phan.q * phan.q;
  const std::size_t r = phan.delta.size();
  if (r >= 31) throw DomainError("fiber of size 2^" + std::to_string(r) + " is too large");
  std::vector<AmalgamDescriptor> out;
  for (std::size_t bits = 0; bits < (std::size_t{1} << r); ++bits) {
    AmalgamDescriptor a = ct;
    for (std::size_t s = 0; s < r; ++s) {
      const int t = static_cast<int>((bits >> (r - 1 - s)) & 1);
      const int m = phan.modulus(s);
      a.delta[s] = {mod(phan.delta[s].frobenius_exponent - static_cast<long long>(t) * (m / 2), m), t};
    }
    validate(a);
    out.push_back(std::move(a));
  }
  return out;
}

CoefficientElement holonomy(const AmalgamDescriptor& a, const diagram::Cycle& walk) {
  CoefficientElement h;
  if (walk.empty()) return h;
  // all excess edges of one descriptor share the modulus of their vertex
  // degree; composite exponents are reduced modulo the lcm, here the max
  int m = 1;
  for (std::size_t s = 0; s < a.span.r; ++s) m = std::max(m, a.modulus(s));
  for (std::size_t k = 0; k < walk.size(); ++k) {
    const auto u = walk[k];
    const auto v = walk[(k + 1) % walk.size()];
    if (!a.diagram.adjacent(u, v)) throw DomainError("walk uses a non-edge");
    for (std::size_t s = 0; s < a.span.r; ++s) {
      const auto& x = a.span.excess[s];
      if (x.i == u && x.j == v) h = compose(h, a.delta[s], m);
      if (x.j == u && x.i == v) h = compose(h, inverse(a.delta[s], m), m);
    }
  }
  return h;
}

AmalgamDescriptor lift_to_cover(const AmalgamDescriptor& a, const diagram::CoverData& c) {
  const auto o = orientability(a);
  if (o.orientable) throw DomainError("lift_to_cover expects a non-orientable descriptor");
  if (!(c.base == a.diagram) || c.omega_star != o.omega_star) {
    throw DomainError("cover does not match the descriptor's omega*");
  }
  AmalgamDescriptor lifted;
  lifted.flavor = Flavor::CurtisTits;
  lifted.q = a.q;
  lifted.diagram = c.cover;
  lifted.span = diagram::spanning_tree_and_loops(c.cover);
  for (const auto& loop : lifted.span.loops) {
    diagram::Cycle down;
    for (auto v : loop) down.push_back(c.projection[v]);
    CoefficientElement h = holonomy(a, down);
    if (h.tau_bit != 0) throw DomainError("internal: lifted loop carries tau");
    lifted.delta.push_back(h);
  }
  validate(lifted);
  return lifted;
}

// --- descriptor files -------------------------------------------------------------

AmalgamDescriptor parse_descriptor(std::string_view text) {
  std::optional<Flavor> flavor;
  std::optional<long long> q;
  struct DeltaLine {
    std::size_t line;
    std::string a, b;
    CoefficientElement c;
  };
  std::vector<DeltaLine> deltas;
  auto number = [](const diagram::Token& t, std::size_t offset, std::size_t line) {
    long long v = 0;
    const char* first = t.text.data() + offset;
    const char* last = t.text.data() + t.text.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || first == last) throw ParseError(line, t.column + offset, "expected an integer");
    return v;
  };
  const Diagram d = diagram::parse_diagram(
      text, diagram::LabelPolicy::crystallographic, [&](std::size_t line, const std::vector<diagram::Token>& tok) {
        const std::string& kw = tok[0].text;
        if (kw == "flavor") {
          if (tok.size() != 2) throw ParseError(line, tok[0].column, "expected 'flavor CT|Phan'");
          if (tok[1].text == "CT" || tok[1].text == "ct") {
            flavor = Flavor::CurtisTits;
          } else if (tok[1].text == "Phan" || tok[1].text == "phan") {
            flavor = Flavor::Phan;
          } else {
            throw ParseError(line, tok[1].column, "unknown flavor '" + tok[1].text + "'");
          }
          return true;
        }
        if (kw == "q") {
          if (tok.size() != 2) throw ParseError(line, tok[0].column, "expected 'q <int>'");
          q = number(tok[1], 0, line);
          return true;
        }
        if (kw == "delta") {
          if (tok.size() != 5) throw ParseError(line, tok[0].column, "expected 'delta <i> <j> frob=<int> tau=<0|1>'");
          if (tok[3].text.rfind("frob=", 0) != 0) throw ParseError(line, tok[3].column, "expected frob=<int>");
          if (tok[4].text.rfind("tau=", 0) != 0) throw ParseError(line, tok[4].column, "expected tau=<0|1>");
          const long long k = number(tok[3], 5, line);
          const long long t = number(tok[4], 4, line);
          if (t != 0 && t != 1) throw ParseError(line, tok[4].column + 4, "tau must be 0 or 1");
          deltas.push_back({line, tok[1].text, tok[2].text, {static_cast<int>(k), static_cast<int>(t)}});
          return true;
        }
        return false;
      });
  if (!flavor) throw DomainError("descriptor lacks a 'flavor' line");
  if (!q) throw DomainError("descriptor lacks a 'q' line");
  AmalgamDescriptor a;
  a.flavor = *flavor;
  a.q = *q;
  a.diagram = d;
  split_prime_power(a.q);
  a.span = diagram::spanning_tree_and_loops(d);
  a.delta.assign(a.span.r, CoefficientElement{});
  std::vector<char> seen(a.span.r, 0);
  for (const auto& dl : deltas) {
    const auto i = d.index_of(dl.a);
    const auto j = d.index_of(dl.b);
    if (!i || !j) throw ParseError(dl.line, 1, "delta names an unknown vertex");
    std::optional<std::size_t> slot;
    bool reversed = false;
    for (std::size_t s = 0; s < a.span.r; ++s) {
      if (a.span.excess[s].i == *i && a.span.excess[s].j == *j) slot = s;
      if (a.span.excess[s].i == *j && a.span.excess[s].j == *i) {
        slot = s;
        reversed = true;
      }
    }
    if (!slot) throw ParseError(dl.line, 1, "edge " + dl.a + "-" + dl.b + " is not an excess edge of the spanning tree");
    if (seen[*slot]) throw ParseError(dl.line, 1, "duplicate delta for edge " + dl.a + "-" + dl.b);
    seen[*slot] = 1;
    const int m = a.modulus(*slot);
    CoefficientElement c{mod(dl.c.frobenius_exponent, m), dl.c.tau_bit};
    a.delta[*slot] = reversed ? inverse(c, m) : c;
  }
  validate(a);
  return a;
}

std::string emit_descriptor(const AmalgamDescriptor& a) {
  std::ostringstream out;
  out << "flavor " << (a.flavor == Flavor::CurtisTits ? "CT" : "Phan") << '\n';
  out << "q " << a.q << '\n';
  out << diagram::emit_diagram(a.diagram);
  for (std::size_t s = 0; s < a.span.r; ++s) {
    const auto& x = a.span.excess[s];
    out << "delta " << a.diagram.id(x.i) << ' ' << a.diagram.id(x.j) << " frob=" << a.delta[s].frobenius_exponent
        << " tau=" << a.delta[s].tau_bit << '\n';
  }
  return out.str();
}

}  // namespace amalgam::classify
