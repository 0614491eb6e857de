#include "amalgam/diagram.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <deque>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "amalgam/error.hpp"

namespace amalgam::diagram {

namespace {

constexpr std::uint8_t kInfinityCode = 255;

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string label_text(int m) { return m == kInfinity ? "inf" : std::to_string(m); }

void check_label(int m, LabelPolicy policy) {
  if (policy == LabelPolicy::crystallographic) {
    if (m != 3 && m != 4 && m != 6) {
      throw DomainError("illegal edge label m=" + label_text(m) + " (allowed: 3, 4, 6)");
    }
  } else if (m != kInfinity && (m < 3 || m > 254)) {
    throw DomainError("illegal edge label m=" + label_text(m));
  }
}

}  // namespace

bool natural_less(std::string_view a, std::string_view b) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (is_digit(a[i]) && is_digit(b[j])) {
      std::size_t ie = i;
      std::size_t je = j;
      while (ie < a.size() && is_digit(a[ie])) ++ie;
      while (je < b.size() && is_digit(b[je])) ++je;
      // strip leading zeros, then compare by length and digits
      std::size_t is = i;
      std::size_t js = j;
      while (is + 1 < ie && a[is] == '0') ++is;
      while (js + 1 < je && b[js] == '0') ++js;
      const auto ra = a.substr(is, ie - is);
      const auto rb = b.substr(js, je - js);
      if (ra.size() != rb.size()) return ra.size() < rb.size();
      if (ra != rb) return ra < rb;
      if (ie - i != je - j) return ie - i < je - j;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return static_cast<unsigned char>(a[i]) < static_cast<unsigned char>(b[j]);
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

Diagram::Diagram(std::vector<Vertex> vertices, const std::vector<EdgeSpec>& edges, LabelPolicy policy,
                 std::string name)
    : policy_(policy), name_(std::move(name)) {
  std::unordered_set<std::string> known;
  for (const auto& v : vertices) known.insert(v.id);
  for (const auto& e : edges) {
    for (const auto* id : {&e.a, &e.b}) {
      if (known.insert(*id).second) vertices.push_back(Vertex{*id, 1});
    }
  }
  std::sort(vertices.begin(), vertices.end(),
            [](const Vertex& x, const Vertex& y) { return natural_less(x.id, y.id); });
  for (std::size_t i = 0; i < vertices.size(); ++i) {
    if (vertices[i].id.empty()) throw DomainError("empty vertex identifier");
    if (vertices[i].field_degree < 1) {
      throw DomainError("vertex " + vertices[i].id + ": field degree must be >= 1");
    }
    if (i > 0 && vertices[i].id == vertices[i - 1].id) {
      throw DomainError("duplicate vertex " + vertices[i].id);
    }
  }
  vertices_ = std::move(vertices);
  const std::size_t n = vertices_.size();
  labels_.assign(n * n, 2);
  for (std::size_t i = 0; i < n; ++i) labels_[i * n + i] = 1;
  adjacency_.assign(n, {});

  std::unordered_map<std::string_view, std::size_t> position;
  for (std::size_t i = 0; i < n; ++i) position.emplace(vertices_[i].id, i);
  for (const auto& es : edges) {
    const std::size_t a = position.at(es.a);
    const std::size_t b = position.at(es.b);
    if (a == b) throw DomainError("self-edge at vertex " + es.a);
    check_label(es.m, policy);
    if (es.tag == EdgeType::A2 && es.m != 3) {
      throw DomainError("edge " + es.a + "-" + es.b + ": type=A2 requires m=3");
    }
    if (es.tag == EdgeType::C2 && es.m != 4) {
      throw DomainError("edge " + es.a + "-" + es.b + ": type=C2 requires m=4");
    }
    const std::size_t u = std::min(a, b);
    const std::size_t v = std::max(a, b);
    if (labels_[u * n + v] != 2) throw DomainError("duplicate edge " + es.a + "-" + es.b);
    const auto code = static_cast<std::uint8_t>(es.m == kInfinity ? kInfinityCode : es.m);
    labels_[u * n + v] = code;
    labels_[v * n + u] = code;
    edges_.push_back(Edge{u, v, es.m, es.tag});
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& x, const Edge& y) { return std::tie(x.u, x.v) < std::tie(y.u, y.v); });
  for (const auto& e : edges_) {
    adjacency_[e.u].push_back(e.v);
    adjacency_[e.v].push_back(e.u);
  }
  for (auto& nb : adjacency_) std::sort(nb.begin(), nb.end());
}

std::optional<std::size_t> Diagram::index_of(std::string_view id) const {
  const auto it = std::lower_bound(vertices_.begin(), vertices_.end(), id,
                                   [](const Vertex& v, std::string_view x) { return natural_less(v.id, x); });
  if (it == vertices_.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - vertices_.begin());
}

std::size_t Diagram::require_index(std::string_view id) const {
  auto i = index_of(id);
  if (!i) throw DomainError("unknown vertex " + std::string(id));
  return *i;
}

int Diagram::label(std::size_t i, std::size_t j) const {
  const std::uint8_t code = labels_.at(i * size() + j);
  return code == kInfinityCode ? kInfinity : code;
}

bool Diagram::adjacent(std::size_t i, std::size_t j) const {
  return i != j && labels_.at(i * size() + j) != 2;
}

std::optional<std::size_t> Diagram::edge_index(std::size_t i, std::size_t j) const {
  const std::size_t u = std::min(i, j);
  const std::size_t v = std::max(i, j);
  const auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair{u, v},
                                   [](const Edge& e, const std::pair<std::size_t, std::size_t>& k) {
                                     return std::tie(e.u, e.v) < std::tie(k.first, k.second);
                                   });
  if (it == edges_.end() || it->u != u || it->v != v) return std::nullopt;
  return static_cast<std::size_t>(it - edges_.begin());
}

bool Diagram::connected() const {
  if (vertices_.empty()) return true;
  std::vector<char> seen(size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const auto v = stack.back();
    stack.pop_back();
    for (auto w : adjacency_[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == size();
}

// --- parsing ------------------------------------------------------------------

namespace {

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size() || line[i] == '#') break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])) && line[i] != '#') ++i;
    out.push_back(Token{std::string(line.substr(start, i - start)), start + 1});
  }
  return out;
}

int parse_int(std::string_view s, std::size_t line, std::size_t column, const char* what) {
  int value = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || s.empty()) {
    throw ParseError(line, column, std::string("expected integer for ") + what + ", got '" + std::string(s) + "'");
  }
  return value;
}

/// Splits "key=value"; returns false if the token is not of that shape.
bool key_value(const Token& t, std::string_view key, std::string_view& value) {
  const std::string_view s = t.text;
  if (s.size() <= key.size() + 1 || s.substr(0, key.size()) != key || s[key.size()] != '=') return false;
  value = s.substr(key.size() + 1);
  return true;
}

}  // namespace

Diagram parse_diagram(std::string_view text, LabelPolicy policy) { return parse_diagram(text, policy, nullptr); }

Diagram parse_diagram(std::string_view text, LabelPolicy policy, const ExtraDirective& extra) {
  std::vector<Vertex> vertices;
  std::vector<EdgeSpec> edges;
  std::string name;
  std::set<std::pair<std::string, std::string>> seen_edges;
  std::set<std::string> seen_vertices;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;

    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    const std::string& kw = tokens[0].text;

    if (kw == "v") {
      if (tokens.size() < 2 || tokens.size() > 3) {
        throw ParseError(line_no, tokens[0].column, "expected 'v <id> [e=<int>]'");
      }
      Vertex v{tokens[1].text, 1};
      if (tokens.size() == 3) {
        std::string_view value;
        if (!key_value(tokens[2], "e", value)) throw ParseError(line_no, tokens[2].column, "expected e=<int>");
        v.field_degree = parse_int(value, line_no, tokens[2].column + 2, "field degree");
        if (v.field_degree < 1) throw ParseError(line_no, tokens[2].column + 2, "field degree must be >= 1");
      }
      if (!seen_vertices.insert(v.id).second) {
        throw ParseError(line_no, tokens[1].column, "duplicate vertex " + v.id);
      }
      vertices.push_back(std::move(v));
    } else if (kw == "e") {
      if (tokens.size() < 4 || tokens.size() > 5) {
        throw ParseError(line_no, tokens[0].column, "expected 'e <id> <id> m=<label> [type=A2|C2]'");
      }
      EdgeSpec e{tokens[1].text, tokens[2].text, 3, EdgeType::inferred};
      if (e.a == e.b) throw ParseError(line_no, tokens[2].column, "self-edge at vertex " + e.a);
      std::string_view value;
      if (!key_value(tokens[3], "m", value)) throw ParseError(line_no, tokens[3].column, "expected m=<label>");
      if (value == "inf" && policy == LabelPolicy::general) {
        e.m = kInfinity;
      } else {
        e.m = parse_int(value, line_no, tokens[3].column + 2, "edge label");
        if (e.m == kInfinity) e.m = -1;  // 0 is not a valid literal label
        try {
          check_label(e.m, policy);
        } catch (const DomainError& err) {
          throw ParseError(line_no, tokens[3].column, err.what());
        }
      }
      if (tokens.size() == 5) {
        if (!key_value(tokens[4], "type", value)) throw ParseError(line_no, tokens[4].column, "expected type=A2|C2");
        if (value == "A2") {
          e.tag = EdgeType::A2;
        } else if (value == "C2" || value == "B2") {
          e.tag = EdgeType::C2;
        } else {
          throw ParseError(line_no, tokens[4].column + 5, "unknown rank-2 type '" + std::string(value) + "'");
        }
        if ((e.tag == EdgeType::A2 && e.m != 3) || (e.tag == EdgeType::C2 && e.m != 4)) {
          throw ParseError(line_no, tokens[4].column, "type tag contradicts label m=" + std::to_string(e.m));
        }
      }
      auto key = natural_less(e.a, e.b) ? std::pair{e.a, e.b} : std::pair{e.b, e.a};
      if (!seen_edges.insert(key).second) {
        throw ParseError(line_no, tokens[1].column, "duplicate edge " + e.a + "-" + e.b);
      }
      edges.push_back(std::move(e));
    } else if (kw == "name") {
      const std::size_t start = tokens.size() > 1 ? tokens[1].column - 1 : line.size();
      name = std::string(line.substr(std::min(start, line.size())));
      while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
    } else if (!(extra && extra(line_no, tokens))) {
      throw ParseError(line_no, tokens[0].column, "unknown directive '" + kw + "'");
    }
  }
  return Diagram(std::move(vertices), edges, policy, std::move(name));
}

std::string emit_diagram(const Diagram& d) {
  std::ostringstream out;
  if (!d.name().empty()) out << "name " << d.name() << '\n';
  for (const auto& v : d.vertices()) {
    out << "v " << v.id;
    if (v.field_degree != 1) out << " e=" << v.field_degree;
    out << '\n';
  }
  for (const auto& e : d.edges()) {
    out << "e " << d.id(e.u) << ' ' << d.id(e.v) << " m=" << label_text(e.m);
    if (e.tag == EdgeType::A2) out << " type=A2";
    if (e.tag == EdgeType::C2) out << " type=C2";
    out << '\n';
  }
  return out.str();
}

Diagram induced(const Diagram& d, const std::vector<std::size_t>& subset) {
  std::vector<Vertex> vs;
  std::vector<EdgeSpec> es;
  std::set<std::size_t> in(subset.begin(), subset.end());
  for (auto i : in) vs.push_back(d.vertices().at(i));
  for (const auto& e : d.edges()) {
    if (in.count(e.u) && in.count(e.v)) es.push_back(EdgeSpec{d.id(e.u), d.id(e.v), e.m, e.tag});
  }
  return Diagram(std::move(vs), es, d.policy());
}

Diagram disjoint_union(const Diagram& a, const Diagram& b) {
  bool collide = false;
  for (const auto& v : a.vertices()) collide = collide || b.index_of(v.id).has_value();
  const std::string pa = collide ? "a." : "";
  const std::string pb = collide ? "b." : "";
  std::vector<Vertex> vs;
  std::vector<EdgeSpec> es;
  for (const auto& v : a.vertices()) vs.push_back(Vertex{pa + v.id, v.field_degree});
  for (const auto& v : b.vertices()) vs.push_back(Vertex{pb + v.id, v.field_degree});
  for (const auto& e : a.edges()) es.push_back(EdgeSpec{pa + a.id(e.u), pa + a.id(e.v), e.m, e.tag});
  for (const auto& e : b.edges()) es.push_back(EdgeSpec{pb + b.id(e.u), pb + b.id(e.v), e.m, e.tag});
  const auto policy = (a.policy() == LabelPolicy::general || b.policy() == LabelPolicy::general)
                          ? LabelPolicy::general
                          : LabelPolicy::crystallographic;
  return Diagram(std::move(vs), es, policy);
}

// --- finite types -----------------------------------------------------------------

std::string FiniteComponent::name() const {
  if (family == 'I') return "I2(" + std::to_string(m) + ")";
  return std::string(1, family) + std::to_string(rank);
}

std::vector<int> FiniteComponent::exponents() const {
  std::vector<int> e;
  switch (family) {
    case 'A':
      for (int i = 1; i <= rank; ++i) e.push_back(i);
      break;
    case 'B':
      for (int i = 1; i <= rank; ++i) e.push_back(2 * i - 1);
      break;
    case 'D':
      for (int i = 1; i < rank; ++i) e.push_back(2 * i - 1);
      e.push_back(rank - 1);
      break;
    case 'E':
      if (rank == 6) e = {1, 4, 5, 7, 8, 11};
      if (rank == 7) e = {1, 5, 7, 9, 11, 13, 17};
      if (rank == 8) e = {1, 7, 11, 13, 17, 19, 23, 29};
      break;
    case 'F':
      e = {1, 5, 7, 11};
      break;
    case 'G':
      e = {1, 5};
      break;
    case 'H':
      if (rank == 3) e = {1, 5, 9};
      if (rank == 4) e = {1, 11, 19, 29};
      break;
    case 'I':
      e = {1, m - 1};
      break;
    default:
      break;
  }
  std::sort(e.begin(), e.end());
  return e;
}

std::string FiniteType::name() const {
  if (components.empty()) return "empty";
  std::string out;
  for (const auto& c : components) {
    if (!out.empty()) out += 'x';
    out += c.name();
  }
  return out;
}

std::vector<int> FiniteType::exponents() const {
  std::vector<int> e;
  for (const auto& c : components) {
    const auto ce = c.exponents();
    e.insert(e.end(), ce.begin(), ce.end());
  }
  std::sort(e.begin(), e.end());
  return e;
}

namespace {

/// Recognizes one connected component given its local label matrix.
std::optional<FiniteComponent> recognize_component(const std::vector<int>& lab, std::size_t k) {
  auto m = [&](std::size_t a, std::size_t b) { return lab[a * k + b]; };
  if (k == 1) return FiniteComponent{'A', 1, 0};
  std::vector<std::vector<std::size_t>> nb(k);
  std::size_t edge_count = 0;
  std::vector<std::tuple<std::size_t, std::size_t, int>> heavy;  // edges with m > 3
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a + 1; b < k; ++b) {
      const int l = m(a, b);
      if (l == 2) continue;
      if (l == kInfinity) return std::nullopt;
      nb[a].push_back(b);
      nb[b].push_back(a);
      ++edge_count;
      if (l > 3) heavy.emplace_back(a, b, l);
    }
  }
  if (edge_count != k - 1) return std::nullopt;  // a connected graph with a cycle
  if (k == 2) {
    const int l = m(0, 1);
    if (l == 3) return FiniteComponent{'A', 2, 0};
    if (l == 4) return FiniteComponent{'B', 2, 0};
    if (l == 6) return FiniteComponent{'G', 2, 0};
    return FiniteComponent{'I', 2, l};
  }
  std::vector<std::size_t> branch;
  for (std::size_t a = 0; a < k; ++a) {
    if (nb[a].size() > 3) return std::nullopt;
    if (nb[a].size() == 3) branch.push_back(a);
  }
  const int rank = static_cast<int>(k);
  if (heavy.empty()) {
    if (branch.empty()) return FiniteComponent{'A', rank, 0};
    if (branch.size() > 1) return std::nullopt;
    const std::size_t c = branch[0];
    std::vector<int> arms;
    for (auto start : nb[c]) {
      int len = 1;
      std::size_t prev = c;
      std::size_t cur = start;
      while (nb[cur].size() == 2) {
        const std::size_t next = nb[cur][0] == prev ? nb[cur][1] : nb[cur][0];
        prev = cur;
        cur = next;
        ++len;
      }
      if (nb[cur].size() != 1) return std::nullopt;
      arms.push_back(len);
    }
    std::sort(arms.begin(), arms.end());
    if (arms[0] == 1 && arms[1] == 1) return FiniteComponent{'D', rank, 0};
    if (arms[0] == 1 && arms[1] == 2 && arms[2] >= 2 && arms[2] <= 4) return FiniteComponent{'E', rank, 0};
    return std::nullopt;
  }
  if (heavy.size() > 1 || !branch.empty()) return std::nullopt;
  const auto [a, b, l] = heavy[0];
  const bool at_end = nb[a].size() == 1 || nb[b].size() == 1;
  if (l == 4) {
    if (at_end) return FiniteComponent{'B', rank, 0};
    if (k == 4) return FiniteComponent{'F', 4, 0};
    return std::nullopt;
  }
  if (l == 5 && at_end && (k == 3 || k == 4)) return FiniteComponent{'H', rank, 0};
  return std::nullopt;
}

}  // namespace

std::optional<FiniteType> recognize_finite_type(const Diagram& d, const std::vector<std::size_t>& subset) {
  const std::size_t k = subset.size();
  FiniteType out;
  if (k == 0) return out;
  // components of the induced subgraph
  std::vector<int> comp(k, -1);
  int ncomp = 0;
  for (std::size_t s = 0; s < k; ++s) {
    if (comp[s] >= 0) continue;
    std::vector<std::size_t> stack{s};
    comp[s] = ncomp;
    while (!stack.empty()) {
      const auto x = stack.back();
      stack.pop_back();
      for (std::size_t y = 0; y < k; ++y) {
        if (comp[y] < 0 && d.label(subset[x], subset[y]) != 2) {
          comp[y] = ncomp;
          stack.push_back(y);
        }
      }
    }
    ++ncomp;
  }
  for (int c = 0; c < ncomp; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t s = 0; s < k; ++s) {
      if (comp[s] == c) members.push_back(subset[s]);
    }
    const std::size_t km = members.size();
    std::vector<int> lab(km * km, 1);
    for (std::size_t x = 0; x < km; ++x) {
      for (std::size_t y = 0; y < km; ++y) {
        if (x != y) lab[x * km + y] = d.label(members[x], members[y]);
      }
    }
    auto fc = recognize_component(lab, km);
    if (!fc) return std::nullopt;
    out.components.push_back(*fc);
  }
  std::sort(out.components.begin(), out.components.end());
  return out;
}

SubdiagramReport classify_subdiagrams(const Diagram& d, int q) {
  SubdiagramReport report;
  const std::size_t n = d.size();
  auto record = [&](std::vector<std::size_t> subset) {
    const auto t = recognize_finite_type(d, subset);
    report.finite_type_of[subset] = t ? t->name() : "infinite";
    return t.has_value();
  };
  for (std::size_t a = 0; a < n; ++a) {
    record({a});
    for (std::size_t b = a + 1; b < n; ++b) {
      record({a, b});
      for (std::size_t c = b + 1; c < n; ++c) {
        if (!record({a, b, c})) {
          report.three_spherical = false;
          report.offending_triples.push_back({a, b, c});
        }
      }
    }
  }
  if (q == 2) {
    report.has_C2_2 = std::any_of(d.edges().begin(), d.edges().end(), [](const Edge& e) { return e.m == 4; });
  }
  return report;
}

// --- spanning tree -------------------------------------------------------------

SpanningData spanning_tree_and_loops(const Diagram& d) {
  if (d.size() == 0) return {};
  if (!d.connected()) throw DomainError("diagram is disconnected");
  const std::size_t n = d.size();
  std::vector<std::size_t> parent(n, n);
  std::vector<char> seen(n, 0);
  std::vector<char> in_tree(d.edges().size(), 0);
  std::deque<std::size_t> queue{0};  // vertex 0 is the least in natural order
  seen[0] = 1;
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    for (auto w : d.neighbors(v)) {
      if (seen[w]) continue;
      seen[w] = 1;
      parent[w] = v;
      in_tree[*d.edge_index(v, w)] = 1;
      queue.push_back(w);
    }
  }
  SpanningData out;
  for (std::size_t e = 0; e < d.edges().size(); ++e) {
    if (in_tree[e]) {
      out.tree.push_back(e);
    } else {
      out.excess.push_back(ExcessEdge{d.edges()[e].u, d.edges()[e].v});
    }
  }
  out.r = out.excess.size();
  for (const auto& x : out.excess) {
    auto path = tree_path(d, out.tree, x.j, x.i);  // j ... i
    Cycle loop{x.i};
    loop.insert(loop.end(), path.begin(), path.end() - 1);
    out.loops.push_back(std::move(loop));
  }
  return out;
}

std::vector<std::size_t> tree_path(const Diagram& d, const std::vector<std::size_t>& tree_edges, std::size_t from,
                                   std::size_t to) {
  const std::size_t n = d.size();
  std::vector<std::vector<std::size_t>> nb(n);
  for (auto e : tree_edges) {
    nb[d.edges()[e].u].push_back(d.edges()[e].v);
    nb[d.edges()[e].v].push_back(d.edges()[e].u);
  }
  std::vector<std::size_t> parent(n, n);
  std::vector<char> seen(n, 0);
  std::deque<std::size_t> queue{from};
  seen[from] = 1;
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    if (v == to) break;
    for (auto w : nb[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        parent[w] = v;
        queue.push_back(w);
      }
    }
  }
  if (!seen[to]) throw DomainError("vertices not joined by the tree");
  std::vector<std::size_t> path{to};
  while (path.back() != from) path.push_back(parent[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

// --- covers -----------------------------------------------------------------------

namespace {
CoverData build_cover(const Diagram& d, const SpanningData& span, const std::vector<int>& omega_star);
}  // namespace

CoverData double_cover(const Diagram& d, const std::vector<int>& omega_star) {
  if (!d.connected()) throw DomainError("diagram is disconnected");
  const auto span = spanning_tree_and_loops(d);
  if (omega_star.size() != span.r) {
    throw DomainError("omega* has " + std::to_string(omega_star.size()) + " values, expected " +
                      std::to_string(span.r));
  }
  for (int w : omega_star) {
    if (w != 0 && w != 1) throw DomainError("omega* values must be 0 or 1");
  }
  if (std::none_of(omega_star.begin(), omega_star.end(), [](int w) { return w == 1; })) {
    throw DomainError("disconnected cover: omega* is trivial");
  }
  return build_cover(d, span, omega_star);
}

CoverData trivial_double_cover(const Diagram& d) {
  if (!d.connected()) throw DomainError("diagram is disconnected");
  const auto span = spanning_tree_and_loops(d);
  return build_cover(d, span, std::vector<int>(span.r, 0));
}

namespace {

CoverData build_cover(const Diagram& d, const SpanningData& span, const std::vector<int>& omega_star) {
  const std::size_t n = d.size();
  std::vector<int> twist(d.edges().size(), 0);
  for (std::size_t s = 0; s < span.r; ++s) twist[*d.edge_index(span.excess[s].i, span.excess[s].j)] = omega_star[s];

  auto name = [&](std::size_t v, int sheet) { return d.id(v) + "." + std::to_string(sheet); };
  std::vector<Vertex> vs;
  std::vector<EdgeSpec> es;
  for (std::size_t v = 0; v < n; ++v) {
    for (int sheet = 0; sheet < 2; ++sheet) vs.push_back(Vertex{name(v, sheet), d.vertices()[v].field_degree});
  }
  for (std::size_t e = 0; e < d.edges().size(); ++e) {
    const auto& edge = d.edges()[e];
    for (int sheet = 0; sheet < 2; ++sheet) {
      es.push_back(EdgeSpec{name(edge.u, sheet), name(edge.v, sheet ^ twist[e]), edge.m, edge.tag});
    }
  }
  CoverData c;
  c.base = d;
  c.cover = Diagram(std::move(vs), es, d.policy(), d.name().empty() ? "" : d.name() + " (double cover)");
  c.omega_star = omega_star;
  c.projection.resize(c.cover.size());
  c.deck.resize(c.cover.size());
  for (std::size_t v = 0; v < n; ++v) {
    const auto a = c.cover.require_index(name(v, 0));
    const auto b = c.cover.require_index(name(v, 1));
    c.projection[a] = c.projection[b] = v;
    c.deck[a] = b;
    c.deck[b] = a;
  }
  const auto problem = check_cover(c);
  if (!problem.empty()) throw DomainError("internal: cover invariant violated: " + problem);
  return c;
}

}  // namespace

std::string check_cover(const CoverData& c) {
  const std::size_t n = c.cover.size();
  if (n != 2 * c.base.size()) return "|V(cover)| != 2|V(base)|";
  if (c.cover.edges().size() != 2 * c.base.edges().size()) return "|E(cover)| != 2|E(base)|";
  if (c.projection.size() != n || c.deck.size() != n) return "projection/deck size mismatch";
  for (std::size_t v = 0; v < n; ++v) {
    if (c.deck[v] >= n || c.deck[c.deck[v]] != v) return "deck is not an involution";
    if (c.deck[v] == v) return "deck fixes a vertex";
    if (c.projection[c.deck[v]] != c.projection[v]) return "projection not deck invariant";
  }
  std::vector<int> preimages(c.base.edges().size(), 0);
  for (const auto& e : c.cover.edges()) {
    const auto pu = c.projection[e.u];
    const auto pv = c.projection[e.v];
    const auto be = c.base.edge_index(pu, pv);
    if (!be) return "cover edge does not project to a base edge";
    if (c.base.edges()[*be].m != e.m) return "cover edge label differs from base";
    ++preimages[*be];
    const auto du = c.deck[e.u];
    const auto dv = c.deck[e.v];
    if (!c.cover.adjacent(du, dv)) return "deck does not preserve edges";
    if (std::minmax(du, dv) == std::minmax(e.u, e.v)) return "deck fixes an edge";
  }
  for (int k : preimages) {
    if (k != 2) return "base edge without exactly two preimages";
  }
  return {};
}

void require_cycle(const Diagram& d, const Cycle& loop) {
  if (loop.size() < 3) throw DomainError("a cycle needs at least three vertices");
  std::set<std::size_t> distinct(loop.begin(), loop.end());
  if (distinct.size() != loop.size()) throw DomainError("cycle repeats a vertex");
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const auto a = loop[k];
    const auto b = loop[(k + 1) % loop.size()];
    if (a >= d.size() || b >= d.size() || !d.adjacent(a, b)) {
      throw DomainError("not a cycle of the diagram: no edge " + (a < d.size() ? d.id(a) : "?") + "-" +
                        (b < d.size() ? d.id(b) : "?"));
    }
  }
}

namespace {

/// Walks the lift of `loop` starting over `start`; returns the vertices visited
/// until the walk is back over loop[0], together with the end vertex.
std::vector<std::size_t> lift_once(const CoverData& c, const Cycle& loop, std::size_t start) {
  std::vector<std::size_t> walk{start};
  std::size_t cur = start;
  for (std::size_t k = 1; k <= loop.size(); ++k) {
    const auto target = loop[k % loop.size()];
    std::size_t next = c.cover.size();
    for (auto w : c.cover.neighbors(cur)) {
      if (c.projection[w] == target) {
        next = w;
        break;
      }
    }
    if (next == c.cover.size()) throw DomainError("loop does not lift: cover/base mismatch");
    cur = next;
    walk.push_back(cur);
  }
  return walk;  // walk.back() lies over loop[0]
}

}  // namespace

int omega_of_loop(const CoverData& c, const Cycle& loop) {
  require_cycle(c.base, loop);
  const auto start = c.cover.require_index(c.base.id(loop[0]) + ".0");
  const auto walk = lift_once(c, loop, start);
  return walk.back() == start ? 0 : 1;
}

LoopFiber loop_fiber_type(const CoverData& c, const Cycle& loop, int omega_value) {
  const int actual = omega_of_loop(c, loop);
  if (actual != omega_value) {
    throw DomainError("omega* value " + std::to_string(omega_value) + " disagrees with the cover (loop class has " +
                      std::to_string(actual) + ")");
  }
  const auto start = c.cover.require_index(c.base.id(loop[0]) + ".0");
  LoopFiber fiber;
  auto first = lift_once(c, loop, start);
  if (actual == 0) {
    fiber.type = FiberType::two_disjoint_loops;
    first.pop_back();
    auto second = lift_once(c, loop, c.deck[start]);
    second.pop_back();
    fiber.cycles = {first, second};
  } else {
    fiber.type = FiberType::single_double_loop;
    auto rest = lift_once(c, loop, first.back());
    first.pop_back();
    rest.pop_back();
    first.insert(first.end(), rest.begin(), rest.end());
    fiber.cycles = {first};
  }
  for (const auto& cyc : fiber.cycles) {
    require_cycle(c.cover, cyc);
    const std::size_t expected = actual == 0 ? loop.size() : 2 * loop.size();
    if (cyc.size() != expected) throw DomainError("internal: fiber cycle has unexpected length");
  }
  return fiber;
}

std::string to_string(FiberType t) {
  return t == FiberType::two_disjoint_loops ? "two_disjoint_loops" : "single_double_loop";
}

}  // namespace amalgam::diagram
