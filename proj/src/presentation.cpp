#include "amalgam/presentation.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <set>
#include <regex>
#include <sstream>
#include <unordered_map>

#include "amalgam/error.hpp"

namespace amalgam::presentation {

using oracle::Field;
using oracle::Flavor;
using oracle::Fq;
using oracle::Matrix;
using oracle::PairType;

std::string to_string(Strategy s) { return s == Strategy::table ? "table" : "steinberg"; }

Strategy parse_strategy(std::string_view text) {
  if (text == "table") return Strategy::table;
  if (text == "steinberg") return Strategy::steinberg;
  throw DomainError("unknown strategy '" + std::string(text) + "'");
}

std::size_t Presentation::generator_index(std::string_view name) const {
  for (std::size_t k = 0; k < generators.size(); ++k) {
    if (generators[k].name == name) return k;
  }
  throw DomainError("unknown generator '" + std::string(name) + "'");
}

bool Presentation::has_generator(std::string_view name) const {
  return std::any_of(generators.begin(), generators.end(), [&](const Generator& g) { return g.name == name; });
}

void validate(const Presentation& p) {
  std::set<std::string> names;
  for (const auto& g : p.generators) {
    if (g.name.empty()) throw DomainError("empty generator name");
    if (!names.insert(g.name).second) throw DomainError("duplicate generator '" + g.name + "'");
  }
  const int n = static_cast<int>(p.generators.size());
  for (const auto& r : p.relators) {
    if (r.empty()) throw DomainError("empty relator");
    for (int x : r) {
      if (x == 0 || x > n || x < -n) throw DomainError("relator references an undeclared generator");
    }
  }
}

Word inverse(const Word& w) {
  Word r(w.rbegin(), w.rend());
  for (auto& x : r) x = -x;
  return r;
}

Word free_reduce(Word w) {
  Word out;
  out.reserve(w.size());
  for (int x : w) {
    if (!out.empty() && out.back() == -x) {
      out.pop_back();
    } else {
      out.push_back(x);
    }
  }
  return out;
}

Word cyclic_reduce(Word w) {
  w = free_reduce(std::move(w));
  std::size_t lo = 0;
  std::size_t hi = w.size();
  while (hi - lo >= 2 && w[lo] == -w[hi - 1]) {
    ++lo;
    --hi;
  }
  return Word(w.begin() + static_cast<std::ptrdiff_t>(lo), w.begin() + static_cast<std::ptrdiff_t>(hi));
}

std::string word_to_string(const Presentation& p, const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (k) s += '*';
    s += p.generators.at(static_cast<std::size_t>(std::abs(w[k]) - 1)).name;
    s += w[k] > 0 ? "^1" : "^-1";
  }
  return s;
}

Matrix evaluate(const Field& f, const std::vector<Matrix>& images, const Word& w) {
  if (images.empty()) throw DomainError("no generator images");
  Matrix m = oracle::identity(images.front().n);
  for (int x : w) {
    const Matrix& g = images.at(static_cast<std::size_t>(std::abs(x) - 1));
    m = oracle::multiply(f, m, x > 0 ? g : oracle::inverse(f, g));
  }
  return m;
}

namespace {

/// Accumulates generators and deduplicated, cyclically reduced relators.
class Builder {
 public:
  int generator(const Generator& g) {
    if (auto it = index_.find(g.name); it != index_.end()) return it->second;
    p_.generators.push_back(g);
    const int letter = static_cast<int>(p_.generators.size());
    index_.emplace(g.name, letter);
    return letter;
  }
  std::optional<int> find(const std::string& name) const {
    if (auto it = index_.find(name); it != index_.end()) return it->second;
    return std::nullopt;
  }
  void relator(Word w) {
    w = cyclic_reduce(std::move(w));
    if (w.empty()) return;
    if (seen_.insert(w).second) p_.relators.push_back(std::move(w));
  }
  Presentation take() { return std::move(p_); }
  Presentation& get() { return p_; }

 private:
  Presentation p_;
  std::unordered_map<std::string, int> index_;
  std::set<Word> seen_;
};

char sign_char(int sign) { return sign > 0 ? 'p' : 'm'; }

Generator root_generator(const std::string& vertex, int sign, int element) {
  Generator g;
  g.name = "x" + vertex + sign_char(sign) + std::to_string(element);
  g.kind = Generator::Kind::root;
  g.vertex = vertex;
  g.sign = sign;
  g.element = element;
  return g;
}

Generator unitary_generator(const std::string& vertex, int k) {
  Generator g;
  g.name = "x" + vertex + "u" + std::to_string(k);
  g.kind = Generator::Kind::unitary;
  g.vertex = vertex;
  g.element = k;
  return g;
}

Generator auxiliary_generator(const std::string& u, const std::string& v, int sign, int root, int element) {
  Generator g;
  g.name = "z" + u + "_" + v + sign_char(sign) + std::to_string(root) + "e" + std::to_string(element);
  g.kind = Generator::Kind::auxiliary;
  g.vertex = u + "_" + v;
  g.sign = sign;
  g.root = root;
  g.element = element;
  return g;
}

Generator element_generator(std::size_t k) {
  Generator g;
  g.name = "g" + std::to_string(k);
  g.kind = Generator::Kind::element;
  g.element = static_cast<int>(k);
  return g;
}

/// Fundamental cycles of the Cayley graph of <images> with respect to its
/// breadth-first spanning tree.
void cayley_relators(Builder& b, const Field& f, const std::vector<Matrix>& images, const std::vector<int>& letters,
                     std::size_t cap) {
  std::unordered_map<Matrix, std::size_t, oracle::MatrixHash> id;
  std::vector<Matrix> elems{oracle::identity(images.front().n)};
  std::vector<Word> words{{}};
  id.emplace(elems[0], 0);
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (std::size_t g = 0; g < images.size(); ++g) {
      const Matrix h = oracle::multiply(f, elems[i], images[g]);
      auto it = id.find(h);
      Word w = words[i];
      w.push_back(letters[g]);
      if (it == id.end()) {
        if (elems.size() >= cap) {
          throw CapExceeded("table strategy: group order exceeds " + std::to_string(cap));
        }
        id.emplace(h, elems.size());
        elems.push_back(h);
        words.push_back(std::move(w));
      } else {
        const Word back = inverse(words[it->second]);
        w.insert(w.end(), back.begin(), back.end());
        b.relator(std::move(w));
      }
    }
  }
}

// --- root systems of the pairs -----------------------------------------------------

struct RootSystem {
  PairType type;
  std::vector<std::pair<int, int>> coords;  // positives then negatives
  std::vector<Matrix> patterns;
  std::size_t positive = 0;

  int index_of(std::pair<int, int> c) const {
    for (std::size_t k = 0; k < coords.size(); ++k) {
      if (coords[k] == c) return static_cast<int>(k);
    }
    return -1;
  }
  int negative(int r) const {
    return static_cast<int>(static_cast<std::size_t>(r) < positive ? r + positive : r - positive);
  }
};

RootSystem root_system(const Field& f, PairType type) {
  RootSystem rs;
  rs.type = type;
  std::vector<std::pair<int, int>> pos;
  switch (type) {
    case PairType::A1:
      pos = {{1, 0}};
      break;
    case PairType::A1xA1:
      pos = {{1, 0}, {0, 1}};
      break;
    case PairType::A2:
      pos = {{1, 0}, {0, 1}, {1, 1}};
      break;
    case PairType::C2:
      pos = {{1, 0}, {0, 1}, {1, 1}, {1, 2}};
      break;
  }
  rs.positive = pos.size();
  rs.coords = pos;
  for (auto [a, b] : pos) rs.coords.push_back({-a, -b});
  rs.patterns = oracle::root_patterns(f, type);
  return rs;
}

/// Steinberg relators of one pair. `letter(r, a)` names x_r(a) for root
/// index r and non-zero field element a.
void steinberg_relators(Builder& b, const Field& f, PairType type, const std::function<int(int, Fq)>& letter) {
  const RootSystem rs = root_system(f, type);
  const int q = f.q();
  const int roots = static_cast<int>(rs.coords.size());
  auto mat = [&](int r, Fq a) { return oracle::unipotent(f, rs.patterns[static_cast<std::size_t>(r)], a); };
  auto check = [&](const std::vector<std::pair<int, Fq>>& word, const std::string& what) {
    Matrix m = oracle::identity(oracle::matrix_size(type));
    for (auto [r, a] : word) {
      if (r < 0) {
        m = oracle::multiply(f, m, oracle::inverse(f, mat(-r - 1, a)));
      } else {
        m = oracle::multiply(f, m, mat(r, a));
      }
    }
    if (!(m == oracle::identity(m.n))) throw Error("internal: " + what + " relator fails in the matrix group");
  };
  // (r, a) terms; negative r encodes the inverse of x_{-r-1}(a)
  auto emit = [&](const std::vector<std::pair<int, Fq>>& word, const std::string& what) {
    check(word, what);
    Word w;
    for (auto [r, a] : word) w.push_back(r < 0 ? -letter(-r - 1, a) : letter(r, a));
    b.relator(std::move(w));
  };

  // additivity
  for (int r = 0; r < roots; ++r) {
    for (int a = 1; a < q; ++a) {
      for (int c = 1; c < q; ++c) {
        const Fq s = f.add(static_cast<Fq>(a), static_cast<Fq>(c));
        std::vector<std::pair<int, Fq>> w{{r, static_cast<Fq>(a)}, {r, static_cast<Fq>(c)}};
        if (s != 0) w.push_back({-r - 1, s});
        emit(w, "additivity");
      }
    }
  }

  // Chevalley commutators
  for (int r = 0; r < roots; ++r) {
    for (int s = 0; s < roots; ++s) {
      if (r == s || s == rs.negative(r)) continue;
      const auto [r1, r2] = rs.coords[static_cast<std::size_t>(r)];
      const auto [s1, s2] = rs.coords[static_cast<std::size_t>(s)];
      std::vector<std::pair<int, int>> ij;
      for (int i = 1; i <= 3; ++i) {
        for (int j = 1; j <= 3; ++j) ij.push_back({i, j});
      }
      std::sort(ij.begin(), ij.end(), [](auto x, auto y) {
        return std::pair(x.first + x.second, x.first) < std::pair(y.first + y.second, y.first);
      });
      std::vector<int> gamma;
      for (auto [i, j] : ij) {
        const int g = rs.index_of({i * r1 + j * s1, i * r2 + j * s2});
        if (g >= 0) gamma.push_back(g);
      }
      for (int a = 1; a < q; ++a) {
        for (int c = 1; c < q; ++c) {
          const Matrix xr = mat(r, static_cast<Fq>(a));
          const Matrix xs = mat(s, static_cast<Fq>(c));
          Matrix comm = oracle::multiply(f, xr, xs);
          comm = oracle::multiply(f, comm, oracle::inverse(f, xr));
          comm = oracle::multiply(f, comm, oracle::inverse(f, xs));
          // brute force the coefficients of the ordered product over gamma
          std::vector<int> coef(gamma.size(), 0);
          bool found = false;
          while (true) {
            Matrix m = oracle::identity(comm.n);
            for (std::size_t k = 0; k < gamma.size(); ++k) {
              if (coef[k]) m = oracle::multiply(f, m, mat(gamma[k], static_cast<Fq>(coef[k])));
            }
            if (m == comm) {
              found = true;
              break;
            }
            std::size_t k = 0;
            while (k < coef.size() && ++coef[k] == q) coef[k++] = 0;
            if (k == coef.size()) break;
          }
          if (!found) throw Error("internal: commutator outside the expected root groups");
          std::vector<std::pair<int, Fq>> w{{r, static_cast<Fq>(a)},
                                            {s, static_cast<Fq>(c)},
                                            {-r - 1, static_cast<Fq>(a)},
                                            {-s - 1, static_cast<Fq>(c)}};
          for (std::size_t k = gamma.size(); k-- > 0;) {
            if (coef[k]) w.push_back({-gamma[k] - 1, static_cast<Fq>(coef[k])});
          }
          emit(w, "commutator");
        }
      }
    }
  }

  // rank-1 relators for the simple roots: n(t) x(u) n(t)^-1 and h(t) h(u) = h(tu)
  const std::size_t simple = type == PairType::A1 ? 1 : 2;
  for (std::size_t v = 0; v < simple; ++v) {
    const int pos = static_cast<int>(v);
    const int neg = rs.negative(pos);
    auto n_word = [&](Fq t) {
      return std::vector<std::pair<int, Fq>>{{pos, t}, {neg, f.neg(f.inv(t))}, {pos, t}};
    };
    auto n_inverse = [&](Fq t) {
      auto w = n_word(t);
      std::reverse(w.begin(), w.end());
      for (auto& [r, a] : w) r = -r - 1;
      return w;
    };
    for (int t = 1; t < q; ++t) {
      for (int root : {pos, neg}) {
        for (int u = 1; u < q; ++u) {
          Matrix target = oracle::identity(oracle::matrix_size(type));
          for (auto [r, a] : n_word(static_cast<Fq>(t))) target = oracle::multiply(f, target, mat(r, a));
          Matrix conj = oracle::multiply(f, target, mat(root, static_cast<Fq>(u)));
          conj = oracle::multiply(f, conj, oracle::inverse(f, target));
          std::optional<std::pair<int, Fq>> image;
          for (int cand : {pos, neg}) {
            for (int c = 1; c < q && !image; ++c) {
              if (mat(cand, static_cast<Fq>(c)) == conj) image = std::pair(cand, static_cast<Fq>(c));
            }
          }
          if (!image) throw Error("internal: Weyl conjugate is not a root element");
          auto w = n_word(static_cast<Fq>(t));
          w.push_back({root, static_cast<Fq>(u)});
          for (auto x : n_inverse(static_cast<Fq>(t))) w.push_back(x);
          w.push_back({-image->first - 1, image->second});
          emit(w, "Weyl conjugation");
        }
      }
    }
    for (int t = 1; t < q; ++t) {
      for (int u = 1; u < q; ++u) {
        const Fq tu = f.mul(static_cast<Fq>(t), static_cast<Fq>(u));
        std::vector<std::pair<int, Fq>> w;
        auto append = [&](const std::vector<std::pair<int, Fq>>& x) { w.insert(w.end(), x.begin(), x.end()); };
        append(n_word(static_cast<Fq>(t)));
        append(n_inverse(1));
        append(n_word(static_cast<Fq>(u)));
        append(n_inverse(1));
        append(n_word(1));
        append(n_inverse(tu));
        emit(w, "torus");
      }
    }
  }
}

PairType edge_type(int m) {
  switch (m) {
    case 3:
      return PairType::A2;
    case 4:
      return PairType::C2;
    default:
      throw DomainError("edges with m = " + std::to_string(m) + " have no standard pair realization");
  }
}

Matrix x_plus(Fq a) {
  Matrix m = oracle::identity(2);
  m.at(0, 1) = a;
  return m;
}

Matrix x_minus(Fq a) { return oracle::transpose(x_plus(a)); }

/// Applies a coefficient element to a 2 x 2 vertex matrix.
Matrix twist(const Field& f, const classify::CoefficientElement& c, const Matrix& m) {
  Matrix r = oracle::frobenius(f, m, c.frobenius_exponent);
  if (c.tau_bit) r = oracle::apply(f, oracle::Involution::tau, r);
  return r;
}

}  // namespace

Generator apply_coefficient(const Generator& g, const classify::CoefficientElement& c, const Field& f) {
  if (g.kind != Generator::Kind::root) throw DomainError("coefficients act on root generators only");
  if (g.element <= 0 || g.element >= f.q()) throw DomainError("generator " + g.name + " is not over F_" + std::to_string(f.q()));
  Fq y = f.frobenius(static_cast<Fq>(g.element), c.frobenius_exponent);
  int sign = g.sign;
  if (c.tau_bit) {
    sign = -sign;
    y = f.neg(y);
  }
  return root_generator(g.vertex, sign, y);
}

// --- standalone pairs ---------------------------------------------------------------

Presentation edge_group_presentation(PairType type, int q, Strategy strategy, Flavor flavor) {
  Builder b;
  Presentation& p = b.get();
  p.strategy = to_string(strategy);
  p.source = oracle::to_string(flavor) + " " + oracle::to_string(type) + " q=" + std::to_string(q);
  const int vertices = type == PairType::A1 ? 1 : 2;

  if (strategy == Strategy::steinberg) {
    if (flavor != Flavor::CurtisTits) throw DomainError("the steinberg strategy needs a Curtis-Tits pair");
    const Field f(q);
    p.q = q;
    const RootSystem rs = root_system(f, type);
    for (int v = 0; v < vertices; ++v) {
      for (int sign : {1, -1}) {
        for (int a = 1; a < q; ++a) b.generator(root_generator(std::to_string(v + 1), sign, a));
      }
    }
    steinberg_relators(b, f, type, [&](int r, Fq a) {
      const bool neg = static_cast<std::size_t>(r) >= rs.positive;
      const int base = static_cast<int>(neg ? r - rs.positive : r);
      const int sign = neg ? -1 : 1;
      if (base < vertices && !(type == PairType::A1xA1 && base > 1)) {
        return b.generator(root_generator(std::to_string(base + 1), sign, a));
      }
      return b.generator(auxiliary_generator("1", "2", sign, base, a));
    });
    return b.take();
  }

  const oracle::StandardPair pair = oracle::standard_pair_realization(type, q, flavor);
  const auto& group = pair.group;
  if (group.order() > kTableOrderCap) {
    throw CapExceeded("table strategy: group order " + std::to_string(group.order()) + " exceeds " +
                      std::to_string(kTableOrderCap));
  }
  const Field& f = pair.field;
  if (flavor == Flavor::CurtisTits) p.q = q;
  std::vector<int> letter_of(group.order(), 0);
  if (flavor == Flavor::CurtisTits) {
    for (int v = 0; v < vertices; ++v) {
      for (int sign : {1, -1}) {
        for (int a = 1; a < q; ++a) {
          const std::size_t k = group.index_of(oracle::root_element(f, type, v, sign, static_cast<Fq>(a)));
          letter_of[k] = b.generator(root_generator(std::to_string(v + 1), sign, a));
        }
      }
    }
  } else {
    for (int v = 0; v < vertices; ++v) {
      for (std::size_t k = 0; k < pair.vertex_generators[static_cast<std::size_t>(v)].size(); ++k) {
        const std::size_t idx = group.index_of(pair.vertex_generators[static_cast<std::size_t>(v)][k]);
        if (!letter_of[idx]) letter_of[idx] = b.generator(unitary_generator(std::to_string(v + 1), static_cast<int>(k)));
      }
    }
  }
  const Matrix one = oracle::identity(oracle::matrix_size(type));
  for (std::size_t k = 0; k < group.order(); ++k) {
    if (!letter_of[k] && !(group.elements()[k] == one)) letter_of[k] = b.generator(element_generator(k));
  }
  // relators in generator order
  std::vector<std::size_t> by_letter(p.generators.size() + 1);
  for (std::size_t k = 0; k < group.order(); ++k) {
    if (letter_of[k]) by_letter[static_cast<std::size_t>(letter_of[k])] = k;
  }
  for (std::size_t x = 1; x < by_letter.size(); ++x) {
    for (std::size_t y = 1; y < by_letter.size(); ++y) {
      const Matrix prod = oracle::multiply(f, group.elements()[by_letter[x]], group.elements()[by_letter[y]]);
      Word w{static_cast<int>(x), static_cast<int>(y)};
      if (!(prod == one)) w.push_back(-letter_of[group.index_of(prod)]);
      b.relator(std::move(w));
    }
  }
  return b.take();
}

// --- amalgams ------------------------------------------------------------------------

Presentation amalgam_presentation(const classify::AmalgamDescriptor& a, Strategy strategy) {
  classify::validate(a);
  const diagram::Diagram& d = a.diagram;
  for (const auto& v : d.vertices()) {
    if (v.field_degree != 1) throw DomainError("presentations need field degree 1 at every vertex");
  }
  const bool ct = a.flavor == Flavor::CurtisTits;
  if (!ct && strategy == Strategy::steinberg) throw DomainError("the steinberg strategy needs a Curtis-Tits descriptor");
  if (a.q * (ct ? 1 : a.q) > 256) throw DomainError("field too large for presentations");
  const int q = static_cast<int>(a.q);
  const Field f(ct ? q : q * q);

  Builder b;
  Presentation& p = b.get();
  p.strategy = to_string(strategy);
  p.q = ct ? q : 0;
  p.source = oracle::to_string(a.flavor) + " q=" + std::to_string(q) + (d.name().empty() ? "" : " " + d.name());

  // abstract vertex generators as 2 x 2 matrices
  std::vector<Matrix> vertex_mats;
  std::vector<std::pair<int, int>> vertex_tags;  // (sign, element) or (0, k)
  if (ct) {
    for (int sign : {1, -1}) {
      for (int x = 1; x < q; ++x) {
        vertex_mats.push_back(sign > 0 ? x_plus(static_cast<Fq>(x)) : x_minus(static_cast<Fq>(x)));
        vertex_tags.push_back({sign, x});
      }
    }
  } else {
    const auto su2 = oracle::standard_pair_realization(PairType::A1, q, Flavor::Phan);
    for (std::size_t k = 0; k < su2.vertex_generators[0].size(); ++k) {
      vertex_mats.push_back(su2.vertex_generators[0][k]);
      vertex_tags.push_back({0, static_cast<int>(k)});
    }
  }
  std::vector<std::vector<int>> letters(d.size());
  for (std::size_t v = 0; v < d.size(); ++v) {
    for (auto [sign, x] : vertex_tags) {
      letters[v].push_back(b.generator(sign ? root_generator(d.id(v), sign, x) : unitary_generator(d.id(v), x)));
    }
  }

  auto excess_delta = [&](std::size_t u, std::size_t v) -> std::optional<classify::CoefficientElement> {
    for (std::size_t s = 0; s < a.span.r; ++s) {
      if (a.span.excess[s].i == u && a.span.excess[s].j == v) return a.delta[s];
    }
    return std::nullopt;
  };

  if (d.size() == 1) {
    if (strategy == Strategy::table) {
      cayley_relators(b, f, vertex_mats, letters[0], kTableOrderCap);
    } else {
      steinberg_relators(b, f, PairType::A1, [&](int r, Fq x) {
        return b.generator(root_generator(d.id(0), r == 0 ? 1 : -1, x));
      });
    }
  }

  for (std::size_t u = 0; u < d.size(); ++u) {
    for (std::size_t v = u + 1; v < d.size(); ++v) {
      if (!d.adjacent(u, v)) {
        for (int x : letters[u]) {
          for (int y : letters[v]) b.relator({x, y, -x, -y});
        }
        continue;
      }
      const PairType type = edge_type(d.label(u, v));
      const classify::CoefficientElement delta = excess_delta(u, v).value_or(classify::CoefficientElement{});
      if (strategy == Strategy::table) {
        std::vector<Matrix> images;
        std::vector<int> edge_letters;
        for (std::size_t k = 0; k < vertex_mats.size(); ++k) {
          images.push_back(oracle::embed_vertex(f, type, 0, twist(f, delta, vertex_mats[k])));
          edge_letters.push_back(letters[u][k]);
        }
        for (std::size_t k = 0; k < vertex_mats.size(); ++k) {
          images.push_back(oracle::embed_vertex(f, type, 1, vertex_mats[k]));
          edge_letters.push_back(letters[v][k]);
        }
        cayley_relators(b, f, images, edge_letters, kTableOrderCap);
        continue;
      }
      const RootSystem rs = root_system(f, type);
      const int modulus = f.degree();
      const classify::CoefficientElement undo = classify::inverse(delta, modulus);
      steinberg_relators(b, f, type, [&](int r, Fq x) {
        const bool neg = static_cast<std::size_t>(r) >= rs.positive;
        const int base = static_cast<int>(neg ? r - rs.positive : r);
        const int sign = neg ? -1 : 1;
        if (base == 1) return b.generator(root_generator(d.id(v), sign, x));
        if (base == 0) {
          // realization element phi_0(x_sign(x)) is the abstract delta^-1(x_sign(x))
          return b.generator(apply_coefficient(root_generator(d.id(u), sign, x), undo, f));
        }
        return b.generator(auxiliary_generator(d.id(u), d.id(v), sign, base, x));
      });
    }
  }
  return b.take();
}

// --- Weyl words and user relators -----------------------------------------------------

std::map<std::string, Word> weyl_words(const Presentation& p, int a) {
  if (p.q < 2) throw DomainError("Weyl words need root generators over a known field");
  const Field f(static_cast<int>(p.q));
  if (a <= 0 || a >= f.q()) throw DomainError("field element " + std::to_string(a) + " is not a unit of F_" + std::to_string(p.q));
  const int c = f.neg(f.inv(static_cast<Fq>(a)));
  std::map<std::string, Word> out;
  for (const auto& g : p.generators) {
    if (g.kind != Generator::Kind::root || out.count(g.vertex)) continue;
    const std::string plus = "x" + g.vertex + "p" + std::to_string(a);
    const std::string minus = "x" + g.vertex + "m" + std::to_string(c);
    if (!p.has_generator(plus) || !p.has_generator(minus)) {
      throw DomainError("missing generators for n_" + g.vertex);
    }
    const int xp = static_cast<int>(p.generator_index(plus)) + 1;
    const int xm = static_cast<int>(p.generator_index(minus)) + 1;
    out[g.vertex] = {xp, xm, xp};
  }
  if (out.empty()) throw DomainError("presentation has no root generators");
  return out;
}

namespace {

class WordParser {
 public:
  using Resolver = std::function<std::optional<Word>(const std::string&)>;

  WordParser(std::string_view text, std::size_t line, Resolver resolve)
      : s_(text), line_(line), resolve_(std::move(resolve)) {}

  Word parse() {
    Word w = word();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return free_reduce(std::move(w));
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, pos_ + 1, what); }

  void skip() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }

  static bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

  Word word() {
    Word w;
    bool first = true;
    while (true) {
      skip();
      if (pos_ >= s_.size() || s_[pos_] == ')') break;
      if (!first && s_[pos_] == '*') {
        ++pos_;
        skip();
      }
      Word t = term();
      w.insert(w.end(), t.begin(), t.end());
      first = false;
    }
    if (first) fail("expected a word");
    return w;
  }

  Word term() {
    Word a = atom();
    skip();
    if (pos_ < s_.size() && s_[pos_] == '^') {
      ++pos_;
      skip();
      bool negative = false;
      if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) negative = s_[pos_++] == '-';
      const std::size_t start = pos_;
      long long k = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        k = k * 10 + (s_[pos_++] - '0');
        if (k > 100000) fail("exponent too large");
      }
      if (pos_ == start) fail("expected an exponent");
      const Word base = negative ? inverse(a) : a;
      Word out;
      for (long long i = 0; i < k; ++i) out.insert(out.end(), base.begin(), base.end());
      return out;
    }
    return a;
  }

  Word atom() {
    skip();
    if (pos_ >= s_.size()) fail("expected a symbol");
    if (s_[pos_] == '(') {
      ++pos_;
      Word w = word();
      skip();
      if (pos_ >= s_.size() || s_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return w;
    }
    if (!name_start(s_[pos_])) fail("expected a symbol");
    const std::size_t start = pos_;
    while (pos_ < s_.size() && name_char(s_[pos_])) ++pos_;
    const std::string name(s_.substr(start, pos_ - start));
    auto w = resolve_(name);
    if (!w) {
      pos_ = start;
      fail("unknown symbol '" + name + "'");
    }
    return *w;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_;
  Resolver resolve_;
};

template <class F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t line = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    ++line;
    f(line, text.substr(start, end - start));
    if (end == text.size()) break;
    start = end + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::vector<Word> parse_relators(const Presentation& p, std::string_view text) {
  std::optional<std::map<std::string, Word>> weyl;
  auto resolve = [&](const std::string& name) -> std::optional<Word> {
    for (std::size_t k = 0; k < p.generators.size(); ++k) {
      if (p.generators[k].name == name) return Word{static_cast<int>(k) + 1};
    }
    if (name.size() > 1 && name[0] == 'n') {
      if (!weyl) weyl = weyl_words(p);
      if (auto it = weyl->find(name.substr(1)); it != weyl->end()) return it->second;
    }
    return std::nullopt;
  };
  std::vector<Word> out;
  for_each_line(text, [&](std::size_t line, std::string_view raw) {
    const std::string_view s = trim(raw);
    if (s.empty() || s[0] == '#') return;
    Word w = WordParser(s, line, resolve).parse();
    if (w.empty()) throw ParseError(line, 1, "relator reduces to the empty word");
    out.push_back(std::move(w));
  });
  return out;
}

Presentation add_relators(const Presentation& p, const std::vector<Word>& relators) {
  Presentation out = p;
  for (const auto& r : relators) out.relators.push_back(r);
  validate(out);
  return out;
}

Presentation add_relators(const Presentation& p, std::string_view text) {
  return add_relators(p, parse_relators(p, text));
}

// --- Tietze ---------------------------------------------------------------------------

namespace {

/// Least rotation of w or its inverse.
Word canonical(const Word& w) {
  Word best;
  for (const Word& base : {w, inverse(w)}) {
    for (std::size_t k = 0; k < base.size(); ++k) {
      Word r(base.begin() + static_cast<std::ptrdiff_t>(k), base.end());
      r.insert(r.end(), base.begin(), base.begin() + static_cast<std::ptrdiff_t>(k));
      if (best.empty() || r < best) best = std::move(r);
    }
  }
  return best;
}

std::vector<Word> dedupe(const std::vector<Word>& rels) {
  std::set<Word> seen;
  std::vector<Word> out;
  for (const auto& r : rels) {
    Word c = cyclic_reduce(r);
    if (c.empty()) continue;
    if (seen.insert(canonical(c)).second) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

Presentation simplify(const Presentation& p) {
  Presentation out = p;
  out.relators = dedupe(out.relators);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t g = out.generators.size(); g-- > 0;) {
      if (out.generators[g].kind != Generator::Kind::element) continue;
      const int letter = static_cast<int>(g) + 1;
      std::optional<std::size_t> best;
      for (std::size_t k = 0; k < out.relators.size(); ++k) {
        const auto& r = out.relators[k];
        const auto n = std::count_if(r.begin(), r.end(), [&](int x) { return std::abs(x) == letter; });
        if (n == 1 && (!best || r.size() < out.relators[*best].size())) best = k;
      }
      if (!best) continue;
      const Word r = out.relators[*best];
      const std::size_t at = static_cast<std::size_t>(
          std::find_if(r.begin(), r.end(), [&](int x) { return std::abs(x) == letter; }) - r.begin());
      Word rest(r.begin() + static_cast<std::ptrdiff_t>(at) + 1, r.end());
      rest.insert(rest.end(), r.begin(), r.begin() + static_cast<std::ptrdiff_t>(at));
      // g^e * rest = 1
      const Word value = r[at] > 0 ? inverse(rest) : rest;
      std::vector<Word> rels;
      for (std::size_t k = 0; k < out.relators.size(); ++k) {
        if (k == *best) continue;
        Word w;
        for (int x : out.relators[k]) {
          if (x == letter) {
            w.insert(w.end(), value.begin(), value.end());
          } else if (x == -letter) {
            const Word inv = inverse(value);
            w.insert(w.end(), inv.begin(), inv.end());
          } else {
            w.push_back(std::abs(x) > letter ? (x > 0 ? x - 1 : x + 1) : x);
          }
        }
        for (auto& x : w) {
          if (std::abs(x) > letter) x = x > 0 ? x - 1 : x + 1;
        }
        rels.push_back(std::move(w));
      }
      out.generators.erase(out.generators.begin() + static_cast<std::ptrdiff_t>(g));
      out.relators = dedupe(rels);
      changed = true;
    }
  }
  return out;
}

// --- abelianization -----------------------------------------------------------------

std::string AbelianInvariants::to_string() const {
  std::string s = "[";
  for (std::size_t k = 0; k < factors.size(); ++k) s += (k ? ", " : "") + factors[k].get_str();
  return s + "]";
}

AbelianInvariants abelianization(const Presentation& p) {
  validate(p);
  const std::size_t n = p.generators.size();
  using Row = std::vector<mpz_class>;
  // integer echelon basis of the relation lattice, pivots strictly increasing
  std::vector<Row> basis;
  std::vector<std::size_t> pivot;
  for (const auto& r : p.relators) {
    Row row(n, 0);
    for (int x : r) row[static_cast<std::size_t>(std::abs(x) - 1)] += x > 0 ? 1 : -1;
    for (std::size_t col = 0; col < n; ++col) {
      if (row[col] == 0) continue;
      auto it = std::lower_bound(pivot.begin(), pivot.end(), col);
      const std::size_t k = static_cast<std::size_t>(it - pivot.begin());
      if (it == pivot.end() || *it != col) {
        pivot.insert(it, col);
        basis.insert(basis.begin() + static_cast<std::ptrdiff_t>(k), std::move(row));
        break;
      }
      Row& b = basis[k];
      mpz_class g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), b[col].get_mpz_t(), row[col].get_mpz_t());
      const mpz_class bc = b[col] / g;
      const mpz_class rc = row[col] / g;
      Row nb(n), nr(n);
      for (std::size_t j = 0; j < n; ++j) {
        nb[j] = s * b[j] + t * row[j];
        nr[j] = bc * row[j] - rc * b[j];
      }
      b = std::move(nb);
      row = std::move(nr);
    }
  }
  // Smith normal form of the (rank x n) echelon matrix
  std::vector<Row> m = basis;
  const std::size_t rows = m.size();
  std::vector<mpz_class> diag;
  for (std::size_t t = 0; t < rows; ++t) {
    while (true) {
      // smallest non-zero entry of the trailing block
      std::optional<std::pair<std::size_t, std::size_t>> at;
      for (std::size_t i = t; i < rows; ++i) {
        for (std::size_t j = t; j < n; ++j) {
          if (m[i][j] != 0 && (!at || abs(m[i][j]) < abs(m[at->first][at->second]))) at = std::pair(i, j);
        }
      }
      if (!at) break;
      std::swap(m[t], m[at->first]);
      for (auto& row : m) std::swap(row[t], row[at->second]);
      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        const mpz_class qt = m[i][t] / m[t][t];
        if (qt != 0) {
          for (std::size_t j = t; j < n; ++j) m[i][j] -= qt * m[t][j];
        }
        if (m[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        const mpz_class qt = m[t][j] / m[t][t];
        if (qt != 0) {
          for (std::size_t i = t; i < rows; ++i) m[i][j] -= qt * m[i][t];
        }
        if (m[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      // divisibility: fold a violating row into row t
      std::optional<std::size_t> bad;
      for (std::size_t i = t + 1; i < rows && !bad; ++i) {
        for (std::size_t j = t + 1; j < n; ++j) {
          if (m[i][j] % m[t][t] != 0) {
            bad = i;
            break;
          }
        }
      }
      if (!bad) break;
      for (std::size_t j = t; j < n; ++j) m[t][j] += m[*bad][j];
    }
    if (m[t][t] == 0) break;
    diag.push_back(abs(m[t][t]));
  }
  AbelianInvariants out;
  for (const auto& d : diag) {
    if (d != 1) out.factors.push_back(d);
  }
  for (std::size_t k = diag.size(); k < n; ++k) out.factors.push_back(0);
  return out;
}

// --- export ---------------------------------------------------------------------------

std::string export_neutral(const Presentation& p) {
  validate(p);
  std::ostringstream out;
  if (!p.source.empty()) out << "# " << p.source << '\n';
  if (p.q) out << "field " << p.q << '\n';
  if (!p.strategy.empty()) out << "strategy " << p.strategy << '\n';
  for (const auto& g : p.generators) out << "gen " << g.name << '\n';
  for (const auto& r : p.relators) out << "rel " << word_to_string(p, r) << '\n';
  return out.str();
}

namespace {

const std::regex kAuxiliaryName(R"(z(.+)_(.+)([pm])(\d+)e(\d+))");

/// Recovers root/unitary/auxiliary tags from generator names.
Generator tag_from_name(const std::string& name) {
  Generator g;
  g.name = name;
  g.kind = Generator::Kind::element;
  auto digits = [](std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
  };
  if (name.size() > 3 && name[0] == 'x') {
    for (std::size_t k = name.size() - 1; k > 1; --k) {
      const char c = name[k];
      if (!std::isdigit(static_cast<unsigned char>(c))) {
        if ((c == 'p' || c == 'm' || c == 'u') && digits(std::string_view(name).substr(k + 1))) {
          g.vertex = name.substr(1, k - 1);
          g.element = std::stoi(name.substr(k + 1));
          if (c == 'u') {
            g.kind = Generator::Kind::unitary;
          } else {
            g.kind = Generator::Kind::root;
            g.sign = c == 'p' ? 1 : -1;
          }
        }
        break;
      }
    }
  } else if (std::smatch m; std::regex_match(name, m, kAuxiliaryName)) {
    g.kind = Generator::Kind::auxiliary;
    g.vertex = m[1].str() + "_" + m[2].str();
    g.sign = m[3] == "p" ? 1 : -1;
    g.root = std::stoi(m[4]);
    g.element = std::stoi(m[5]);
  } else if (name.size() > 1 && name[0] == 'g' && digits(std::string_view(name).substr(1))) {
    g.element = std::stoi(name.substr(1));
  }
  return g;
}

}  // namespace

Presentation parse_neutral(std::string_view text) {
  Presentation p;
  std::unordered_map<std::string, int> index;
  auto resolve = [&](const std::string& name) -> std::optional<Word> {
    if (auto it = index.find(name); it != index.end()) return Word{it->second};
    return std::nullopt;
  };
  for_each_line(text, [&](std::size_t line, std::string_view raw) {
    const std::string_view s = trim(raw);
    if (!s.empty() && s[0] == '#' && p.source.empty() && p.generators.empty()) p.source = std::string(trim(s.substr(1)));
    if (s.empty() || s[0] == '#') return;
    const std::size_t sp = s.find_first_of(" \t");
    const std::string_view kw = s.substr(0, sp);
    const std::string_view rest = sp == std::string_view::npos ? std::string_view{} : trim(s.substr(sp));
    if (rest.empty()) throw ParseError(line, 1, "'" + std::string(kw) + "' needs an argument");
    const std::size_t col = static_cast<std::size_t>(rest.data() - raw.data()) + 1;
    if (kw == "gen") {
      if (!p.relators.empty()) throw ParseError(line, 1, "generators must precede relators");
      const std::string name(rest);
      if (!std::all_of(name.begin(), name.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
          }) ||
          !(std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_')) {
        throw ParseError(line, col, "invalid generator name '" + name + "'");
      }
      if (index.count(name)) throw ParseError(line, col, "duplicate generator '" + name + "'");
      p.generators.push_back(tag_from_name(name));
      index.emplace(name, static_cast<int>(p.generators.size()));
    } else if (kw == "rel") {
      Word w;
      try {
        w = WordParser(rest, line, resolve).parse();
      } catch (const ParseError& e) {
        throw ParseError(line, col + e.column() - 1, std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
      }
      if (w.empty()) throw ParseError(line, col, "relator reduces to the empty word");
      p.relators.push_back(std::move(w));
    } else if (kw == "field") {
      try {
        p.q = std::stoll(std::string(rest));
      } catch (const std::exception&) {
        throw ParseError(line, col, "expected an integer");
      }
      if (!oracle::prime_power(p.q)) throw ParseError(line, col, std::string(rest) + " is not a prime power");
    } else if (kw == "strategy") {
      p.strategy = std::string(rest);
    } else {
      throw ParseError(line, 1, "unknown directive '" + std::string(kw) + "'");
    }
  });
  validate(p);
  return p;
}

std::string export_gap(const Presentation& p) {
  validate(p);
  std::ostringstream out;
  if (!p.source.empty()) out << "# " << p.source << '\n';
  out << "F := FreeGroup(";
  if (p.generators.empty()) out << '0';
  for (std::size_t k = 0; k < p.generators.size(); ++k) out << (k ? ", " : "") << '"' << p.generators[k].name << '"';
  out << ");;\n";
  if (p.relators.empty()) {
    out << "rels := [];;\n";
  } else {
    out << "rels := [\n";
    for (std::size_t k = 0; k < p.relators.size(); ++k) {
      const Word& r = p.relators[k];
      out << "  ";
      for (std::size_t i = 0; i < r.size();) {
        std::size_t j = i;
        while (j < r.size() && r[j] == r[i]) ++j;
        const long run = static_cast<long>(j - i) * (r[i] > 0 ? 1 : -1);
        if (i) out << '*';
        out << "F." << std::abs(r[i]);
        if (run != 1) out << '^' << run;
        i = j;
      }
      out << (k + 1 < p.relators.size() ? ",\n" : "\n");
    }
    out << "];;\n";
  }
  out << "G := F/rels;;\n";
  return out.str();
}

}  // namespace amalgam::presentation
