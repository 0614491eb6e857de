#include "amalgam/matrix_group.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "amalgam/error.hpp"

namespace amalgam::oracle {

std::size_t MatrixHash::operator()(const Matrix& m) const noexcept {
  std::size_t h = static_cast<std::size_t>(m.n);
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) h = h * 1000003u ^ m.at(i, j);
  }
  return h;
}

Matrix identity(int n) {
  Matrix m;
  m.n = n;
  for (int i = 0; i < n; ++i) m.at(i, i) = 1;
  return m;
}

namespace {

Fq from_int(const Field& f, int v) {
  const int p = f.p();
  return static_cast<Fq>(((v % p) + p) % p);
}

}  // namespace

Matrix from_integers(const Field& f, int n, const std::vector<int>& rows) {
  if (rows.size() != static_cast<std::size_t>(n * n)) throw DomainError("matrix needs n*n entries");
  Matrix m;
  m.n = n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m.at(i, j) = from_int(f, rows[i * n + j]);
  }
  return m;
}

Matrix multiply(const Field& f, const Matrix& a, const Matrix& b) {
  Matrix c;
  c.n = a.n;
  for (int i = 0; i < a.n; ++i) {
    for (int j = 0; j < a.n; ++j) {
      Fq s = 0;
      for (int k = 0; k < a.n; ++k) s = f.add(s, f.mul(a.at(i, k), b.at(k, j)));
      c.at(i, j) = s;
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t;
  t.n = a.n;
  for (int i = 0; i < a.n; ++i) {
    for (int j = 0; j < a.n; ++j) t.at(j, i) = a.at(i, j);
  }
  return t;
}

Matrix inverse(const Field& f, const Matrix& a) {
  const int n = a.n;
  Matrix m = a;
  Matrix r = identity(n);
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    while (pivot < n && m.at(pivot, col) == 0) ++pivot;
    if (pivot == n) throw DomainError("singular matrix");
    for (int j = 0; j < n; ++j) {
      std::swap(m.at(col, j), m.at(pivot, j));
      std::swap(r.at(col, j), r.at(pivot, j));
    }
    const Fq s = f.inv(m.at(col, col));
    for (int j = 0; j < n; ++j) {
      m.at(col, j) = f.mul(m.at(col, j), s);
      r.at(col, j) = f.mul(r.at(col, j), s);
    }
    for (int i = 0; i < n; ++i) {
      if (i == col || m.at(i, col) == 0) continue;
      const Fq factor = m.at(i, col);
      for (int j = 0; j < n; ++j) {
        m.at(i, j) = f.sub(m.at(i, j), f.mul(factor, m.at(col, j)));
        r.at(i, j) = f.sub(r.at(i, j), f.mul(factor, r.at(col, j)));
      }
    }
  }
  return r;
}

Fq determinant(const Field& f, const Matrix& a) {
  const int n = a.n;
  Matrix m = a;
  Fq det = 1;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    while (pivot < n && m.at(pivot, col) == 0) ++pivot;
    if (pivot == n) return 0;
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(m.at(col, j), m.at(pivot, j));
      det = f.neg(det);
    }
    det = f.mul(det, m.at(col, col));
    const Fq s = f.inv(m.at(col, col));
    for (int i = col + 1; i < n; ++i) {
      if (m.at(i, col) == 0) continue;
      const Fq factor = f.mul(m.at(i, col), s);
      for (int j = col; j < n; ++j) m.at(i, j) = f.sub(m.at(i, j), f.mul(factor, m.at(col, j)));
    }
  }
  return det;
}

Matrix frobenius(const Field& f, const Matrix& a, long long k) {
  Matrix m = a;
  for (int i = 0; i < a.n; ++i) {
    for (int j = 0; j < a.n; ++j) m.at(i, j) = f.frobenius(a.at(i, j), k);
  }
  return m;
}

Matrix unipotent(const Field& f, const Matrix& pattern, Fq a) {
  Matrix m = identity(pattern.n);
  for (int i = 0; i < pattern.n; ++i) {
    for (int j = 0; j < pattern.n; ++j) {
      if (pattern.at(i, j) != 0) m.at(i, j) = f.add(m.at(i, j), f.mul(pattern.at(i, j), a));
    }
  }
  return m;
}

Matrix apply(const Field& f, Involution kind, const Matrix& m) {
  switch (kind) {
    case Involution::identity:
      return m;
    case Involution::tau:
      return transpose(inverse(f, m));
    case Involution::sigma:
      if (!f.is_square_field()) throw DomainError(f.describe() + " is not a square field; sigma undefined");
      return frobenius(f, m, f.degree() / 2);
    case Involution::theta:
      return apply(f, Involution::sigma, apply(f, Involution::tau, m));
  }
  return m;
}

std::string serialize(const Field& f, const Matrix& m) {
  std::ostringstream out;
  out << '[' << f.describe() << ']';
  for (int i = 0; i < m.n; ++i) {
    if (i > 0) out << " /";
    for (int j = 0; j < m.n; ++j) out << ' ' << static_cast<int>(m.at(i, j));
  }
  return out.str();
}

MatrixGroup::MatrixGroup(Field field, std::vector<Matrix> elements)
    : field_(std::move(field)), elements_(std::move(elements)) {
  index_.reserve(elements_.size());
  for (std::size_t i = 0; i < elements_.size(); ++i) index_.emplace(elements_[i], i);
}

std::size_t MatrixGroup::index_of(const Matrix& m) const {
  const auto it = index_.find(m);
  if (it == index_.end()) throw DomainError("matrix not in group: " + serialize(field_, m));
  return it->second;
}

bool MatrixGroup::same_elements(const MatrixGroup& other) const {
  if (order() != other.order()) return false;
  return std::all_of(elements_.begin(), elements_.end(), [&](const Matrix& m) { return other.contains(m); });
}

MatrixGroup generate_group(const Field& f, const std::vector<Matrix>& generators, std::size_t cap) {
  if (generators.empty()) throw DomainError("generate_group needs at least one generator");
  const int n = generators.front().n;
  std::vector<Matrix> elements{identity(n)};
  std::unordered_map<Matrix, std::size_t, MatrixHash> seen{{elements.front(), 0}};
  for (std::size_t head = 0; head < elements.size(); ++head) {
    for (const Matrix& g : generators) {
      Matrix next = multiply(f, elements[head], g);
      if (seen.count(next)) continue;
      if (elements.size() >= cap) {
        throw CapExceeded("group closure exceeded cap of " + std::to_string(cap) + " elements");
      }
      seen.emplace(next, elements.size());
      elements.push_back(next);
    }
  }
  return MatrixGroup(f, std::move(elements));
}

MatrixGroup fixed_subgroup(const MatrixGroup& g, Involution kind) {
  const Field& f = g.field();
  std::vector<Matrix> fixed;
  for (const Matrix& m : g.elements()) {
    if (apply(f, kind, m) == m) fixed.push_back(m);
  }
  // Closure of the input is checked on a greedy generating set of the whole
  // group: the products g*s for s in the set must stay inside.
  std::vector<Matrix> gens;
  {
    std::unordered_map<Matrix, std::size_t, MatrixHash> reached;
    std::size_t reached_count = 0;
    for (const Matrix& m : g.elements()) {
      if (reached.count(m)) continue;
      gens.push_back(m);
      MatrixGroup sub = generate_group(f, gens, g.order() + 1);
      for (const Matrix& x : sub.elements()) reached.emplace(x, 0);
      reached_count = reached.size();
      if (reached_count >= g.order()) break;
    }
  }
  for (const Matrix& m : g.elements()) {
    for (const Matrix& s : gens) {
      if (!g.contains(multiply(f, m, s))) throw DomainError("input element set is not closed under multiplication");
    }
  }
  MatrixGroup result(f, fixed);
  for (const Matrix& a : fixed) {
    if (!result.contains(inverse(f, a))) throw DomainError("fixed set is not a subgroup");
    for (const Matrix& b : fixed) {
      if (!result.contains(multiply(f, a, b))) throw DomainError("fixed set is not a subgroup");
    }
  }
  return result;
}

Matrix symplectic_form(const Field& f) { return from_integers(f, 4, {0, 0, 0, 1, 0, 0, 1, 0, 0, -1, 0, 0, -1, 0, 0, 0}); }

MatrixGroup enumerate_unitary(const Field& f, int n, bool symplectic, std::size_t cap) {
  if (!f.is_square_field()) throw DomainError("unitary groups need a square field");
  if (symplectic && n != 4) throw DomainError("symplectic unitary enumeration is only defined for n = 4");
  const int q = f.q();
  const Matrix j = symplectic ? symplectic_form(f) : identity(n);
  using Vec = std::array<Fq, 4>;
  auto herm = [&](const Vec& a, const Vec& b) {
    Fq s = 0;
    for (int k = 0; k < n; ++k) s = f.add(s, f.mul(a[k], f.sigma(b[k])));
    return s;
  };
  auto alt = [&](const Vec& a, const Vec& b) {
    Fq s = 0;
    for (int r = 0; r < n; ++r) {
      for (int c = 0; c < n; ++c) {
        if (j.at(r, c) != 0) s = f.add(s, f.mul(j.at(r, c), f.mul(a[r], b[c])));
      }
    }
    return s;
  };
  std::vector<Vec> unit;
  long long total = 1;
  for (int k = 0; k < n; ++k) total *= q;
  for (long long idx = 0; idx < total; ++idx) {
    Vec v{};
    long long rest = idx;
    for (int k = 0; k < n; ++k) {
      v[k] = static_cast<Fq>(rest % q);
      rest /= q;
    }
    if (herm(v, v) == 1) unit.push_back(v);
  }
  std::vector<Matrix> result;
  std::vector<Vec> rows(n);
  auto recurse = [&](auto&& self, int row) -> void {
    if (row == n) {
      Matrix m;
      m.n = n;
      for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) m.at(r, c) = rows[r][c];
      }
      if (determinant(f, m) != 1) return;
      if (result.size() >= cap) throw CapExceeded("unitary enumeration exceeded cap of " + std::to_string(cap));
      result.push_back(m);
      return;
    }
    for (const Vec& v : unit) {
      bool ok = true;
      for (int r = 0; r < row && ok; ++r) {
        ok = herm(rows[r], v) == 0;
        if (ok && symplectic) ok = alt(rows[r], v) == j.at(r, row) && alt(v, rows[r]) == j.at(row, r);
      }
      if (!ok) continue;
      rows[row] = v;
      self(self, row + 1);
    }
  };
  recurse(recurse, 0);
  std::sort(result.begin(), result.end());
  return MatrixGroup(f, std::move(result));
}

std::string to_string(PairType t) {
  switch (t) {
    case PairType::A1:
      return "A1";
    case PairType::A1xA1:
      return "A1xA1";
    case PairType::A2:
      return "A2";
    case PairType::C2:
      return "C2";
  }
  return "?";
}

std::string to_string(Flavor f) { return f == Flavor::CurtisTits ? "CT" : "Phan"; }

int matrix_size(PairType type) {
  switch (type) {
    case PairType::A1:
      return 2;
    case PairType::A2:
      return 3;
    case PairType::A1xA1:
    case PairType::C2:
      return 4;
  }
  return 0;
}

std::vector<Matrix> root_patterns(const Field& f, PairType type) {
  std::vector<Matrix> pos;
  auto pattern = [&](int n, std::initializer_list<std::array<int, 3>> entries) {
    std::vector<int> v(n * n, 0);
    for (const auto& [r, c, val] : entries) v[r * n + c] = val;
    return from_integers(f, n, v);
  };
  switch (type) {
    case PairType::A1:
      pos = {pattern(2, {{0, 1, 1}})};
      break;
    case PairType::A1xA1:
      pos = {pattern(4, {{0, 1, 1}}), pattern(4, {{2, 3, 1}})};
      break;
    case PairType::A2:
      pos = {pattern(3, {{0, 1, 1}}), pattern(3, {{1, 2, 1}}), pattern(3, {{0, 2, 1}})};
      break;
    case PairType::C2:
      pos = {pattern(4, {{1, 2, 1}}), pattern(4, {{0, 1, 1}, {2, 3, -1}}), pattern(4, {{0, 2, 1}, {1, 3, 1}}),
             pattern(4, {{0, 3, 1}})};
      break;
  }
  std::vector<Matrix> all = pos;
  for (const Matrix& m : pos) all.push_back(transpose(m));
  return all;
}

Matrix root_element(const Field& f, PairType type, int vertex, int sign, Fq a) {
  const std::vector<Matrix> patterns = root_patterns(f, type);
  const std::size_t positive = patterns.size() / 2;
  if (vertex < 0 || static_cast<std::size_t>(vertex) >= std::min<std::size_t>(positive, 2)) {
    throw DomainError("pair " + to_string(type) + " has no vertex " + std::to_string(vertex));
  }
  return unipotent(f, patterns[(sign > 0 ? 0 : positive) + vertex], a);
}

Matrix embed_vertex(const Field& f, PairType type, int vertex, const Matrix& m) {
  if (m.n != 2) throw DomainError("embed_vertex expects a 2 x 2 matrix");
  const int vertices = type == PairType::A1 ? 1 : 2;
  if (vertex < 0 || vertex >= vertices) throw DomainError("pair " + to_string(type) + " has no vertex " + std::to_string(vertex));
  Matrix out = identity(matrix_size(type));
  auto place = [&](int at, const Matrix& b) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) out.at(at + i, at + j) = b.at(i, j);
    }
  };
  switch (type) {
    case PairType::A1:
      return m;
    case PairType::A2:
      place(vertex, m);
      break;
    case PairType::A1xA1:
      place(2 * vertex, m);
      break;
    case PairType::C2:
      if (vertex == 0) {
        place(1, m);
      } else {
        // the short root acts on the second block conjugated by diag(1, -1)
        Matrix twisted = m;
        twisted.at(0, 1) = f.neg(m.at(0, 1));
        twisted.at(1, 0) = f.neg(m.at(1, 0));
        place(0, m);
        place(2, twisted);
      }
      break;
  }
  return out;
}

namespace {

std::vector<Matrix> vertex_root_elements(const Field& f, PairType type, int vertex) {
  std::vector<Matrix> gens;
  for (int sign : {1, -1}) {
    for (int a = 1; a < f.q(); ++a) gens.push_back(root_element(f, type, vertex, sign, static_cast<Fq>(a)));
  }
  return gens;
}

/// Adds elements of `group` (in its order) to `gens` until they generate it.
std::size_t complete_generators(const MatrixGroup& group, std::vector<Matrix>& gens, std::size_t cap) {
  std::size_t extras = 0;
  MatrixGroup current = generate_group(group.field(), gens, cap);
  for (const Matrix& m : group.elements()) {
    if (current.order() == group.order()) break;
    if (current.contains(m)) continue;
    gens.push_back(m);
    ++extras;
    current = generate_group(group.field(), gens, cap);
  }
  if (!current.same_elements(group)) throw DomainError("generators escape the realized group");
  return extras;
}

/// Greedy generating subset of a group, scanning its elements in order.
std::vector<Matrix> greedy_generators(const MatrixGroup& group, std::size_t cap) {
  std::vector<Matrix> gens;
  std::size_t reached = 1;
  for (const Matrix& m : group.elements()) {
    if (reached == group.order()) break;
    if (m == identity(m.n)) continue;
    std::vector<Matrix> trial = gens;
    trial.push_back(m);
    const std::size_t order = generate_group(group.field(), trial, cap).order();
    if (order > reached) {
      gens = std::move(trial);
      reached = order;
    }
  }
  return gens;
}

}  // namespace

StandardPair standard_pair_realization(PairType type, int q, Flavor flavor, std::size_t cap) {
  StandardPair pair;
  pair.type = type;
  pair.flavor = flavor;
  pair.q = q;
  const int vertices = type == PairType::A1 ? 1 : 2;
  if (flavor == Flavor::CurtisTits) {
    pair.field = Field(q);
    for (int v = 0; v < vertices; ++v) {
      pair.vertex_generators.push_back(vertex_root_elements(pair.field, type, v));
      pair.vertex_groups.push_back(generate_group(pair.field, pair.vertex_generators.back(), cap));
      for (const Matrix& g : pair.vertex_generators.back()) pair.generators.push_back(g);
    }
    pair.group = generate_group(pair.field, pair.generators, cap);
    return pair;
  }

  const auto pf = prime_power(q);
  if (!pf) throw DomainError(std::to_string(q) + " is not a prime power");
  if (static_cast<long long>(q) * q > 256) throw DomainError("Phan realization over F_" + std::to_string(q * q) + " is unsupported");
  pair.field = Field(q * q);
  for (int v = 0; v < vertices; ++v) {
    const MatrixGroup ct_vertex = generate_group(pair.field, vertex_root_elements(pair.field, type, v), cap);
    pair.vertex_groups.push_back(fixed_subgroup(ct_vertex, Involution::theta));
    pair.vertex_generators.push_back(greedy_generators(pair.vertex_groups.back(), cap));
    for (const Matrix& g : pair.vertex_generators.back()) pair.generators.push_back(g);
  }
  switch (type) {
    case PairType::A1:
    case PairType::A1xA1:
      pair.group = generate_group(pair.field, pair.generators, cap);
      break;
    case PairType::A2:
      pair.group = enumerate_unitary(pair.field, 3, false, cap);
      break;
    case PairType::C2:
      pair.group = enumerate_unitary(pair.field, 4, true, cap);
      break;
  }
  pair.extra_generators = complete_generators(pair.group, pair.generators, cap);
  return pair;
}

}  // namespace amalgam::oracle
