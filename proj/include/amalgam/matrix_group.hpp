#pragma once

// Small matrix groups over F_q: closure, the involutions tau/sigma/theta,
// fixed subgroups and the concrete standard pairs used as ground truth by
// the presentation module.

#include <array>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "amalgam/field.hpp"

namespace amalgam::oracle {

inline constexpr std::size_t kDefaultGroupCap = 100000;

/// n x n matrix (n <= 4), row-major.
struct Matrix {
  int n = 0;
  std::array<Fq, 16> e{};

  Fq at(int i, int j) const { return e[i * 4 + j]; }
  Fq& at(int i, int j) { return e[i * 4 + j]; }
  bool operator==(const Matrix&) const = default;
  auto operator<=>(const Matrix&) const = default;
};

struct MatrixHash {
  std::size_t operator()(const Matrix& m) const noexcept;
};

Matrix identity(int n);
/// Integer entries reduced into the prime field of `f`.
Matrix from_integers(const Field& f, int n, const std::vector<int>& rows);
Matrix multiply(const Field& f, const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
/// Throws DomainError on singular input.
Matrix inverse(const Field& f, const Matrix& a);
Fq determinant(const Field& f, const Matrix& a);
/// Entrywise x -> x^(p^k).
Matrix frobenius(const Field& f, const Matrix& a, long long k);
/// I + a*X for an integer nilpotent pattern X.
Matrix unipotent(const Field& f, const Matrix& pattern, Fq a);

enum class Involution { identity, tau, sigma, theta };

/// tau = transpose-inverse, sigma = entrywise x -> x^sqrt(q), theta = sigma o tau.
/// sigma and theta throw DomainError over a non-square field.
Matrix apply(const Field& f, Involution kind, const Matrix& m);

/// "[F4[x^2+x+1]] 1 0 / 2 1" style rendering; rows separated by " / ".
std::string serialize(const Field& f, const Matrix& m);

class MatrixGroup {
 public:
  MatrixGroup(Field field, std::vector<Matrix> elements);

  const Field& field() const noexcept { return field_; }
  const std::vector<Matrix>& elements() const noexcept { return elements_; }
  std::size_t order() const noexcept { return elements_.size(); }
  bool contains(const Matrix& m) const { return index_.count(m) != 0; }
  /// Position in elements(); throws DomainError if absent.
  std::size_t index_of(const Matrix& m) const;
  /// Same element set (order ignored).
  bool same_elements(const MatrixGroup& other) const;

 private:
  Field field_;
  std::vector<Matrix> elements_;
  std::unordered_map<Matrix, std::size_t, MatrixHash> index_;
};

/// BFS closure from the identity under right multiplication by the
/// generators. Throws CapExceeded once more than `cap` elements appear.
MatrixGroup generate_group(const Field& f, const std::vector<Matrix>& generators, std::size_t cap = kDefaultGroupCap);

/// {x : kind(x) = x}; throws DomainError if `g` is not closed under
/// multiplication or the result is not a subgroup.
MatrixGroup fixed_subgroup(const MatrixGroup& g, Involution kind);

/// All n x n matrices of determinant 1 that preserve the standard hermitian
/// form (m sigma(m)^T = I) and, if `symplectic`, the form J = antidiag(1,1,-1,-1).
MatrixGroup enumerate_unitary(const Field& f, int n, bool symplectic, std::size_t cap = kDefaultGroupCap);

/// The alternating form J used for Sp4.
Matrix symplectic_form(const Field& f);

enum class PairType { A1, A1xA1, A2, C2 };
enum class Flavor { CurtisTits, Phan };

std::string to_string(PairType t);
std::string to_string(Flavor f);

/// Concrete rank <= 2 group with its distinguished rank-1 subgroups.
///
/// Curtis-Tits pairs live over F_q: A1 -> SL2, A2 -> SL3 with the two block
/// SL2s, C2 -> Sp4 with J = antidiag(1,1,-1,-1), A1xA1 -> block diagonal
/// SL2 x SL2 in 4 x 4 matrices. In C2 the first vertex carries the long root
/// (I + aE_{12}) and the second the short root (I + a(E_{01} - E_{23})).
/// Phan pairs live over F_{q^2} and are the theta-fixed points of the
/// corresponding Curtis-Tits pair there.
struct StandardPair {
  PairType type = PairType::A1;
  Flavor flavor = Flavor::CurtisTits;
  int q = 2;
  Field field{2};
  MatrixGroup group{Field{2}, {}};
  std::vector<MatrixGroup> vertex_groups;
  /// Elements generating `group`: vertex generators followed by extras if
  /// the vertex groups alone generate a proper subgroup.
  std::vector<Matrix> generators;
  std::size_t extra_generators = 0;
  /// Generating subsets of each vertex group (root elements for CT).
  std::vector<std::vector<Matrix>> vertex_generators;
};

StandardPair standard_pair_realization(PairType type, int q, Flavor flavor, std::size_t cap = kDefaultGroupCap);

/// Root element x^{sign}(a) of vertex 0 or 1 inside the Curtis-Tits realization
/// (sign +1 upper, -1 lower = transpose).
Matrix root_element(const Field& f, PairType type, int vertex, int sign, Fq a);

/// Integer nilpotent patterns X_r for the root system of the pair; positive
/// roots first in the order simple_0, simple_1, then higher roots; negatives
/// are the transposes in the same order. A1xA1 and A1 only have simple roots.
std::vector<Matrix> root_patterns(const Field& f, PairType type);
int matrix_size(PairType type);

/// Image of a 2 x 2 matrix under the embedding of SL2 as the rank-1 subgroup
/// of `vertex`; sends x^{+-}(a) to root_element(f, type, vertex, +-1, a).
Matrix embed_vertex(const Field& f, PairType type, int vertex, const Matrix& m);

}  // namespace amalgam::oracle
