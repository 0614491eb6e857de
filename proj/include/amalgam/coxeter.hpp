#pragma once

// Coxeter groups of crystallographic diagrams, computed exactly in the
// integer reflection representation on the root lattice.

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "amalgam/diagram.hpp"

namespace amalgam::coxeter {

/// Generator indices 0..n-1 (the diagram's vertex order). Serialized 1-based.
using Word = std::vector<int>;

inline constexpr std::size_t kDefaultBallCap = 1000000;

/// Action of an element's inverse on the simple roots: column j holds
/// w^{-1}(alpha_j) in the basis of simple roots.
struct Element {
  std::vector<std::int64_t> m;
  bool operator==(const Element&) const = default;
  auto operator<=>(const Element&) const = default;
};

class CoxeterSystem {
 public:
  /// Labels 2, 3, 4, 6 only. For an m=4 (m=6) edge i<j the first vertex
  /// carries the long root: a_ij = -1 and a_ji = -2 (-3).
  explicit CoxeterSystem(const diagram::Diagram& d);
  /// Any generalized Cartan matrix (diagonal 2, off-diagonal <= 0, zero pattern symmetric).
  explicit CoxeterSystem(std::vector<std::vector<int>> cartan);

  std::size_t rank() const noexcept { return n_; }
  const std::vector<std::vector<int>>& cartan() const noexcept { return cartan_; }
  /// Coxeter label m_ij (0 = infinity).
  int label(std::size_t i, std::size_t j) const;

  Element identity() const;
  Element element(const Word& w) const;
  /// w -> s_i w
  Element left_multiply(const Element& e, int i) const;
  /// w -> w s_i
  Element right_multiply(const Element& e, int i) const;
  /// l(s_i w) < l(w)
  bool is_left_descent(const Element& e, int i) const;

  std::size_t length(const Word& w) const;
  std::size_t length(const Element& e) const;
  bool is_reduced(const Word& w) const { return length(w) == w.size(); }
  /// ShortLex-least reduced word (generator 0 < 1 < ...).
  Word normal_form(const Word& w) const;
  Word normal_form(const Element& e) const;
  Word multiply(const Word& u, const Word& v) const;
  Word inverse(const Word& w) const;
  bool equal(const Word& u, const Word& v) const { return element(u) == element(v); }

 private:
  void check_generator(int i) const;
  std::size_t n_ = 0;
  std::vector<std::vector<int>> cartan_;
};

/// Elements of length <= R in normal form; result[l] lists those of length l
/// in ShortLex order. Throws CapExceeded beyond `cap` elements.
std::vector<std::vector<Word>> enumerate_ball(const CoxeterSystem& sys, std::size_t radius,
                                              std::size_t cap = kDefaultBallCap);

std::vector<std::size_t> ball_counts(const CoxeterSystem& sys, std::size_t radius, std::size_t cap = kDefaultBallCap);

/// "1.2.1"; the identity is "e".
std::string to_string(const Word& w);
/// Inverse of to_string; throws DomainError on malformed input.
Word parse_word(const std::string& text, std::size_t rank);

// --- twisted involutions ---------------------------------------------------------

/// A permutation of the generators.
using DiagramInvolution = std::vector<int>;

/// Throws DomainError unless `theta` is an involutive automorphism of the
/// labels without fixed vertices or fixed edges.
void require_fixed_point_free(const CoxeterSystem& sys, const DiagramInvolution& theta);

Word apply_theta(const DiagramInvolution& theta, const Word& w);

struct TwistedReport {
  std::set<Word> inv;           // normal forms u with l(u) <= R and u^theta = u^{-1}
  std::set<Word> delta_image;   // normal forms of w (w^{-1})^theta, l(w) <= R, truncated to length <= R
  bool equal_up_to_R = false;
};

TwistedReport twisted_involutions(const CoxeterSystem& sys, const DiagramInvolution& theta, std::size_t radius,
                                  std::size_t cap = kDefaultBallCap);

/// w with u = w (w^{-1})^theta and l(u) = 2 l(w). Throws DomainError if `u`
/// is not a twisted involution or no decomposition exists.
Word twisted_decomposition(const CoxeterSystem& sys, const DiagramInvolution& theta, const Word& u);

}  // namespace amalgam::coxeter
