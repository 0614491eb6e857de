#pragma once

// Poincare polynomials, growth series via Steinberg's alternating sum over
// spherical subsets, certified growth rates and the lattice criterion.

#include <gmpxx.h>

#include <cstddef>
#include <string>
#include <vector>

#include "amalgam/diagram.hpp"

namespace amalgam::growth {

/// Integer polynomial, lowest degree first, no trailing zeros (zero = empty).
using Poly = std::vector<mpz_class>;

Poly trim(Poly p);
int degree(const Poly& p);  // -1 for zero
Poly add(const Poly& a, const Poly& b);
Poly sub(const Poly& a, const Poly& b);
Poly mul(const Poly& a, const Poly& b);
Poly scale(const Poly& a, const mpz_class& c);
/// Exact quotient; throws DomainError if `b` does not divide `a` over Z.
Poly exact_div(const Poly& a, const Poly& b);
/// Primitive gcd with positive leading coefficient.
Poly gcd(const Poly& a, const Poly& b);
mpz_class content(const Poly& p);
mpq_class evaluate(const Poly& p, const mpq_class& x);
Poly derivative(const Poly& p);
/// 1 + t + ... + t^m
Poly p_m(int m);
/// The d-th cyclotomic polynomial.
Poly cyclotomic(int d);
/// "[1, 2, 1]"
std::string to_string(const Poly& p);

/// numerator / denominator with joint content 1, gcd cancelled and positive
/// leading denominator coefficient.
struct GrowthSeries {
  Poly numerator;
  Poly denominator;
  bool operator==(const GrowthSeries&) const = default;
};

GrowthSeries normalize(Poly numerator, Poly denominator);
/// "[...] / [...]"
std::string to_string(const GrowthSeries& g);

/// Every J with finite W_J, including the empty set, as sorted index lists in
/// lexicographic order.
std::vector<std::vector<std::size_t>> spherical_subsets(const diagram::Diagram& d);

/// prod p_{m_i} over the exponents of all components.
Poly poincare_polynomial(const diagram::FiniteType& t);
/// Throws DomainError if the subset is of infinite type.
Poly poincare_polynomial(const diagram::Diagram& d, const std::vector<std::size_t>& subset);

GrowthSeries growth_series(const diagram::Diagram& d);
/// Product of two series (used for disjoint unions).
GrowthSeries product(const GrowthSeries& a, const GrowthSeries& b);

/// Taylor coefficients a_0..a_L.
std::vector<mpz_class> series_coefficients(const GrowthSeries& g, std::size_t L);

/// Closed interval [lo, hi] with exact rational endpoints.
struct Interval {
  mpq_class lo;
  mpq_class hi;
  std::string to_string() const;
};

struct GrowthRate {
  bool finite_type = false;  ///< rho = +infinity, omega = 1
  Interval rho;              ///< smallest positive real root of the denominator
  Interval omega;            ///< 1/rho
};

/// Intervals have width <= `width`.
GrowthRate growth_rate(const diagram::Diagram& d, const mpq_class& width = mpq_class(1, 1000000000));
GrowthRate growth_rate(const GrowthSeries& g, const mpq_class& width = mpq_class(1, 1000000000));

/// Number of distinct real roots of `p` in (a, b] (Sturm).
std::size_t count_roots(const Poly& p, const mpq_class& a, const mpq_class& b);

struct LatticeReport {
  bool series_converges_at_1_over_q = false;
  bool boundary = false;  ///< 1/q is itself a pole: reported as divergent
  GrowthRate rate;
  /// q >= |S| and the diagram is dominated by the complete double-edge diagram.
  bool paper_bound_satisfied = false;
};

LatticeReport lattice_check(const diagram::Diagram& d, long long q);

}  // namespace amalgam::growth
