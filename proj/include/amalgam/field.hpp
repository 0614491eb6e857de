#pragma once

// Small finite fields F_q (q <= 256) with table arithmetic.
//
// Elements are indices 0..q-1 encoding the coefficient tuple
// (c_0, ..., c_{f-1}) over F_p as c_0 + c_1 p + ... ; 0 is zero and 1 is one.
// Extension fields use pinned defining polynomials so serialized elements are
// stable: F_4: x^2+x+1, F_8: x^3+x+1, F_9: x^2+1, F_16: x^4+x+1. Other prime
// powers use the least monic irreducible polynomial in the same encoding.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace amalgam::oracle {

using Fq = std::uint8_t;

/// (p, f) with q = p^f, or nullopt if q is not a prime power.
std::optional<std::pair<int, int>> prime_power(long long q);

class Field {
 public:
  /// Throws DomainError if q is not a prime power or q > 256.
  explicit Field(int q);

  int q() const noexcept { return q_; }
  int p() const noexcept { return p_; }
  int degree() const noexcept { return f_; }
  /// Coefficients c_0..c_f of the monic defining polynomial.
  const std::vector<int>& modulus() const noexcept { return tables_->modulus; }

  Fq add(Fq a, Fq b) const { return tables_->add[a * q_ + b]; }
  Fq mul(Fq a, Fq b) const { return tables_->mul[a * q_ + b]; }
  Fq neg(Fq a) const { return tables_->neg[a]; }
  Fq sub(Fq a, Fq b) const { return add(a, neg(b)); }
  /// Throws DomainError on zero.
  Fq inv(Fq a) const;
  Fq pow(Fq a, long long e) const;
  /// x -> x^(p^k), k taken modulo the degree.
  Fq frobenius(Fq a, long long k) const;
  /// True iff q is a square, i.e. x -> x^sqrt(q) is an involution.
  bool is_square_field() const noexcept { return f_ % 2 == 0; }
  /// x -> x^sqrt(q); throws DomainError if q is not a square.
  Fq sigma(Fq a) const;

  std::vector<int> coefficients(Fq a) const;
  /// "F4[x^2+x+1]"
  std::string describe() const;

  bool operator==(const Field& other) const { return q_ == other.q_; }

 private:
  struct Tables {
    std::vector<int> modulus;
    std::vector<Fq> add;
    std::vector<Fq> mul;
    std::vector<Fq> neg;
    std::vector<Fq> inv;
  };
  int q_ = 0;
  int p_ = 0;
  int f_ = 0;
  std::shared_ptr<const Tables> tables_;
};

}  // namespace amalgam::oracle
