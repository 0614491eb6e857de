#include "amalgam/field.hpp"

#include <sstream>

#include "amalgam/error.hpp"

namespace amalgam::oracle {

std::optional<std::pair<int, int>> prime_power(long long q) {
  if (q < 2) return std::nullopt;
  long long p = 2;
  while (p * p <= q && q % p != 0) ++p;
  if (q % p != 0) p = q;  // q itself is prime
  int f = 0;
  long long rest = q;
  while (rest % p == 0) {
    rest /= p;
    ++f;
  }
  if (rest != 1) return std::nullopt;
  return std::pair{static_cast<int>(p), f};
}

namespace {

using Poly = std::vector<int>;  // coefficients mod p, low degree first

Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& mod, int p) {
  const std::size_t f = mod.size() - 1;
  std::vector<long long> prod(2 * f, 0);
  for (std::size_t i = 0; i < f; ++i) {
    for (std::size_t j = 0; j < f; ++j) prod[i + j] = (prod[i + j] + 1LL * a[i] * b[j]) % p;
  }
  for (std::size_t d = prod.size(); d-- > f;) {
    const long long c = prod[d];
    if (c == 0) continue;
    // x^d = x^(d-f) * x^f and x^f = -(mod_0 + ... + mod_{f-1} x^{f-1})
    for (std::size_t k = 0; k < f; ++k) {
      prod[d - f + k] = ((prod[d - f + k] - c * mod[k]) % p + p) % p;
    }
    prod[d] = 0;
  }
  return Poly(prod.begin(), prod.begin() + static_cast<long>(f));
}

Poly decode(int index, int p, int f) {
  Poly c(f, 0);
  for (int k = 0; k < f; ++k) {
    c[k] = index % p;
    index /= p;
  }
  return c;
}

int encode(const Poly& c, int p) {
  int index = 0;
  for (std::size_t k = c.size(); k-- > 0;) index = index * p + c[k];
  return index;
}

/// Monic polynomial of degree f is irreducible iff it has no monic factor of degree <= f/2.
bool irreducible(const Poly& mod, int p) {
  const int f = static_cast<int>(mod.size()) - 1;
  for (int d = 1; d <= f / 2; ++d) {
    int count = 1;
    for (int k = 0; k < d; ++k) count *= p;
    for (int idx = 0; idx < count; ++idx) {
      Poly g = decode(idx, p, d);
      g.push_back(1);
      // remainder of mod by g
      Poly r = mod;
      for (int top = f; top >= d; --top) {
        const int c = r[top];
        if (c == 0) continue;
        for (int k = 0; k <= d; ++k) r[top - d + k] = ((r[top - d + k] - c * g[k]) % p + p) % p;
      }
      bool zero = true;
      for (int k = 0; k < d; ++k) zero = zero && r[k] == 0;
      if (zero) return false;
    }
  }
  return true;
}

Poly pinned_modulus(int p, int f) {
  if (p == 2 && f == 2) return {1, 1, 1};
  if (p == 2 && f == 3) return {1, 1, 0, 1};
  if (p == 3 && f == 2) return {1, 0, 1};
  if (p == 2 && f == 4) return {1, 1, 0, 0, 1};
  if (f == 1) return {0, 1};
  int count = 1;
  for (int k = 0; k < f; ++k) count *= p;
  for (int idx = 0; idx < count; ++idx) {
    Poly m = decode(idx, p, f);
    m.push_back(1);
    if (m[0] != 0 && irreducible(m, p)) return m;
  }
  throw DomainError("no irreducible polynomial found");
}

}  // namespace

Field::Field(int q) : q_(q) {
  const auto pf = prime_power(q);
  if (!pf) throw DomainError(std::to_string(q) + " is not a prime power");
  if (q > 256) throw DomainError("field size " + std::to_string(q) + " exceeds 256");
  p_ = pf->first;
  f_ = pf->second;
  auto t = std::make_shared<Tables>();
  t->modulus = pinned_modulus(p_, f_);
  t->add.resize(q * q);
  t->mul.resize(q * q);
  t->neg.resize(q);
  t->inv.assign(q, 0);
  std::vector<Poly> elems;
  for (int a = 0; a < q; ++a) elems.push_back(decode(a, p_, f_));
  for (int a = 0; a < q; ++a) {
    Poly n(f_);
    for (int k = 0; k < f_; ++k) n[k] = (p_ - elems[a][k]) % p_;
    t->neg[a] = static_cast<Fq>(encode(n, p_));
    for (int b = 0; b < q; ++b) {
      Poly s(f_);
      for (int k = 0; k < f_; ++k) s[k] = (elems[a][k] + elems[b][k]) % p_;
      t->add[a * q + b] = static_cast<Fq>(encode(s, p_));
      if (f_ == 1) {
        t->mul[a * q + b] = static_cast<Fq>((a * b) % p_);
      } else {
        t->mul[a * q + b] = static_cast<Fq>(encode(poly_mulmod(elems[a], elems[b], t->modulus, p_), p_));
      }
    }
  }
  for (int a = 1; a < q; ++a) {
    for (int b = 1; b < q; ++b) {
      if (t->mul[a * q + b] == 1) t->inv[a] = static_cast<Fq>(b);
    }
  }
  tables_ = std::move(t);
}

Fq Field::inv(Fq a) const {
  if (a == 0) throw DomainError("division by zero in " + describe());
  return tables_->inv[a];
}

Fq Field::pow(Fq a, long long e) const {
  if (e < 0) {
    a = inv(a);
    e = -e;
  }
  Fq result = 1;
  while (e > 0) {
    if (e & 1) result = mul(result, a);
    a = mul(a, a);
    e >>= 1;
  }
  return result;
}

Fq Field::frobenius(Fq a, long long k) const {
  k %= f_;
  if (k < 0) k += f_;
  for (long long i = 0; i < k; ++i) a = pow(a, p_);
  return a;
}

Fq Field::sigma(Fq a) const {
  if (!is_square_field()) throw DomainError(describe() + " is not a square field; sigma undefined");
  return frobenius(a, f_ / 2);
}

std::vector<int> Field::coefficients(Fq a) const { return decode(a, p_, f_); }

std::string Field::describe() const {
  std::ostringstream out;
  out << 'F' << q_;
  if (f_ > 1) {
    out << '[';
    bool first = true;
    for (int k = f_; k >= 0; --k) {
      const int c = tables_->modulus[k];
      if (c == 0) continue;
      if (!first) out << '+';
      first = false;
      if (k == 0 || c != 1) out << c;
      if (k > 0) out << 'x';
      if (k > 1) out << '^' << k;
    }
    out << ']';
  }
  return out.str();
}

}  // namespace amalgam::oracle
