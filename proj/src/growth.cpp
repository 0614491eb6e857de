#include "amalgam/growth.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <sstream>

#include "amalgam/error.hpp"

namespace amalgam::growth {

using diagram::Diagram;

Poly trim(Poly p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

int degree(const Poly& p) { return static_cast<int>(p.size()) - 1; }

Poly add(const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()));
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += b[i];
  return trim(std::move(r));
}

Poly sub(const Poly& a, const Poly& b) { return add(a, scale(b, -1)); }

Poly mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  }
  return trim(std::move(r));
}

Poly scale(const Poly& a, const mpz_class& c) {
  Poly r = a;
  for (auto& x : r) x *= c;
  return trim(std::move(r));
}

Poly exact_div(const Poly& a, const Poly& b) {
  if (b.empty()) throw DomainError("polynomial division by zero");
  if (a.empty()) return {};
  if (a.size() < b.size()) throw DomainError("polynomial does not divide");
  Poly rem = a;
  Poly q(a.size() - b.size() + 1);
  const mpz_class& lead = b.back();
  for (std::size_t k = q.size(); k-- > 0;) {
    const mpz_class& top = rem[k + b.size() - 1];
    if (top % lead != 0) throw DomainError("polynomial does not divide over Z");
    q[k] = top / lead;
    if (q[k] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) rem[k + j] -= q[k] * b[j];
  }
  if (!trim(rem).empty()) throw DomainError("polynomial does not divide");
  return trim(std::move(q));
}

mpz_class content(const Poly& p) {
  mpz_class g = 0;
  for (const auto& c : p) g = ::gcd(g, c);
  return g;
}

namespace {

Poly primitive(const Poly& p) {
  if (p.empty()) return p;
  mpz_class c = content(p);
  if (p.back() < 0) c = -c;
  Poly r = p;
  for (auto& x : r) x /= c;
  return r;
}

/// Pseudo-remainder of a by b.
Poly pseudo_rem(Poly a, const Poly& b) {
  const mpz_class& lead = b.back();
  while (!a.empty() && a.size() >= b.size()) {
    const mpz_class top = a.back();
    const std::size_t shift = a.size() - b.size();
    for (auto& x : a) x *= lead;
    for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] -= top * b[j];
    a = trim(std::move(a));
  }
  return a;
}

using QPoly = std::vector<mpq_class>;

QPoly to_q(const Poly& p) { return QPoly(p.begin(), p.end()); }

QPoly q_trim(QPoly p) {
  while (!p.empty() && p.back() == 0) p.pop_back();
  return p;
}

QPoly q_rem(QPoly a, const QPoly& b) {
  while (!a.empty() && a.size() >= b.size()) {
    const mpq_class f = a.back() / b.back();
    const std::size_t shift = a.size() - b.size();
    for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] -= f * b[j];
    a.pop_back();
    a = q_trim(std::move(a));
  }
  return a;
}

mpq_class q_eval(const QPoly& p, const mpq_class& x) {
  mpq_class r = 0;
  for (std::size_t k = p.size(); k-- > 0;) r = r * x + p[k];
  return r;
}

int sign(const mpq_class& x) { return sgn(x); }

}  // namespace

Poly gcd(const Poly& a, const Poly& b) {
  Poly x = primitive(a);
  Poly y = primitive(b);
  if (x.empty()) return y;
  if (y.empty()) return x;
  if (x.size() < y.size()) std::swap(x, y);
  while (!y.empty()) {
    Poly r = primitive(pseudo_rem(x, y));
    x = std::move(y);
    y = std::move(r);
  }
  return primitive(x);
}

mpq_class evaluate(const Poly& p, const mpq_class& x) {
  mpq_class r = 0;
  for (std::size_t k = p.size(); k-- > 0;) r = r * x + p[k];
  return r;
}

Poly derivative(const Poly& p) {
  if (p.size() <= 1) return {};
  Poly r(p.size() - 1);
  for (std::size_t k = 1; k < p.size(); ++k) r[k - 1] = p[k] * static_cast<unsigned long>(k);
  return trim(std::move(r));
}

Poly p_m(int m) { return Poly(static_cast<std::size_t>(m + 1), mpz_class(1)); }

Poly cyclotomic(int d) {
  static std::map<int, Poly> cache;
  if (auto it = cache.find(d); it != cache.end()) return it->second;
  Poly r(static_cast<std::size_t>(d + 1), mpz_class(0));
  r[0] = -1;
  r[d] = 1;
  for (int k = 1; k < d; ++k) {
    if (d % k == 0) r = exact_div(r, cyclotomic(k));
  }
  cache[d] = r;
  return r;
}

std::string to_string(const Poly& p) {
  std::ostringstream out;
  out << '[';
  for (std::size_t k = 0; k < p.size(); ++k) out << (k ? ", " : "") << p[k].get_str();
  if (p.empty()) out << '0';
  out << ']';
  return out.str();
}

GrowthSeries normalize(Poly numerator, Poly denominator) {
  numerator = trim(std::move(numerator));
  denominator = trim(std::move(denominator));
  if (denominator.empty()) throw DomainError("zero denominator");
  const Poly g = gcd(numerator, denominator);
  if (degree(g) > 0) {
    numerator = exact_div(numerator, g);
    denominator = exact_div(denominator, g);
  }
  mpz_class c = ::gcd(content(numerator), content(denominator));
  if (denominator.back() < 0) c = -c;
  for (auto& x : numerator) x /= c;
  for (auto& x : denominator) x /= c;
  return {numerator, denominator};
}

std::string to_string(const GrowthSeries& g) { return to_string(g.numerator) + " / " + to_string(g.denominator); }

// --- spherical subsets ---------------------------------------------------------------

namespace {

/// Fixed-width bitset over the vertex set.
class Bits {
 public:
  explicit Bits(std::size_t n = 0) : w_((n + 63) / 64, 0) {}
  void set(std::size_t i) { w_[i / 64] |= 1ull << (i % 64); }
  void reset(std::size_t i) { w_[i / 64] &= ~(1ull << (i % 64)); }
  bool test(std::size_t i) const { return (w_[i / 64] >> (i % 64)) & 1; }
  Bits& operator|=(const Bits& o) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] |= o.w_[k];
    return *this;
  }
  Bits operator&(const Bits& o) const {
    Bits r = *this;
    for (std::size_t k = 0; k < w_.size(); ++k) r.w_[k] &= o.w_[k];
    return r;
  }
  bool any() const {
    return std::any_of(w_.begin(), w_.end(), [](auto x) { return x != 0; });
  }
  void and_not(const Bits& o) {
    for (std::size_t k = 0; k < w_.size(); ++k) w_[k] &= ~o.w_[k];
  }
  /// Clears bits 0..i.
  void clear_through(std::size_t i) {
    for (std::size_t k = 0; k < w_.size(); ++k) {
      if ((k + 1) * 64 <= i + 1) {
        w_[k] = 0;
      } else if (k * 64 <= i) {
        const std::size_t b = i - k * 64 + 1;
        w_[k] &= b >= 64 ? 0 : ~((1ull << b) - 1);
      }
    }
  }
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t k = 0; k < w_.size(); ++k) {
      auto x = w_[k];
      while (x) {
        const int b = __builtin_ctzll(x);
        f(k * 64 + static_cast<std::size_t>(b));
        x &= x - 1;
      }
    }
  }

 private:
  std::vector<std::uint64_t> w_;
};

struct Component {
  Bits members;
  Bits touched;  // adjacent to >= 1 member
  Bits twice;    // adjacent to >= 2 members: would close a cycle
};

struct Walker {
  const Diagram& d;
  std::vector<Bits> nb;
  std::vector<Bits> inf_nb;
  // visit(subset) returns false to prune (infinite type)
  std::function<bool(const std::vector<std::size_t>&)> visit;

  void run() {
    const std::size_t n = d.size();
    nb.assign(n, Bits(n));
    inf_nb.assign(n, Bits(n));
    for (const auto& e : d.edges()) {
      nb[e.u].set(e.v);
      nb[e.v].set(e.u);
      if (e.m == diagram::kInfinity) {
        inf_nb[e.u].set(e.v);
        inf_nb[e.v].set(e.u);
      }
    }
    std::vector<std::size_t> subset;
    if (!visit(subset)) return;
    Bits all(n);
    for (std::size_t i = 0; i < n; ++i) all.set(i);
    std::vector<Component> comps;
    recurse(subset, comps, all);
  }

  void recurse(std::vector<std::size_t>& subset, const std::vector<Component>& comps, const Bits& candidates) {
    candidates.for_each([&](std::size_t v) {
      subset.push_back(v);
      if (visit(subset)) {
        // merge the components touching v
        const std::size_t n = d.size();
        Component merged{Bits(n), Bits(n), Bits(n)};
        merged.members.set(v);
        merged.touched = nb[v];
        std::vector<Component> next;
        for (const auto& c : comps) {
          if ((c.members & nb[v]).any()) {
            Bits both = merged.touched & c.touched;
            merged.twice |= both;
            merged.twice |= c.twice;
            merged.members |= c.members;
            merged.touched |= c.touched;
          } else {
            next.push_back(c);
          }
        }
        next.push_back(merged);
        Bits cand = candidates;
        cand.clear_through(v);
        cand.and_not(inf_nb[v]);
        for (const auto& c : next) cand.and_not(c.twice);
        if (cand.any()) recurse(subset, next, cand);
      }
      subset.pop_back();
    });
  }
};

}  // namespace

std::vector<std::vector<std::size_t>> spherical_subsets(const Diagram& d) {
  std::vector<std::vector<std::size_t>> out;
  Walker w{d, {}, {}, [&](const std::vector<std::size_t>& s) {
             if (!diagram::recognize_finite_type(d, s)) return false;
             out.push_back(s);
             return true;
           }};
  w.run();
  std::sort(out.begin(), out.end());
  return out;
}

Poly poincare_polynomial(const diagram::FiniteType& t) {
  Poly r{1};
  for (int e : t.exponents()) r = mul(r, p_m(e));
  return r;
}

Poly poincare_polynomial(const Diagram& d, const std::vector<std::size_t>& subset) {
  const auto t = diagram::recognize_finite_type(d, subset);
  if (!t) throw DomainError("subset is of infinite type");
  return poincare_polynomial(*t);
}

namespace {

/// Multiplicity of each cyclotomic factor of a Poincare polynomial.
std::map<int, int> cyclotomic_exponents(const std::vector<int>& exps) {
  std::map<int, int> out;
  for (int m : exps) {
    for (int dd = 2; dd <= m + 1; ++dd) {
      if ((m + 1) % dd == 0) ++out[dd];
    }
  }
  return out;
}

/// t^deg p(1/t)
Poly reverse(const Poly& p) {
  Poly r(p.rbegin(), p.rend());
  return trim(std::move(r));
}

}  // namespace

GrowthSeries growth_series(const Diagram& d) {
  // Group spherical subsets by type: sum of (-1)^{|J|} per type.
  struct Bucket {
    std::vector<int> exponents;
    long long count = 0;
  };
  std::map<std::string, Bucket> buckets;
  Walker w{d, {}, {}, [&](const std::vector<std::size_t>& s) {
             const auto t = diagram::recognize_finite_type(d, s);
             if (!t) return false;
             auto& b = buckets[t->name()];
             if (b.exponents.empty() && !s.empty()) b.exponents = t->exponents();
             b.count += (s.size() % 2 == 0) ? 1 : -1;
             return true;
           }};
  w.run();

  std::map<int, int> lcm;
  for (const auto& [name, b] : buckets) {
    for (const auto& [dd, e] : cyclotomic_exponents(b.exponents)) lcm[dd] = std::max(lcm[dd], e);
  }
  Poly D{1};
  for (const auto& [dd, e] : lcm) {
    for (int k = 0; k < e; ++k) D = mul(D, cyclotomic(dd));
  }
  Poly N;
  for (const auto& [name, b] : buckets) {
    if (b.count == 0) continue;
    Poly cof{1};
    auto own = cyclotomic_exponents(b.exponents);
    for (const auto& [dd, e] : lcm) {
      for (int k = own[dd]; k < e; ++k) cof = mul(cof, cyclotomic(dd));
    }
    N = add(N, scale(cof, mpz_class(static_cast<long>(b.count))));
  }
  // 1/p_W(1/t) = N(t)/D(t)  =>  p_W(t) = D(1/t)/N(1/t) = t^{deg N - deg D} rev(D)/rev(N)
  if (N.empty()) throw DomainError("internal: vanishing Steinberg sum");
  Poly num = reverse(D);
  Poly den = reverse(N);
  // reverse() measures against the true degrees
  const int shift = degree(N) - degree(D);
  if (shift > 0) num.insert(num.begin(), static_cast<std::size_t>(shift), mpz_class(0));
  if (shift < 0) den.insert(den.begin(), static_cast<std::size_t>(-shift), mpz_class(0));
  return normalize(num, den);
}

GrowthSeries product(const GrowthSeries& a, const GrowthSeries& b) {
  return normalize(mul(a.numerator, b.numerator), mul(a.denominator, b.denominator));
}

std::vector<mpz_class> series_coefficients(const GrowthSeries& g, std::size_t L) {
  const Poly& num = g.numerator;
  const Poly& den = g.denominator;
  if (den.empty() || den[0] == 0) throw DomainError("series denominator vanishes at 0");
  std::vector<mpz_class> a(L + 1);
  for (std::size_t k = 0; k <= L; ++k) {
    mpz_class s = k < num.size() ? num[k] : mpz_class(0);
    for (std::size_t j = 1; j < den.size() && j <= k; ++j) s -= den[j] * a[k - j];
    if (s % den[0] != 0) throw DomainError("series has non-integer coefficients");
    a[k] = s / den[0];
  }
  return a;
}

std::string Interval::to_string() const { return "[" + lo.get_str() + ", " + hi.get_str() + "]"; }

namespace {

std::vector<QPoly> sturm_chain(const Poly& p) {
  std::vector<QPoly> chain{to_q(p), to_q(derivative(p))};
  while (!chain.back().empty()) {
    QPoly r = q_rem(chain[chain.size() - 2], chain.back());
    for (auto& x : r) x = -x;
    if (r.empty()) break;
    chain.push_back(std::move(r));
  }
  if (chain.back().empty()) chain.pop_back();
  return chain;
}

int variations(const std::vector<QPoly>& chain, const mpq_class& x) {
  int v = 0;
  int last = 0;
  for (const auto& f : chain) {
    const int s = sign(q_eval(f, x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++v;
    last = s;
  }
  return v;
}

Poly squarefree(const Poly& p) {
  const Poly g = gcd(p, derivative(p));
  return degree(g) > 0 ? exact_div(primitive(p), g) : primitive(p);
}

}  // namespace

std::size_t count_roots(const Poly& p, const mpq_class& a, const mpq_class& b) {
  if (degree(p) <= 0) return 0;
  const Poly sf = squarefree(p);
  const auto chain = sturm_chain(sf);
  if (evaluate(sf, a) == 0) throw DomainError("count_roots: left endpoint is a root");
  return static_cast<std::size_t>(variations(chain, a) - variations(chain, b));
}

GrowthRate growth_rate(const GrowthSeries& g, const mpq_class& width) {
  GrowthRate out;
  const Poly& den = g.denominator;
  if (degree(den) <= 0) {
    out.finite_type = true;
    out.omega = {mpq_class(1), mpq_class(1)};
    return out;
  }
  const Poly sf = squarefree(den);
  const auto chain = sturm_chain(sf);
  // Cauchy bound on the absolute value of roots
  mpq_class bound = 0;
  for (std::size_t k = 0; k + 1 < sf.size(); ++k) {
    mpq_class r = mpq_class(abs(sf[k])) / mpq_class(abs(sf.back()));
    if (r > bound) bound = r;
  }
  bound += 1;
  const mpq_class zero = 0;  // den(0) != 0 so 0 is not a root
  const int v0 = variations(chain, zero);
  if (v0 - variations(chain, bound) == 0) {
    // no positive real pole: the series is a polynomial-like object only for finite type
    out.finite_type = true;
    out.omega = {mpq_class(1), mpq_class(1)};
    return out;
  }
  mpq_class lo = 0;
  mpq_class hi = bound;
  // invariant: no root in (0, lo], at least one root in (lo, hi]
  while (hi - lo > width || lo == 0) {
    mpq_class mid = (lo + hi) / 2;
    if (v0 - variations(chain, mid) > 0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (evaluate(sf, hi) == 0) lo = hi;  // exact rational root
  out.rho = {lo, hi};
  out.omega = {1 / hi, lo == 0 ? mpq_class(0) : 1 / lo};
  return out;
}

GrowthRate growth_rate(const Diagram& d, const mpq_class& width) { return growth_rate(growth_series(d), width); }

LatticeReport lattice_check(const Diagram& d, long long q) {
  if (q < 2) throw DomainError("q must be at least 2");
  LatticeReport r;
  const GrowthSeries g = growth_series(d);
  r.rate = growth_rate(g);
  if (r.rate.finite_type) {
    r.series_converges_at_1_over_q = true;
  } else {
    const mpq_class x(1, static_cast<unsigned long>(q));
    r.boundary = evaluate(g.denominator, x) == 0;
    r.series_converges_at_1_over_q = count_roots(g.denominator, 0, x) == 0;
  }
  bool dominated = true;
  for (const auto& e : d.edges()) dominated = dominated && e.m != diagram::kInfinity && e.m <= 4;
  r.paper_bound_satisfied = dominated && q >= static_cast<long long>(d.size());
  return r;
}

}  // namespace amalgam::growth
