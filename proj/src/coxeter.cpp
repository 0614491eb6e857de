#include "amalgam/coxeter.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "amalgam/error.hpp"

namespace amalgam::coxeter {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw DomainError("root coordinate overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw DomainError("root coordinate overflow");
  return r;
}

struct ElementHash {
  std::size_t operator()(const Element& e) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (auto x : e.m) h = (h ^ static_cast<std::size_t>(x)) * 1099511628211ull;
    return h;
  }
};

}  // namespace

CoxeterSystem::CoxeterSystem(const diagram::Diagram& d) : n_(d.size()) {
  cartan_.assign(n_, std::vector<int>(n_, 0));
  for (std::size_t i = 0; i < n_; ++i) cartan_[i][i] = 2;
  for (const auto& e : d.edges()) {
    switch (e.m) {
      case 3:
        cartan_[e.u][e.v] = cartan_[e.v][e.u] = -1;
        break;
      case 4:
        cartan_[e.u][e.v] = -1;
        cartan_[e.v][e.u] = -2;
        break;
      case 6:
        cartan_[e.u][e.v] = -1;
        cartan_[e.v][e.u] = -3;
        break;
      default:
        throw DomainError("label m=" + std::to_string(e.m) + " is not crystallographic");
    }
  }
}

CoxeterSystem::CoxeterSystem(std::vector<std::vector<int>> cartan) : n_(cartan.size()), cartan_(std::move(cartan)) {
  for (std::size_t i = 0; i < n_; ++i) {
    if (cartan_[i].size() != n_) throw DomainError("Cartan matrix is not square");
    if (cartan_[i][i] != 2) throw DomainError("Cartan diagonal must be 2");
    for (std::size_t j = 0; j < n_; ++j) {
      if (i == j) continue;
      if (cartan_[i][j] > 0) throw DomainError("Cartan off-diagonal entries must be <= 0");
      if ((cartan_[i][j] == 0) != (cartan_[j][i] == 0)) throw DomainError("Cartan zero pattern must be symmetric");
    }
  }
}

int CoxeterSystem::label(std::size_t i, std::size_t j) const {
  if (i == j) return 1;
  switch (cartan_[i][j] * cartan_[j][i]) {
    case 0:
      return 2;
    case 1:
      return 3;
    case 2:
      return 4;
    case 3:
      return 6;
    default:
      return 0;
  }
}

void CoxeterSystem::check_generator(int i) const {
  if (i < 0 || static_cast<std::size_t>(i) >= n_) throw DomainError("generator index out of range");
}

Element CoxeterSystem::identity() const {
  Element e;
  e.m.assign(n_ * n_, 0);
  for (std::size_t i = 0; i < n_; ++i) e.m[i * n_ + i] = 1;
  return e;
}

// s_i(alpha_j) = alpha_j - a_ij alpha_i, so S_i = I - e_i (row i of the Cartan matrix).
Element CoxeterSystem::left_multiply(const Element& e, int i) const {
  // (s_i w)^{-1} = w^{-1} s_i: column j becomes col_j - a_ij col_i
  check_generator(i);
  Element r = e;
  for (std::size_t j = 0; j < n_; ++j) {
    const int a = cartan_[i][j];
    if (a == 0) continue;
    for (std::size_t k = 0; k < n_; ++k) {
      r.m[k * n_ + j] = checked_add(r.m[k * n_ + j], checked_mul(-a, e.m[k * n_ + i]));
    }
  }
  return r;
}

Element CoxeterSystem::right_multiply(const Element& e, int i) const {
  // (w s_i)^{-1} = s_i w^{-1}: row i becomes row_i - sum_j a_ij row_j
  check_generator(i);
  Element r = e;
  for (std::size_t c = 0; c < n_; ++c) {
    std::int64_t v = e.m[i * n_ + c];
    for (std::size_t j = 0; j < n_; ++j) {
      const int a = cartan_[i][j];
      if (a != 0) v = checked_add(v, checked_mul(-a, e.m[j * n_ + c]));
    }
    r.m[i * n_ + c] = v;
  }
  return r;
}

bool CoxeterSystem::is_left_descent(const Element& e, int i) const {
  for (std::size_t k = 0; k < n_; ++k) {
    const auto v = e.m[k * n_ + i];
    if (v != 0) return v < 0;
  }
  throw DomainError("internal: zero root");
}

Element CoxeterSystem::element(const Word& w) const {
  Element e = identity();
  for (int i : w) e = right_multiply(e, i);
  return e;
}

Word CoxeterSystem::normal_form(const Element& start) const {
  Word out;
  Element e = start;
  const Element id = identity();
  while (!(e == id)) {
    int i = 0;
    while (static_cast<std::size_t>(i) < n_ && !is_left_descent(e, i)) ++i;
    if (static_cast<std::size_t>(i) == n_) throw DomainError("internal: nontrivial element without descent");
    out.push_back(i);
    e = left_multiply(e, i);
  }
  return out;
}

Word CoxeterSystem::normal_form(const Word& w) const { return normal_form(element(w)); }

std::size_t CoxeterSystem::length(const Element& e) const { return normal_form(e).size(); }

std::size_t CoxeterSystem::length(const Word& w) const { return length(element(w)); }

Word CoxeterSystem::multiply(const Word& u, const Word& v) const {
  Word w = u;
  w.insert(w.end(), v.begin(), v.end());
  return normal_form(w);
}

Word CoxeterSystem::inverse(const Word& w) const { return Word(w.rbegin(), w.rend()); }

std::vector<std::vector<Word>> enumerate_ball(const CoxeterSystem& sys, std::size_t radius, std::size_t cap) {
  std::vector<std::vector<Word>> levels;
  std::vector<Element> frontier{sys.identity()};
  std::unordered_set<Element, ElementHash> seen{frontier.front()};
  levels.push_back({Word{}});
  for (std::size_t l = 1; l <= radius; ++l) {
    std::vector<Element> next;
    for (const Element& e : frontier) {
      for (int s = 0; s < static_cast<int>(sys.rank()); ++s) {
        if (sys.is_left_descent(e, s)) continue;
        Element x = sys.left_multiply(e, s);
        if (seen.insert(x).second) {
          if (seen.size() > cap) throw CapExceeded("ball enumeration exceeded cap of " + std::to_string(cap));
          next.push_back(std::move(x));
        }
      }
    }
    std::vector<Word> words;
    words.reserve(next.size());
    for (const Element& e : next) words.push_back(sys.normal_form(e));
    std::sort(words.begin(), words.end());
    levels.push_back(std::move(words));
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  while (levels.size() > 1 && levels.back().empty()) levels.pop_back();
  return levels;
}

std::vector<std::size_t> ball_counts(const CoxeterSystem& sys, std::size_t radius, std::size_t cap) {
  std::vector<std::size_t> counts{1};
  std::vector<Element> frontier{sys.identity()};
  std::unordered_set<Element, ElementHash> seen{frontier.front()};
  for (std::size_t l = 1; l <= radius && !frontier.empty(); ++l) {
    std::vector<Element> next;
    for (const Element& e : frontier) {
      for (int s = 0; s < static_cast<int>(sys.rank()); ++s) {
        if (sys.is_left_descent(e, s)) continue;
        Element x = sys.left_multiply(e, s);
        if (seen.insert(x).second) {
          if (seen.size() > cap) throw CapExceeded("ball enumeration exceeded cap of " + std::to_string(cap));
          next.push_back(std::move(x));
        }
      }
    }
    if (!next.empty()) counts.push_back(next.size());
    frontier = std::move(next);
  }
  return counts;
}

std::string to_string(const Word& w) {
  if (w.empty()) return "e";
  std::ostringstream out;
  for (std::size_t k = 0; k < w.size(); ++k) out << (k ? "." : "") << w[k] + 1;
  return out.str();
}

Word parse_word(const std::string& text, std::size_t rank) {
  if (text == "e" || text.empty()) return {};
  Word w;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, '.')) {
    if (part.empty() || !std::all_of(part.begin(), part.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw DomainError("malformed word '" + text + "'");
    }
    const long v = std::stol(part);
    if (v < 1 || static_cast<std::size_t>(v) > rank) throw DomainError("generator " + part + " out of range");
    w.push_back(static_cast<int>(v - 1));
  }
  return w;
}

void require_fixed_point_free(const CoxeterSystem& sys, const DiagramInvolution& theta) {
  const std::size_t n = sys.rank();
  if (theta.size() != n) throw DomainError("theta must permute all generators");
  for (std::size_t i = 0; i < n; ++i) {
    if (theta[i] < 0 || static_cast<std::size_t>(theta[i]) >= n) throw DomainError("theta out of range");
    if (static_cast<std::size_t>(theta[theta[i]]) != i) throw DomainError("theta is not an involution");
    if (static_cast<std::size_t>(theta[i]) == i) throw DomainError("theta fixes a vertex");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (sys.label(theta[i], theta[j]) != sys.label(i, j)) throw DomainError("theta is not a diagram automorphism");
      if (i != j && sys.label(i, j) != 2 && static_cast<std::size_t>(theta[i]) == j) {
        throw DomainError("theta fixes an edge");
      }
    }
  }
}

Word apply_theta(const DiagramInvolution& theta, const Word& w) {
  Word out;
  out.reserve(w.size());
  for (int i : w) out.push_back(theta.at(i));
  return out;
}

namespace {

/// w (w^{-1})^theta as an element.
Element delta_theta(const CoxeterSystem& sys, const DiagramInvolution& theta, const Word& w) {
  Word x = w;
  const Word t = apply_theta(theta, sys.inverse(w));
  x.insert(x.end(), t.begin(), t.end());
  return sys.element(x);
}

bool is_twisted(const CoxeterSystem& sys, const DiagramInvolution& theta, const Word& u) {
  return sys.element(apply_theta(theta, u)) == sys.element(sys.inverse(u));
}

}  // namespace

TwistedReport twisted_involutions(const CoxeterSystem& sys, const DiagramInvolution& theta, std::size_t radius,
                                  std::size_t cap) {
  require_fixed_point_free(sys, theta);
  TwistedReport report;
  const auto ball = enumerate_ball(sys, radius, cap);
  for (const auto& level : ball) {
    for (const Word& u : level) {
      if (is_twisted(sys, theta, u)) report.inv.insert(u);
      const Word d = sys.normal_form(delta_theta(sys, theta, u));
      if (d.size() <= radius) report.delta_image.insert(d);
    }
  }
  report.equal_up_to_R = report.inv == report.delta_image;
  return report;
}

namespace {

bool decompose(const CoxeterSystem& sys, const DiagramInvolution& theta, const Element& u, std::size_t len,
               Word& out) {
  if (len == 0) return true;
  for (int s = 0; s < static_cast<int>(sys.rank()); ++s) {
    if (!sys.is_left_descent(u, s)) continue;
    const Element v = sys.right_multiply(sys.left_multiply(u, s), theta[s]);
    if (sys.length(v) + 2 != len) continue;
    out.push_back(s);
    if (decompose(sys, theta, v, len - 2, out)) return true;
    out.pop_back();
  }
  return false;
}

}  // namespace

Word twisted_decomposition(const CoxeterSystem& sys, const DiagramInvolution& theta, const Word& u) {
  require_fixed_point_free(sys, theta);
  if (!is_twisted(sys, theta, u)) throw DomainError("not a twisted involution: " + to_string(u));
  const Element e = sys.element(u);
  const std::size_t len = sys.length(e);
  if (len % 2 != 0) throw DomainError("twisted involution of odd length: " + to_string(u));
  Word w;
  if (decompose(sys, theta, e, len, w)) return w;
  // exhaustive fallback over the ball of radius l(u)/2
  const auto ball = enumerate_ball(sys, len / 2);
  if (ball.size() > len / 2) {
    for (const Word& cand : ball[len / 2]) {
      if (delta_theta(sys, theta, cand) == e) return cand;
    }
  }
  throw DomainError("no twisted decomposition of " + to_string(u));
}

}  // namespace amalgam::coxeter
