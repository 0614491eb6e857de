#include "amalgam/enumerate.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "amalgam/error.hpp"

namespace amalgam::enumerate {

std::size_t max_cosets_from_env(std::size_t fallback) {
  const char* env = std::getenv("AMALGAM_MAX_COSETS");
  if (!env || !*env) return fallback;
  const std::string_view s(env);
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v == 0) {
    throw DomainError("AMALGAM_MAX_COSETS must be a positive integer, got '" + std::string(s) + "'");
  }
  return v;
}

std::string to_string(Strategy s) { return s == Strategy::hlt ? "hlt" : "felsch"; }

Strategy parse_strategy(std::string_view text) {
  if (text == "hlt") return Strategy::hlt;
  if (text == "felsch") return Strategy::felsch;
  throw DomainError("unknown enumeration strategy '" + std::string(text) + "'");
}

namespace {

std::size_t column(int letter) { return 2 * static_cast<std::size_t>(std::abs(letter) - 1) + (letter < 0 ? 1 : 0); }

/// Coset ids are 1-based internally; 0 marks an undefined entry.
class Enumerator {
 public:
  Enumerator(const Presentation& p, const std::vector<Word>& subgroup, std::size_t max_cosets, Strategy strategy)
      : strategy_(strategy), cols_(2 * p.generators.size()), limit_(max_cosets) {
    for (const auto& r : p.relators) rels_.push_back(columns(r));
    for (const auto& w : subgroup) subgroup_.push_back(columns(w));
    if (strategy_ == Strategy::felsch) {
      by_column_.resize(cols_);
      for (const auto& r : rels_) {
        for (const auto& base : {r, inverted(r)}) {
          for (std::size_t k = 0; k < base.size(); ++k) {
            std::vector<std::size_t> rot(base.begin() + static_cast<std::ptrdiff_t>(k), base.end());
            rot.insert(rot.end(), base.begin(), base.begin() + static_cast<std::ptrdiff_t>(k));
            auto& bucket = by_column_[rot[0]];
            if (std::find(bucket.begin(), bucket.end(), rot) == bucket.end()) bucket.push_back(std::move(rot));
          }
        }
      }
    }
    table_.assign(2 * cols_, 0);
    parent_.assign(2, 0);
    parent_[1] = 1;
    top_ = 1;
    live_ = 1;
    counters_.peak = 1;
  }

  bool run() {
    if (cols_ == 0) return true;
    return strategy_ == Strategy::hlt ? hlt() : felsch();
  }

  CosetTable result(const Presentation& p, const std::vector<Word>& subgroup) {
    CosetTable t;
    t.generators = p.generators.size();
    t.subgroup = subgroup;
    t.counters = counters_;
    if (overflow_) return t;
    compact();
    t.status = Status::complete;
    t.index = live_;
    t.entries.resize(live_ * cols_);
    for (std::size_t c = 1; c <= live_; ++c) {
      for (std::size_t x = 0; x < cols_; ++x) t.entries[(c - 1) * cols_ + x] = at(c, x) - 1;
    }
    return t;
  }

 private:
  std::vector<std::size_t> columns(const Word& w) const {
    std::vector<std::size_t> out;
    for (int x : w) {
      if (x == 0 || static_cast<std::size_t>(std::abs(x)) > cols_ / 2) throw DomainError("word uses an unknown generator");
      out.push_back(column(x));
    }
    return out;
  }

  static std::vector<std::size_t> inverted(const std::vector<std::size_t>& w) {
    std::vector<std::size_t> r(w.rbegin(), w.rend());
    for (auto& x : r) x ^= 1;
    return r;
  }

  std::uint32_t& at(std::size_t c, std::size_t x) { return table_[c * cols_ + x]; }

  std::uint32_t rep(std::uint32_t c) {
    std::uint32_t r = c;
    while (parent_[r] != r) r = parent_[r];
    while (parent_[c] != r) {
      const std::uint32_t next = parent_[c];
      parent_[c] = r;
      c = next;
    }
    return r;
  }

  bool alive(std::size_t c) const { return parent_[c] == c; }

  /// New coset as the image of c under x; false when the id space is full.
  bool define(std::uint32_t c, std::size_t x) {
    if (top_ >= limit_) return false;
    const auto d = static_cast<std::uint32_t>(++top_);
    table_.resize((top_ + 1) * cols_, 0);
    parent_.push_back(d);
    at(c, x) = d;
    at(d, x ^ 1) = c;
    ++live_;
    ++counters_.definitions;
    counters_.peak = std::max(counters_.peak, live_);
    deduce(c, x);
    return true;
  }

  void deduce(std::uint32_t c, std::size_t x) {
    if (strategy_ == Strategy::felsch) deductions_.push_back({c, x});
  }

  void merge(std::uint32_t a, std::uint32_t b) {
    a = rep(a);
    b = rep(b);
    if (a == b) return;
    if (a > b) std::swap(a, b);
    parent_[b] = a;
    --live_;
    ++counters_.coincidences;
    queue_.push_back(b);
  }

  void coincidence(std::uint32_t a, std::uint32_t b) {
    merge(a, b);
    for (std::size_t i = 0; i < queue_.size(); ++i) {
      const std::uint32_t e = queue_[i];
      for (std::size_t x = 0; x < cols_; ++x) {
        const std::uint32_t f = at(e, x);
        if (!f) continue;
        if (at(f, x ^ 1) == e) at(f, x ^ 1) = 0;
        const std::uint32_t e1 = rep(e);
        const std::uint32_t f1 = rep(f);
        if (at(e1, x)) {
          merge(f1, at(e1, x));
        } else if (at(f1, x ^ 1)) {
          merge(e1, at(f1, x ^ 1));
        } else {
          at(e1, x) = f1;
          at(f1, x ^ 1) = e1;
          deduce(e1, x);
        }
      }
    }
    queue_.clear();
  }

  enum class Scan { done, full };

  /// Scans w at c, defining cosets if `fill`.
  Scan scan(std::uint32_t c, const std::vector<std::size_t>& w, bool fill) {
    if (w.empty()) return Scan::done;
    std::uint32_t f = c;
    std::uint32_t b = c;
    std::size_t i = 0;
    std::size_t j = w.size();  // one past the last unscanned letter
    while (true) {
      while (i < j && at(f, w[i])) f = at(f, w[i++]);
      if (i == j) {
        if (f != b) coincidence(f, b);
        return Scan::done;
      }
      while (j > i && at(b, w[j - 1] ^ 1)) b = at(b, w[--j] ^ 1);
      if (j == i) {
        coincidence(f, b);
        return Scan::done;
      }
      if (j == i + 1) {
        at(f, w[i]) = b;
        at(b, w[i] ^ 1) = f;
        ++counters_.deductions;
        deduce(f, w[i]);
        return Scan::done;
      }
      if (!fill) return Scan::done;
      if (!define(f, w[i])) return Scan::full;
    }
  }

  void compact() {
    if (top_ == live_) return;
    ++counters_.compactions;
    std::vector<std::uint32_t> map(top_ + 1, 0);
    std::uint32_t next = 0;
    for (std::size_t c = 1; c <= top_; ++c) {
      if (alive(c)) map[c] = ++next;
    }
    std::vector<std::uint32_t> table((next + 1) * cols_, 0);
    for (std::size_t c = 1; c <= top_; ++c) {
      if (!map[c]) continue;
      for (std::size_t x = 0; x < cols_; ++x) {
        const std::uint32_t d = at(c, x);
        table[map[c] * cols_ + x] = d ? map[rep(d)] : 0;
      }
    }
    for (auto& [c, x] : deductions_) c = alive(c) ? map[c] : 0;
    deductions_.erase(std::remove_if(deductions_.begin(), deductions_.end(), [](auto& d) { return d.first == 0; }),
                      deductions_.end());
    remap_ = std::move(map);
    table_ = std::move(table);
    parent_.resize(next + 1);
    for (std::uint32_t c = 0; c <= next; ++c) parent_[c] = c;
    top_ = next;
  }

  /// Frees id space: compaction, else a lookahead pass. False on overflow.
  bool make_room() {
    if (top_ > live_) {
      compact();
      return true;
    }
    ++counters_.lookaheads;
    for (std::size_t c = 1; c <= top_; ++c) {
      for (const auto& r : rels_) {
        if (!alive(c)) break;
        scan(static_cast<std::uint32_t>(c), r, false);
      }
    }
    if (top_ > live_) {
      compact();
      return true;
    }
    overflow_ = true;
    return false;
  }

  /// Scans w at coset 1 until it closes; false on overflow.
  bool fill_subgroup() {
    for (const auto& w : subgroup_) {
      while (scan(1, w, true) == Scan::full) {
        if (!make_room()) return false;
      }
      if (!process_deductions()) return false;
    }
    return true;
  }

  bool hlt() {
    if (!fill_subgroup()) return false;
    for (std::size_t c = 1; c <= top_; ++c) {
      if (!alive(c)) continue;
      for (std::size_t r = 0; r < rels_.size() && alive(c); ++r) {
        if (scan(static_cast<std::uint32_t>(c), rels_[r], true) == Scan::full) {
          remap_.clear();
          if (!make_room()) return false;
          if (!remap_.empty()) c = remap_[c];
          if (!c) break;
          r = static_cast<std::size_t>(-1);  // rescan this coset from the first relator
        }
      }
      if (!c || !alive(c)) continue;  // c == 0 restarts from the first coset
      for (std::size_t x = 0; x < cols_; ++x) {
        if (at(c, x)) continue;
        if (!define(static_cast<std::uint32_t>(c), x)) {
          remap_.clear();
          if (!make_room()) return false;
          if (!remap_.empty()) c = remap_[c];
          if (!c) break;
          x = static_cast<std::size_t>(-1);
        }
      }
    }
    return true;
  }

  bool process_deductions() {
    if (strategy_ != Strategy::felsch) return true;
    while (!deductions_.empty()) {
      auto [c, x] = deductions_.back();
      deductions_.pop_back();
      if (!alive(c)) continue;
      for (const auto& w : by_column_[x]) {
        if (!alive(c)) break;
        scan(c, w, false);
      }
      if (!alive(c)) continue;
      if (const std::uint32_t d = at(c, x); d && alive(d)) {
        for (const auto& w : by_column_[x ^ 1]) {
          if (!alive(d)) break;
          scan(d, w, false);
        }
      }
    }
    return true;
  }

  bool felsch() {
    if (!fill_subgroup()) return false;
    std::size_t c = 1;
    while (true) {
      while (c <= top_ && (!alive(c) || std::all_of(&table_[c * cols_], &table_[c * cols_] + cols_,
                                                    [](std::uint32_t v) { return v != 0; }))) {
        ++c;
      }
      if (c > top_) break;
      std::size_t x = 0;
      while (at(c, x)) ++x;
      if (!define(static_cast<std::uint32_t>(c), x)) {
        remap_.clear();
        if (!make_room()) return false;
        c = 1;
        continue;
      }
      process_deductions();
    }
    // closing pass: any relator left open at some coset restarts the loop
    for (std::size_t pass = 0;; ++pass) {
      const std::size_t before = live_;
      for (std::size_t d = 1; d <= top_; ++d) {
        for (const auto& r : rels_) {
          if (!alive(d)) break;
          scan(static_cast<std::uint32_t>(d), r, false);
        }
      }
      process_deductions();
      if (live_ == before) break;
    }
    return true;
  }

  Strategy strategy_;
  std::size_t cols_;
  std::size_t limit_;
  std::vector<std::vector<std::size_t>> rels_;
  std::vector<std::vector<std::size_t>> subgroup_;
  std::vector<std::vector<std::vector<std::size_t>>> by_column_;
  std::vector<std::uint32_t> table_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> queue_;
  std::vector<std::uint32_t> remap_;
  std::vector<std::pair<std::uint32_t, std::size_t>> deductions_;
  std::size_t top_ = 0;
  std::size_t live_ = 0;
  bool overflow_ = false;
  Counters counters_;
};

}  // namespace

std::uint32_t CosetTable::entry(std::size_t coset, int letter) const {
  if (!complete()) throw DomainError("coset table is incomplete");
  if (coset >= index || letter == 0 || static_cast<std::size_t>(std::abs(letter)) > generators) {
    throw DomainError("coset table lookup out of range");
  }
  return entries[coset * 2 * generators + column(letter)];
}

CosetTable todd_coxeter(const Presentation& p, const std::vector<Word>& subgroup, std::size_t max_cosets,
                        Strategy strategy) {
  presentation::validate(p);
  if (max_cosets < 1) throw DomainError("max_cosets must be at least 1");
  if (max_cosets >= std::numeric_limits<std::uint32_t>::max()) {
    throw DomainError("max_cosets " + std::to_string(max_cosets) + " overflows 32-bit coset ids");
  }
  Enumerator e(p, subgroup, max_cosets, strategy);
  e.run();
  return e.result(p, subgroup);
}

bool verify_table(const CosetTable& t, const Presentation& p) {
  if (!t.complete()) throw DomainError("coset table is incomplete");
  if (t.generators != p.generators.size()) return false;
  const std::size_t cols = 2 * t.generators;
  if (t.entries.size() != t.index * cols) return false;
  for (std::size_t c = 0; c < t.index; ++c) {
    for (std::size_t x = 0; x < cols; ++x) {
      const std::uint32_t d = t.entries[c * cols + x];
      if (d >= t.index || t.entries[d * cols + (x ^ 1)] != c) return false;
    }
  }
  auto trace = [&](std::size_t c, const Word& w) {
    for (int x : w) c = t.entries[c * cols + column(x)];
    return c;
  };
  for (const auto& r : p.relators) {
    for (std::size_t c = 0; c < t.index; ++c) {
      if (trace(c, r) != c) return false;
    }
  }
  for (const auto& w : t.subgroup) {
    if (trace(0, w) != 0) return false;
  }
  return true;
}

std::vector<std::vector<std::uint32_t>> permutation_action(const CosetTable& t) {
  if (!t.complete()) throw DomainError("coset table is incomplete");
  std::vector<std::vector<std::uint32_t>> out(t.generators, std::vector<std::uint32_t>(t.index));
  for (std::size_t k = 0; k < t.generators; ++k) {
    for (std::size_t c = 0; c < t.index; ++c) out[k][c] = t.entries[c * 2 * t.generators + 2 * k];
  }
  return out;
}

std::string export_csv(const CosetTable& t, const Presentation& p) {
  if (!t.complete()) throw DomainError("coset table is incomplete");
  std::ostringstream out;
  out << "coset,generator,image\n";
  for (std::size_t c = 0; c < t.index; ++c) {
    for (std::size_t k = 0; k < t.generators; ++k) {
      const auto& name = p.generators[k].name;
      out << c + 1 << ',' << name << ',' << t.entries[c * 2 * t.generators + 2 * k] + 1 << '\n';
      out << c + 1 << ',' << name << "^-1," << t.entries[c * 2 * t.generators + 2 * k + 1] + 1 << '\n';
    }
  }
  return out.str();
}

std::string run_log(const CosetTable& t) {
  std::ostringstream out;
  out << "status=" << (t.complete() ? "complete" : "overflow") << " index=" << t.index
      << " definitions=" << t.counters.definitions << " coincidences=" << t.counters.coincidences
      << " deductions=" << t.counters.deductions << " lookaheads=" << t.counters.lookaheads
      << " compactions=" << t.counters.compactions << " peak=" << t.counters.peak;
  return out.str();
}

std::vector<Word> parse_subgroup(const Presentation& p, std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty() || s == "trivial") return {};
  std::replace(s.begin(), s.end(), ',', '\n');
  return presentation::parse_relators(p, s);
}

}  // namespace amalgam::enumerate
