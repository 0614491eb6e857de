#pragma once

// Todd-Coxeter coset enumeration (HLT with lookahead, Felsch) over finite
// presentations, with table verification and permutation extraction.

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "amalgam/presentation.hpp"

namespace amalgam::enumerate {

using presentation::Presentation;
using presentation::Word;

inline constexpr std::size_t kDefaultMaxCosets = 5000000;

/// AMALGAM_MAX_COSETS if set (DomainError when malformed), else `fallback`.
std::size_t max_cosets_from_env(std::size_t fallback = kDefaultMaxCosets);

enum class Strategy { hlt, felsch };
std::string to_string(Strategy s);
Strategy parse_strategy(std::string_view text);

enum class Status { complete, overflow };

struct Counters {
  std::size_t definitions = 0;
  std::size_t coincidences = 0;
  std::size_t deductions = 0;
  std::size_t lookaheads = 0;
  std::size_t compactions = 0;
  std::size_t peak = 0;  ///< most live cosets at any time
};

struct CosetTable {
  Status status = Status::overflow;
  std::size_t generators = 0;
  std::vector<Word> subgroup;
  /// index rows of 2 * generators columns (g_0, g_0^-1, g_1, ...); 0-based
  /// coset ids, coset 0 being the subgroup coset. Empty on overflow.
  std::vector<std::uint32_t> entries;
  std::size_t index = 0;
  Counters counters;

  bool complete() const { return status == Status::complete; }
  /// Image of `coset` under a letter (+(k+1) or -(k+1)).
  std::uint32_t entry(std::size_t coset, int letter) const;
};

/// On overflow the table carries no entries and no index.
CosetTable todd_coxeter(const Presentation& p, const std::vector<Word>& subgroup,
                        std::size_t max_cosets = kDefaultMaxCosets, Strategy strategy = Strategy::hlt);

/// Independent replay: closed, consistent, every relator trivial at every
/// coset and the subgroup generators fix coset 0. Throws on incomplete tables.
bool verify_table(const CosetTable& t, const Presentation& p);

/// perm[k][c] = image of coset c under generator k.
std::vector<std::vector<std::uint32_t>> permutation_action(const CosetTable& t);

/// "coset,generator,image" rows, cosets numbered from 1.
std::string export_csv(const CosetTable& t, const Presentation& p);
/// "definitions=.. coincidences=.. ..." one line.
std::string run_log(const CosetTable& t);

/// "trivial" or words separated by ',' or newlines.
std::vector<Word> parse_subgroup(const Presentation& p, std::string_view text);

}  // namespace amalgam::enumerate
