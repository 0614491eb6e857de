#pragma once

// Finite presentations of rank-2 standard pairs and of universal completions
// of Curtis-Tits and Phan amalgams, Weyl words, abelianization and export.

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "amalgam/classify.hpp"
#include "amalgam/matrix_group.hpp"

namespace amalgam::presentation {

/// Letters are +(k+1) for generator k and -(k+1) for its inverse.
using Word = std::vector<int>;

enum class Strategy { table, steinberg };
std::string to_string(Strategy s);
Strategy parse_strategy(std::string_view text);

/// Largest group the table strategy is willing to tabulate.
inline constexpr std::size_t kTableOrderCap = 10000;

struct Generator {
  enum class Kind {
    root,       ///< x_v^{sign}(element)
    unitary,    ///< k-th generator of a Phan vertex group
    auxiliary,  ///< non-simple root group element of an edge
    element,    ///< any other group element (standalone tables)
  };
  std::string name;
  Kind kind = Kind::element;
  std::string vertex;  ///< vertex id, or "u_v" for an edge
  int sign = 0;        ///< +1 / -1 for root and auxiliary generators
  int root = 0;        ///< root index within the edge for auxiliary generators
  int element = 0;     ///< field element or group element index
};

struct Presentation {
  std::vector<Generator> generators;
  std::vector<Word> relators;
  long long q = 0;  ///< field of the root generators, 0 if unknown
  std::string strategy;
  std::string source;

  /// Throws DomainError for unknown names.
  std::size_t generator_index(std::string_view name) const;
  bool has_generator(std::string_view name) const;
};

/// Throws DomainError unless every letter names a generator and no relator is empty.
void validate(const Presentation& p);

Word inverse(const Word& w);
Word free_reduce(Word w);
/// Free and cyclic reduction.
Word cyclic_reduce(Word w);

/// "x1p1^1*x1m1^-1"; "1" for the empty word.
std::string word_to_string(const Presentation& p, const Word& w);

/// Standalone rank <= 2 group. Table: every non-identity element is a
/// generator and the relators are the full multiplication table. Steinberg
/// (Curtis-Tits only): root group generators with additivity, commutator and
/// rank-1 n/h relators, each checked against the matrices.
Presentation edge_group_presentation(oracle::PairType type, int q, Strategy strategy,
                                     oracle::Flavor flavor = oracle::Flavor::CurtisTits);

/// Presentation of the universal completion of the amalgam. Vertex
/// generators are shared; on an excess edge the connecting map of i_s is
/// pre-composed with delta_s. Edges with m = 6 and field degrees other than
/// 1 are rejected.
Presentation amalgam_presentation(const classify::AmalgamDescriptor& a, Strategy strategy = Strategy::table);

/// Image of the root generator x_v^{sign}(a) under a coefficient element:
/// Frobenius on the field argument, then tau x^+(a) <-> x^-(-a).
Generator apply_coefficient(const Generator& g, const classify::CoefficientElement& c, const oracle::Field& f);

/// Evaluates a word on the given generator images.
oracle::Matrix evaluate(const oracle::Field& f, const std::vector<oracle::Matrix>& images, const Word& w);

/// n_v(a) = x_v^+(a) x_v^-(-a^{-1}) x_v^+(a) for every vertex with root generators.
std::map<std::string, Word> weyl_words(const Presentation& p, int a = 1);

/// Parses relator text over the generator names and the Weyl symbols n<v>:
/// atoms separated by '*' or blanks, '^k' powers, parentheses, e.g.
/// "(n3*n4*n5*n6*n5*n4)^2". One relator per non-empty line.
std::vector<Word> parse_relators(const Presentation& p, std::string_view text);
Presentation add_relators(const Presentation& p, const std::vector<Word>& relators);
Presentation add_relators(const Presentation& p, std::string_view text);

/// Removes element generators that occur exactly once in some relator and
/// drops duplicate relators (up to rotation and inversion).
Presentation simplify(const Presentation& p);

/// Invariant factors d_1 | d_2 | ... with 0 for each free factor; empty for
/// a perfect group.
struct AbelianInvariants {
  std::vector<mpz_class> factors;
  bool trivial() const { return factors.empty(); }
  /// "[2, 0]"
  std::string to_string() const;
};

AbelianInvariants abelianization(const Presentation& p);

/// Neutral format:
///   field <q>          (optional)
///   strategy <name>    (optional)
///   gen <name>
///   rel <name>^<+-k>*...
std::string export_neutral(const Presentation& p);
Presentation parse_neutral(std::string_view text);
/// GAP input: FreeGroup on the generator names, relators in F.i notation.
std::string export_gap(const Presentation& p);

}  // namespace amalgam::presentation
