#pragma once

// Labelled Coxeter/Dynkin diagrams, their spanning-tree data and
// two-sheeted covers.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace amalgam::diagram {

/// Edge label standing for m = infinity (accepted only under LabelPolicy::general).
inline constexpr int kInfinity = 0;

/// Which edge labels a diagram may carry.
enum class LabelPolicy {
  crystallographic,  ///< m in {3,4,6}; what Lie diagrams need
  general,           ///< any m >= 3 or infinity; growth computations only
};

/// Optional rank-2 type tag on an edge.
enum class EdgeType { inferred, A2, C2 };

struct Vertex {
  std::string id;
  int field_degree = 1;

  bool operator==(const Vertex&) const = default;
};

/// Edge between vertex indices `u < v`.
struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  int m = 3;
  EdgeType tag = EdgeType::inferred;

  bool operator==(const Edge&) const = default;
};

struct EdgeSpec {
  std::string a;
  std::string b;
  int m = 3;
  EdgeType tag = EdgeType::inferred;
};

/// Natural order on identifiers: maximal digit runs compare numerically,
/// everything else bytewise ("2" < "10", "3.1" < "12.0").
bool natural_less(std::string_view a, std::string_view b);

/// Immutable labelled simple graph. Vertices are kept in natural order of
/// their identifiers, edges sorted by endpoint indices.
class Diagram {
 public:
  Diagram() = default;

  /// Validates and normalizes. Edges may name vertices absent from `vertices`;
  /// those are created with field degree 1. Throws DomainError on violations.
  Diagram(std::vector<Vertex> vertices, const std::vector<EdgeSpec>& edges,
          LabelPolicy policy = LabelPolicy::crystallographic, std::string name = {});

  std::size_t size() const noexcept { return vertices_.size(); }
  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const std::string& name() const noexcept { return name_; }
  LabelPolicy policy() const noexcept { return policy_; }

  const std::string& id(std::size_t i) const { return vertices_.at(i).id; }
  std::optional<std::size_t> index_of(std::string_view id) const;
  std::size_t require_index(std::string_view id) const;

  /// Coxeter label m_ij: 1 on the diagonal, 2 for non-adjacent pairs.
  int label(std::size_t i, std::size_t j) const;
  bool adjacent(std::size_t i, std::size_t j) const;
  /// Neighbours of `i` in increasing index order.
  const std::vector<std::size_t>& neighbors(std::size_t i) const { return adjacency_.at(i); }
  std::optional<std::size_t> edge_index(std::size_t i, std::size_t j) const;

  bool connected() const;

  bool operator==(const Diagram& other) const {
    return vertices_ == other.vertices_ && edges_ == other.edges_;
  }

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<std::uint8_t> labels_;  // dense n*n; 255 encodes infinity
  LabelPolicy policy_ = LabelPolicy::crystallographic;
  std::string name_;
};

/// Parses the line-based diagram format:
///   # comment
///   v <id> [e=<int>]
///   e <id> <id> m=<label> [type=A2|C2]
///   name <text>
Diagram parse_diagram(std::string_view text, LabelPolicy policy = LabelPolicy::crystallographic);

/// Token of a parsed line with its 1-based column.
struct Token {
  std::string text;
  std::size_t column = 1;
};

/// Hook for formats layered on the diagram grammar: receives (line, tokens)
/// for directives the diagram grammar does not know and returns true if it
/// consumed the line.
using ExtraDirective = std::function<bool(std::size_t, const std::vector<Token>&)>;

Diagram parse_diagram(std::string_view text, LabelPolicy policy, const ExtraDirective& extra);

/// Byte-stable emission: vertices in natural order, then edges.
std::string emit_diagram(const Diagram& d);

/// Induced subdiagram on the given vertex indices.
Diagram induced(const Diagram& d, const std::vector<std::size_t>& subset);

/// Vertex-disjoint union; identifiers are prefixed with "a." and "b." when
/// they collide.
Diagram disjoint_union(const Diagram& a, const Diagram& b);

// --- finite-type recognition ----------------------------------------------

/// One irreducible finite Coxeter type.
struct FiniteComponent {
  char family = 'A';  // A B D E F G H I
  int rank = 1;
  int m = 0;  // dihedral order for family I

  std::string name() const;
  std::vector<int> exponents() const;
  bool operator==(const FiniteComponent&) const = default;
  auto operator<=>(const FiniteComponent&) const = default;
};

struct FiniteType {
  std::vector<FiniteComponent> components;  // sorted

  /// "A2xB3"; "empty" for the empty subset.
  std::string name() const;
  /// Exponents of all components, sorted.
  std::vector<int> exponents() const;
  bool operator==(const FiniteType&) const = default;
};

/// Classifies the parabolic subgroup on `subset` against the finite Coxeter
/// groups (A, B/C, D, E, F, G, H, I2). std::nullopt means infinite.
std::optional<FiniteType> recognize_finite_type(const Diagram& d, const std::vector<std::size_t>& subset);

struct SubdiagramReport {
  bool three_spherical = true;
  std::vector<std::vector<std::size_t>> offending_triples;
  /// Every subset of at most three vertices, keyed by sorted index list.
  std::map<std::vector<std::size_t>, std::string> finite_type_of;
  bool has_C2_2 = false;
};

SubdiagramReport classify_subdiagrams(const Diagram& d, int q);

// --- spanning tree ----------------------------------------------------------

/// A closed walk given by its vertex indices; the closing edge is implicit.
using Cycle = std::vector<std::size_t>;

/// Non-tree edge {i_s, j_s} with i_s before j_s in natural order.
struct ExcessEdge {
  std::size_t i = 0;
  std::size_t j = 0;
  bool operator==(const ExcessEdge&) const = default;
};

struct SpanningData {
  std::vector<std::size_t> tree;  // edge indices into Diagram::edges()
  std::vector<ExcessEdge> excess;
  /// loops[s] starts at excess[s].i, steps to excess[s].j and returns along the tree.
  std::vector<Cycle> loops;
  std::size_t r = 0;
};

/// Deterministic BFS tree rooted at the least vertex; throws on disconnected input.
SpanningData spanning_tree_and_loops(const Diagram& d);

/// Tree path between two vertices of a spanning tree (inclusive).
std::vector<std::size_t> tree_path(const Diagram& d, const std::vector<std::size_t>& tree_edges,
                                   std::size_t from, std::size_t to);

// --- covers -----------------------------------------------------------------

struct CoverData {
  Diagram base;
  Diagram cover;
  std::vector<std::size_t> projection;  // cover vertex -> base vertex
  std::vector<std::size_t> deck;        // involution on cover vertices
  std::vector<int> omega_star;          // per excess edge of the base tree
};

/// Connected two-sheeted cover classified by the kernel of omega_star; cover
/// vertices are named "<id>.0" and "<id>.1". Throws if omega_star is
/// identically zero or the base is disconnected.
CoverData double_cover(const Diagram& d, const std::vector<int>& omega_star);

/// Two disjoint copies of `d` (omega* identically zero). Only used to lift
/// loops whose class is trivial; it is not a connected cover.
CoverData trivial_double_cover(const Diagram& d);

/// Checks every CoverData invariant; returns a description of the first
/// violation or an empty string.
std::string check_cover(const CoverData& c);

enum class FiberType { two_disjoint_loops, single_double_loop };

struct LoopFiber {
  FiberType type = FiberType::two_disjoint_loops;
  std::vector<Cycle> cycles;  // in cover vertex indices
};

/// Value of omega* on the class of a base cycle: parity of the number of
/// sheet-changing edges along its lift.
int omega_of_loop(const CoverData& c, const Cycle& loop);

/// Lifts a base cycle. `omega_value` must equal omega_of_loop(c, loop).
LoopFiber loop_fiber_type(const CoverData& c, const Cycle& loop, int omega_value);

/// Throws DomainError unless `loop` is a simple cycle of `d` of length >= 3.
void require_cycle(const Diagram& d, const Cycle& loop);

std::string to_string(FiberType t);

}  // namespace amalgam::diagram
