#pragma once

// Curtis-Tits and Phan amalgams up to isomorphism: delta-vectors over the
// coefficient groups C_i, orientability, the Phan restriction map and lifts
// to double covers.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "amalgam/diagram.hpp"
#include "amalgam/matrix_group.hpp"

namespace amalgam::classify {

using oracle::Flavor;

/// Element of Aut(F_{p^{fe}}) x <tau>: x -> x^(p^frobenius_exponent), then tau if set.
struct CoefficientElement {
  int frobenius_exponent = 0;
  int tau_bit = 0;

  bool operator==(const CoefficientElement&) const = default;
  auto operator<=>(const CoefficientElement&) const = default;
};

struct CoefficientGroup {
  Flavor flavor = Flavor::CurtisTits;
  long long q = 2;
  int p = 2;
  int f = 1;  ///< q = p^f
  int e = 1;
  /// Frobenius exponents are taken modulo this (f*e for CT, 2*f*e for Phan).
  int modulus = 1;
  std::vector<CoefficientElement> elements;  ///< tau_bit major, exponent minor
  std::size_t order() const { return elements.size(); }
};

/// CT: Aut(F_{q^e}) x <tau>, order 2fe. Phan: Aut(F_{q^{2e}}), order 2fe.
CoefficientGroup coefficient_group(Flavor flavor, long long q, int e = 1);

/// Group law (the group is abelian).
CoefficientElement compose(const CoefficientElement& a, const CoefficientElement& b, int modulus);
CoefficientElement inverse(const CoefficientElement& a, int modulus);
/// "id", "frob^2", "tau", "frob^1*tau"
std::string to_string(const CoefficientElement& c);

struct AmalgamDescriptor {
  Flavor flavor = Flavor::CurtisTits;
  long long q = 2;
  diagram::Diagram diagram;
  diagram::SpanningData span;
  std::vector<CoefficientElement> delta;  ///< one per excess edge, in span.excess order

  /// Frobenius modulus of C_{i_s}.
  int modulus(std::size_t s) const;
  bool operator==(const AmalgamDescriptor& o) const {
    return flavor == o.flavor && q == o.q && diagram == o.diagram && delta == o.delta;
  }
};

/// Builds a descriptor, computing the deterministic tree; delta defaults to
/// the identity. Validates every invariant.
AmalgamDescriptor make_descriptor(Flavor flavor, long long q, const diagram::Diagram& d,
                                  std::vector<CoefficientElement> delta = {});

/// Throws DomainError describing the first violated invariant.
void validate(const AmalgamDescriptor& a);

/// Violations of the Curtis-Tits tree conditions for the user's field
/// degrees: each excess edge is an A2 edge whose endpoints share a degree
/// e_s that is a power of two, and every vertex of its loop has degree
/// e_s * 2^l. Empty if all hold.
std::vector<std::string> tree_condition_violations(const diagram::Diagram& d, const diagram::SpanningData& span);

std::vector<AmalgamDescriptor> enumerate_delta_classes(const diagram::Diagram& d, Flavor flavor, long long q);

struct Orientability {
  bool orientable = true;
  std::vector<int> omega_star;
};

/// Curtis-Tits only.
Orientability orientability(const AmalgamDescriptor& a);

/// CT over F_{q^2} -> Phan over F_q, identifying tau with sigma.
AmalgamDescriptor phan_restriction(const AmalgamDescriptor& ct);

/// The 2^r CT descriptors over F_{q^2} restricting to `phan`, in binary
/// counting order (first excess edge most significant).
std::vector<AmalgamDescriptor> phan_fiber(const AmalgamDescriptor& phan);

/// Composite of the connecting twists along a closed walk (consecutive
/// vertices adjacent, closing edge implicit); excess edges contribute
/// delta_s from i_s to j_s and its inverse the other way.
CoefficientElement holonomy(const AmalgamDescriptor& a, const diagram::Cycle& walk);

/// Descriptor on the cover: each cover excess edge carries the holonomy of
/// its fundamental loop pushed down to the base.
AmalgamDescriptor lift_to_cover(const AmalgamDescriptor& a, const diagram::CoverData& c);

/// Descriptor file: diagram lines plus `flavor CT|Phan`, `q <int>` and
/// `delta <i> <j> frob=<int> tau=<0|1>` naming excess edges.
AmalgamDescriptor parse_descriptor(std::string_view text);
std::string emit_descriptor(const AmalgamDescriptor& a);

}  // namespace amalgam::classify
