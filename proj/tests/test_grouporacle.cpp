#include "amalgam/error.hpp"
#include "amalgam/field.hpp"
#include "amalgam/matrix_group.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace amalgam;
using namespace amalgam::oracle;

TEST_CASE("prime powers") {
  CHECK(prime_power(2) == std::pair{2, 1});
  CHECK(prime_power(9) == std::pair{3, 2});
  CHECK(prime_power(16) == std::pair{2, 4});
  CHECK_FALSE(prime_power(6).has_value());
  CHECK_FALSE(prime_power(1).has_value());
  CHECK_THROWS_AS(Field(12), DomainError);
}

TEST_CASE("pinned defining polynomials") {
  CHECK(Field(4).describe() == "F4[x^2+x+1]");
  CHECK(Field(8).describe() == "F8[x^3+x+1]");
  CHECK(Field(9).describe() == "F9[x^2+1]");
  CHECK(Field(16).describe() == "F16[x^4+x+1]");
  CHECK(Field(7).describe() == "F7");
  // x * x = x + 1 in F4 (x = index 2, x + 1 = index 3)
  CHECK(Field(4).mul(2, 2) == 3);
}

TEST_CASE("field axioms and Frobenius for q <= 9") {
  for (int q : {2, 3, 4, 5, 7, 8, 9}) {
    const Field f(q);
    for (int a = 0; a < q; ++a) {
      const Fq x = static_cast<Fq>(a);
      CHECK(f.add(x, 0) == x);
      CHECK(f.mul(x, 1) == x);
      CHECK(f.add(x, f.neg(x)) == 0);
      if (a != 0) CHECK(f.mul(x, f.inv(x)) == 1);
      CHECK(f.frobenius(x, f.degree()) == x);
      for (int b = 0; b < q; ++b) {
        const Fq y = static_cast<Fq>(b);
        CHECK(f.add(x, y) == f.add(y, x));
        CHECK(f.mul(x, y) == f.mul(y, x));
        CHECK(f.frobenius(f.add(x, y), 1) == f.add(f.frobenius(x, 1), f.frobenius(y, 1)));
        CHECK(f.frobenius(f.mul(x, y), 1) == f.mul(f.frobenius(x, 1), f.frobenius(y, 1)));
        for (int c = 0; c < q; ++c) {
          const Fq z = static_cast<Fq>(c);
          CHECK(f.mul(x, f.add(y, z)) == f.add(f.mul(x, y), f.mul(x, z)));
          CHECK(f.mul(x, f.mul(y, z)) == f.mul(f.mul(x, y), z));
        }
      }
    }
  }
  CHECK_THROWS_AS(Field(2).inv(0), DomainError);
  CHECK_THROWS_AS(Field(8).sigma(1), DomainError);
}

TEST_CASE("generate_group orders match the formulas") {
  for (int q : {2, 3, 4}) {
    const auto sl2 = standard_pair_realization(PairType::A1, q, Flavor::CurtisTits);
    CHECK(static_cast<long long>(sl2.group.order()) == oracle_ref::order_sl(2, q));
    const auto sl3 = standard_pair_realization(PairType::A2, q, Flavor::CurtisTits);
    CHECK(static_cast<long long>(sl3.group.order()) == oracle_ref::order_sl(3, q));
    const auto a1a1 = standard_pair_realization(PairType::A1xA1, q, Flavor::CurtisTits);
    CHECK(static_cast<long long>(a1a1.group.order()) == oracle_ref::order_sl(2, q) * oracle_ref::order_sl(2, q));
  }
  for (int q : {2, 3}) {
    const auto sp4 = standard_pair_realization(PairType::C2, q, Flavor::CurtisTits);
    CHECK(static_cast<long long>(sp4.group.order()) == oracle_ref::order_sp4(q));
    const Matrix j = symplectic_form(sp4.field);
    for (const Matrix& m : sp4.group.elements()) {
      CHECK(multiply(sp4.field, multiply(sp4.field, m, j), transpose(m)) == j);
    }
  }
  CHECK_THROWS_AS(standard_pair_realization(PairType::C2, 4, Flavor::CurtisTits), CapExceeded);
}

TEST_CASE("unitary orders") {
  for (int q : {2, 3}) {
    const auto su2 = standard_pair_realization(PairType::A1, q, Flavor::Phan);
    CHECK(static_cast<long long>(su2.group.order()) == oracle_ref::order_su2(q));
    const auto su3 = standard_pair_realization(PairType::A2, q, Flavor::Phan);
    CHECK(static_cast<long long>(su3.group.order()) == oracle_ref::order_su3(q));
    for (const Matrix& m : su3.group.elements()) {
      CHECK(multiply(su3.field, m, transpose(apply(su3.field, Involution::sigma, m))) == identity(3));
      CHECK(determinant(su3.field, m) == 1);
    }
  }
  CHECK(standard_pair_realization(PairType::C2, 2, Flavor::Phan).group.order() == 720);
}

TEST_CASE("tau of a unipotent is the opposite unipotent with negated argument") {
  for (int q : {2, 3, 4, 5, 9}) {
    const Field f(q);
    for (int a = 0; a < q; ++a) {
      const Fq x = static_cast<Fq>(a);
      const Matrix up = root_element(f, PairType::A1, 0, 1, x);
      const Matrix down = root_element(f, PairType::A1, 0, -1, f.neg(x));
      CHECK(apply(f, Involution::tau, up) == down);
    }
    CHECK(apply(f, Involution::tau, identity(2)) == identity(2));
  }
}

TEST_CASE("involutions square to the identity") {
  const auto sl2 = standard_pair_realization(PairType::A1, 4, Flavor::CurtisTits);
  CHECK(sl2.group.order() == 60);
  for (const Matrix& m : sl2.group.elements()) {
    for (auto kind : {Involution::tau, Involution::sigma, Involution::theta}) {
      CHECK(apply(sl2.field, kind, apply(sl2.field, kind, m)) == m);
      CHECK(sl2.group.contains(apply(sl2.field, kind, m)));
    }
  }
  const auto sl3 = standard_pair_realization(PairType::A2, 4, Flavor::CurtisTits);
  for (const Matrix& m : sl3.group.elements()) {
    CHECK(apply(sl3.field, Involution::theta, apply(sl3.field, Involution::theta, m)) == m);
  }
  CHECK_THROWS_AS(apply(Field(2), Involution::sigma, identity(2)), DomainError);
}

TEST_CASE("theta-fixed subgroups are the Phan realizations") {
  const auto sl2 = standard_pair_realization(PairType::A1, 4, Flavor::CurtisTits);
  const MatrixGroup fixed = fixed_subgroup(sl2.group, Involution::theta);
  CHECK(fixed.order() == 6);
  const auto su2 = standard_pair_realization(PairType::A1, 2, Flavor::Phan);
  CHECK(fixed.same_elements(su2.group));
  CHECK(fixed_subgroup(sl2.group, Involution::identity).order() == 60);

  const auto sl3 = standard_pair_realization(PairType::A2, 4, Flavor::CurtisTits);
  const auto su3 = standard_pair_realization(PairType::A2, 2, Flavor::Phan);
  CHECK(fixed_subgroup(sl3.group, Involution::theta).same_elements(su3.group));

  const auto sl2_9 = standard_pair_realization(PairType::A1, 9, Flavor::CurtisTits);
  const auto su2_3 = standard_pair_realization(PairType::A1, 3, Flavor::Phan);
  CHECK(fixed_subgroup(sl2_9.group, Involution::theta).same_elements(su2_3.group));

  const auto a1a1 = standard_pair_realization(PairType::A1xA1, 4, Flavor::CurtisTits);
  const auto phan_a1a1 = standard_pair_realization(PairType::A1xA1, 2, Flavor::Phan);
  CHECK(fixed_subgroup(a1a1.group, Involution::theta).same_elements(phan_a1a1.group));
}

TEST_CASE("on SU2 tau agrees with sigma") {
  for (int q : {2, 3}) {
    const auto su2 = standard_pair_realization(PairType::A1, q, Flavor::Phan);
    for (const Matrix& m : su2.group.elements()) {
      CHECK(apply(su2.field, Involution::tau, m) == apply(su2.field, Involution::sigma, m));
    }
  }
}

TEST_CASE("fixed_subgroup rejects non-closed input") {
  const Field f(3);
  const MatrixGroup bogus(f, {identity(2), root_element(f, PairType::A1, 0, 1, 1)});
  CHECK_THROWS_AS(fixed_subgroup(bogus, Involution::tau), DomainError);
}

TEST_CASE("standard pair structure") {
  const auto a2 = standard_pair_realization(PairType::A2, 2, Flavor::CurtisTits);
  REQUIRE(a2.vertex_groups.size() == 2);
  CHECK(a2.vertex_groups[0].order() == 6);
  CHECK(a2.vertex_groups[1].order() == 6);
  std::size_t common = 0;
  for (const Matrix& m : a2.vertex_groups[0].elements()) common += a2.vertex_groups[1].contains(m);
  CHECK(common == 1);  // the diagonal torus is trivial over F_2

  const auto su3 = standard_pair_realization(PairType::A2, 2, Flavor::Phan);
  CHECK(su3.vertex_groups[0].order() == 6);
  CHECK(generate_group(su3.field, su3.generators).same_elements(su3.group));

  // the Sp4 root patterns are symplectic
  for (int q : {2, 3, 5}) {
    const Field f(q);
    const Matrix j = symplectic_form(f);
    for (const Matrix& x : root_patterns(f, PairType::C2)) {
      const Matrix m = unipotent(f, x, 1);
      CHECK(multiply(f, multiply(f, m, j), transpose(m)) == j);
    }
  }
}
