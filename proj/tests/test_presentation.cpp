#include <functional>
#include <set>

#include "amalgam/classify.hpp"
#include "amalgam/diagram.hpp"
#include "amalgam/enumerate.hpp"
#include "amalgam/error.hpp"
#include "amalgam/presentation.hpp"
#include "doctest.h"
#include "oracles.hpp"
#include "util.hpp"

using namespace amalgam;
using namespace amalgam::presentation;
using oracle::Field;
using oracle::Matrix;
using oracle::PairType;

namespace {

std::size_t order_of(const Presentation& p, enumerate::Strategy s = enumerate::Strategy::hlt) {
  const auto t = enumerate::todd_coxeter(p, {}, 1000000, s);
  REQUIRE(t.complete());
  return t.index;
}

classify::AmalgamDescriptor ct(const std::string& diagram_text, long long q) {
  return classify::make_descriptor(oracle::Flavor::CurtisTits, q, diagram::parse_diagram(diagram_text));
}

classify::AmalgamDescriptor sec71() { return classify::parse_descriptor(testutil::data("sec7-1.desc")); }

// images of root generators under a per-vertex map into a matrix group
std::vector<Matrix> root_images(const Presentation& p, const std::function<Matrix(const Generator&)>& image) {
  std::vector<Matrix> out;
  for (const auto& g : p.generators) out.push_back(image(g));
  return out;
}

bool relators_hold(const Field& f, const std::vector<Matrix>& images, const std::vector<Word>& rels) {
  const int n = images.front().n;
  for (const auto& r : rels)
    if (evaluate(f, images, r) != oracle::identity(n)) return false;
  return true;
}

}  // namespace

TEST_CASE("word helpers") {
  CHECK(free_reduce({1, -1, 2}) == Word{2});
  CHECK(free_reduce({1, 2, -2, -1}).empty());
  CHECK(cyclic_reduce({-1, 2, 3, 1}) == Word{2, 3});
  CHECK(inverse({1, -2, 3}) == Word{-3, 2, -1});
  Presentation p;
  p.generators = {{"a"}, {"b"}};
  p.relators = {{1, 1}, {1, -2, 1, 2}};
  CHECK_NOTHROW(validate(p));
  CHECK(word_to_string(p, {1, -2}) == "a^1*b^-1");
  CHECK(word_to_string(p, {}) == "1");
  p.relators.push_back({3});
  CHECK_THROWS_AS(validate(p), DomainError);
  p.relators.back() = {};
  CHECK_THROWS_AS(validate(p), DomainError);
}

TEST_CASE("standalone edge group orders") {
  for (int q : {2, 3, 4, 5}) {
    const auto expected = static_cast<std::size_t>(oracle_ref::order_sl(2, q));
    CHECK(order_of(edge_group_presentation(PairType::A1, q, Strategy::table)) == expected);
    CHECK(order_of(edge_group_presentation(PairType::A1, q, Strategy::steinberg)) == expected);
    CHECK(order_of(edge_group_presentation(PairType::A1, q, Strategy::steinberg), enumerate::Strategy::felsch) ==
          expected);
  }
  CHECK(order_of(edge_group_presentation(PairType::A2, 2, Strategy::table)) == 168);
  CHECK(order_of(edge_group_presentation(PairType::A2, 2, Strategy::steinberg)) == 168);
  CHECK(order_of(edge_group_presentation(PairType::A2, 3, Strategy::steinberg)) == 5616);
  CHECK(order_of(edge_group_presentation(PairType::A1xA1, 2, Strategy::table)) == 36);
  CHECK(order_of(edge_group_presentation(PairType::A1xA1, 3, Strategy::steinberg)) == 576);
  CHECK(order_of(edge_group_presentation(PairType::C2, 2, Strategy::steinberg)) ==
        static_cast<std::size_t>(oracle_ref::order_sp4(2)));
  CHECK(order_of(edge_group_presentation(PairType::C2, 3, Strategy::steinberg)) ==
        static_cast<std::size_t>(oracle_ref::order_sp4(3)));
}

TEST_CASE("standalone Phan groups") {
  const auto su2 = edge_group_presentation(PairType::A1, 2, Strategy::table, oracle::Flavor::Phan);
  CHECK(order_of(su2) == static_cast<std::size_t>(oracle_ref::order_su2(2)));
  const auto su3 = edge_group_presentation(PairType::A2, 2, Strategy::table, oracle::Flavor::Phan);
  CHECK(order_of(su3) == static_cast<std::size_t>(oracle_ref::order_su3(2)));
  CHECK_THROWS_AS(edge_group_presentation(PairType::A1, 2, Strategy::steinberg, oracle::Flavor::Phan), DomainError);
  CHECK_THROWS_AS(edge_group_presentation(PairType::A2, 4, Strategy::table), CapExceeded);
}

TEST_CASE("steinberg generators carry root tags") {
  const auto p = edge_group_presentation(PairType::A2, 3, Strategy::steinberg);
  CHECK(p.q == 3);
  CHECK(p.strategy == "steinberg");
  const Field f(3);
  for (const auto& g : p.generators) {
    if (g.kind != Generator::Kind::root) continue;
    const Matrix m = oracle::root_element(f, PairType::A2, std::stoi(g.vertex) - 1, g.sign, g.element);
    CHECK(oracle::determinant(f, m) == 1);
  }
  CHECK(p.has_generator("x1p1"));
  CHECK(p.has_generator("x2m2"));
  CHECK_FALSE(p.has_generator("x3p1"));
  CHECK_THROWS_AS(p.generator_index("nope"), DomainError);
}

TEST_CASE("embedded vertex blocks agree with root elements") {
  for (int q : {2, 3, 4}) {
    const Field f(q);
    for (PairType type : {PairType::A2, PairType::C2, PairType::A1xA1}) {
      for (int vertex : {0, 1}) {
        for (int sign : {1, -1}) {
          for (int a = 1; a < q; ++a) {
            const Matrix block = oracle::root_element(f, PairType::A1, 0, sign, static_cast<oracle::Fq>(a));
            CHECK(oracle::embed_vertex(f, type, vertex, block) ==
                  oracle::root_element(f, type, vertex, sign, static_cast<oracle::Fq>(a)));
          }
        }
      }
    }
  }
}

TEST_CASE("A2 amalgam relators hold in SL3") {
  const auto a = ct("e 1 2 m=3", 3);
  const Field f(3);
  for (Strategy s : {Strategy::table, Strategy::steinberg}) {
    const auto p = amalgam_presentation(a, s);
    const auto patterns = oracle::root_patterns(f, PairType::A2);
    const auto images = root_images(p, [&](const Generator& g) {
      if (g.kind == Generator::Kind::auxiliary) {
        return oracle::unipotent(f, patterns[(g.sign > 0 ? 0 : 3) + g.root], static_cast<oracle::Fq>(g.element));
      }
      REQUIRE(g.kind == Generator::Kind::root);
      return oracle::root_element(f, PairType::A2, std::stoi(g.vertex) - 1, g.sign, g.element);
    });
    CHECK(relators_hold(f, images, p.relators));
    CHECK(order_of(p) == 5616);
  }
}

TEST_CASE("A3 amalgam maps onto SL4(2)") {
  const auto a = ct("e 1 2 m=3\ne 2 3 m=3", 2);
  const Field f(2);
  for (Strategy s : {Strategy::table, Strategy::steinberg}) {
    const auto p = amalgam_presentation(a, s);
    // x_v^+ = 1 + E_{v-1,v}; the auxiliary root of edge v_{v+1} spans two steps
    const auto images = root_images(p, [&](const Generator& g) {
      REQUIRE(g.kind != Generator::Kind::element);
      const int v = std::stoi(g.vertex);
      const int span = g.kind == Generator::Kind::auxiliary ? 2 : 1;
      std::vector<int> rows(16, 0);
      for (int i = 0; i < 4; ++i) rows[i * 4 + i] = 1;
      if (g.sign > 0)
        rows[(v - 1) * 4 + v - 1 + span] = 1;
      else
        rows[(v - 1 + span) * 4 + v - 1] = 1;
      return oracle::from_integers(f, 4, rows);
    });
    CHECK(relators_hold(f, images, p.relators));
  }
  CHECK(order_of(amalgam_presentation(a, Strategy::steinberg)) == 20160);
}

TEST_CASE("single vertex and disconnected amalgams") {
  const auto one = classify::make_descriptor(oracle::Flavor::CurtisTits, 4, diagram::parse_diagram("v 1"));
  CHECK(order_of(amalgam_presentation(one, Strategy::table)) == 60);
  CHECK(order_of(amalgam_presentation(one, Strategy::steinberg)) == 60);
  const auto a2 = ct("e 1 2 m=3", 2);
  CHECK(order_of(amalgam_presentation(a2, Strategy::table)) == 168);
}

TEST_CASE("unsupported amalgams are rejected") {
  CHECK_THROWS_AS(amalgam_presentation(ct("e 1 2 m=6", 2)), DomainError);
  const auto wide = classify::make_descriptor(oracle::Flavor::CurtisTits, 2,
                                              diagram::parse_diagram("v 1 e=2\nv 2 e=2\ne 1 2 m=3"));
  CHECK_THROWS_AS(amalgam_presentation(wide), DomainError);
  const auto phan = classify::make_descriptor(oracle::Flavor::Phan, 2, diagram::parse_diagram("e 1 2 m=3"));
  CHECK_THROWS_AS(amalgam_presentation(phan, Strategy::steinberg), DomainError);
}

TEST_CASE("Phan amalgam over F2") {
  const auto phan = classify::make_descriptor(oracle::Flavor::Phan, 2, diagram::parse_diagram("v 1"));
  CHECK(order_of(amalgam_presentation(phan)) == static_cast<std::size_t>(oracle_ref::order_su2(2)));
  const auto pair = classify::make_descriptor(oracle::Flavor::Phan, 2, diagram::parse_diagram("e 1 2 m=3"));
  const auto p = amalgam_presentation(pair);
  for (const auto& g : p.generators) CHECK(g.kind == Generator::Kind::unitary);
  // the vertex images generate a subgroup of SU3(2)
  CHECK(oracle_ref::order_su3(2) % static_cast<long long>(order_of(p)) == 0);
}

TEST_CASE("coefficient action on root symbols") {
  const Field f4(4);
  const auto group = classify::coefficient_group(oracle::Flavor::CurtisTits, 4);
  const classify::CoefficientElement tau{0, 1};
  const classify::CoefficientElement frob{1, 0};
  for (int sign : {1, -1}) {
    for (int a = 1; a < 4; ++a) {
      Generator g;
      g.kind = Generator::Kind::root;
      g.vertex = "3";
      g.sign = sign;
      g.element = a;
      const auto t = apply_coefficient(g, tau, f4);
      CHECK(t.sign == -sign);
      CHECK(t.element == f4.neg(static_cast<oracle::Fq>(a)));
      const auto tt = apply_coefficient(t, tau, f4);
      CHECK(tt.sign == sign);
      CHECK(tt.element == a);
      CHECK(tt.name == apply_coefficient(g, {}, f4).name);
      CHECK(apply_coefficient(g, frob, f4).element == f4.frobenius(static_cast<oracle::Fq>(a), 1));
      for (const auto& c : group.elements) {
        const auto back = apply_coefficient(apply_coefficient(g, c, f4), classify::inverse(c, group.modulus), f4);
        CHECK(back.sign == sign);
        CHECK(back.element == a);
      }
    }
  }
  Generator aux;
  aux.kind = Generator::Kind::auxiliary;
  CHECK_THROWS_AS(apply_coefficient(aux, {}, f4), DomainError);
}

TEST_CASE("twisted excess edge relators") {
  const auto a = sec71();
  REQUIRE(a.delta.size() == 1);
  REQUIRE(a.delta[0].tau_bit == 1);
  const Field f(2);
  for (Strategy s : {Strategy::table, Strategy::steinberg}) {
    const auto p = amalgam_presentation(a, s);
    std::vector<Word> edge;
    for (const auto& r : p.relators) {
      std::set<std::string> vertices;
      for (int l : r) vertices.insert(p.generators[std::abs(l) - 1].vertex);
      if (vertices == std::set<std::string>{"5", "6"}) edge.push_back(r);
    }
    REQUIRE_FALSE(edge.empty());
    auto images_with = [&](bool twisted) {
      return root_images(p, [&](const Generator& g) {
        if (g.kind != Generator::Kind::root || (g.vertex != "5" && g.vertex != "6")) return oracle::identity(3);
        const int vertex = g.vertex == "5" ? 0 : 1;
        const Generator h = twisted && vertex == 0 ? apply_coefficient(g, a.delta[0], f) : g;
        return oracle::root_element(f, PairType::A2, vertex, h.sign, static_cast<oracle::Fq>(h.element));
      });
    };
    CHECK(relators_hold(f, images_with(true), edge));
    CHECK_FALSE(relators_hold(f, images_with(false), edge));
  }
}

TEST_CASE("Weyl words") {
  const auto p = amalgam_presentation(sec71());
  const auto n = weyl_words(p);
  REQUIRE(n.count("3"));
  CHECK(word_to_string(p, n.at("3")) == "x3p1^1*x3m1^1*x3p1^1");
  CHECK(n.size() == 6);

  const auto sl2_4 = edge_group_presentation(PairType::A1, 4, Strategy::steinberg);
  const Field f4(4);
  const auto n4 = weyl_words(sl2_4);
  const auto images = root_images(sl2_4, [&](const Generator& g) {
    if (g.kind == Generator::Kind::root)
      return oracle::root_element(f4, PairType::A1, 0, g.sign, static_cast<oracle::Fq>(g.element));
    return oracle::identity(2);
  });
  const Matrix m = evaluate(f4, images, n4.at("1"));
  CHECK(m == oracle::from_integers(f4, 2, {0, 1, 1, 0}));
  CHECK(oracle::multiply(f4, m, m) == oracle::identity(2));

  const auto sl2_3 = edge_group_presentation(PairType::A1, 3, Strategy::steinberg);
  CHECK(word_to_string(sl2_3, weyl_words(sl2_3).at("1")) == "x1p1^1*x1m2^1*x1p1^1");
  CHECK(word_to_string(sl2_3, weyl_words(sl2_3, 2).at("1")) == "x1p2^1*x1m1^1*x1p2^1");
  CHECK_THROWS_AS(weyl_words(sl2_3, 0), DomainError);
}

TEST_CASE("relator parsing") {
  const auto p = amalgam_presentation(sec71());
  const auto rels = parse_relators(p, "(n3*n4*n5*n6*n5*n4)^2");
  REQUIRE(rels.size() == 1);
  CHECK(rels[0].size() == 36);
  CHECK(parse_relators(p, "x1p1 x1m1\n\n  x3p1^-2").size() == 2);
  CHECK(parse_relators(p, "x3p1^-2")[0] == Word{-static_cast<int>(p.generator_index("x3p1") + 1),
                                               -static_cast<int>(p.generator_index("x3p1") + 1)});
  CHECK(parse_relators(p, "").empty());
  CHECK_THROWS_AS(parse_relators(p, "n9"), ParseError);
  CHECK_THROWS_AS(parse_relators(p, "x1p1*(x1m1"), ParseError);
  CHECK_THROWS_AS(parse_relators(p, "x1p1^"), ParseError);
  try {
    parse_relators(p, "x1p1\nx1p1*bogus");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 6);
  }
}

TEST_CASE("family relator on a path with a branch") {
  // k+l diagram: a path 1..k with l extra vertices hanging off vertex 2
  const auto a = ct("e 1 2 m=3\ne 2 3 m=3\ne 3 4 m=3\ne 2 5 m=3", 2);
  const auto p = amalgam_presentation(a, Strategy::steinberg);
  const auto q = add_relators(p, "(n1*n2*n3*n4*n3^-1*n2^-1)^2");
  CHECK(q.relators.size() >= p.relators.size());
  CHECK(q.generators.size() == p.generators.size());
}

TEST_CASE("adding relators") {
  const auto p = amalgam_presentation(sec71());
  const auto same = add_relators(p, std::vector<Word>{});
  CHECK(export_neutral(same) == export_neutral(p));
  const auto extended = add_relators(p, "(n3*n4*n5*n6*n5*n4)^2");
  CHECK(extended.relators.size() == p.relators.size() + 1);
  CHECK(export_neutral(p) == export_neutral(amalgam_presentation(sec71())));
  CHECK_THROWS_AS(add_relators(p, "x9p1"), ParseError);
}

TEST_CASE("quotients divide the original order") {
  const auto sl2_4 = edge_group_presentation(PairType::A1, 4, Strategy::steinberg);
  CHECK(order_of(add_relators(sl2_4, "x1p1")) == 1);
  const auto sl3 = edge_group_presentation(PairType::A2, 2, Strategy::steinberg);
  const std::size_t n = order_of(add_relators(sl3, "(x1p1*x2p1)^2"));
  CHECK(168 % n == 0);
  const auto product = edge_group_presentation(PairType::A1xA1, 2, Strategy::steinberg);
  // identifying two commuting copies of S3 leaves its abelianization
  const std::size_t m = order_of(add_relators(product, "x1p1*x2p1^-1\nx1m1*x2m1^-1"));
  CHECK(m == 2);
  CHECK(36 % m == 0);
}

TEST_CASE("abelian invariants") {
  Presentation cyclic;
  cyclic.generators = {{"a"}};
  cyclic.relators = {{1, 1}};
  CHECK(abelianization(cyclic).to_string() == "[2]");
  Presentation free;
  free.generators = {{"a"}};
  CHECK(abelianization(free).to_string() == "[0]");
  Presentation mixed;
  mixed.generators = {{"a"}, {"b"}, {"c"}};
  mixed.relators = {{1, 1, 1, 1, 1, 1}, {2, 2, 2, 2}};
  CHECK(abelianization(mixed).to_string() == "[2, 12, 0]");
  CHECK(abelianization(edge_group_presentation(PairType::A1, 2, Strategy::table)).to_string() == "[2]");
  CHECK(abelianization(edge_group_presentation(PairType::A1, 3, Strategy::steinberg)).to_string() == "[3]");
  CHECK(abelianization(edge_group_presentation(PairType::A1xA1, 2, Strategy::steinberg)).to_string() == "[2, 2]");
  CHECK(abelianization(edge_group_presentation(PairType::A1, 4, Strategy::steinberg)).trivial());
  const auto e6 = add_relators(amalgam_presentation(sec71()), "(n3*n4*n5*n6*n5*n4)^2");
  CHECK(abelianization(e6).trivial());
  CHECK(abelianization(e6).to_string() == "[]");
}

TEST_CASE("neutral format round trip") {
  for (const auto& p : {edge_group_presentation(PairType::A1, 3, Strategy::steinberg),
                        amalgam_presentation(sec71(), Strategy::steinberg)}) {
    const std::string text = export_neutral(p);
    const auto back = parse_neutral(text);
    CHECK(export_neutral(back) == text);
    CHECK(back.q == p.q);
    CHECK(back.strategy == p.strategy);
    REQUIRE(back.generators.size() == p.generators.size());
    for (std::size_t k = 0; k < p.generators.size(); ++k) {
      CHECK(back.generators[k].kind == p.generators[k].kind);
      CHECK(back.generators[k].vertex == p.generators[k].vertex);
      CHECK(back.generators[k].sign == p.generators[k].sign);
      CHECK(back.generators[k].root == p.generators[k].root);
      CHECK(back.generators[k].element == p.generators[k].element);
    }
  }
  CHECK_THROWS_AS(parse_neutral("gen a\nrel b^1"), ParseError);
  CHECK_THROWS_AS(parse_neutral("gen a\ngen a"), ParseError);
  CHECK_THROWS_AS(parse_neutral("gen a\nrel a^x"), ParseError);
  CHECK_THROWS_AS(parse_neutral("frobnicate"), ParseError);
}

TEST_CASE("golden exports") {
  const auto sl2 = edge_group_presentation(PairType::A1, 2, Strategy::table);
  CHECK(export_gap(sl2) == testutil::golden("sl2-2-table.g"));
  CHECK(export_neutral(sl2) == testutil::golden("sl2-2-table.pres"));
  const auto e6 = add_relators(amalgam_presentation(sec71()), "(n3*n4*n5*n6*n5*n4)^2");
  CHECK(export_gap(e6) == testutil::golden("sec7-1-relator.g"));
  CHECK(export_gap(e6) == export_gap(add_relators(amalgam_presentation(sec71()), "(n3*n4*n5*n6*n5*n4)^2")));
}

TEST_CASE("GAP export of a free group") {
  Presentation free;
  free.generators = {{"a"}, {"b"}};
  free.source = "free";
  const std::string gap = export_gap(free);
  CHECK(gap.find("F := FreeGroup(\"a\", \"b\");;") != std::string::npos);
  CHECK(gap.find("rels := [];;") != std::string::npos);
}

TEST_CASE("simplification keeps the group") {
  const auto sl2 = edge_group_presentation(PairType::A1, 2, Strategy::table);
  const auto s = simplify(sl2);
  CHECK(s.generators.size() == 2);
  CHECK(s.relators.size() < sl2.relators.size());
  CHECK(order_of(s) == 6);
  std::set<std::string> rels;
  for (const auto& r : s.relators) rels.insert(word_to_string(s, r));
  CHECK(rels.count("x1p1^1*x1p1^1"));
  CHECK(rels.count("x1m1^1*x1m1^1"));
  const auto s3 = simplify(edge_group_presentation(PairType::A1, 3, Strategy::table));
  CHECK(order_of(s3) == 24);
}
