// One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "amalgam/classify.hpp"
#include "amalgam/coxeter.hpp"
#include "amalgam/diagram.hpp"
#include "amalgam/enumerate.hpp"
#include "amalgam/error.hpp"
#include "amalgam/growth.hpp"
#include "amalgam/matrix_group.hpp"
#include "amalgam/presentation.hpp"
#include "oracles.hpp"
#include "util.hpp"

using namespace amalgam;
using diagram::Diagram;
using growth::Poly;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (ok) detail << "failed: ";
      else detail << "; ";
      detail << what;
      ok = false;
    }
  }
};

Diagram complete(int n, int m) {
  std::vector<diagram::EdgeSpec> edges;
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) edges.push_back({std::to_string(i), std::to_string(j), m});
  }
  return Diagram({}, edges, diagram::LabelPolicy::general);
}

// 2 p1 p3 / (2(1-(n-1)t)(1+t+t^2+t^3) + t^4 n(n-1)), written out independently
growth::GrowthSeries denominator_formula(long n) {
  const Poly num = growth::scale(growth::mul(Poly{1, 1}, Poly{1, 1, 1, 1}), 2);
  Poly den = growth::scale(growth::mul(Poly{1, -(n - 1)}, Poly{1, 1, 1, 1}), 2);
  den = growth::add(den, Poly{0, 0, 0, 0, n * (n - 1)});
  return growth::normalize(num, den);
}

diagram::CoverData eight_cycle() { return diagram::double_cover(diagram::parse_diagram(testutil::data("cycle4.dyn")), {1}); }

Diagram two_loops() {
  return diagram::parse_diagram("e 1 2 m=3\ne 2 3 m=3\ne 3 4 m=3\ne 4 5 m=3\ne 5 6 m=3\ne 1 6 m=3\ne 1 4 m=3");
}

Diagram three_loops() {
  return diagram::parse_diagram(
      "e 1 2 m=3\ne 2 3 m=3\ne 3 4 m=3\ne 1 4 m=3\ne 3 5 m=3\ne 5 6 m=3\ne 4 6 m=3\ne 5 7 m=3\ne 7 8 m=3\ne 6 8 m=3");
}

void c1(Outcome& o) {
  for (int n = 3; n <= 8; ++n) {
    const auto g = growth::growth_series(complete(n, 4));
    o.require(g == denominator_formula(n), "n=" + std::to_string(n) + " series " + growth::to_string(g));
  }
  o.detail << "n=3..8 exact";
}

void c2(Outcome& o) {
  const auto r = growth::growth_rate(complete(1000, 4));
  const mpq_class centre(1001, 1000000);
  const mpq_class tol(1, 100000);
  o.require(!r.finite_type, "finite type");
  o.require(r.rho.lo >= centre - tol && r.rho.hi <= centre + tol, "rho " + r.rho.to_string());
  o.detail << std::setprecision(10) << "rho in [" << r.rho.lo.get_d() << ", " << r.rho.hi.get_d() << "]";
}

void c3(Outcome& o) {
  for (int n = 3; n <= 8; ++n) {
    const auto rep = growth::lattice_check(complete(n, 4), n);
    const std::string tag = "n=" + std::to_string(n);
    o.require(rep.series_converges_at_1_over_q, tag + " diverges");
    o.require(rep.paper_bound_satisfied, tag + " bound");
    o.require(!rep.rate.finite_type && rep.rate.omega.hi <= n, tag + " omega " + rep.rate.omega.to_string());
  }
  o.detail << "q=n for n=3..8";
}

void c4(Outcome& o) {
  const std::vector<std::pair<std::string, Diagram>> cases{
      {"affine A2", diagram::parse_diagram(testutil::data("triangle.dyn"))},
      {"dominating n=3", diagram::parse_diagram(testutil::data("dominating-n3.dyn"))},
      {"8-cycle cover", eight_cycle().cover}};
  for (const auto& [name, d] : cases) {
    const auto series = growth::series_coefficients(growth::growth_series(d), 10);
    const auto balls = coxeter::ball_counts(coxeter::CoxeterSystem(d), 10);
    bool same = series.size() == balls.size();
    for (std::size_t l = 0; same && l < balls.size(); ++l) same = series[l] == mpz_class(static_cast<unsigned long>(balls[l]));
    o.require(same, name);
  }
  o.detail << "a0..a10 on 3 diagrams";
}

void c5(Outcome& o) {
  const auto c = eight_cycle();
  const coxeter::CoxeterSystem sys(c.cover);
  const coxeter::DiagramInvolution theta(c.deck.begin(), c.deck.end());
  const auto rep = coxeter::twisted_involutions(sys, theta, 10);
  o.require(rep.equal_up_to_R && rep.inv == rep.delta_image, "Inv != delta image");
  for (const auto& u : rep.inv) {
    o.require(u.size() % 2 == 0, "odd length " + coxeter::to_string(u));
    const auto w = coxeter::twisted_decomposition(sys, theta, u);
    o.require(2 * sys.length(w) == u.size(), "decomposition of " + coxeter::to_string(u));
    o.require(sys.equal(sys.multiply(w, sys.inverse(coxeter::apply_theta(theta, w))), u), "product " + coxeter::to_string(u));
  }
  o.detail << rep.inv.size() << " twisted involutions up to length 10";
}

void c6(Outcome& o) {
  const auto classes = classify::enumerate_delta_classes(diagram::parse_diagram(testutil::data("sec7-1.dyn")),
                                                         oracle::Flavor::CurtisTits, 2);
  std::size_t orientable = 0;
  for (const auto& a : classes) orientable += classify::orientability(a).orientable ? 1 : 0;
  o.require(classes.size() == 2, std::to_string(classes.size()) + " classes");
  o.require(orientable == 1, std::to_string(orientable) + " orientable");
  const std::vector<Diagram> diagrams{diagram::parse_diagram(testutil::data("sec7-1.dyn")), two_loops(), three_loops()};
  for (std::size_t r = 1; r <= 3; ++r) {
    const auto phan = classify::make_descriptor(oracle::Flavor::Phan, 2, diagrams[r - 1]);
    o.require(phan.span.r == r, "rank of loop space");
    const auto fiber = classify::phan_fiber(phan);
    o.require(fiber.size() == (std::size_t{1} << r), "fiber size " + std::to_string(fiber.size()));
    for (const auto& ct : fiber) o.require(classify::phan_restriction(ct) == phan, "round trip");
  }
  o.detail << "2 classes, 1 orientable; fibers 2, 4, 8";
}

void c7(Outcome& o) {
  const auto a = classify::parse_descriptor(testutil::data("sec7-1.desc"));
  o.require(a.delta.size() == 1 && a.delta[0].tau_bit == 1, "descriptor carries tau");
  const auto orient = classify::orientability(a);
  const auto c = diagram::double_cover(a.diagram, orient.omega_star);
  o.require(diagram::check_cover(c).empty(), "cover invariants");
  o.require(c.cover.size() == 12 && c.cover.edges().size() == 12, "cover size");
  for (std::size_t v = 0; v < c.deck.size(); ++v) o.require(c.deck[v] != v && c.deck[c.deck[v]] == v, "deck");
  const auto& loop = a.span.loops[0];
  const auto tau_fiber = diagram::loop_fiber_type(c, loop, diagram::omega_of_loop(c, loop));
  o.require(tau_fiber.type == diagram::FiberType::single_double_loop && tau_fiber.cycles.size() == 1 &&
                tau_fiber.cycles[0].size() == 8,
            "tau fiber");
  o.require(classify::orientability(classify::lift_to_cover(a, c)).orientable, "lift orientable");

  const auto frob = classify::make_descriptor(oracle::Flavor::CurtisTits, 4, a.diagram, {classify::CoefficientElement{1, 0}});
  const auto frob_orient = classify::orientability(frob);
  o.require(frob_orient.orientable, "pure Frobenius orientable");
  const auto trivial = diagram::trivial_double_cover(frob.diagram);
  const auto frob_fiber = diagram::loop_fiber_type(trivial, loop, diagram::omega_of_loop(trivial, loop));
  o.require(frob_fiber.type == diagram::FiberType::two_disjoint_loops && frob_fiber.cycles.size() == 2 &&
                frob_fiber.cycles[0].size() == 4 && frob_fiber.cycles[1].size() == 4,
            "Frobenius fiber");
  o.detail << "12 vertices, 12 edges; 8-loop for tau, 4+4 for frob";
}

void c8(Outcome& o) {
  using presentation::Strategy;
  using oracle::PairType;
  auto order = [&](const presentation::Presentation& p, const std::string& name) -> std::size_t {
    const auto t = enumerate::todd_coxeter(p, {});
    o.require(t.complete(), name + " overflow");
    if (!t.complete()) return 0;
    o.require(enumerate::verify_table(t, p), name + " verify");
    return t.index;
  };
  const auto a3 = classify::make_descriptor(oracle::Flavor::CurtisTits, 2, diagram::parse_diagram(testutil::data("a3.dyn")));
  for (Strategy s : {Strategy::table, Strategy::steinberg}) {
    const std::string tag = " " + presentation::to_string(s);
    o.require(order(presentation::edge_group_presentation(PairType::A1, 2, s), "SL2(2)" + tag) == oracle_ref::order_sl(2, 2),
              "SL2(2)" + tag);
    o.require(order(presentation::edge_group_presentation(PairType::A1, 4, s), "SL2(4)" + tag) == oracle_ref::order_sl(2, 4),
              "SL2(4)" + tag);
    o.require(order(presentation::edge_group_presentation(PairType::A2, 2, s), "SL3(2)" + tag) == oracle_ref::order_sl(3, 2),
              "SL3(2)" + tag);
    o.require(order(presentation::amalgam_presentation(a3, s), "A3" + tag) == oracle_ref::order_sl(4, 2), "A3" + tag);
  }
  o.detail << "6, 60, 168, 20160 with both strategies";
}

void c9(Outcome& o) {
  using oracle::PairType;
  const auto sl2 = oracle::standard_pair_realization(PairType::A1, 4, oracle::Flavor::CurtisTits);
  const auto fixed = oracle::fixed_subgroup(sl2.group, oracle::Involution::theta);
  const auto su2 = oracle::standard_pair_realization(PairType::A1, 2, oracle::Flavor::Phan);
  o.require(fixed.order() == 6, "order " + std::to_string(fixed.order()));
  o.require(fixed.same_elements(su2.group), "SU2(2) elementwise");
  const auto sl3 = oracle::standard_pair_realization(PairType::A2, 4, oracle::Flavor::CurtisTits);
  const auto su3 = oracle::standard_pair_realization(PairType::A2, 2, oracle::Flavor::Phan);
  const auto fixed3 = oracle::fixed_subgroup(sl3.group, oracle::Involution::theta);
  o.require(fixed3.same_elements(su3.group), "SU3(2) elementwise");
  o.detail << "|SL2(4)^theta| = 6 = |SU2(2)|; SL3(4)^theta = SU3(2) (" << fixed3.order() << ")";
}

void c10(Outcome& o) {
  const auto a = classify::parse_descriptor(testutil::data("sec7-1.desc"));
  const std::string relator = "(n3*n4*n5*n6*n5*n4)^2";
  const auto p = presentation::add_relators(presentation::amalgam_presentation(a), relator);
  const std::string gap = presentation::export_gap(p);
  o.require(gap == presentation::export_gap(presentation::add_relators(presentation::amalgam_presentation(a), relator)),
            "export not stable");
  o.require(gap == testutil::golden("sec7-1-relator.g"), "golden mismatch");
  const auto ab = presentation::abelianization(p);
  o.require(ab.trivial(), "abelianization " + ab.to_string());
  o.detail << p.generators.size() << " generators, " << p.relators.size() << " relators, abelianization "
           << ab.to_string();
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double limit;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria{{1, 1, c1},   {2, 1, c2},  {3, 5, c3},  {4, 60, c4},  {5, 120, c5},
                                        {6, 1, c6},   {7, 1, c7},  {8, 120, c8}, {9, 30, c9}, {10, 10, c10}};
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.limit) {
      std::ostringstream t;
      t << "took " << secs << " s, limit " << c.limit << " s";
      o.require(false, t.str());
    }
    char timing[32];
    std::snprintf(timing, sizeof timing, "%.3f s", secs);
    std::cout << "criterion " << c.id << ": " << (o.ok ? "PASS" : "FAIL") << " (" << timing << ") " << o.detail.str()
              << "\n";
    failed += o.ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
