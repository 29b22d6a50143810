#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gridvfa/simplex.hpp"

using namespace gridvfa;

namespace {

// random small LP with a guaranteed feasible point
ConvexProgram random_lp(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.2, 2.0);
  ConvexProgram p;
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) {
    const double l = -pos(rng), u = pos(rng);
    p.add_variable(l, u, unif(rng));
    std::uniform_real_distribution<double> inside(l, u);
    x0[j] = inside(rng);
  }
  for (int i = 0; i < m; ++i) {
    std::vector<std::pair<int, double>> coeffs;
    double ax = 0.0;
    for (int j = 0; j < n; ++j) {
      const double a = unif(rng);
      if (std::abs(a) > 0.3) {
        coeffs.emplace_back(j, a);
        ax += a * x0[j];
      }
    }
    if (coeffs.empty()) continue;
    const int kind = static_cast<int>(rng() % 3);
    if (kind == 0) p.add_row(RowKind::eq, coeffs, ax);
    else if (kind == 1) p.add_row(RowKind::le, coeffs, ax + pos(rng));
    else p.add_row(RowKind::ge, coeffs, ax - pos(rng));
  }
  return p;
}

} // namespace

TEST_CASE("one-variable LP with upper bound and its dual") {
  ConvexProgram p;
  p.add_variable(0.0, kInf, -1.0);
  p.add_row(RowKind::le, {{0, 1.0}}, 3.0);
  const Solution s = solve(p);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.primal[0] == doctest::Approx(3.0));
  CHECK(s.objective == doctest::Approx(-3.0));
  CHECK(s.row_duals[0] == doctest::Approx(-1.0));
}

TEST_CASE("unconstrained proximal minimum sits at the center") {
  ConvexProgram p;
  p.add_variable(0.0, 10.0, 0.0);
  p.set_proximal(2.0, {{0, 2.0}});
  const Solution s = solve(p);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.primal[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(s.objective == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("degenerate symmetric equality LP") {
  ConvexProgram p;
  p.add_variable(0.0, 10.0, 1.0);
  p.add_variable(0.0, 10.0, 1.0);
  p.add_row(RowKind::eq, {{0, 1.0}, {1, 1.0}}, 5.0);
  const Solution s = solve(p);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.objective == doctest::Approx(5.0));
  CHECK(s.row_duals[0] == doctest::Approx(1.0));
  CHECK(s.primal[0] + s.primal[1] == doctest::Approx(5.0));
}

TEST_CASE("infeasible and unbounded programs are reported") {
  ConvexProgram p;
  p.add_variable(0.0, 1.0, 0.0);
  p.add_row(RowKind::eq, {{0, 1.0}}, 5.0);
  CHECK(solve(p).status == SolveStatus::infeasible);

  ConvexProgram q;
  q.add_variable(0.0, kInf, -1.0);
  CHECK(solve(q).status == SolveStatus::unbounded);
}

TEST_CASE("strong duality holds on random LPs") {
  std::mt19937_64 rng(7);
  int solved = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const ConvexProgram p = random_lp(rng, 4 + static_cast<int>(rng() % 5),
                                      2 + static_cast<int>(rng() % 4));
    const Solution s = solve(p);
    if (s.status != SolveStatus::optimal) continue;
    ++solved;
    // primal feasibility
    for (int i = 0; i < p.num_rows(); ++i) {
      double ax = 0.0;
      for (const auto& [j, a] : p.rows[i].coeffs) ax += a * s.primal[j];
      switch (p.rows[i].kind) {
        case RowKind::eq:
          CHECK(ax == doctest::Approx(p.rows[i].rhs).epsilon(1e-7));
          break;
        case RowKind::le: CHECK(ax <= p.rows[i].rhs + 1e-7); break;
        case RowKind::ge: CHECK(ax >= p.rows[i].rhs - 1e-7); break;
      }
    }
    const double gap = std::abs(s.objective - dual_objective(p, s));
    CHECK(gap <= 1e-7 * (1.0 + std::abs(s.objective)));
  }
  CHECK(solved > 100);
}

TEST_CASE("row duals match finite differences away from degeneracy") {
  std::mt19937_64 rng(21);
  const double h = 1e-5;
  int checked = 0;
  for (int trial = 0; trial < 150 && checked < 60; ++trial) {
    ConvexProgram p = random_lp(rng, 5, 3);
    const Solution s = solve(p);
    if (s.status != SolveStatus::optimal || s.degenerate) continue;
    for (int i = 0; i < p.num_rows(); ++i) {
      ConvexProgram pp = p;
      pp.rows[i].rhs += h;
      const Solution sp = solve(pp);
      if (sp.status != SolveStatus::optimal) continue;
      const double fd = (sp.objective - s.objective) / h;
      CHECK(fd == doctest::Approx(s.row_duals[i]).epsilon(2e-4).scale(1.0));
      ++checked;
    }
  }
  CHECK(checked >= 30);
}

TEST_CASE("warm start reproduces the optimum and speeds convergence") {
  std::mt19937_64 rng(3);
  const ConvexProgram p = random_lp(rng, 8, 5);
  const Solution cold = solve(p);
  REQUIRE(cold.status == SolveStatus::optimal);

  SUBCASE("exact optimum as hint") {
    const Solution warm = warm_solve(p, cold);
    REQUIRE(warm.status == SolveStatus::optimal);
    CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-9));
    CHECK(warm.iterations <= cold.iterations);
  }
  SUBCASE("garbage hint still yields the optimum") {
    Solution bad = cold;
    for (auto& s : bad.vstat)
      if (s == VarStatus::at_lower) s = VarStatus::at_upper;
    const Solution warm = warm_solve(p, bad);
    REQUIRE(warm.status == SolveStatus::optimal);
    CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-9));
  }
  SUBCASE("perturbed rhs from hinted solve stays Lipschitz-close") {
    ConvexProgram pp = p;
    if (pp.num_rows() > 0) pp.rows[0].rhs += 1e-6;
    const Solution warm = warm_solve(pp, cold);
    REQUIRE(warm.status == SolveStatus::optimal);
    CHECK(std::abs(warm.objective - cold.objective) <= 1e-5 * (1.0 + std::abs(cold.objective)));
  }
}

TEST_CASE("proximal objective is monotone in rho and tends to the LP optimum") {
  ConvexProgram base;
  base.add_variable(0.0, 4.0, 1.0);
  base.add_variable(0.0, 4.0, -2.0);
  base.add_row(RowKind::le, {{0, 1.0}, {1, 1.0}}, 5.0);
  const Solution lp = solve(base);
  REQUIRE(lp.status == SolveStatus::optimal);

  double prev = lp.objective;
  for (double rho : {1e-4, 1e-2, 1e-1, 1.0}) {
    ConvexProgram p = base;
    p.set_proximal(rho, {{0, 2.0}, {1, 1.0}});
    const Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.objective >= prev - 1e-7);
    prev = s.objective;
  }

  ConvexProgram small = base;
  small.set_proximal(1e-7, {{0, 2.0}, {1, 1.0}});
  const Solution s = solve(small);
  CHECK(s.objective == doctest::Approx(lp.objective).epsilon(1e-4));
}

TEST_CASE("LP format dump mentions every row") {
  ConvexProgram p;
  p.add_variable(0.0, 1.0, 2.5);
  p.add_variable(-1.0, kInf, -1.0);
  p.add_row(RowKind::eq, {{0, 1.0}, {1, -2.0}}, 0.5);
  p.add_row(RowKind::ge, {{1, 1.0}}, -0.25);
  std::ostringstream os;
  write_lp_format(p, os);
  const std::string text = os.str();
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("r0:") != std::string::npos);
  CHECK(text.find("r1:") != std::string::npos);
  CHECK(text.find("Bounds") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}

TEST_CASE("fixed variables and free variables are handled") {
  ConvexProgram p;
  p.add_variable(2.0, 2.0, 1.0);              // fixed
  p.add_variable(-kInf, kInf, 0.0);           // free
  p.add_row(RowKind::eq, {{0, 1.0}, {1, 1.0}}, 5.0);
  const Solution s = solve(p);
  REQUIRE(s.status == SolveStatus::optimal);
  CHECK(s.primal[0] == doctest::Approx(2.0));
  CHECK(s.primal[1] == doctest::Approx(3.0));
  CHECK(s.objective == doctest::Approx(2.0));
}
