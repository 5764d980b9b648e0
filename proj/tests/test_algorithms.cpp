#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "rbg/algorithms/cut_and_play.hpp"
#include "rbg/algorithms/full_enumeration.hpp"
#include "rbg/corpus/generators.hpp"
#include "rbg/error.hpp"
#include "support/fixtures.hpp"

using namespace rbg;
using namespace rbg::algorithms;
using namespace rbg::games;
using namespace rbg::mathopt;
using namespace fixtures;

namespace {

const std::vector<std::vector<Vector>> kKnapsackEquilibria{
    {{0, 1}, {1, 0}}, {{1, 0}, {0, 1}}, {{2.0 / 9, 7.0 / 9}, {0.4, 0.6}}};

bool close(const std::vector<Vector>& a, const std::vector<Vector>& b, double tol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].size() != b[i].size() || normInf(subtract(a[i], b[i])) > tol) return false;
  return true;
}

bool inList(const std::vector<Vector>& x, const std::vector<EquilibriumResult>& list, double tol) {
  return std::any_of(list.begin(), list.end(), [&](const EquilibriumResult& r) {
    return close(x, r.profile.barycenters(), tol);
  });
}

SolverOptions referenceOptions() {
  SolverOptions o;
  o.deviationEps = 3e-4;
  o.timeLimitSeconds = 5.0;
  return o;
}

// A vertex of the hull: optimum of a random objective over the lifted form.
Vector hullVertex(const ExtendedHull& h, SeededRng& rng) {
  const Polyhedron lifted = h.liftedPolyhedron();
  Vector obj(lifted.dimension(), 0.0);
  for (std::size_t j = 0; j < h.dimension(); ++j) obj[j] = static_cast<double>(rng.uniformInt(-5, 5));
  const LPResult lp = solveLP(lifted.asProgram(obj));
  REQUIRE(lp.status == LPStatus::Optimal);
  return Vector(lp.x.begin(), lp.x.begin() + static_cast<long>(h.dimension()));
}

}  // namespace

TEST_CASE("knapsack cover separates the half item") {
  const PlayerProgram p = blue();
  const auto cut = knapsackCover(p, 0, Vector{1, 0.5}, 1e-6);
  REQUIRE(cut);
  CHECK(cut->coefficients == Vector{1, 1});
  CHECK(cut->rhs == 1.0);
  CHECK(cut->violation(Vector{1, 0.5}) == doctest::Approx(0.5));
  for (const Vector& x : binaryPoints(p)) CHECK(cut->violation(x) <= 0.0);
  CHECK_FALSE(knapsackCover(p, 0, Vector{0, 1}, 1e-6));
}

TEST_CASE("cover cuts with negative coefficients are valid") {
  auto rng = seededRng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = static_cast<std::size_t>(rng.uniformInt(2, 5));
    Vector a(m);
    for (double& v : a) v = static_cast<double>(rng.uniformInt(-6, 9));
    const PlayerProgram p = binaryPlayer(Vector(m, -1.0), SparseMatrix(0, m), {a},
                                         {static_cast<double>(rng.uniformInt(0, 8))});
    Vector sigma(m);
    for (double& v : sigma) v = rng.uniform01();
    const auto cut = knapsackCover(p, 0, sigma, 1e-6);
    if (!cut) continue;
    CHECK(cut->violation(sigma) >= 1e-6);
    for (const Vector& x : binaryPoints(p)) CHECK(cut->violation(x) <= 1e-12);
  }
}

TEST_CASE("separation oracle examples") {
  const PlayerProgram p = blue();
  PlayerRegion region = PlayerRegion::initial(p);

  const SeparationResult member = separationOracle(p, Vector{0, 1}, region);
  CHECK(member.kind == SeparationKind::Member);
  REQUIRE(member.support.size() == 1);
  CHECK(member.support[0].point == Vector{0, 1});

  const SeparationResult half = separationOracle(p, Vector{1, 0.5}, region);
  REQUIRE(half.kind == SeparationKind::Cuts);
  CHECK(half.cuts[0].violation(Vector{1, 0.5}) >= 1e-6);

  // Branch on x2 at (1, 0.5): the hull of the children is conv{(0,0),(1,0),(0,1)}.
  SeparationResult branch;
  branch.kind = SeparationKind::Branch;
  branch.piece = 0;
  branch.variable = 1;
  branch.value = 0.5;
  REQUIRE(refineRegion(region, branch));
  CHECK(region.pieces.size() == 2);
  const ExtendedHull h = region.hull();
  CHECK(hullContains(h, Vector{0.5, 0.5}));
  CHECK_FALSE(hullContains(h, Vector{1, 0.5}));
  CHECK_FALSE(hullContains(h, Vector{0.7, 0.7}));

  const SeparationResult mixed = separationOracle(p, Vector{2.0 / 9, 7.0 / 9}, region);
  REQUIRE(mixed.kind == SeparationKind::Member);
  double w10 = 0, w01 = 0, other = 0;
  for (const WeightedPoint& wp : mixed.support) {
    if (wp.point == Vector{1, 0}) w10 += wp.weight;
    else if (wp.point == Vector{0, 1}) w01 += wp.weight;
    else other += wp.weight;
  }
  // (0,0) may carry weight only if the combination stays exact.
  CHECK(w10 + w01 + other == doctest::Approx(1.0));
  Vector bary(2, 0.0);
  for (const WeightedPoint& wp : mixed.support)
    for (std::size_t j = 0; j < 2; ++j) bary[j] += wp.weight * wp.point[j];
  CHECK(normInf(subtract(bary, Vector{2.0 / 9, 7.0 / 9})) <= 1e-7);
}

TEST_CASE("a cover cut refines the relaxation") {
  const PlayerProgram p = blue();
  PlayerRegion region = PlayerRegion::initial(p);
  SeparationResult cuts;
  cuts.kind = SeparationKind::Cuts;
  cuts.cuts.push_back(Cut{{1, 1}, 1});
  REQUIRE(refineRegion(region, cuts));
  CHECK_FALSE(hullContains(region.hull(), Vector{1, 0.5}));
  CHECK(hullContains(region.hull(), Vector{0, 1}));
}

TEST_CASE("Gomory cuts are valid for every lattice point and cut the vertex") {
  auto rng = seededRng(31);
  int produced = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = static_cast<std::size_t>(rng.uniformInt(2, 3));
    const std::size_t rows = static_cast<std::size_t>(rng.uniformInt(1, 3));
    SparseMatrix A(rows, m);
    Vector b(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < m; ++j) A.set(r, j, static_cast<double>(rng.uniformInt(-3, 5)));
      b[r] = static_cast<double>(rng.uniformInt(2, 9));
    }
    std::vector<std::size_t> ints(m);
    for (std::size_t j = 0; j < m; ++j) ints[j] = j;
    const PlayerProgram p(Vector(m, 0.0), SparseMatrix(0, m), A, b, ints,
                          std::vector<Bounds>(m, Bounds{0, 3}));
    Vector obj(m);
    for (double& v : obj) v = static_cast<double>(rng.uniformInt(-5, 2));
    const LPResult lp = solveLP(p.relaxation(obj));
    if (lp.status != LPStatus::Optimal) continue;
    const PlayerRegion region = PlayerRegion::initial(p);
    const auto cuts = gomoryCuts(p, region.pieces[0], lp.x, 1e-6);
    produced += static_cast<int>(cuts.size());
    for (const Cut& cut : cuts) {
      CHECK(cut.violation(lp.x) >= 1e-6);
      Vector x(m);
      for (int idx = 0; idx < static_cast<int>(std::pow(4, m)); ++idx) {
        int rest = idx;
        for (std::size_t j = 0; j < m; ++j) {
          x[j] = rest % 4;
          rest /= 4;
        }
        if (p.isFeasible(x, 0.0)) CHECK(cut.violation(x) <= 1e-7);
      }
    }
  }
  CHECK(produced > 0);
}

TEST_CASE("cut and play on the knapsack game") {
  const GameModel g = knapsackGame();
  for (LCPMethod method : {LCPMethod::Branching, LCPMethod::Lemke}) {
    SolverOptions opts = referenceOptions();
    opts.lcp = method;
    const EquilibriumResult r = cutAndPlay(g, opts);
    REQUIRE((r.status == EquilibriumStatus::PNE || r.status == EquilibriumStatus::MNE));
    bool matched = false;
    for (const auto& eq : kKnapsackEquilibria) matched = matched || close(r.profile.barycenters(), eq, 1e-5);
    CHECK(matched);
    CHECK(deviationCheck(g, r.profile, 3e-4).empty());
    CHECK(r.stats.iterations >= 1);
  }
}

TEST_CASE("single player returns the IP optimum") {
  const GameModel g({binaryPlayer({-1, -2}, SparseMatrix(0, 2), {{3, 4}}, {5})});
  const EquilibriumResult r = cutAndPlay(g, referenceOptions());
  REQUIRE((r.status == EquilibriumStatus::PNE));
  CHECK(r.profile.players[0].barycenter == Vector{0, 1});
  CHECK(r.payoffs[0] == doctest::Approx(-2.0));
}

TEST_CASE("an infeasible player makes the game infeasible") {
  // x <= -1 and x >= 0.
  const GameModel g({binaryPlayer({1}, SparseMatrix(0, 1), {{1}}, {-1})});
  CHECK((cutAndPlay(g, referenceOptions()).status == EquilibriumStatus::Infeasible));
  CHECK_THROWS_AS(fullEnumeration(g, referenceOptions()), PlayerInfeasible);
}

TEST_CASE("solver options are validated") {
  SolverOptions o;
  o.workers = 0;
  CHECK_THROWS_AS(o.validate(), UsageError);
  o = {};
  o.timeLimitSeconds = 0.0;
  CHECK_THROWS_AS(o.validate(), UsageError);
  o = {};
  o.deviationEps = -1.0;
  CHECK_THROWS_AS(o.validate(), UsageError);
}

TEST_CASE("full enumeration of the knapsack game finds exactly three equilibria") {
  const auto results = fullEnumeration(knapsackGame(), referenceOptions());
  REQUIRE(results.size() == 3);
  int pure = 0, mixed = 0;
  for (const auto& r : results) {
    (r.status == EquilibriumStatus::PNE ? pure : mixed)++;
    bool known = false;
    for (const auto& eq : kKnapsackEquilibria) known = known || close(r.profile.barycenters(), eq, 1e-6);
    CHECK(known);
  }
  CHECK(pure == 2);
  CHECK(mixed == 1);
}

TEST_CASE("matching pennies has only a mixed equilibrium") {
  const PlayerProgram b = binaryPlayer({2}, SparseMatrix(1, 1, {{0, 0, -4}}), {}, {});
  const PlayerProgram r = binaryPlayer({-2}, SparseMatrix(1, 1, {{0, 0, 4}}), {}, {});
  const GameModel g({b, r});
  const auto results = fullEnumeration(g, referenceOptions());
  REQUIRE(results.size() == 1);
  CHECK((results[0].status == EquilibriumStatus::MNE));
  CHECK(results[0].profile.players[0].barycenter[0] == doctest::Approx(0.5));
  CHECK(results[0].profile.players[1].barycenter[0] == doctest::Approx(0.5));

  const EquilibriumResult cp = cutAndPlay(g, referenceOptions());
  REQUIRE((cp.status == EquilibriumStatus::MNE));
  CHECK(cp.profile.players[0].barycenter[0] == doctest::Approx(0.5));
  CHECK(cp.profile.players[1].barycenter[0] == doctest::Approx(0.5));
}

TEST_CASE("decoupled game has the dominant profile as its only equilibrium") {
  const GameModel g({binaryPlayer({-1, -2}, SparseMatrix(2, 2), {{3, 4}}, {5}),
                     binaryPlayer({-3, -5}, SparseMatrix(2, 2), {{2, 5}}, {5})});
  const auto results = fullEnumeration(g, referenceOptions());
  REQUIRE(results.size() == 1);
  CHECK((results[0].status == EquilibriumStatus::PNE));
  CHECK(close(results[0].profile.barycenters(), {{0, 1}, {0, 1}}, 0.0));
  const EquilibriumResult cp = cutAndPlay(g, referenceOptions());
  CHECK((cp.status == EquilibriumStatus::PNE));
  CHECK(close(cp.profile.barycenters(), {{0, 1}, {0, 1}}, 1e-9));
}

TEST_CASE("bimatrix enumeration handles a fully degenerate game") {
  const DenseMatrix zero(2, 2);
  const auto eqs = bimatrixEquilibria(zero, zero);
  // Every profile is an equilibrium; the extreme ones are the four pure profiles.
  CHECK(eqs.size() == 4);
  CHECK_THROWS_AS(bimatrixEquilibria(DenseMatrix(2, 2), DenseMatrix(2, 3)), UsageError);
}

TEST_CASE("enumerated mixed equilibria satisfy the indifference conditions") {
  auto rng = seededRng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = static_cast<std::size_t>(rng.uniformInt(1, 5));
    const std::size_t cols = static_cast<std::size_t>(rng.uniformInt(1, 5));
    DenseMatrix A(rows, cols), B(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        A(r, c) = static_cast<double>(rng.uniformInt(-5, 5));
        B(r, c) = static_cast<double>(rng.uniformInt(-5, 5));
      }
    const auto eqs = bimatrixEquilibria(A, B);
    CHECK(!eqs.empty());
    for (const auto& eq : eqs) {
      const Vector ay = A.multiply(eq.y);
      const Vector bx = B.multiplyTransposed(eq.x);
      const double v = *std::min_element(ay.begin(), ay.end());
      const double u = *std::min_element(bx.begin(), bx.end());
      for (std::size_t r = 0; r < rows; ++r)
        if (eq.x[r] > 0) CHECK(ay[r] <= v + 1e-9);
      for (std::size_t c = 0; c < cols; ++c)
        if (eq.y[c] > 0) CHECK(bx[c] <= u + 1e-9);
    }
  }
}

TEST_CASE("pure equilibrium kernel: parallel matches serial") {
  auto rng = seededRng(88);
  for (int trial = 0; trial < 30; ++trial) {
    const GameModel g = randomBinaryGame(rng);
    std::vector<std::vector<Vector>> s;
    for (const PlayerProgram& p : g.players()) s.push_back(enumerateStrategies(p, 1u << 20));
    CHECK(pureEquilibria(g, s, 0.0, 4) == pureEquilibriaSerial(g, s, 0.0));
  }
}

TEST_CASE("strategy enumeration") {
  CHECK(enumerateStrategies(blue(), 16).size() == 3);
  CHECK_THROWS_AS(enumerateStrategies(blue(), 3), BudgetExhausted);
  const PlayerProgram cont({1}, SparseMatrix(0, 1), SparseMatrix(0, 1), {}, {}, {{0, 1}});
  CHECK_THROWS_AS(enumerateStrategies(cont, 16), UsageError);
}

TEST_CASE("cut and play agrees with enumeration and keeps regions outer and shrinking") {
  auto rng = seededRng(2025);
  auto sampler = seededRng(9);
  int mixedSeen = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const GameModel g = randomBinaryGame(rng);
    std::vector<std::vector<Vector>> points;
    for (const PlayerProgram& p : g.players()) points.push_back(binaryPoints(p));
    std::vector<mathopt::ExtendedHull> previous;
    for (const PlayerProgram& p : g.players()) previous.push_back(PlayerRegion::initial(p).hull());

    int outerViolations = 0, shrinkViolations = 0;
    SolverOptions opts = referenceOptions();
    opts.deviationEps = 1e-6;
    const EquilibriumResult r =
        cutAndPlay(g, opts, [&](std::size_t, const std::vector<PlayerRegion>& regions) {
          for (std::size_t i = 0; i < regions.size(); ++i) {
            const ExtendedHull h = regions[i].hull();
            for (const Vector& x : points[i]) {
              if (!hullContains(h, x)) ++outerViolations;
              for (const Cut& c : regions[i].cuts)
                if (c.violation(x) > 1e-9) ++outerViolations;
            }
            for (int s = 0; s < 5; ++s)
              if (!hullContains(previous[i], hullVertex(h, sampler), 1e-6)) ++shrinkViolations;
            previous[i] = h;
          }
        });
    CHECK(outerViolations == 0);
    CHECK(shrinkViolations == 0);
    REQUIRE((r.status == EquilibriumStatus::PNE || r.status == EquilibriumStatus::MNE));
    CHECK(deviationCheck(g, r.profile, 1e-6).empty());
    if (r.status == EquilibriumStatus::PNE) CHECK(deviationCheck(g, r.profile, 0.0).empty());
    mixedSeen += r.status == EquilibriumStatus::MNE;
    const auto all = fullEnumeration(g, opts);
    CHECK(inList(r.profile.barycenters(), all, 1e-6));
  }
  CHECK(mixedSeen > 0);
}

TEST_CASE("parallel workers reproduce the serial answer") {
  auto rng = seededRng(4242);
  for (int trial = 0; trial < 15; ++trial) {
    const GameModel g = randomBinaryGame(rng);
    SolverOptions serial = referenceOptions();
    SolverOptions parallel = serial;
    parallel.workers = 4;
    const EquilibriumResult a = cutAndPlay(g, serial);
    const EquilibriumResult b = cutAndPlay(g, parallel);
    CHECK((a.status == b.status));
    CHECK(close(a.profile.barycenters(), b.profile.barycenters(), 0.0));
  }
}

TEST_CASE("tiny time limits report TimeLimit") {
  auto rng = seededRng(1);
  std::vector<PlayerProgram> players;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::size_t m = 10;
    Vector c(m), a(m);
    double total = 0;
    for (double& v : c) v = -static_cast<double>(rng.uniformInt(1, 20));
    for (double& v : a) total += (v = static_cast<double>(rng.uniformInt(1, 20)));
    SparseMatrix C(2 * m, m);
    for (std::size_t r = 0; r < 2 * m; ++r)
      for (std::size_t j = 0; j < m; ++j) C.set(r, j, static_cast<double>(rng.uniformInt(-20, 20)));
    players.push_back(binaryPlayer(c, C, {a}, {std::ceil(total / 2)}));
  }
  const GameModel g(std::move(players));
  SolverOptions opts;
  opts.timeLimitSeconds = 0.001;
  const EquilibriumResult r = cutAndPlay(g, opts);
  CHECK((r.status == EquilibriumStatus::TimeLimit));
  CHECK(r.stats.wallTimeMs >= 0.0);
}

TEST_CASE("games whose relaxations carry nearly parallel cuts still solve") {
  for (std::uint64_t seed : {95, 152, 734, 878, 1478, 1487, 1904}) {
    corpus::GeneratorSpec spec;
    spec.seed = seed;
    spec.items = 1 + seed % 3;
    const GameModel g = corpus::randomKnapsackGame(spec).game();
    const EquilibriumResult r = cutAndPlay(g, referenceOptions());
    REQUIRE((r.status == EquilibriumStatus::PNE || r.status == EquilibriumStatus::MNE));
    CHECK(deviationCheck(g, r.profile, 3e-4).empty());
  }
}
