// Prints one PASS/FAIL line per acceptance criterion; exits non-zero on any failure.
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "rbg/algorithms/cut_and_play.hpp"
#include "rbg/algorithms/full_enumeration.hpp"
#include "rbg/corpus/generators.hpp"
#include "rbg/error.hpp"
#include "rbg/models/instance.hpp"

namespace {

using namespace rbg;
using algorithms::SolverOptions;
using games::EquilibriumResult;
using games::EquilibriumStatus;
using Clock = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kFractionTol = 1e-6;      // criterion 1
constexpr double kMatchTol = 1e-5;         // criterion 2
constexpr double kReferenceDeviation = 3e-4;   // criteria 2 and 3 (solver setting)
constexpr double kOracleTol = 1e-6;        // criterion 3
constexpr double kLCPResidual = 1e-7;      // criterion 4b
constexpr double kLCPAgreement = 1e-6;     // criterion 4b
constexpr double kIPTol = 1e-9;            // criterion 4a

const std::vector<std::vector<Vector>> kKnapsackEquilibria{
    {{0, 1}, {1, 0}}, {{1, 0}, {0, 1}}, {{2.0 / 9, 7.0 / 9}, {2.0 / 5, 3.0 / 5}}};

int failures = 0;
std::map<int, std::string> lines;

void report(int id, const char* title, bool ok, const std::string& detail) {
  lines[id] = "criterion " + std::to_string(id) + (ok ? " [PASS] " : " [FAIL] ") + title + ": " + detail;
  failures += ok ? 0 : 1;
}

double distance(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  if (a.size() != b.size()) return kInf;
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return kInf;
    d = std::max(d, normInf(subtract(a[i], b[i])));
  }
  return d;
}

double nearestKnown(const std::vector<Vector>& x) {
  double best = kInf;
  for (const auto& eq : kKnapsackEquilibria) best = std::min(best, distance(x, eq));
  return best;
}

SolverOptions referenceSettings() {
  SolverOptions o;
  o.deviationEps = kReferenceDeviation;
  o.timeLimitSeconds = 5.0;
  return o;
}

games::GameModel oracleGame(std::uint64_t seed) {
  corpus::GeneratorSpec spec;
  spec.seed = seed;
  spec.players = 2;
  spec.items = 1 + seed % 3;
  return corpus::randomKnapsackGame(spec).game();
}

constexpr std::uint64_t kOracleGames = 250;

void criterion1() {
  const auto start = Clock::now();
  const auto results = algorithms::fullEnumeration(corpus::canonicalKnapsackGame().game(), referenceSettings());
  const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  int pure = 0, mixed = 0;
  std::vector<bool> seen(3, false);
  bool exact = true;
  for (const auto& r : results) {
    (r.status == EquilibriumStatus::PNE ? pure : mixed)++;
    bool hit = false;
    for (std::size_t k = 0; k < 3; ++k)
      if (distance(r.profile.barycenters(), kKnapsackEquilibria[k]) <= kFractionTol) seen[k] = hit = true;
    exact = exact && hit;
  }
  const bool ok = results.size() == 3 && pure == 2 && mixed == 1 && exact && seen[0] && seen[1] &&
                  seen[2] && ms < 1000.0;
  report(1, "knapsack ground truth", ok,
         std::to_string(pure) + " pure, " + std::to_string(mixed) + " mixed, all within 1e-6: " +
             (exact ? "yes" : "no") + ", " + std::to_string(ms) + " ms");
}

void criterion2() {
  const games::GameModel g = corpus::canonicalKnapsackGame().game();
  const EquilibriumResult r = algorithms::cutAndPlay(g, referenceSettings());
  const bool solved = r.status == EquilibriumStatus::PNE || r.status == EquilibriumStatus::MNE;
  const double d = solved ? nearestKnown(r.profile.barycenters()) : kInf;
  const bool stable = solved && games::deviationCheck(g, r.profile, kReferenceDeviation).empty();
  report(2, "cut-and-play soundness", solved && d <= kMatchTol && stable,
         games::toString(r.status) + ", distance to nearest known equilibrium " + std::to_string(d) +
             ", deviation check " + (stable ? "passed" : "failed"));
}

void criterions3and5() {
  std::size_t violations = 0, outerViolations = 0, checkedPoints = 0, mixed = 0, unsolved = 0;
  for (std::uint64_t seed = 1; seed <= kOracleGames; ++seed) {
    const games::GameModel g = oracleGame(seed);
    std::vector<std::vector<Vector>> points;
    for (const auto& p : g.players()) points.push_back(fixtures::binaryPoints(p));
    const EquilibriumResult r = algorithms::cutAndPlay(
        g, referenceSettings(), [&](std::size_t, const std::vector<algorithms::PlayerRegion>& regions) {
          for (std::size_t i = 0; i < regions.size(); ++i) {
            const mathopt::ExtendedHull h = regions[i].hull();
            for (const Vector& x : points[i]) {
              ++checkedPoints;
              bool inside = mathopt::hullContains(h, x);
              for (const auto& c : regions[i].cuts) inside = inside && c.violation(x) <= 1e-9;
              outerViolations += inside ? 0 : 1;
            }
          }
        });
    if (r.status != EquilibriumStatus::PNE && r.status != EquilibriumStatus::MNE) {
      ++unsolved;
      continue;
    }
    mixed += r.status == EquilibriumStatus::MNE;
    const auto all = algorithms::fullEnumeration(g, referenceSettings());
    bool found = false;
    for (const auto& e : all) found = found || distance(e.profile.barycenters(), r.profile.barycenters()) <= kOracleTol;
    violations += found ? 0 : 1;
  }
  report(3, "oracle equivalence", violations == 0 && unsolved == 0,
         std::to_string(kOracleGames) + " games (" + std::to_string(mixed) + " mixed), " +
             std::to_string(violations) + " violations, " + std::to_string(unsolved) + " unsolved");
  report(5, "outer-approximation invariant", outerViolations == 0 && checkedPoints > 0,
         std::to_string(checkedPoints) + " point checks after refinements, " +
             std::to_string(outerViolations) + " violations");
}

std::size_t ipMismatches() {
  SeededRng rng(404);
  std::size_t bad = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t m = static_cast<std::size_t>(rng.uniformInt(1, 12));
    Vector c(m), a(m);
    double total = 0;
    for (double& v : c) v = static_cast<double>(rng.uniformInt(-9, 3));
    for (double& v : a) total += (v = static_cast<double>(rng.uniformInt(1, 9)));
    const auto p = fixtures::binaryPlayer(c, SparseMatrix(0, m), {a}, {std::ceil(total / 2)});
    double best = kInf;
    for (const Vector& x : fixtures::binaryPoints(p)) best = std::min(best, mathopt::payoff(p, x, Vector{}));
    const mathopt::IPResult ip = mathopt::solveIP(p, Vector{});
    if (ip.status != mathopt::IPStatus::Optimal || std::abs(ip.objective - best) > kIPTol ||
        !p.isFeasible(ip.x, kIPTol))
      ++bad;
  }
  return bad;
}

void lcpChecks(std::size_t& residualBad, std::size_t& disagreements, std::size_t& bothSolved) {
  SeededRng rng(505);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniformInt(2, 8));
    DenseMatrix R(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) R(i, j) = rng.uniform01() * 2.0 - 1.0;
    mathopt::LCP lcp{DenseMatrix(n, n), Vector(n)};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        double s = i == j ? 1.0 : 0.0;
        for (std::size_t k = 0; k < n; ++k) s += R(k, i) * R(k, j);
        lcp.M(i, j) = s;
      }
      lcp.q[i] = rng.uniform01() * 10.0 - 5.0;
    }
    const auto branching = mathopt::solveLCP(lcp, mathopt::LCPMethod::Branching);
    if (branching.status != mathopt::LCPStatus::Solved ||
        !mathopt::satisfiesLCP(lcp, branching.solution->z, kLCPResidual)) {
      ++residualBad;
      continue;
    }
    const auto lemke = mathopt::solveLCP(lcp, mathopt::LCPMethod::Lemke);
    if (lemke.status != mathopt::LCPStatus::Solved) continue;
    ++bothSolved;
    if (normInf(subtract(branching.solution->z, lemke.solution->z)) > kLCPAgreement) ++disagreements;
  }
}

std::size_t hullMismatches(std::size_t& cases) {
  SeededRng rng(606);
  std::size_t bad = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t dim = static_cast<std::size_t>(rng.uniformInt(1, 3));
    const std::size_t count = static_cast<std::size_t>(rng.uniformInt(1, 3));
    std::vector<mathopt::Polyhedron> pieces;
    bool nonEmpty = false;
    for (std::size_t k = 0; k < count; ++k) {
      Vector lo(dim), hi(dim);
      for (std::size_t j = 0; j < dim; ++j) {
        lo[j] = static_cast<double>(rng.uniformInt(-3, 2));
        hi[j] = lo[j] + static_cast<double>(rng.uniformInt(0, 3));
      }
      mathopt::Polyhedron p(DenseMatrix(0, dim), {}, lo, hi);
      const std::size_t rows = static_cast<std::size_t>(rng.uniformInt(0, 2));
      for (std::size_t r = 0; r < rows; ++r) {
        Vector row(dim);
        for (double& v : row) v = static_cast<double>(rng.uniformInt(-3, 3));
        p.addRow(row, static_cast<double>(rng.uniformInt(-2, 4)));
      }
      nonEmpty = nonEmpty || !mathopt::isEmpty(p);
      pieces.push_back(std::move(p));
    }
    if (!nonEmpty) continue;
    const mathopt::ExtendedHull h = mathopt::convexHull(pieces);
    for (int s = 0; s < 25; ++s) {
      Vector x(dim);
      for (double& v : x) v = static_cast<double>(rng.uniformInt(-8, 10)) / 2.0;
      ++cases;
      if (mathopt::hullContains(h, x) != oracles::vertexCombinationContains(pieces, x)) ++bad;
    }
  }
  return bad;
}

void criterion4() {
  const std::size_t ip = ipMismatches();
  std::size_t residualBad = 0, disagreements = 0, both = 0, cases = 0;
  lcpChecks(residualBad, disagreements, both);
  const std::size_t hull = hullMismatches(cases);
  report(4, "solver-stack correctness", ip == 0 && residualBad == 0 && disagreements == 0 && hull == 0,
         "IP mismatches " + std::to_string(ip) + "/500; LCP residual failures " +
             std::to_string(residualBad) + "/200, Lemke disagreements " + std::to_string(disagreements) +
             "/" + std::to_string(both) + "; hull mismatches " + std::to_string(hull) + "/" +
             std::to_string(cases));
}

void criterion6() {
  const EquilibriumResult single =
      algorithms::cutAndPlay(corpus::singlePlayerKnapsack().game(), referenceSettings());
  const bool singleOk = single.status == EquilibriumStatus::PNE &&
                        single.profile.players[0].barycenter == Vector{0, 1} &&
                        std::abs(single.payoffs[0] + 2.0) <= 1e-12;

  models::Instance empty = corpus::emptyFeasibleSetGame();
  const auto infeasible = models::solve(empty, referenceSettings());
  const bool infeasibleOk = infeasible.size() == 1 && infeasible[0].status == EquilibriumStatus::Infeasible;

  corpus::GeneratorSpec spec;
  spec.players = 3;
  spec.items = 10;
  spec.range = 20;
  models::Instance big = corpus::randomKnapsackGame(spec);
  SolverOptions quick;
  quick.timeLimitSeconds = 0.001;
  const auto timed = models::solve(big, quick);
  bool docOk = false;
  if (timed.size() == 1) {
    const models::Json doc = models::toJson(models::ResultDocument::from(big, timed[0]));
    docOk = doc["status"] == "TimeLimit" && models::toJson(models::resultFromJson(doc)) == doc;
  }
  report(6, "degenerate handling", singleOk && infeasibleOk && docOk,
         std::string("n=1 ") + games::toString(single.status) + ", infeasible player " +
             (infeasible.empty() ? "none" : games::toString(infeasible[0].status)) + ", 1 ms limit " +
             (timed.empty() ? "none" : games::toString(timed[0].status)) +
             (docOk ? " with a well-formed document" : " without a valid document"));
}

int runSolver(const std::string& args) {
  const std::string cmd = std::string("\"") + RBG_SOLVE_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void criterion7() {
  std::size_t unstable = 0;
  auto check = [&](const models::Instance& g) {
    const std::string once = models::serialize(g);
    if (models::serialize(models::parseInstance(once)) != once) ++unstable;
  };
  check(corpus::canonicalKnapsackGame());
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    corpus::GeneratorSpec spec;
    spec.seed = seed;
    spec.players = 1 + seed % 4;
    spec.items = 1 + seed % 5;
    check(corpus::randomKnapsackGame(spec));
  }
  const auto dir = std::filesystem::temp_directory_path() / "rbg_acceptance";
  std::filesystem::create_directories(dir);
  models::saveInstance(corpus::canonicalKnapsackGame(), dir / "a.json");
  models::saveInstance(models::loadInstance(dir / "a.json"), dir / "b.json");
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  if (slurp(dir / "a.json") != slurp(dir / "b.json")) ++unstable;

  const std::string data = RBG_DATA_DIR;
  const int ok = runSolver("--quiet --instance \"" + data + "/knapsack_game.json\" --tolerance 3e-4 --timelimit 5");
  const int usage = runSolver("--instance \"" + (dir / "missing.json").string() + "\"");
  const int infeasible = runSolver("--quiet --instance \"" + data + "/empty_feasible_set.json\"");
  std::filesystem::remove_all(dir);
  report(7, "format stability", unstable == 0 && ok == 0 && usage == 1 && infeasible == 4,
         "102 round trips, " + std::to_string(unstable) + " unstable; CLI exit codes " +
             std::to_string(ok) + "/" + std::to_string(usage) + "/" + std::to_string(infeasible) +
             " (expected 0/1/4)");
}

}  // namespace

int main() {
  const auto guard = [](int id, const char* title, auto fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(id, title, false, std::string("exception: ") + e.what());
    }
  };
  guard(1, "knapsack ground truth", criterion1);
  guard(2, "cut-and-play soundness", criterion2);
  guard(3, "oracle equivalence / outer approximation", criterions3and5);
  guard(4, "solver-stack correctness", criterion4);
  guard(6, "degenerate handling", criterion6);
  guard(7, "format stability", criterion7);
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
