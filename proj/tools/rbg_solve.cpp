// rbg_solve: load an instance, compute equilibria, write a result document.
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rbg/error.hpp"
#include "rbg/models/instance.hpp"

namespace {

using rbg::games::EquilibriumResult;
using rbg::games::EquilibriumStatus;
using rbg::models::Json;

enum Exit { kSolved = 0, kUsage = 1, kNoEquilibrium = 2, kTimeLimit = 3, kInfeasible = 4, kFailure = 5 };

int exitCode(EquilibriumStatus s) {
  switch (s) {
    case EquilibriumStatus::PNE:
    case EquilibriumStatus::MNE: return kSolved;
    case EquilibriumStatus::NoEquilibriumFound: return kNoEquilibrium;
    case EquilibriumStatus::TimeLimit: return kTimeLimit;
    case EquilibriumStatus::Infeasible: return kInfeasible;
    case EquilibriumStatus::NumericalFailure: return kFailure;
  }
  return kFailure;
}

// Enumeration outcome: PNE if any pure equilibrium, else MNE, else the first status.
EquilibriumStatus overall(const std::vector<EquilibriumResult>& results) {
  EquilibriumStatus best = results.empty() ? EquilibriumStatus::NoEquilibriumFound : results[0].status;
  for (const auto& r : results) {
    if (r.status == EquilibriumStatus::PNE) return r.status;
    if (r.status == EquilibriumStatus::MNE) best = r.status;
  }
  return best;
}

std::string formatVector(const rbg::Vector& x) {
  std::ostringstream ss;
  ss << "(";
  for (std::size_t j = 0; j < x.size(); ++j) ss << (j ? ", " : "") << x[j];
  ss << ")";
  return ss.str();
}

void print(const rbg::models::ResultDocument& doc, std::ostream& out) {
  out << doc.status;
  if (!doc.message.empty()) out << ": " << doc.message;
  out << "\n";
  for (const auto& p : doc.players)
    out << "  " << p.name << " x = " << formatVector(p.x) << "  payoff = " << p.payoff << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compute Nash equilibria of integer programming games"};
  std::string instancePath, outputPath, algorithm = "cutandplay", lcp = "branching";
  double tolerance = 3e-4;
  std::optional<double> timeLimit;
  int threads = 1;
  std::uint64_t seed = 0;
  bool quiet = false;

  app.add_option("--instance", instancePath, "Instance document (JSON)")->required();
  app.add_option("--algorithm", algorithm, "cutandplay or fullenum")
      ->check(CLI::IsMember({"cutandplay", "fullenum"}));
  app.add_option("--tolerance", tolerance, "Deviation tolerance")->check(CLI::NonNegativeNumber);
  app.add_option("--timelimit", timeLimit, "Time limit in seconds")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--lcp", lcp, "branching or lemke")->check(CLI::IsMember({"branching", "lemke"}));
  app.add_option("--output", outputPath, "Result document path");
  app.add_option("--seed", seed, "Tie-breaking seed (the solvers are deterministic)");
  app.add_flag("--quiet", quiet, "Do not print the equilibrium");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSolved : kUsage;
  }

  rbg::algorithms::SolverOptions opts;
  opts.algorithm = algorithm == "fullenum" ? rbg::algorithms::Algorithm::FullEnumeration
                                           : rbg::algorithms::Algorithm::CutAndPlay;
  opts.deviationEps = tolerance;
  opts.timeLimitSeconds = timeLimit;
  opts.workers = threads;
  opts.lcp = lcp == "lemke" ? rbg::mathopt::LCPMethod::Lemke : rbg::mathopt::LCPMethod::Branching;

  try {
    rbg::models::Instance instance = rbg::models::loadInstance(instancePath);
    const std::vector<EquilibriumResult> results = rbg::models::solve(instance, opts);

    std::vector<rbg::models::ResultDocument> docs;
    for (const auto& r : results) docs.push_back(rbg::models::ResultDocument::from(instance, r));
    const EquilibriumStatus status = overall(results);

    if (!quiet)
      for (const auto& d : docs) print(d, std::cout);

    if (!outputPath.empty()) {
      Json out;
      if (opts.algorithm == rbg::algorithms::Algorithm::CutAndPlay) {
        out = rbg::models::toJson(docs.front());
      } else {
        Json list = Json::array();
        for (const auto& d : docs) list.push_back(rbg::models::toJson(d));
        out = Json{{"status", rbg::games::toString(status)}, {"equilibria", std::move(list)}};
      }
      std::ofstream file(outputPath, std::ios::binary);
      if (!file) {
        std::cerr << "error: cannot write " << outputPath << "\n";
        return kUsage;
      }
      file << out.dump(2) << "\n";
    }
    return exitCode(status);
  } catch (const rbg::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const rbg::ValidationError& e) {
    std::cerr << "error: " << instancePath << ": " << e.what() << "\n";
    return kUsage;
  } catch (const rbg::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
}
