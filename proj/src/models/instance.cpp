#include "rbg/models/instance.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include "rbg/algorithms/cut_and_play.hpp"
#include "rbg/algorithms/full_enumeration.hpp"
#include "rbg/error.hpp"

namespace rbg::models {

using games::EquilibriumResult;
using games::EquilibriumStatus;
using mathopt::Bounds;
using mathopt::PlayerProgram;

namespace {

std::int64_t remaining(const std::vector<NamedPlayer>& players, std::size_t total, std::size_t i) {
  const PlayerProgram& p = players[i].program;
  return static_cast<std::int64_t>(p.numOpponentVariables()) -
         static_cast<std::int64_t>(total - p.numVariables());
}

std::size_t totalVariables(const std::vector<NamedPlayer>& players) {
  std::size_t total = 0;
  for (const NamedPlayer& p : players) total += p.program.numVariables();
  return total;
}

}  // namespace

Instance& Instance::addPlayer(PlayerProgram p, std::string name) {
  if (finalized_) throw UsageError("Instance: cannot add players after finalize");
  if (name.empty()) throw UsageError("Instance: player name must not be empty");
  for (const NamedPlayer& q : players_)
    if (q.name == name) throw UsageError("Instance: duplicate player name '" + name + "'");
  std::vector<NamedPlayer> next = players_;
  next.push_back({std::move(name), std::move(p)});
  const std::size_t total = totalVariables(next);
  const std::int64_t expected = remaining(next, total, next.size() - 1);
  for (std::size_t i = 0; i < next.size(); ++i) {
    const std::int64_t r = remaining(next, total, i);
    if (r < 0 || r != expected)
      throw UsageError("Instance: C of player '" + next[i].name + "' has " +
                       std::to_string(next[i].program.numOpponentVariables()) +
                       " rows, inconsistent with the other players' variable counts");
  }
  players_ = std::move(next);
  return *this;
}

std::size_t Instance::missingOpponentVariables() const {
  if (players_.empty()) return 0;
  return static_cast<std::size_t>(remaining(players_, totalVariables(players_), 0));
}

void Instance::finalize() {
  if (players_.empty()) throw UsageError("Instance: no players");
  if (missingOpponentVariables() != 0)
    throw UsageError("Instance: every C still expects " +
                     std::to_string(missingOpponentVariables()) + " opponent variables");
  finalized_ = true;
}

games::GameModel Instance::game() const {
  if (players_.empty()) throw UsageError("Instance: no players");
  if (missingOpponentVariables() != 0) throw UsageError("Instance: incomplete game");
  std::vector<PlayerProgram> programs;
  for (const NamedPlayer& p : players_) programs.push_back(p.program);
  return games::GameModel(std::move(programs));
}

// ---- serialization ---------------------------------------------------------

namespace {

Json number(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 9.0e15)
    return Json(static_cast<std::int64_t>(v));
  return Json(v);
}

Json numbers(const Vector& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

Json sparse(const SparseMatrix& m) {
  Json entries = Json::array();
  for (const Triplet& t : m.entries()) entries.push_back(Json::array({t.row, t.col, number(t.value)}));
  return Json{{"nrows", m.rows()}, {"ncols", m.cols()}, {"entries", std::move(entries)}};
}

Json bound(double v) { return std::isinf(v) ? Json(nullptr) : number(v); }

[[noreturn]] void parseFail(const std::string& path, const std::string& what) {
  throw ParseError(path + ": " + what);
}

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw ValidationError(path + ": " + what);
}

const Json& field(const Json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) parseFail(path + "." + key, "missing field");
  return *it;
}

void expectObject(const Json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) parseFail(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) parseFail(path + "." + it.key(), "unknown field");
  }
}

const Json& array(const Json& j, const std::string& path) {
  if (!j.is_array()) parseFail(path, "expected an array");
  return j;
}

double readNumber(const Json& j, const std::string& path) {
  if (!j.is_number()) parseFail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) parseFail(path, "expected a finite number");
  return v;
}

std::size_t readIndex(const Json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::size_t>(j.get<std::int64_t>());
  parseFail(path, "expected a non-negative integer");
}

std::string readString(const Json& j, const std::string& path) {
  if (!j.is_string()) parseFail(path, "expected a string");
  return j.get<std::string>();
}

Vector readNumbers(const Json& j, const std::string& path) {
  Vector out;
  const Json& a = array(j, path);
  for (std::size_t k = 0; k < a.size(); ++k) out.push_back(readNumber(a[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

SparseMatrix readSparse(const Json& j, const std::string& path) {
  expectObject(j, path, {"nrows", "ncols", "entries"});
  const std::size_t rows = readIndex(field(j, "nrows", path), path + ".nrows");
  const std::size_t cols = readIndex(field(j, "ncols", path), path + ".ncols");
  const Json& entries = array(field(j, "entries", path), path + ".entries");
  std::vector<Triplet> triplets;
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const std::string ep = path + ".entries[" + std::to_string(k) + "]";
    const Json& e = array(entries[k], ep);
    if (e.size() != 3) parseFail(ep, "expected [row, col, value]");
    const std::size_t r = readIndex(e[0], ep + "[0]");
    const std::size_t c = readIndex(e[1], ep + "[1]");
    const double v = readNumber(e[2], ep + "[2]");
    if (r >= rows || c >= cols) invalid(ep, "index outside a " + std::to_string(rows) + "x" + std::to_string(cols) + " matrix");
    if (!seen.insert({r, c}).second) invalid(ep, "duplicate entry");
    triplets.push_back({r, c, v});
  }
  return SparseMatrix(rows, cols, std::move(triplets));
}

NamedPlayer readPlayer(const Json& j, const std::string& path) {
  expectObject(j, path, {"name", "vars", "c", "C", "A", "b", "integers", "bounds"});
  NamedPlayer out{readString(field(j, "name", path), path + ".name"),
                  PlayerProgram({}, SparseMatrix(), SparseMatrix(), {}, {}, {})};
  const std::size_t m = readIndex(field(j, "vars", path), path + ".vars");
  const Vector c = readNumbers(field(j, "c", path), path + ".c");
  const SparseMatrix C = readSparse(field(j, "C", path), path + ".C");
  const SparseMatrix A = readSparse(field(j, "A", path), path + ".A");
  const Vector b = readNumbers(field(j, "b", path), path + ".b");

  std::vector<std::size_t> integers;
  const Json& ints = array(field(j, "integers", path), path + ".integers");
  for (std::size_t k = 0; k < ints.size(); ++k)
    integers.push_back(readIndex(ints[k], path + ".integers[" + std::to_string(k) + "]"));

  std::vector<Bounds> bounds;
  const Json& bs = array(field(j, "bounds", path), path + ".bounds");
  for (std::size_t k = 0; k < bs.size(); ++k) {
    const std::string bp = path + ".bounds[" + std::to_string(k) + "]";
    const Json& pair = array(bs[k], bp);
    if (pair.size() != 2) parseFail(bp, "expected [lower, upper]");
    Bounds bd;
    bd.lower = pair[0].is_null() ? -kInf : readNumber(pair[0], bp + "[0]");
    bd.upper = pair[1].is_null() ? kInf : readNumber(pair[1], bp + "[1]");
    bounds.push_back(bd);
  }

  if (c.size() != m) invalid(path + ".c", "expected " + std::to_string(m) + " entries, got " + std::to_string(c.size()));
  if (C.cols() != m) invalid(path + ".C.ncols", "expected " + std::to_string(m));
  if (A.cols() != m) invalid(path + ".A.ncols", "expected " + std::to_string(m));
  if (A.rows() != b.size())
    invalid(path + ".b", "expected " + std::to_string(A.rows()) + " entries, got " + std::to_string(b.size()));
  if (bounds.size() != m)
    invalid(path + ".bounds", "expected " + std::to_string(m) + " pairs, got " + std::to_string(bounds.size()));
  std::set<std::size_t> intSet;
  for (std::size_t k = 0; k < integers.size(); ++k) {
    const std::string ip = path + ".integers[" + std::to_string(k) + "]";
    if (integers[k] >= m) invalid(ip, "index out of range");
    if (!intSet.insert(integers[k]).second) invalid(ip, "duplicate index");
  }
  for (std::size_t k = 0; k < bounds.size(); ++k) {
    const std::string bp = path + ".bounds[" + std::to_string(k) + "]";
    if (intSet.count(k) && (std::isinf(bounds[k].lower) || std::isinf(bounds[k].upper)))
      invalid(bp, "integer variables need finite bounds");
    if (bounds[k].lower > bounds[k].upper) invalid(bp, "lower bound exceeds upper bound");
  }
  try {
    out.program = PlayerProgram(c, C, A, b, integers, bounds);
  } catch (const UsageError& e) {
    invalid(path, e.what());
  }
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string readFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parseText(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("$: ") + e.what());
  }
}

}  // namespace

Json toJson(const Instance& instance) {
  Json players = Json::array();
  for (const NamedPlayer& np : instance.players()) {
    const PlayerProgram& p = np.program;
    Json bounds = Json::array();
    for (const Bounds& b : p.bounds()) bounds.push_back(Json::array({bound(b.lower), bound(b.upper)}));
    players.push_back(Json{{"name", np.name},
                           {"vars", p.numVariables()},
                           {"c", numbers(p.cost())},
                           {"C", sparse(p.cross())},
                           {"A", sparse(p.constraints())},
                           {"b", numbers(p.rhs())},
                           {"integers", p.integers()},
                           {"bounds", std::move(bounds)}});
  }
  return Json{{"name", instance.name()}, {"players", std::move(players)}};
}

Instance instanceFromJson(const Json& doc) {
  expectObject(doc, "$", {"name", "players"});
  Instance out(readString(field(doc, "name", "$"), "$.name"));
  const Json& players = array(field(doc, "players", "$"), "$.players");
  if (players.empty()) invalid("$.players", "at least one player is required");
  for (std::size_t i = 0; i < players.size(); ++i) {
    const std::string path = "$.players[" + std::to_string(i) + "]";
    NamedPlayer np = readPlayer(players[i], path);
    try {
      out.addPlayer(std::move(np.program), std::move(np.name));
    } catch (const UsageError& e) {
      invalid(path, e.what());
    }
  }
  if (out.missingOpponentVariables() != 0)
    invalid("$.players", "every C expects " + std::to_string(out.missingOpponentVariables()) +
                             " more opponent rows than the players provide");
  return out;
}

std::string serialize(const Instance& instance) { return dump(toJson(instance)); }

Instance parseInstance(const std::string& text) { return instanceFromJson(parseText(text)); }

void saveInstance(const Instance& instance, const std::filesystem::path& path) {
  if (instance.numPlayers() == 0 || instance.missingOpponentVariables() != 0)
    throw UsageError("saveInstance: the instance is incomplete");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError(path.string() + ": cannot write file");
  out << serialize(instance);
}

Instance loadInstance(const std::filesystem::path& path) { return parseInstance(readFile(path)); }

// ---- results ---------------------------------------------------------------

ResultDocument ResultDocument::from(const Instance& instance, const EquilibriumResult& result) {
  ResultDocument doc;
  doc.status = games::toString(result.status);
  doc.message = result.message;
  doc.stats = result.stats;
  for (std::size_t i = 0; i < result.profile.players.size(); ++i) {
    PlayerResult pr;
    pr.name = i < instance.numPlayers() ? instance.players()[i].name : "player" + std::to_string(i);
    pr.x = result.profile.players[i].barycenter;
    pr.payoff = i < result.payoffs.size() ? result.payoffs[i] : 0.0;
    pr.support = result.profile.players[i].support;
    doc.players.push_back(std::move(pr));
  }
  return doc;
}

Json toJson(const ResultDocument& doc) {
  Json players = Json::array();
  for (const PlayerResult& p : doc.players) {
    Json pj{{"name", p.name}, {"x", numbers(p.x)}, {"payoff", number(p.payoff)}};
    if (!p.support.empty()) {
      Json support = Json::array();
      for (const mathopt::WeightedPoint& wp : p.support)
        support.push_back(Json{{"prob", number(wp.weight)}, {"point", numbers(wp.point)}});
      pj["support"] = std::move(support);
    }
    players.push_back(std::move(pj));
  }
  return Json{{"status", doc.status},
              {"message", doc.message},
              {"players", std::move(players)},
              {"stats",
               {{"iterations", doc.stats.iterations},
                {"cuts", doc.stats.cuts},
                {"branches", doc.stats.branches},
                {"lcpNodes", doc.stats.lcpNodes},
                {"wallTimeMs", number(doc.stats.wallTimeMs)}}}};
}

ResultDocument resultFromJson(const Json& doc) {
  expectObject(doc, "$", {"status", "message", "players", "stats"});
  ResultDocument out;
  out.status = readString(field(doc, "status", "$"), "$.status");
  if (!games::statusFromString(out.status)) invalid("$.status", "unknown status '" + out.status + "'");
  out.message = readString(field(doc, "message", "$"), "$.message");
  const Json& players = array(field(doc, "players", "$"), "$.players");
  for (std::size_t i = 0; i < players.size(); ++i) {
    const std::string path = "$.players[" + std::to_string(i) + "]";
    expectObject(players[i], path, {"name", "x", "payoff", "support"});
    PlayerResult pr;
    pr.name = readString(field(players[i], "name", path), path + ".name");
    pr.x = readNumbers(field(players[i], "x", path), path + ".x");
    pr.payoff = readNumber(field(players[i], "payoff", path), path + ".payoff");
    if (players[i].contains("support")) {
      const Json& s = array(players[i]["support"], path + ".support");
      for (std::size_t k = 0; k < s.size(); ++k) {
        const std::string sp = path + ".support[" + std::to_string(k) + "]";
        expectObject(s[k], sp, {"prob", "point"});
        pr.support.push_back({readNumber(field(s[k], "prob", sp), sp + ".prob"),
                              readNumbers(field(s[k], "point", sp), sp + ".point")});
      }
    }
    out.players.push_back(std::move(pr));
  }
  const Json& stats = field(doc, "stats", "$");
  expectObject(stats, "$.stats", {"iterations", "cuts", "branches", "lcpNodes", "wallTimeMs"});
  out.stats.iterations = readIndex(field(stats, "iterations", "$.stats"), "$.stats.iterations");
  out.stats.cuts = readIndex(field(stats, "cuts", "$.stats"), "$.stats.cuts");
  out.stats.branches = readIndex(field(stats, "branches", "$.stats"), "$.stats.branches");
  out.stats.lcpNodes = readIndex(field(stats, "lcpNodes", "$.stats"), "$.stats.lcpNodes");
  out.stats.wallTimeMs = readNumber(field(stats, "wallTimeMs", "$.stats"), "$.stats.wallTimeMs");
  return out;
}

std::vector<EquilibriumResult> solve(Instance& instance, const algorithms::SolverOptions& opts) {
  opts.validate();
  instance.finalize();
  const games::GameModel g = instance.game();
  if (opts.algorithm == algorithms::Algorithm::CutAndPlay) return {algorithms::cutAndPlay(g, opts)};
  try {
    return algorithms::fullEnumeration(g, opts);
  } catch (const PlayerInfeasible& e) {
    EquilibriumResult r;
    r.status = EquilibriumStatus::Infeasible;
    r.message = e.what();
    return {r};
  }
}

}  // namespace rbg::models
