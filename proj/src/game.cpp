#include "csg/game.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace csg {

using nlohmann::json;

std::string context_key(const Context& z) {
  if (!z.label.empty()) return z.label;
  std::string key(z.vec.size() * sizeof(double), '\0');
  if (!z.vec.empty())
    std::memcpy(key.data(), z.vec.data(), key.size());
  return key;
}

bool MixedStrategy::valid(double tol) const {
  if (probs.empty()) return false;
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= -tol) || !std::isfinite(p)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= tol;
}

MixedStrategy unit_mass(int a, int num_actions) {
  MixedStrategy x;
  x.probs.assign(num_actions, 0.0);
  x.probs[a] = 1.0;
  return x;
}

double UtilityModel::eval(const Context& z, int a_l, int a_f, int A,
                          int A_f) const {
  if (a_l < 0 || a_l >= A || a_f < 0 || a_f >= A_f)
    throw std::out_of_range("eval_utility: action index out of range");
  if (kind == UtilityKind::Tabular) {
    auto it = tables.find(z.label.empty() ? "*" : z.label);
    if (it == tables.end()) it = tables.find("*");
    if (it == tables.end())
      throw std::runtime_error("instance-format error: unknown context label '" +
                               z.label + "' for tabular utility");
    return it->second[static_cast<std::size_t>(a_l) * A_f + a_f];
  }
  const auto& th = theta[a_l][a_f];
  if (th.size() != z.vec.size())
    throw std::runtime_error("eval_utility: context dimension mismatch");
  double dot = 0.0;
  for (std::size_t i = 0; i < th.size(); ++i) dot += th[i] * z.vec[i];
  return std::clamp(dot, 0.0, 1.0);
}

Context ContextSpace::probe() const {
  if (kind == Kind::Finite) {
    if (contexts.empty()) throw std::runtime_error("empty finite context space");
    return contexts.front();
  }
  Context z;
  z.vec.resize(dim);
  for (int i = 0; i < dim; ++i) z.vec[i] = 0.5 * (lo[i] + hi[i]);
  return z;
}

void GameInstance::validate() const {
  if (num_leader_actions < 1 || num_follower_actions < 1 || num_types < 1)
    throw std::runtime_error("instance-format error: action/type counts must be >= 1");
  if (static_cast<int>(follower_utilities.size()) != num_types)
    throw std::runtime_error("instance-format error: follower utility count != K");
}

double eval_utility(const UtilityModel& model, const GameInstance& inst,
                    const Context& z, int a_l, int a_f) {
  return model.eval(z, a_l, a_f, inst.num_leader_actions,
                    inst.num_follower_actions);
}

double leader_utility(const GameInstance& inst, const Context& z, int a_l,
                      int a_f) {
  return eval_utility(inst.leader_utility, inst, z, a_l, a_f);
}

double expected_leader_utility(const GameInstance& inst, const Context& z,
                               const MixedStrategy& x, int a_f) {
  double total = 0.0;
  for (int a_l = 0; a_l < inst.num_leader_actions; ++a_l)
    total += x[a_l] * leader_utility(inst, z, a_l, a_f);
  return total;
}

int follower_best_response(const GameInstance& inst, int type_idx,
                           const Context& z, const MixedStrategy& x) {
  if (type_idx < 0 || type_idx >= inst.num_types)
    throw std::out_of_range("follower_best_response: bad type index");
  const UtilityModel& uf = inst.follower_utilities[type_idx];
  double best = -1.0;
  std::vector<double> eu(inst.num_follower_actions);
  for (int a_f = 0; a_f < inst.num_follower_actions; ++a_f) {
    double v = 0.0;
    for (int a_l = 0; a_l < inst.num_leader_actions; ++a_l)
      v += x[a_l] * eval_utility(uf, inst, z, a_l, a_f);
    eu[a_f] = v;
    best = std::max(best, v);
  }
  // Highest index within the tie band of the maximum.
  for (int a_f = inst.num_follower_actions - 1; a_f >= 0; --a_f)
    if (eu[a_f] >= best - kTieTol) return a_f;
  return 0;  // unreachable
}

RoundRecord play_round(const GameInstance& inst, const Context& z,
                       const MixedStrategy& x, int type_idx, Rng& rng) {
  RoundRecord rec;
  rec.context = z;
  rec.strategy = x;
  rec.follower_type = type_idx;
  rec.follower_action = follower_best_response(inst, type_idx, z, x);
  rec.leader_action = rng.sample(x.probs);
  rec.realized_utility =
      leader_utility(inst, z, rec.leader_action, rec.follower_action);
  rec.expected_utility = expected_leader_utility(inst, z, x, rec.follower_action);
  return rec;
}

bool follower_utilities_context_free(const GameInstance& inst) {
  for (const auto& uf : inst.follower_utilities) {
    if (uf.kind == UtilityKind::LinearClipped) {
      if (!uf.declared_context_free) return false;
      continue;
    }
    if (uf.tables.size() <= 1) continue;
    const auto& first = uf.tables.begin()->second;
    for (const auto& [label, table] : uf.tables)
      if (table != first) return false;
  }
  return true;
}

namespace {

UtilityModel parse_utility(const json& j, int A, int A_f) {
  UtilityModel m;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "tabular") {
    m.kind = UtilityKind::Tabular;
    for (const auto& [label, rows] : j.at("tables").items()) {
      std::vector<double> flat;
      flat.reserve(static_cast<std::size_t>(A) * A_f);
      if (static_cast<int>(rows.size()) != A)
        throw std::runtime_error("instance-format error: table rows != leader_actions");
      for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != A_f)
          throw std::runtime_error("instance-format error: table cols != follower_actions");
        for (const auto& v : row) {
          double u = v.get<double>();
          if (u < 0.0 || u > 1.0)
            throw std::runtime_error("instance-format error: tabular entry outside [0,1]");
          flat.push_back(u);
        }
      }
      m.tables[label] = std::move(flat);
    }
  } else if (kind == "linear_clipped") {
    m.kind = UtilityKind::LinearClipped;
    const auto& th = j.at("theta");
    if (static_cast<int>(th.size()) != A)
      throw std::runtime_error("instance-format error: theta rows != leader_actions");
    m.theta.resize(A);
    for (int a = 0; a < A; ++a) {
      if (static_cast<int>(th[a].size()) != A_f)
        throw std::runtime_error("instance-format error: theta cols != follower_actions");
      m.theta[a].resize(A_f);
      for (int b = 0; b < A_f; ++b)
        m.theta[a][b] = th[a][b].get<std::vector<double>>();
    }
    m.declared_context_free = j.value("context_free", false);
  } else {
    throw std::runtime_error("instance-format error: unknown utility kind '" + kind + "'");
  }
  return m;
}

json utility_to_json(const UtilityModel& m, int A, int A_f) {
  json j;
  if (m.kind == UtilityKind::Tabular) {
    j["kind"] = "tabular";
    json tables = json::object();
    for (const auto& [label, flat] : m.tables) {
      json rows = json::array();
      for (int a = 0; a < A; ++a) {
        json row = json::array();
        for (int b = 0; b < A_f; ++b)
          row.push_back(flat[static_cast<std::size_t>(a) * A_f + b]);
        rows.push_back(row);
      }
      tables[label] = rows;
    }
    j["tables"] = tables;
  } else {
    j["kind"] = "linear_clipped";
    j["theta"] = m.theta;
    j["context_free"] = m.declared_context_free;
  }
  return j;
}

}  // namespace

GameInstance parse_instance(const std::string& json_text) {
  json j = json::parse(json_text);
  GameInstance inst;
  inst.num_leader_actions = j.at("leader_actions").get<int>();
  inst.num_follower_actions = j.at("follower_actions").get<int>();
  inst.num_types = static_cast<int>(j.at("types").size());
  inst.leader_utility = parse_utility(j.at("leader_utility"),
                                      inst.num_leader_actions,
                                      inst.num_follower_actions);
  for (const auto& t : j.at("types")) {
    inst.type_names.push_back(t.value("name", ""));
    inst.follower_utilities.push_back(parse_utility(
        t.at("utility"), inst.num_leader_actions, inst.num_follower_actions));
  }
  const auto& cs = j.at("context_space");
  const std::string kind = cs.at("kind").get<std::string>();
  if (kind == "finite") {
    inst.context_space.kind = ContextSpace::Kind::Finite;
    for (const auto& c : cs.at("contexts")) {
      Context z;
      z.label = c.value("label", "");
      z.vec = c.at("vector").get<std::vector<double>>();
      inst.context_space.contexts.push_back(std::move(z));
    }
    if (!inst.context_space.contexts.empty())
      inst.context_space.dim =
          static_cast<int>(inst.context_space.contexts.front().vec.size());
  } else if (kind == "box") {
    inst.context_space.kind = ContextSpace::Kind::Box;
    inst.context_space.dim = cs.at("dim").get<int>();
    inst.context_space.lo = cs.at("lo").get<std::vector<double>>();
    inst.context_space.hi = cs.at("hi").get<std::vector<double>>();
  } else {
    throw std::runtime_error("instance-format error: unknown context_space kind");
  }
  inst.validate();
  return inst;
}

GameInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

std::string instance_to_json(const GameInstance& inst) {
  json j;
  j["leader_actions"] = inst.num_leader_actions;
  j["follower_actions"] = inst.num_follower_actions;
  j["leader_utility"] = utility_to_json(inst.leader_utility,
                                        inst.num_leader_actions,
                                        inst.num_follower_actions);
  json types = json::array();
  for (int i = 0; i < inst.num_types; ++i) {
    json t;
    t["name"] = i < static_cast<int>(inst.type_names.size())
                    ? inst.type_names[i]
                    : "";
    t["utility"] = utility_to_json(inst.follower_utilities[i],
                                   inst.num_leader_actions,
                                   inst.num_follower_actions);
    types.push_back(t);
  }
  j["types"] = types;
  json cs;
  if (inst.context_space.kind == ContextSpace::Kind::Finite) {
    cs["kind"] = "finite";
    json contexts = json::array();
    for (const auto& z : inst.context_space.contexts) {
      json c;
      c["label"] = z.label;
      c["vector"] = z.vec;
      contexts.push_back(c);
    }
    cs["contexts"] = contexts;
  } else {
    cs["kind"] = "box";
    cs["dim"] = inst.context_space.dim;
    cs["lo"] = inst.context_space.lo;
    cs["hi"] = inst.context_space.hi;
  }
  j["context_space"] = cs;
  return j.dump(2);
}

}  // namespace csg
