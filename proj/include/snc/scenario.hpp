#pragma once

#include <fstream>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "snc/mgf.hpp"

namespace snc {

using nlohmann::json;

struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class FlowModel { leaky_bucket, cbr, sigma_rho };

struct FlowSpec {
  FlowModel model = FlowModel::leaky_bucket;
  int count = 1;
  double burst_Mb = 0.0;   // sigma for sigma_rho; unused for cbr
  double rate_Mbps = 0.0;  // rho for sigma_rho
};

struct ServerSpec {
  double capacity_Mbps = 0.0;
  std::vector<FlowSpec> cross;
};

// Experiment-specific sweep parameters; `kind` selects which fields apply.
struct ExperimentSpec {
  std::string kind;                 // fig2 fig3 fig4 fig5 simcheck
  double target_delay_ms = 10.0;    // fig2
  int max_flows = 200;              // fig2
  std::vector<int> m_values;        // fig3, fig4
  double cross_total_burst_Mb = 0;  // fig3
  double cross_total_rate_Mbps = 0; // fig3
  std::vector<int> n_values;        // fig5
  double sim_epsilon = 1e-2;        // simcheck
  long sim_slots = 100000;          // simcheck
  int sim_replications = 100;       // simcheck
};

struct Scenario {
  std::string name;
  double slot_ms = 0.1;
  double epsilon = 1e-6;
  long horizon_slots = 4096;
  ThetaGrid theta;
  std::vector<FlowSpec> through;
  std::vector<ServerSpec> servers;
  ExperimentSpec experiment;

  double bits(double Mb) const { return Mb * 1e6; }
  double bits_per_slot(double Mbps) const { return Mbps * 1e3 * slot_ms; }
  double slots_to_ms(double slots) const { return slots * slot_ms; }
};

namespace detail {

inline void reject_unknown(const json& j, const std::set<std::string>& allowed,
                           const std::string& where) {
  if (!j.is_object()) throw ScenarioError(where + ": object expected");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ScenarioError(where + ": unknown field '" + it.key() + "'");
}

inline double need_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ScenarioError(where + ": missing '" + key + "'");
  if (!j[key].is_number()) throw ScenarioError(where + ": '" + key + "' must be a number");
  return j[key].get<double>();
}

inline double opt_number(const json& j, const std::string& key, double def) {
  return j.contains(key) ? j[key].get<double>() : def;
}

inline FlowSpec parse_flow(const json& j, const std::string& where) {
  reject_unknown(j, {"model", "count", "burst_Mb", "rate_Mbps"}, where);
  FlowSpec f;
  std::string model = j.contains("model") ? j["model"].get<std::string>() : "leaky_bucket";
  if (model == "leaky_bucket")
    f.model = FlowModel::leaky_bucket;
  else if (model == "cbr")
    f.model = FlowModel::cbr;
  else if (model == "sigma_rho")
    f.model = FlowModel::sigma_rho;
  else
    throw ScenarioError(where + ": unknown model '" + model + "'");
  f.count = j.contains("count") ? j["count"].get<int>() : 1;
  if (f.count < 1) throw ScenarioError(where + ": count must be >= 1");
  f.rate_Mbps = need_number(j, "rate_Mbps", where);
  if (f.model != FlowModel::cbr) f.burst_Mb = need_number(j, "burst_Mb", where);
  else if (j.contains("burst_Mb")) throw ScenarioError(where + ": cbr takes no burst_Mb");
  if (f.rate_Mbps < 0 || f.burst_Mb < 0) throw ScenarioError(where + ": negative parameter");
  return f;
}

inline ServerSpec parse_server(const json& j, const std::string& where) {
  reject_unknown(j, {"capacity_Gbps", "capacity_Mbps", "cross"}, where);
  ServerSpec s;
  bool has_g = j.contains("capacity_Gbps"), has_m = j.contains("capacity_Mbps");
  if (has_g == has_m)
    throw ScenarioError(where + ": exactly one of capacity_Gbps / capacity_Mbps required");
  s.capacity_Mbps = has_g ? j["capacity_Gbps"].get<double>() * 1e3
                          : j["capacity_Mbps"].get<double>();
  if (s.capacity_Mbps <= 0) throw ScenarioError(where + ": capacity must be positive");
  if (j.contains("cross")) {
    if (!j["cross"].is_array()) throw ScenarioError(where + ": cross must be an array");
    int k = 0;
    for (const json& c : j["cross"])
      s.cross.push_back(parse_flow(c, where + ".cross[" + std::to_string(k++) + "]"));
  }
  return s;
}

inline std::vector<int> parse_int_list(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ScenarioError(where + ": nonempty array expected");
  std::vector<int> out;
  for (const json& v : j) {
    int x = v.get<int>();
    if (x < 1) throw ScenarioError(where + ": values must be >= 1");
    out.push_back(x);
  }
  return out;
}

inline ExperimentSpec parse_experiment(const json& j) {
  ExperimentSpec e;
  if (!j.contains("kind")) throw ScenarioError("experiment: missing 'kind'");
  e.kind = j["kind"].get<std::string>();
  if (e.kind == "fig2") {
    reject_unknown(j, {"kind", "target_delay_ms", "max_flows"}, "experiment");
    e.target_delay_ms = need_number(j, "target_delay_ms", "experiment");
    e.max_flows = static_cast<int>(opt_number(j, "max_flows", 200));
  } else if (e.kind == "fig3") {
    reject_unknown(j, {"kind", "m_values", "cross_total_burst_Mb", "cross_total_rate_Mbps"},
                   "experiment");
    e.m_values = parse_int_list(j.at("m_values"), "experiment.m_values");
    e.cross_total_burst_Mb = need_number(j, "cross_total_burst_Mb", "experiment");
    e.cross_total_rate_Mbps = need_number(j, "cross_total_rate_Mbps", "experiment");
  } else if (e.kind == "fig4") {
    reject_unknown(j, {"kind", "m_values"}, "experiment");
    e.m_values = parse_int_list(j.at("m_values"), "experiment.m_values");
  } else if (e.kind == "fig5") {
    reject_unknown(j, {"kind", "n_values"}, "experiment");
    e.n_values = parse_int_list(j.at("n_values"), "experiment.n_values");
  } else if (e.kind == "simcheck") {
    reject_unknown(j, {"kind", "epsilon", "slots", "replications"}, "experiment");
    e.sim_epsilon = opt_number(j, "epsilon", 1e-2);
    e.sim_slots = static_cast<long>(opt_number(j, "slots", 100000));
    e.sim_replications = static_cast<int>(opt_number(j, "replications", 100));
    if (e.sim_epsilon <= 0 || e.sim_epsilon >= 1 || e.sim_slots < 1 || e.sim_replications < 1)
      throw ScenarioError("experiment: invalid simcheck parameters");
  } else {
    throw ScenarioError("experiment: unknown kind '" + e.kind + "'");
  }
  return e;
}

}  // namespace detail

inline Scenario parse_scenario(const json& j) {
  detail::reject_unknown(j,
                         {"version", "name", "units", "epsilon", "horizon_slots", "theta",
                          "through", "servers", "experiment"},
                         "scenario");
  if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != 1)
    throw ScenarioError("scenario: 'version' must be the integer 1");
  Scenario s;
  if (j.contains("name")) s.name = j["name"].get<std::string>();
  if (j.contains("units")) {
    detail::reject_unknown(j["units"], {"slot_ms"}, "units");
    s.slot_ms = detail::need_number(j["units"], "slot_ms", "units");
    if (s.slot_ms <= 0) throw ScenarioError("units: slot_ms must be positive");
  }
  s.epsilon = detail::opt_number(j, "epsilon", 1e-6);
  if (s.epsilon <= 0 || s.epsilon >= 1) throw ScenarioError("scenario: epsilon must be in (0,1)");
  s.horizon_slots = static_cast<long>(detail::opt_number(j, "horizon_slots", 4096));
  if (s.horizon_slots < 64) throw ScenarioError("scenario: horizon_slots must be >= 64");
  if (j.contains("theta")) {
    detail::reject_unknown(j["theta"], {"min", "max", "points"}, "theta");
    s.theta.lo = detail::need_number(j["theta"], "min", "theta");
    s.theta.hi = detail::need_number(j["theta"], "max", "theta");
    s.theta.points = static_cast<int>(detail::opt_number(j["theta"], "points", 64));
    if (!(s.theta.lo > 0) || !(s.theta.hi > s.theta.lo) || s.theta.points < 2)
      throw ScenarioError("theta: need 0 < min < max and points >= 2");
  }
  if (!j.contains("through") || !j["through"].is_array() || j["through"].empty())
    throw ScenarioError("scenario: nonempty 'through' array required");
  int k = 0;
  for (const json& f : j["through"])
    s.through.push_back(detail::parse_flow(f, "through[" + std::to_string(k++) + "]"));
  if (!j.contains("servers") || !j["servers"].is_array() || j["servers"].empty())
    throw ScenarioError("scenario: nonempty 'servers' array required");
  k = 0;
  for (const json& sv : j["servers"])
    s.servers.push_back(detail::parse_server(sv, "servers[" + std::to_string(k++) + "]"));
  if (j.contains("experiment")) s.experiment = detail::parse_experiment(j["experiment"]);
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario parse error: ") + e.what());
  }
  return parse_scenario(j);
}

}  // namespace snc
