// sncbound: probabilistic network-calculus bounds for tandem queues.
//
// Subcommands reproduce the canonical experiments (fig2..fig5), run the
// simulation cross-check (simcheck) or the operator property suites (oracle).
// Results land as CSV files in the output directory.
//
// Exit codes: 0 success, 2 invalid scenario, 3 instability encountered
// (partial CSV written), 4 property/simulation check failure.

#include <cstdint>
#include <iostream>

#include <CLI11.hpp>

#include "snc/experiments.hpp"

namespace {

struct Options {
  std::string scenario_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  double slot_ms = 0.0;       // 0 = keep scenario value
  double epsilon = 0.0;       // 0 = keep scenario value
  double theta_min = 0.0, theta_max = 0.0;
  int theta_points = 0;
  long replications = 0;      // simcheck override
};

void apply_overrides(snc::Scenario& sc, const Options& o) {
  if (o.slot_ms > 0.0) sc.slot_ms = o.slot_ms;
  if (o.epsilon > 0.0) sc.epsilon = o.epsilon;
  if (o.theta_min > 0.0) sc.theta.lo = o.theta_min;
  if (o.theta_max > 0.0) sc.theta.hi = o.theta_max;
  if (o.theta_points > 0) sc.theta.points = o.theta_points;
  if (!(sc.theta.lo > 0) || !(sc.theta.hi > sc.theta.lo) || sc.theta.points < 2)
    throw snc::ScenarioError("theta override: need 0 < min < max and points >= 2");
  if (o.replications > 0) sc.experiment.sim_replications = static_cast<int>(o.replications);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MGF network calculus bounds for tandem queues with cross traffic"};
  app.require_subcommand(1);

  Options opt;
  std::vector<std::string> names = {"fig2", "fig3", "fig4", "fig5", "simcheck", "oracle"};
  std::vector<CLI::App*> subs;
  for (const std::string& name : names) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--scenario", opt.scenario_path, "scenario file (json)");
    sub->add_option("--out", opt.out_dir, "output directory for CSV files");
    sub->add_option("--seed", opt.seed, "simulation seed");
    sub->add_option("--slot-ms", opt.slot_ms, "override slot duration (ms)");
    sub->add_option("--epsilon", opt.epsilon, "override violation probability");
    sub->add_option("--theta-min", opt.theta_min, "override theta grid lower end");
    sub->add_option("--theta-max", opt.theta_max, "override theta grid upper end");
    sub->add_option("--theta-points", opt.theta_points, "override theta grid size");
    sub->add_option("--replications", opt.replications, "override simcheck replications");
    subs.push_back(sub);
  }

  CLI11_PARSE(app, argc, argv);
  std::string name = app.get_subcommands().front()->get_name();

  try {
    snc::Scenario sc;
    if (name == "oracle") {
      if (!opt.scenario_path.empty()) sc = snc::load_scenario(opt.scenario_path);
    } else {
      if (opt.scenario_path.empty()) {
        std::cerr << "error: --scenario is required for " << name << "\n";
        return 2;
      }
      sc = snc::load_scenario(opt.scenario_path);
      apply_overrides(sc, opt);
    }
    int code = snc::run_experiment(name, sc, opt.out_dir, opt.seed);
    if (code == 3) std::cerr << "instability encountered; partial results written\n";
    if (code == 4) std::cerr << "property or simulation check failed\n";
    return code;
  } catch (const snc::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
