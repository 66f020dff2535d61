/**
 * @file srsim_cli.cpp
 * @brief Command line front end for the retrieval-mission toolkit.
 *
 * Subcommands:
 *   simulate      one mission with full trajectory and event output
 *   montecarlo    a seeded batch of missions with aggregate statistics
 *   mdp-build     build the abstract decision model and report its size
 *   mdp-check     verify the abstract model's probability and time queries
 *   export-prism  write the abstract model and its standard query file
 *   compare       check simulated estimates against the model-family envelope
 *
 * Exit status: 0 on success, 1 on configuration or usage errors, 2 when a
 * comparison ran but the simulated estimates fell outside the envelope.
 */
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "srsim/config.hpp"
#include "srsim/engine.hpp"
#include "srsim/format.hpp"
#include "srsim/io.hpp"
#include "srsim/mdp/abstraction.hpp"
#include "srsim/mdp/bounds.hpp"
#include "srsim/mdp/model.hpp"
#include "srsim/mdp/prism_io.hpp"
#include "srsim/mdp/value_iteration.hpp"
#include "srsim/monte_carlo.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  std::uint64_t runs = 100;
  unsigned workers = 1;
  std::vector<std::string> overrides;
};

srsim::Config load_config(const Options& o) {
  std::ifstream f(o.config_path);
  if (!f) {
    throw srsim::ConfigError("cannot open config file: " + o.config_path);
  }
  std::stringstream ss;
  ss << f.rdbuf();
  srsim::Config cfg = srsim::Config::parse(ss.str());
  for (const auto& ov : o.overrides) cfg.apply_override(ov);
  return cfg;
}

/// Reject typos: any unconsumed key inside a section this subcommand owns.
void reject_unknown(const srsim::Config& cfg,
                    std::initializer_list<const char*> sections) {
  std::string bad;
  for (const auto& k : cfg.unconsumed_keys()) {
    const std::string sec = k.substr(0, k.find('.'));
    for (const char* s : sections) {
      if (sec == s) {
        bad += " " + k;
        break;
      }
    }
  }
  if (!bad.empty()) {
    throw srsim::ConfigError("unknown configuration key(s):" + bad);
  }
}

constexpr std::initializer_list<const char*> kSimSections = {
    "vehicle", "object", "battery", "faults", "camera",
    "control", "guidance", "world", "start"};

std::string out_path(const Options& o, const std::string& name) {
  std::filesystem::create_directories(o.out_dir);
  return (std::filesystem::path(o.out_dir) / name).string();
}

int cmd_simulate(const Options& o) {
  const srsim::Config cfg = load_config(o);
  const srsim::ScenarioParams params = srsim::scenario_from_config(cfg);
  reject_unknown(cfg, kSimSections);
  const srsim::OutputHeader header{cfg.content_hash(), o.seed};

  const srsim::SimEngine engine(params);
  const srsim::MissionRecord rec = engine.run(o.seed, true);

  srsim::write_trajectory_csv(out_path(o, "trajectory.csv"), header, rec);
  srsim::write_height_csv(out_path(o, "height.csv"), header, rec);
  srsim::write_battery_csv(out_path(o, "battery.csv"), header, rec,
                           params.battery);
  srsim::write_event_log(out_path(o, "events.csv"), header, rec);
  srsim::write_effective_config(out_path(o, "config.ini"), header, cfg);

  std::cout << "end: " << srsim::run_end_name(rec.end)
            << " time: " << srsim::format_double(rec.mission_time)
            << " deposited: " << rec.deposited << "/" << rec.object_count
            << "\n";
  return 0;
}

int cmd_montecarlo(const Options& o) {
  const srsim::Config cfg = load_config(o);
  const srsim::ScenarioParams params = srsim::scenario_from_config(cfg);
  reject_unknown(cfg, kSimSections);
  const srsim::OutputHeader header{cfg.content_hash(), o.seed};

  const srsim::BatchStats stats =
      srsim::run_batch(params, o.seed, o.runs, o.workers);

  srsim::write_batch_summary(out_path(o, "summary.csv"), header, stats);
  srsim::write_frequency_table(out_path(o, "frequencies.csv"), header, stats);
  srsim::write_transition_csv(out_path(o, "transitions.csv"), header, stats);
  srsim::write_effective_config(out_path(o, "config.ini"), header, cfg);

  std::cout << "runs: " << stats.runs
            << " success: " << srsim::format_double(stats.success_freq())
            << " actuator_fault: "
            << srsim::format_double(stats.actuator_fault_freq())
            << " mean_time: " << srsim::format_double(stats.mean_time())
            << "\n";
  return 0;
}

int cmd_mdp_build(const Options& o) {
  const srsim::Config cfg = load_config(o);
  const srsim::mdp::AbstractScenario sc = srsim::mdp::abstract_from_config(cfg);
  reject_unknown(cfg, {"abstract"});

  const srsim::mdp::GuardedCommandModel model =
      srsim::mdp::build_abstract_model(sc);
  const srsim::mdp::ExplicitMdp mdp = srsim::mdp::build_explicit(model);

  std::string text;
  text += "states: " + std::to_string(mdp.state_count()) + "\n";
  text += "choices: " + std::to_string(mdp.choice_count()) + "\n";
  text += "branches: " + std::to_string(mdp.transition_count()) + "\n";
  text += "deadlocks: " + std::to_string(mdp.deadlocks.size()) + "\n";
  for (const auto& [name, set] : mdp.labels) {
    std::size_t count = 0;
    for (bool b : set) count += b ? 1 : 0;
    text += "label " + name + ": " + std::to_string(count) + "\n";
  }
  std::ofstream f(out_path(o, "stats.txt"));
  f << text;
  std::cout << text;
  return 0;
}

int cmd_mdp_check(const Options& o) {
  const srsim::Config cfg = load_config(o);
  const srsim::mdp::AbstractScenario sc = srsim::mdp::abstract_from_config(cfg);
  reject_unknown(cfg, {"abstract"});

  const srsim::mdp::ModelBounds b = srsim::mdp::compute_model_bounds(sc);
  std::string text;
  text += "states: " + std::to_string(b.states) + "\n";
  text += "p_success_min: " + srsim::format_double(b.p_success_min) + "\n";
  text += "p_success_max: " + srsim::format_double(b.p_success_max) + "\n";
  text += "p_fault_min: " + srsim::format_double(b.p_fault_min) + "\n";
  text += "p_fault_max: " + srsim::format_double(b.p_fault_max) + "\n";
  text += "time_min: " + srsim::format_double(b.time_min) + "\n";
  text += "time_max: " + srsim::format_double(b.time_max) + "\n";
  text += std::string("time_finite: ") + (b.time_finite ? "yes" : "no") + "\n";
  std::ofstream f(out_path(o, "queries.txt"));
  f << text;
  std::cout << text;
  return 0;
}

int cmd_export_prism(const Options& o) {
  const srsim::Config cfg = load_config(o);
  const srsim::mdp::AbstractScenario sc = srsim::mdp::abstract_from_config(cfg);
  reject_unknown(cfg, {"abstract"});

  const srsim::mdp::GuardedCommandModel model =
      srsim::mdp::build_abstract_model(sc);
  const std::string model_path = out_path(o, "model.prism");
  {
    std::ofstream f(model_path);
    f << srsim::mdp::export_prism(model);
  }
  const std::string props_path = out_path(o, "model.props");
  {
    std::ofstream f(props_path);
    f << srsim::mdp::export_properties(model.reward_name);
  }
  std::cout << "wrote " << model_path << "\n" << "wrote " << props_path << "\n";
  return 0;
}

int cmd_compare(const Options& o) {
  const srsim::Config cfg = load_config(o);
  const srsim::ScenarioParams params = srsim::scenario_from_config(cfg);
  const srsim::mdp::AbstractScenario sc = srsim::mdp::abstract_from_config(cfg);
  std::vector<std::vector<std::pair<int, int>>> placements;
  if (auto v = cfg.get("compare", "placements")) {
    placements = srsim::mdp::parse_placements(*v);
  }
  if (placements.empty()) placements.push_back(sc.objects);
  reject_unknown(cfg, {"vehicle", "object", "battery", "faults", "camera",
                       "control", "guidance", "world", "start", "abstract",
                       "compare"});
  const srsim::OutputHeader header{cfg.content_hash(), o.seed};

  const srsim::BatchStats stats =
      srsim::run_batch(params, o.seed, o.runs, o.workers);
  const srsim::mdp::ContainmentReport rep =
      srsim::mdp::check_bounds(params, sc, placements, stats);

  const std::string text = srsim::mdp::report_text(rep);
  srsim::write_batch_summary(out_path(o, "summary.csv"), header, stats);
  srsim::write_frequency_table(out_path(o, "frequencies.csv"), header, stats);
  {
    std::ofstream f(out_path(o, "compare.txt"));
    f << header.text() << text;
  }
  std::cout << text;
  return rep.all_pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"search-and-retrieve mission simulator and model checker"};
  app.require_subcommand(1);

  Options o;
  auto add_common = [&](CLI::App* sub, bool needs_seed) {
    sub->add_option("--config", o.config_path, "configuration file (INI)")
        ->required();
    sub->add_option("--out", o.out_dir, "output directory")->required();
    sub->add_option("--set", o.overrides,
                    "override a value as section.key=value (repeatable)");
    if (needs_seed) {
      sub->add_option("--seed", o.seed, "master seed");
    }
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run one mission");
  add_common(simulate, true);

  CLI::App* montecarlo =
      app.add_subcommand("montecarlo", "run a batch of missions");
  add_common(montecarlo, true);
  montecarlo->add_option("--runs", o.runs, "number of missions");
  montecarlo->add_option("--workers", o.workers, "worker threads");

  CLI::App* mdp_build =
      app.add_subcommand("mdp-build", "build the abstract model");
  add_common(mdp_build, false);

  CLI::App* mdp_check =
      app.add_subcommand("mdp-check", "verify the abstract model's queries");
  add_common(mdp_check, false);

  CLI::App* export_prism =
      app.add_subcommand("export-prism", "write the model and query files");
  add_common(export_prism, false);

  CLI::App* compare = app.add_subcommand(
      "compare", "check simulated estimates against the model envelope");
  add_common(compare, true);
  compare->add_option("--runs", o.runs, "number of missions");
  compare->add_option("--workers", o.workers, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(simulate)) return cmd_simulate(o);
    if (app.got_subcommand(montecarlo)) return cmd_montecarlo(o);
    if (app.got_subcommand(mdp_build)) return cmd_mdp_build(o);
    if (app.got_subcommand(mdp_check)) return cmd_mdp_check(o);
    if (app.got_subcommand(export_prism)) return cmd_export_prism(o);
    if (app.got_subcommand(compare)) return cmd_compare(o);
  } catch (const srsim::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
