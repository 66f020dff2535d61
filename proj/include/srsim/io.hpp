/**
 * @file io.hpp
 * @brief Deterministic result files: trajectory, height, battery and event
 *        logs, batch summaries and the mode-transition matrix.
 *
 * Every file starts with the same comment header (tool version, configuration
 * hash, master seed) and contains nothing run-dependent beyond the data
 * itself — no timestamps, hostnames or locale-dependent formatting — so two
 * equal runs produce byte-identical files.  Floating-point values use the
 * shortest decimal form that round-trips exactly.
 */
#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

#include "srsim/config.hpp"
#include "srsim/engine.hpp"
#include "srsim/format.hpp"
#include "srsim/monte_carlo.hpp"
#include "srsim/version.hpp"

namespace srsim {

/// Common provenance header written at the top of every output file.
struct OutputHeader {
  std::string config_hash;
  std::uint64_t master_seed = 0;

  std::string text(const std::string& comment = "#") const {
    std::string s;
    s += comment + " srsim " + kVersion + "\n";
    s += comment + " config_hash: " + config_hash + "\n";
    s += comment + " master_seed: " + std::to_string(master_seed) + "\n";
    return s;
  }
};

namespace detail {

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  return f;
}

}  // namespace detail

/// Full vehicle trajectory (decimated), one row per sample.
inline void write_trajectory_csv(const std::string& path,
                                 const OutputHeader& h,
                                 const MissionRecord& rec) {
  auto f = detail::open_out(path);
  f << h.text();
  f << "t,x,y,z,vx,vy,vz,roll,pitch,yaw,battery,mode\n";
  for (const auto& s : rec.trajectory) {
    f << format_double(s.t) << ',' << format_double(s.position.x()) << ','
      << format_double(s.position.y()) << ',' << format_double(s.position.z())
      << ',' << format_double(s.velocity.x()) << ','
      << format_double(s.velocity.y()) << ',' << format_double(s.velocity.z())
      << ',' << format_double(s.attitude.x()) << ','
      << format_double(s.attitude.y()) << ',' << format_double(s.attitude.z())
      << ',' << format_double(s.battery) << ',' << s.mode << '\n';
  }
}

///// Height channel: measured and commanded height per sample.
inline void write_height_csv(const std::string& path, const OutputHeader& h,
                             const MissionRecord& rec) {
  auto f = detail::open_out(path);
  f << h.text();
  f << "t,z,z_command,mode\n";
  for (const auto& s : rec.trajectory) {
    f << format_double(s.t) << ',' << format_double(s.position.z()) << ','
      << format_double(s.z_command) << ',' << s.mode << '\n';
  }
}

/// Battery voltage per sample, with the monitor levels alongside.
inline void write_battery_csv(const std::string& path, const OutputHeader& h,
                              const MissionRecord& rec,
                              const BatteryParams& bp) {
  auto f = detail::open_out(path);
  f << h.text();
  f << "t,voltage,threshold,full\n";
  for (const auto& s : rec.trajectory) {
    f << format_double(s.t) << ',' << format_double(s.battery) << ','
      << format_double(bp.v_threshold) << ',' << format_double(bp.v_full)
      << '\n';
  }
}

/// Supervisor transitions of one run.
inline void write_event_log(const std::string& path, const OutputHeader& h,
                            const MissionRecord& rec) {
  auto f = detail::open_out(path);
  f << h.text();
  f << "t,from,to,reason\n";
  for (const auto& e : rec.events) {
    f << format_double(e.t) << ',' << mode_name(e.from) << ','
      << mode_name(e.to) << ',' << e.reason << '\n';
  }
  f << "# end: " << run_end_name(rec.end)
    << " time: " << format_double(rec.mission_time)
    << " deposited: " << rec.deposited << "/" << rec.object_count << '\n';
}

/// Batch aggregate, one key,value row per quantity.
inline void write_batch_summary(const std::string& path, const OutputHeader& h,
                                const BatchStats& st) {
  auto f = detail::open_out(path);
  f << h.text();
  f << "key,value\n";
  f << "runs," << st.runs << '\n';
  f << "successes," << st.successes << '\n';
  f << "actuator_faults," << st.actuator_faults << '\n';
  f << "grasper_drop_runs," << st.grasper_drop_runs << '\n';
  f << "end_of_path," << st.end_of_path << '\n';
  f << "timeouts," << st.timeouts << '\n';
  f << "numerical," << st.numerical << '\n';
  f << "init_entries," << st.init_entries << '\n';
  f << "init_faults," << st.init_faults << '\n';
  f << "battery_returns," << st.battery_returns << '\n';
  f << "success_freq," << format_double(st.success_freq()) << '\n';
  f << "actuator_fault_freq," << format_double(st.actuator_fault_freq()) << '\n';
  f << "grasper_drop_freq," << format_double(st.grasper_drop_freq()) << '\n';
  f << "init_fault_rate," << format_double(st.init_fault_rate()) << '\n';
  f << "mean_mission_time," << format_double(st.mean_time()) << '\n';
  f << "mission_time_stddev," << format_double(st.time_stddev()) << '\n';
}

/// Headline frequency table (the shape used for reporting campaign results).
inline void write_frequency_table(const std::string& path,
                                  const OutputHeader& h, const BatchStats& st) {
  auto f = detail::open_out(path);
  f << h.text();
  f << "quantity,frequency\n";
  f << "mission_success," << format_double(st.success_freq()) << '\n';
  // Self-check failures per Initialise entry (retries and new sorties each
  // draw again, so the denominator exceeds the run count).
  f << "system_fault," << format_double(st.init_fault_rate()) << '\n';
  f << "actuator_fault," << format_double(st.actuator_fault_freq()) << '\n';
  f << "objects_dropped," << format_double(st.grasper_drop_freq()) << '\n';
  f << "mean_mission_time," << format_double(st.mean_time()) << '\n';
}

/// Mode-transition counts over a batch (rows = from, columns = to).
inline void write_transition_csv(const std::string& path,
                                 const OutputHeader& h, const BatchStats& st) {
  auto f = detail::open_out(path);
  f << h.text();
  f << "from";
  for (int j = 0; j < kModeCount; ++j) {
    f << ',' << mode_name(static_cast<Mode>(j + 1));
  }
  f << '\n';
  for (int i = 0; i < kModeCount; ++i) {
    f << mode_name(static_cast<Mode>(i + 1));
    for (int j = 0; j < kModeCount; ++j) {
      f << ','
        << st.transitions[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    f << '\n';
  }
}

/// Effective configuration after overrides, canonical form.
inline void write_effective_config(const std::string& path,
                                   const OutputHeader& h, const Config& cfg) {
  auto f = detail::open_out(path);
  f << h.text();
  f << cfg.emit();
}

}  // namespace srsim
