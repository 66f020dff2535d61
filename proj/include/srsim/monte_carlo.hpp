/**
 * @file monte_carlo.hpp
 * @brief Batch mission execution with per-run seeds and deterministic
 *        aggregation.
 *
 * Run i is driven entirely by derive_seed(master_seed, i), so results are a
 * pure function of (scenario, master seed, run count).  Workers only decide
 * which thread computes a run; summaries are stored by run index and reduced
 * in index order, making the aggregate identical for any worker count.
 */
#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "srsim/engine.hpp"
#include "srsim/rng.hpp"

namespace srsim {

/// Aggregated results of a batch.
struct BatchStats {
  std::uint64_t runs = 0;
  std::uint64_t successes = 0;
  std::uint64_t actuator_faults = 0;   ///< runs ending by rotor failure
  std::uint64_t grasper_drop_runs = 0; ///< runs with >= 1 grasper fault event
  std::uint64_t end_of_path = 0;
  std::uint64_t timeouts = 0;
  std::uint64_t numerical = 0;
  std::uint64_t init_entries = 0;      ///< Initialise entries over all runs
  std::uint64_t init_faults = 0;       ///< failed self checks over all runs
  std::uint64_t battery_returns = 0;
  double total_time = 0.0;
  double total_time_sq = 0.0;
  std::array<std::array<std::uint64_t, kModeCount>, kModeCount> transitions{};

  double success_freq() const { return ratio(successes); }
  double actuator_fault_freq() const { return ratio(actuator_faults); }
  double grasper_drop_freq() const { return ratio(grasper_drop_runs); }
  double end_of_path_freq() const { return ratio(end_of_path); }
  double timeout_freq() const { return ratio(timeouts); }
  double mean_time() const {
    return runs == 0 ? 0.0 : total_time / static_cast<double>(runs);
  }
  /// Sample standard deviation of mission time (0 for fewer than two runs).
  double time_stddev() const {
    if (runs < 2) return 0.0;
    const double n = static_cast<double>(runs);
    const double var = (total_time_sq - total_time * total_time / n) / (n - 1.0);
    return var > 0.0 ? std::sqrt(var) : 0.0;
  }
  /// Standard error of the mean mission time.
  double time_stderr() const {
    return runs == 0 ? 0.0
                     : time_stddev() / std::sqrt(static_cast<double>(runs));
  }
  /// Start-up self-check failure rate per Initialise entry.
  double init_fault_rate() const {
    return init_entries == 0
               ? 0.0
               : static_cast<double>(init_faults) /
                     static_cast<double>(init_entries);
  }
  /// Row-normalised transition frequency from mode @p from to mode @p to.
  double transition_freq(Mode from, Mode to) const {
    const auto& row = transitions[static_cast<std::size_t>(mode_index(from))];
    std::uint64_t total = 0;
    for (auto n : row) total += n;
    if (total == 0) return 0.0;
    return static_cast<double>(row[static_cast<std::size_t>(mode_index(to))]) /
           static_cast<double>(total);
  }

 private:
  double ratio(std::uint64_t n) const {
    return runs == 0 ? 0.0 : static_cast<double>(n) / static_cast<double>(runs);
  }
};

/// Compact per-run summary kept during a batch.
struct RunSummary {
  RunEnd end = RunEnd::Timeout;
  double time = 0.0;
  bool grasper_drop = false;
  std::uint32_t init_entries = 0;
  std::uint32_t init_faults = 0;
  std::uint32_t battery_returns = 0;
  std::array<std::array<std::uint32_t, kModeCount>, kModeCount> transitions{};
};

inline RunSummary summarize(const MissionRecord& r) {
  RunSummary s;
  s.end = r.end;
  s.time = r.mission_time;
  s.grasper_drop = r.grasper_drops > 0;
  s.init_entries = static_cast<std::uint32_t>(r.init_entries);
  s.init_faults = static_cast<std::uint32_t>(r.init_faults);
  s.battery_returns = static_cast<std::uint32_t>(r.battery_returns);
  s.transitions = r.transitions;
  return s;
}

inline void accumulate(BatchStats& b, const RunSummary& s) {
  ++b.runs;
  switch (s.end) {
    case RunEnd::Success: ++b.successes; break;
    case RunEnd::ActuatorFault: ++b.actuator_faults; break;
    case RunEnd::EndOfPath: ++b.end_of_path; break;
    case RunEnd::Timeout: ++b.timeouts; break;
    case RunEnd::Numerical: ++b.numerical; break;
  }
  if (s.grasper_drop) ++b.grasper_drop_runs;
  b.init_entries += s.init_entries;
  b.init_faults += s.init_faults;
  b.battery_returns += s.battery_returns;
  b.total_time += s.time;
  b.total_time_sq += s.time * s.time;
  for (int i = 0; i < kModeCount; ++i) {
    for (int j = 0; j < kModeCount; ++j) {
      b.transitions[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
          s.transitions[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
}

/**
 * @brief Execute @p runs missions and aggregate their summaries.
 *
 * @param params scenario description
 * @param master_seed seed from which every run seed is derived
 * @param runs number of missions
 * @param workers worker threads (1 = in-line); any value yields identical stats
 */
inline BatchStats run_batch(const ScenarioParams& params,
                            std::uint64_t master_seed, std::uint64_t runs,
                            unsigned workers = 1) {
  SimEngine engine(params);
  std::vector<RunSummary> results(runs);
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < runs; ++i) {
      results[i] = summarize(engine.run(derive_seed(master_seed, i), false));
    }
  } else {
    std::atomic<std::uint64_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::uint64_t i = next.fetch_add(1);
        if (i >= runs) return;
        results[i] = summarize(engine.run(derive_seed(master_seed, i), false));
      }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  BatchStats stats;
  for (const auto& s : results) accumulate(stats, s);
  return stats;
}

}  // namespace srsim
