#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gavg/field.hpp"

namespace gavg {

struct MetricConfig {
  double epsilon = 1e-7;
  int rollout_steps = 15;
  // Score every component separately instead of one variable per channel
  // group with component-summed squared norms.
  bool per_component = false;
};

// sqrt(<|u - v|^2> / (<|v - <v>|^2> + eps)) with v = truth; |.|^2 sums over
// the components of the channel group before the spatial mean.
template <typename T>
double vrmse(const FieldSet<T>& pred, const FieldSet<T>& truth, std::string_view channel, double epsilon = 1e-7);

template <typename T>
double vrmse_component(const FieldSet<T>& pred, const FieldSet<T>& truth, int component, double epsilon = 1e-7);

struct LossRow {
  std::string variant;
  int start = 0;
  int step = 0;  // 1 = first predicted frame
  std::string variable;
  double vrmse = 0.0;

  bool operator==(const LossRow&) const = default;
};

struct RolloutRow {
  std::string variant;
  int start = 0;
  std::string variable;  // a state variable, or "mean" for the mean over variables
  double rollout = 0.0;

  bool operator==(const RolloutRow&) const = default;
};

struct LossTable {
  std::vector<LossRow> steps;
  std::vector<RolloutRow> rollouts;
};

inline constexpr std::string_view kMeanVariable = "mean";

// Compensated (Neumaier) sum; every rollout total goes through it.
double stable_sum(std::span<const double> values);

// Rollout rows from step rows: per variable, the sum over steps 1..steps of
// its VRMSE; "mean" sums the per-step means over variables.
std::vector<RolloutRow> rollout_sums(std::span<const LossRow> rows, int steps);

// Scores predicted frames (time indices start+1 ...) against the matching
// truth frames. Throws kMisalignment when a predicted time is missing from
// truth or the prediction does not begin at start + 1.
template <typename T>
LossTable evaluate_rollout(const Trajectory<T>& pred, const Trajectory<T>& truth, const std::string& variant,
                           int start, const MetricConfig& cfg = {});

struct TrajectoryLosses {
  std::string trajectory;
  bool excluded = false;  // steady-state or divergent; kept out of means
  LossTable table;
};

// Elementwise means over non-excluded tables, keyed by
// (variant, start, step, variable) in first-seen order. Throws kEmptyInput
// when nothing remains.
LossTable aggregate(std::span<const TrajectoryLosses> tables, int rollout_steps = 15);

void write_loss_csv(const std::filesystem::path& path, std::span<const LossRow> rows);
void write_rollout_csv(const std::filesystem::path& path, std::span<const RolloutRow> rows);
std::vector<LossRow> read_loss_csv(const std::filesystem::path& path);
std::vector<RolloutRow> read_rollout_csv(const std::filesystem::path& path);

// Shortest round-trip decimal form.
std::string format_double(double v);

// One row per (start, variant) with step columns and a rollout column, values
// averaged over variables. Per-column minima within a start block are bolded
// when the block has more than one variant.
std::string markdown_table(const LossTable& table, std::span<const int> steps);

}  // namespace gavg
