#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gavg/dataset.hpp"
#include "gavg/metrics.hpp"
#include "gavg/reynolds.hpp"
#include "gavg/stencil_model.hpp"

namespace gavg::bench {

// FNV-1a over the file bytes, as 16 hex digits.
std::string file_hash(const std::filesystem::path& path);

struct GenerateSummary {
  Manifest manifest;
  std::string manifest_hash;
  int train = 0;
  int test = 0;
  int steady = 0;
};

GenerateSummary run_generate(const DatasetConfig& config, const std::filesystem::path& out, std::ostream& log);

struct TrainOptions {
  std::filesystem::path dataset;
  std::filesystem::path model_out;
  std::filesystem::path loss_curve_csv;  // empty: next to the model as <model>.loss.csv
  StencilModelConfig model;
  TrainConfig train;
  bool include_steady = false;
};

TrainResult run_train(const TrainOptions& options, std::ostream& log);

// One evaluated variant. Text forms: "baseline", "<group>" for full
// enumeration, "<group>:mc:n=<n>[:fixed][:seed=<s>]" for Monte-Carlo, with
// group in {d1, d2, d4, circle, torus}.
struct Variant {
  std::string label;  // "d4", "torus-mc1", "torus-mc4-fixed-s3", ...
  std::optional<AveragingConfig> averaging;
  bool explicit_seed = false;
};

Variant parse_variant(std::string_view text, const GridSpec& grid);

struct EvalOptions {
  std::filesystem::path dataset;
  // Model file, or "persistence" for the copy-last-frame model.
  std::filesystem::path model;
  std::vector<std::string> groups;  // variants besides the baseline
  std::vector<int> starts{10, 50};
  int horizon = 15;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;  // empty: no files written
  bool dump_fields = false;
  bool include_steady = false;
  MetricConfig metric;
};

struct EvalResult {
  LossTable aggregated;
  std::vector<TrajectoryLosses> per_trajectory;  // one entry per (trajectory, variant, start)
  std::vector<std::string> statuses;             // parallel to per_trajectory: ok | divergent
};

// Writes losses.csv, rollout.csv, losses_by_trajectory.csv and
// trajectories.csv into out_dir, plus fields/ when dump_fields is set.
EvalResult run_eval(const EvalOptions& options, std::ostream& log);

// Markdown table from an eval output directory (losses.csv + rollout.csv).
std::string run_report(const std::filesystem::path& eval_dir, std::span<const int> steps);

// Seed for the Monte-Carlo draws of one (variant, start, trajectory) rollout.
std::uint64_t rollout_seed(std::uint64_t base, std::string_view variant, int start, int trajectory_index);

}  // namespace gavg::bench
