#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gavg/gray_scott.hpp"

namespace gavg {

enum class InitialConditionMix { kFourier, kGaussians, kAlternate };

struct DatasetConfig {
  GridSpec grid{64, 64, 1.0 / 64, 1.0 / 64, Boundary::kPeriodicBoth};
  GrayScottParams params = GrayScottParams::with_frame_interval(grid, 10.0);
  InitialConditionMix ic_mix = InitialConditionMix::kAlternate;
  InitialConditionSpec ic;  // seed and kind are set per trajectory
  int trajectories = 20;
  int frames = 200;
  std::uint64_t seed = 0;
  double test_fraction = 0.1;
  double steady_threshold = 1e-8;
  bool store_double = false;
};

struct TrajectoryRecord {
  std::string name;  // directory under the dataset root
  int index = 0;
  std::uint64_t seed = 0;
  std::string split;  // "train" or "test"
  std::string ic_kind;
  double final_variance = 0.0;
  bool steady_state = false;  // final-frame variance below the threshold
};

struct Manifest {
  DatasetConfig config;
  std::vector<TrajectoryRecord> trajectories;

  std::vector<const TrajectoryRecord*> split(std::string_view name, bool include_steady) const;
};

// Number of test trajectories: round(fraction * n), clamped to [1, n - 1].
int test_count(int n_trajectories, double test_fraction);

// Trajectory i uses seed config.seed + i; the last test_count trajectories form
// the test split. Writes manifest.json plus one trajectory directory per run.
Manifest make_dataset(const DatasetConfig& config, const std::filesystem::path& root);

Manifest load_manifest(const std::filesystem::path& root);

template <typename T>
Trajectory<T> load_dataset_trajectory(const std::filesystem::path& root, const TrajectoryRecord& record);

// Largest per-channel spatial variance.
template <typename T>
double max_channel_variance(const FieldSet<T>& field);

}  // namespace gavg
