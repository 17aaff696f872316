#include "gavg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "gavg/trajectory_io.hpp"
#include "json_support.hpp"
#include "parallel.hpp"

namespace gavg {

using nlohmann::json;

namespace {

const char* to_string(InitialConditionMix mix) {
  switch (mix) {
    case InitialConditionMix::kFourier: return "fourier";
    case InitialConditionMix::kGaussians: return "gaussians";
    case InitialConditionMix::kAlternate: return "alternate";
  }
  return "alternate";
}

InitialConditionMix mix_from_string(const std::string& s) {
  if (s == "fourier") return InitialConditionMix::kFourier;
  if (s == "gaussians") return InitialConditionMix::kGaussians;
  if (s == "alternate") return InitialConditionMix::kAlternate;
  throw Error(ErrorCode::kInvalidArgument, "unknown initial condition mix '" + s + "'");
}

InitialConditionKind kind_for(InitialConditionMix mix, int index) {
  switch (mix) {
    case InitialConditionMix::kFourier: return InitialConditionKind::kRandomFourier;
    case InitialConditionMix::kGaussians: return InitialConditionKind::kGaussianClusters;
    case InitialConditionMix::kAlternate:
      return index % 2 == 0 ? InitialConditionKind::kGaussianClusters : InitialConditionKind::kRandomFourier;
  }
  return InitialConditionKind::kGaussianClusters;
}

json config_to_json(const DatasetConfig& c) {
  return json{{"grid", c.grid},
              {"params",
               {{"diff_a", c.params.diff_a},
                {"diff_b", c.params.diff_b},
                {"feed", c.params.feed},
                {"kill", c.params.kill},
                {"dt", c.params.dt},
                {"substeps", c.params.substeps}}},
              {"initial_condition",
               {{"mix", to_string(c.ic_mix)},
                {"modes", c.ic.modes},
                {"count", c.ic.count},
                {"width", c.ic.width},
                {"amplitude", c.ic.amplitude}}},
              {"trajectories", c.trajectories},
              {"frames", c.frames},
              {"seed", c.seed},
              {"test_fraction", c.test_fraction},
              {"steady_threshold", c.steady_threshold},
              {"dtype", c.store_double ? "float64" : "float32"}};
}

DatasetConfig config_from_json(const json& j) {
  DatasetConfig c;
  c.grid = j.at("grid").get<GridSpec>();
  const auto& p = j.at("params");
  c.params.diff_a = p.at("diff_a");
  c.params.diff_b = p.at("diff_b");
  c.params.feed = p.at("feed");
  c.params.kill = p.at("kill");
  c.params.dt = p.at("dt");
  c.params.substeps = p.at("substeps");
  const auto& ic = j.at("initial_condition");
  c.ic_mix = mix_from_string(ic.at("mix"));
  c.ic.modes = ic.at("modes");
  c.ic.count = ic.at("count");
  c.ic.width = ic.at("width");
  c.ic.amplitude = ic.at("amplitude");
  c.trajectories = j.at("trajectories");
  c.frames = j.at("frames");
  c.seed = j.at("seed");
  c.test_fraction = j.at("test_fraction");
  c.steady_threshold = j.at("steady_threshold");
  c.store_double = j.at("dtype") == "float64";
  return c;
}

std::string trajectory_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "traj_%04d", index);
  return buf;
}

}  // namespace

std::vector<const TrajectoryRecord*> Manifest::split(std::string_view name, bool include_steady) const {
  std::vector<const TrajectoryRecord*> out;
  for (const auto& r : trajectories) {
    if (r.split == name && (include_steady || !r.steady_state)) out.push_back(&r);
  }
  return out;
}

int test_count(int n_trajectories, double test_fraction) {
  if (n_trajectories < 2) throw Error(ErrorCode::kInvalidArgument, "dataset needs at least 2 trajectories");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "test fraction must be in (0, 1)");
  }
  const int n = static_cast<int>(std::lround(test_fraction * n_trajectories));
  return std::clamp(n, 1, n_trajectories - 1);
}

template <typename T>
double max_channel_variance(const FieldSet<T>& field) {
  double best = 0.0;
  const double cells = static_cast<double>(field.grid().cells());
  for (int c = 0; c < field.components(); ++c) {
    double mean = 0.0;
    for (T v : field.plane(c)) mean += v;
    mean /= cells;
    double var = 0.0;
    for (T v : field.plane(c)) var += (v - mean) * (v - mean);
    best = std::max(best, var / cells);
  }
  return best;
}

Manifest make_dataset(const DatasetConfig& config, const std::filesystem::path& root) {
  config.grid.validate();
  config.params.validate(config.grid);
  const int n_test = test_count(config.trajectories, config.test_fraction);
  if (config.frames < 1) throw Error(ErrorCode::kInvalidArgument, "frames must be at least 1");

  std::error_code ec;
  std::filesystem::create_directories(root, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + root.string() + ": " + ec.message());

  Manifest manifest{config, std::vector<TrajectoryRecord>(config.trajectories)};
  detail::parallel_for(static_cast<std::size_t>(config.trajectories), [&](std::size_t i) {
    const int index = static_cast<int>(i);
    InitialConditionSpec ic = config.ic;
    ic.kind = kind_for(config.ic_mix, index);
    ic.seed = config.seed + static_cast<std::uint64_t>(index);
    const Trajectory<double> traj = generate_trajectory(config.grid, config.params, ic, config.frames);

    TrajectoryRecord& rec = manifest.trajectories[i];
    rec.name = trajectory_name(index);
    rec.index = index;
    rec.seed = ic.seed;
    rec.split = index >= config.trajectories - n_test ? "test" : "train";
    rec.ic_kind = to_string(ic.kind);
    rec.final_variance = max_channel_variance(traj[traj.size() - 1]);
    rec.steady_state = rec.final_variance < config.steady_threshold;
    if (config.store_double) {
      save_trajectory(traj, root / rec.name);
    } else {
      save_trajectory(traj.cast<float>(), root / rec.name);
    }
  });

  json records = json::array();
  for (const auto& r : manifest.trajectories) {
    records.push_back({{"name", r.name},
                       {"index", r.index},
                       {"seed", r.seed},
                       {"split", r.split},
                       {"ic_kind", r.ic_kind},
                       {"final_variance", r.final_variance},
                       {"steady_state", r.steady_state}});
  }
  detail::write_json_file(root / "manifest.json",
                          json{{"format", "gavg-dataset"}, {"version", 1}, {"config", config_to_json(config)},
                               {"trajectories", records}});
  return manifest;
}

Manifest load_manifest(const std::filesystem::path& root) {
  const json j = detail::read_json_file(root / "manifest.json");
  try {
    if (j.at("format") != "gavg-dataset") throw Error(ErrorCode::kIo, root.string() + " is not a dataset");
    if (j.at("version").get<int>() != 1) throw Error(ErrorCode::kVersionMismatch, "dataset manifest version");
    Manifest m;
    m.config = config_from_json(j.at("config"));
    for (const auto& r : j.at("trajectories")) {
      TrajectoryRecord rec;
      rec.name = r.at("name");
      rec.index = r.at("index");
      rec.seed = r.at("seed");
      rec.split = r.at("split");
      rec.ic_kind = r.at("ic_kind");
      rec.final_variance = r.at("final_variance");
      rec.steady_state = r.at("steady_state");
      m.trajectories.push_back(std::move(rec));
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, "bad manifest in " + root.string() + ": " + e.what());
  }
}

template <typename T>
Trajectory<T> load_dataset_trajectory(const std::filesystem::path& root, const TrajectoryRecord& record) {
  return load_trajectory<T>(root / record.name);
}

template Trajectory<float> load_dataset_trajectory(const std::filesystem::path&, const TrajectoryRecord&);
template Trajectory<double> load_dataset_trajectory(const std::filesystem::path&, const TrajectoryRecord&);
template double max_channel_variance(const FieldSet<float>&);
template double max_channel_variance(const FieldSet<double>&);

}  // namespace gavg
