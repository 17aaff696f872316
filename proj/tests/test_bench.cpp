#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "gavg/bench.hpp"
#include "gavg/trajectory_io.hpp"
#include "test_support.hpp"

namespace gavg {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun cli(const std::string& args, const fs::path& scratch) {
  const fs::path out = scratch / "stdout.txt";
  const fs::path err = scratch / "stderr.txt";
  const std::string cmd = std::string(GAVG_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  return CliRun{WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

// One full-size dataset shared by the CLI tests.
class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir();
    const CliRun r = cli("generate --grid 64 --trajectories 20 --frames 200 --seed 7 --out " +
                          (dir_->path() / "data").string(),
                      dir_->path());
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static fs::path data() { return dir_->path() / "data"; }

  TempDir scratch;
  static TempDir* dir_;
};

TempDir* Cli::dir_ = nullptr;

TEST_F(Cli, GenerateSplitsEighteenTwo) {
  const Manifest m = load_manifest(data());
  ASSERT_EQ(m.trajectories.size(), 20u);
  int train = 0, test = 0;
  for (const auto& r : m.trajectories) {
    EXPECT_EQ(r.seed, 7u + r.index);
    EXPECT_TRUE(fs::is_directory(data() / r.name));
    (r.split == "train" ? train : test)++;
  }
  EXPECT_EQ(train, 18);
  EXPECT_EQ(test, 2);
}

TEST_F(Cli, EvalLayoutAndPersistenceInvariance) {
  const fs::path out = scratch.path() / "eval";
  const CliRun r = cli("eval --dataset " + data().string() +
                        " --model persistence --groups d4,torus:mc:n=1 --starts 10,50 --horizon 15 --out " +
                        out.string(),
                    scratch.path());
  ASSERT_EQ(r.code, 0) << r.err;
  std::set<std::pair<std::string, std::string>> blocks;
  for (const auto& row : csv_rows(out / "losses.csv")) blocks.insert({row[0], row[1]});
  const std::set<std::pair<std::string, std::string>> expected{
      {"baseline", "10"}, {"baseline", "50"}, {"d4", "10"}, {"d4", "50"}, {"torus-mc1", "10"}, {"torus-mc1", "50"}};
  EXPECT_EQ(blocks, expected);

  // Copying the last frame commutes with every lattice action, so averaging
  // cannot change it.
  std::map<std::pair<std::string, std::string>, std::string> rollout;
  for (const auto& row : csv_rows(out / "rollout.csv"))
    if (row[2] == "mean") rollout[{row[0], row[1]}] = row[3];
  for (const char* start : {"10", "50"}) {
    const auto baseline = rollout[std::make_pair(std::string("baseline"), std::string(start))];
    EXPECT_EQ(rollout[std::make_pair(std::string("d4"), std::string(start))], baseline);
    EXPECT_EQ(rollout[std::make_pair(std::string("torus-mc1"), std::string(start))], baseline);
  }

  const CliRun report = cli("report --eval " + out.string() + " --out " + (scratch.path() / "t.md").string(),
                         scratch.path());
  ASSERT_EQ(report.code, 0) << report.err;
  EXPECT_NE(report.out.find("| Model | Start | 1 | 5 | 10 | Rollout |"), std::string::npos);
  EXPECT_NE(report.out.find("| torus-mc1 | 50 |"), std::string::npos);
  EXPECT_TRUE(fs::exists(scratch.path() / "t.md"));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(cli("", scratch.path()).code, 1);
  EXPECT_EQ(cli("--help", scratch.path()).code, 0);
  const CliRun missing = cli("eval --dataset " + (scratch.path() / "nope").string() +
                              " --model persistence --out " + scratch.path().string(),
                          scratch.path());
  EXPECT_EQ(missing.code, 1);
  EXPECT_FALSE(missing.err.empty());
  const CliRun no_model = cli("eval --dataset " + data().string() + " --model " + (scratch.path() / "m.bin").string() +
                               " --out " + (scratch.path() / "e").string(),
                           scratch.path());
  EXPECT_EQ(no_model.code, 2);
  const CliRun bad_group = cli("eval --dataset " + data().string() + " --model persistence --groups q7 --out " +
                                (scratch.path() / "e").string(),
                            scratch.path());
  EXPECT_EQ(bad_group.code, 1);
  const CliRun late_start = cli("eval --dataset " + data().string() + " --model persistence --starts 190 --out " +
                                 (scratch.path() / "e").string(),
                             scratch.path());
  EXPECT_EQ(late_start.code, 1);
  EXPECT_NE(late_start.err.find("does not fit"), std::string::npos);
}

TEST_F(Cli, ShortHorizonWarnsAndSumsAvailableSteps) {
  const CliRun r = cli("eval --dataset " + data().string() + " --model persistence --starts 10 --horizon 5 --out " +
                        (scratch.path() / "e").string(),
                    scratch.path());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("warning: horizon 5"), std::string::npos);
  double sum = 0.0;
  for (const auto& row : csv_rows(scratch.path() / "e" / "losses.csv")) sum += std::stod(row[4]) / 2.0;
  for (const auto& row : csv_rows(scratch.path() / "e" / "rollout.csv"))
    if (row[2] == "mean") EXPECT_NEAR(std::stod(row[3]), sum, 1e-12 * sum);
}

TEST(CliConfig, FlagsOverrideConfigFile) {
  TempDir dir;
  {
    std::ofstream cfg(dir.path() / "cfg.json");
    cfg << R"({"generate": {"grid": 16, "trajectories": 4, "frames": 12, "seed": 3}})";
  }
  const CliRun r = cli("--config " + (dir.path() / "cfg.json").string() + " generate --trajectories 5 --out " +
                        (dir.path() / "d").string(),
                    dir.path());
  ASSERT_EQ(r.code, 0) << r.err;
  const Manifest m = load_manifest(dir.path() / "d");
  EXPECT_EQ(m.config.trajectories, 5);
  EXPECT_EQ(m.config.frames, 12);
  EXPECT_EQ(m.config.grid.nx, 16);
  EXPECT_EQ(m.trajectories.front().seed, 3u);
}

TEST(Bench, ParseVariant) {
  const GridSpec grid{8, 8, 1.0, 1.0, Boundary::kPeriodicBoth};
  EXPECT_FALSE(bench::parse_variant("baseline", grid).averaging.has_value());
  const auto d4 = bench::parse_variant("d4", grid);
  EXPECT_EQ(d4.label, "d4");
  EXPECT_EQ(d4.averaging->mode, AveragingMode::kFull);
  const auto mc = bench::parse_variant("torus:mc:n=4:fixed:seed=9", grid);
  EXPECT_EQ(mc.label, "torus-mc4-fixed-s9");
  EXPECT_EQ(mc.averaging->samples, 4);
  EXPECT_FALSE(mc.averaging->resample_per_step);
  EXPECT_EQ(mc.averaging->seed, 9u);
  EXPECT_TRUE(mc.explicit_seed);
  EXPECT_THROW(bench::parse_variant("torus:mc", grid), Error);
  EXPECT_THROW(bench::parse_variant("torus:mc:n=0", grid), Error);
  EXPECT_THROW(bench::parse_variant("d4", GridSpec{8, 6, 1.0, 1.0, Boundary::kPeriodicBoth}), Error);
}

// sqrt(<(u - v)^2> / (<(v - <v>)^2> + eps)) from raw float planes.
double independent_vrmse(std::span<const float> u, std::span<const float> v) {
  const double n = static_cast<double>(v.size());
  double mean = 0.0;
  for (float x : v) mean += x;
  mean /= n;
  double err = 0.0, var = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    err += (static_cast<double>(u[i]) - v[i]) * (static_cast<double>(u[i]) - v[i]);
    var += (v[i] - mean) * (v[i] - mean);
  }
  return std::sqrt((err / n) / (var / n + 1e-7));
}

TEST(Bench, CsvRowsRecomputeFromDumpedFields) {
  TempDir dir;
  DatasetConfig dc;
  dc.grid = GridSpec{16, 16, 1.0 / 16, 1.0 / 16, Boundary::kPeriodicBoth};
  dc.params = GrayScottParams::with_frame_interval(dc.grid, 10.0);
  dc.trajectories = 8;
  dc.frames = 40;
  dc.test_fraction = 0.25;
  std::ostringstream log;
  bench::run_generate(dc, dir.path() / "data", log);

  bench::TrainOptions to;
  to.dataset = dir.path() / "data";
  to.model_out = dir.path() / "m.bin";
  to.model = StencilModelConfig{2, 1, 4, false, 1};
  to.train.epochs = 2;
  to.train.updates_per_epoch = 20;
  bench::run_train(to, log);
  EXPECT_TRUE(fs::exists(dir.path() / "m.bin.loss.csv"));

  bench::EvalOptions eo;
  eo.dataset = dir.path() / "data";
  eo.model = dir.path() / "m.bin";
  eo.groups = {"d4", "torus:mc:n=2"};
  eo.starts = {5, 20};
  eo.horizon = 15;
  eo.out_dir = dir.path() / "eval";
  eo.dump_fields = true;
  bench::run_eval(eo, log);

  const auto per_traj = csv_rows(eo.out_dir / "losses_by_trajectory.csv");
  ASSERT_FALSE(per_traj.empty());
  std::map<std::tuple<std::string, std::string, std::string, std::string>, std::vector<double>> by_key;
  for (const auto& row : per_traj) {
    // trajectory,variant,start,step,variable,vrmse
    const fs::path leaf = fs::path("start_" + row[2]) / row[0];
    const auto pred = load_trajectory<float>(eo.out_dir / "fields" / row[1] / leaf);
    const auto truth = load_trajectory<float>(eo.out_dir / "fields" / "truth" / leaf);
    const int i = std::stoi(row[3]) - 1;
    const int c = pred[i].schema().find(row[4]).offset;
    const double expected = independent_vrmse(pred[i].plane(c), truth[i].plane(c));
    EXPECT_NEAR(std::stod(row[5]), expected, 1e-12 * std::max(1.0, expected)) << row[0] << " " << row[1];
    EXPECT_EQ(truth[i].time_index(), std::stoi(row[2]) + i + 1);
    by_key[{row[1], row[2], row[3], row[4]}].push_back(expected);
  }
  const auto agg = csv_rows(eo.out_dir / "losses.csv");
  EXPECT_EQ(agg.size(), by_key.size());
  for (const auto& row : agg) {
    const auto& values = by_key.at({row[0], row[1], row[2], row[3]});
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    EXPECT_NEAR(std::stod(row[4]), mean, 1e-12 * std::max(1.0, mean));
  }
}

TEST(Bench, ZeroLearningRateWarns) {
  TempDir dir;
  DatasetConfig dc;
  dc.grid = GridSpec{8, 8, 1.0 / 8, 1.0 / 8, Boundary::kPeriodicBoth};
  dc.params = GrayScottParams::with_frame_interval(dc.grid, 10.0);
  dc.trajectories = 3;
  dc.frames = 10;
  std::ostringstream log;
  bench::run_generate(dc, dir.path() / "data", log);
  bench::TrainOptions to;
  to.dataset = dir.path() / "data";
  to.model_out = dir.path() / "m.bin";
  to.model = StencilModelConfig{1, 1, 0, false, 1};
  to.train.lr = 0.0;
  to.train.epochs = 1;
  to.train.updates_per_epoch = 2;
  to.include_steady = true;
  bench::run_train(to, log);
  EXPECT_NE(log.str().find("warning: learning rate is 0"), std::string::npos);
}

TEST(Bench, FileHashIsStable) {
  TempDir dir;
  {
    std::ofstream f(dir.path() / "x");
    f << "abc";
  }
  // FNV-1a 64 of "abc".
  EXPECT_EQ(bench::file_hash(dir.path() / "x"), "e71fa2190541574b");
}

}  // namespace
}  // namespace gavg
