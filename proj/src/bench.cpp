#include "gavg/bench.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "gavg/trajectory_io.hpp"

namespace gavg::bench {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = kFnvOffset) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

int parse_positive(std::string_view s, std::string_view what) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 1) {
    throw Error(ErrorCode::kInvalidArgument, "bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t begin = 0;
  while (true) {
    const std::size_t end = text.find(sep, begin);
    parts.push_back(text.substr(begin, end == std::string_view::npos ? std::string_view::npos : end - begin));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return parts;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

std::vector<Trajectory<Real>> load_split(const std::filesystem::path& root, const Manifest& manifest,
                                         std::string_view split_name, bool include_steady) {
  std::vector<Trajectory<Real>> out;
  for (const auto* rec : manifest.split(split_name, include_steady)) {
    out.push_back(load_dataset_trajectory<Real>(root, *rec));
  }
  return out;
}

}  // namespace

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream bytes;
  bytes << in.rdbuf();
  return hex(fnv1a(bytes.str()));
}

std::uint64_t rollout_seed(std::uint64_t base, std::string_view variant, int start, int trajectory_index) {
  std::uint64_t h = fnv1a(variant, kFnvOffset ^ base);
  const std::string tail = ":" + std::to_string(start) + ":" + std::to_string(trajectory_index);
  return fnv1a(tail, h);
}

GenerateSummary run_generate(const DatasetConfig& config, const std::filesystem::path& out, std::ostream& log) {
  GenerateSummary summary;
  summary.manifest = make_dataset(config, out);
  summary.manifest_hash = file_hash(out / "manifest.json");
  for (const auto& r : summary.manifest.trajectories) {
    (r.split == "test" ? summary.test : summary.train) += 1;
    if (r.steady_state) summary.steady += 1;
  }
  log << "generated " << config.trajectories << " trajectories (" << summary.train << " train / " << summary.test
      << " test, " << summary.steady << " steady-state flagged), " << config.frames << " frames of "
      << config.grid.nx << "x" << config.grid.ny << ", " << config.params.substeps << " substeps/frame at dt="
      << config.params.dt << "\nmanifest " << (out / "manifest.json").string() << " hash " << summary.manifest_hash
      << '\n';
  return summary;
}

TrainResult run_train(const TrainOptions& options, std::ostream& log) {
  const Manifest manifest = load_manifest(options.dataset);
  const auto data = load_split(options.dataset, manifest, "train", options.include_steady);
  if (data.empty()) throw Error(ErrorCode::kEmptyInput, "training split of " + options.dataset.string() + " is empty");
  if (options.train.lr == 0.0) log << "warning: learning rate is 0; parameters will not change\n";

  StencilModel model(options.model, data.front().schema());
  fit_normalization<Real>(model, data);
  log << "training stencil model: k=" << options.model.k << " radius=" << options.model.radius
      << " hidden=" << options.model.hidden << (options.model.residual ? " residual" : "") << ", "
      << model.parameter_count() << " parameters, " << data.size() << " trajectories\n";
  const TrainResult result = train<Real>(model, data, options.train);
  model.save(options.model_out);

  std::filesystem::path curve = options.loss_curve_csv;
  if (curve.empty()) curve = options.model_out.string() + ".loss.csv";
  std::ofstream out(curve, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + curve.string());
  out << "epoch,loss\n0," << format_double(result.initial_loss) << '\n';
  for (std::size_t e = 0; e < result.loss_curve.size(); ++e) {
    out << e + 1 << ',' << format_double(result.loss_curve[e]) << '\n';
  }
  log << "loss " << result.initial_loss << " -> "
      << (result.loss_curve.empty() ? result.initial_loss : result.loss_curve.back()) << "; model "
      << options.model_out.string() << '\n';
  return result;
}

Variant parse_variant(std::string_view text, const GridSpec& grid) {
  if (text == "baseline") return Variant{"baseline", std::nullopt};
  const auto parts = split(text, ':');
  const GroupKind kind = group_kind_from_string(parts[0]);
  const GroupSpec group = GroupSpec::for_grid(kind, grid);
  group.check_compatible(grid);
  Variant v;
  v.label = std::string(parts[0]);
  if (parts.size() == 1) {
    v.averaging = AveragingConfig::full(group);
    return v;
  }
  if (parts[1] != "mc") throw Error(ErrorCode::kInvalidArgument, "expected ':mc' in variant '" + std::string(text) + "'");
  AveragingConfig cfg = AveragingConfig::monte_carlo(group, 1, 0);
  bool have_n = false;
  std::string suffix;
  for (std::size_t i = 2; i < parts.size(); ++i) {
    const std::string_view p = parts[i];
    if (p.starts_with("n=")) {
      cfg.samples = parse_positive(p.substr(2), "sample count");
      have_n = true;
    } else if (p == "fixed") {
      cfg.resample_per_step = false;
      suffix += "-fixed";
    } else if (p == "distinct") {
      cfg.distinct = true;
      suffix += "-distinct";
    } else if (p.starts_with("seed=")) {
      std::uint64_t seed = 0;
      const auto s = p.substr(5);
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(ErrorCode::kInvalidArgument, "bad seed in variant '" + std::string(text) + "'");
      }
      cfg.seed = seed;
      v.explicit_seed = true;
      suffix += "-s" + std::to_string(seed);
    } else {
      throw Error(ErrorCode::kInvalidArgument, "unknown option '" + std::string(p) + "' in variant");
    }
  }
  if (!have_n) throw Error(ErrorCode::kInvalidArgument, "Monte-Carlo variant needs n=<count>");
  cfg.validate();
  v.label += "-mc" + std::to_string(cfg.samples) + suffix;
  v.averaging = cfg;
  return v;
}

EvalResult run_eval(const EvalOptions& options, std::ostream& log) {
  const Manifest manifest = load_manifest(options.dataset);
  const auto records = manifest.split("test", options.include_steady);
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no usable test trajectories in " + options.dataset.string());
  if (options.horizon < 1) throw Error(ErrorCode::kInvalidArgument, "horizon must be at least 1");
  if (options.starts.empty()) throw Error(ErrorCode::kInvalidArgument, "no start offsets given");

  const GridSpec& grid = manifest.config.grid;
  std::unique_ptr<Surrogate<Real>> owned;
  std::optional<StencilModel> stencil;
  if (options.model == "persistence") {
    owned = std::make_unique<PersistenceSurrogate<Real>>(1);
  } else {
    stencil.emplace(StencilModel::load(options.model));
  }
  const Surrogate<Real>& model = stencil ? static_cast<const Surrogate<Real>&>(*stencil) : *owned;
  const int k = model.window_length();

  std::vector<Variant> variants{Variant{"baseline", std::nullopt}};
  for (const auto& g : options.groups) {
    Variant v = parse_variant(g, grid);
    bool duplicate = false;
    for (const auto& existing : variants) duplicate = duplicate || existing.label == v.label;
    if (!duplicate) variants.push_back(std::move(v));
  }

  const int frames = manifest.config.frames;
  for (int start : options.starts) {
    if (start - k + 1 < 0 || start + options.horizon > frames - 1) {
      throw Error(ErrorCode::kInvalidArgument, "start " + std::to_string(start) + " with k=" + std::to_string(k) +
                                                   " and horizon " + std::to_string(options.horizon) +
                                                   " does not fit trajectories of " + std::to_string(frames) +
                                                   " frames");
    }
  }

  MetricConfig metric = options.metric;
  if (metric.rollout_steps > options.horizon) {
    log << "warning: horizon " << options.horizon << " is shorter than the rollout window; summing "
        << options.horizon << " steps\n";
    metric.rollout_steps = options.horizon;
  }

  const bool write = !options.out_dir.empty();
  if (write) ensure_directory(options.out_dir);

  EvalResult result;
  std::vector<std::string> summary_lines;
  for (const auto* excluded : manifest.split("test", true)) {
    if (!options.include_steady && excluded->steady_state) {
      for (const auto& v : variants)
        for (int start : options.starts)
          summary_lines.push_back(excluded->name + "," + v.label + "," + std::to_string(start) + ",steady-state,");
    }
  }

  for (const auto* rec : records) {
    const Trajectory<Real> truth = load_dataset_trajectory<Real>(options.dataset, *rec);
    if (stencil && truth.schema() != stencil->schema()) {
      throw Error(ErrorCode::kConfigMismatch, "model schema does not match dataset");
    }
    for (const auto& variant : variants) {
      for (int start : options.starts) {
        std::optional<AveragingConfig> cfg = variant.averaging;
        if (cfg && !variant.explicit_seed) cfg->seed = rollout_seed(options.seed, variant.label, start, rec->index);
        const Window<Real> init = truth.window_ending_at(start, k);
        TrajectoryLosses entry{rec->name, false, {}};
        std::string status = "ok";
        try {
          const RolloutResult<Real> out = rollout(model, init, options.horizon, cfg, truth.dt());
          entry.table = evaluate_rollout(out.predicted, truth, variant.label, start, metric);
          if (write && options.dump_fields) {
            const auto base = options.out_dir / "fields";
            const std::string leaf = "start_" + std::to_string(start);
            save_trajectory(out.predicted, base / variant.label / leaf / rec->name);
            const auto truth_dir = base / "truth" / leaf / rec->name;
            if (!std::filesystem::exists(truth_dir / "meta.json")) {
              std::vector<FieldSet<Real>> slice;
              for (int t = start + 1; t <= start + options.horizon; ++t) slice.push_back(truth.at_time(t));
              save_trajectory(Trajectory<Real>(truth.grid(), truth.schema(), std::move(slice), truth.dt()), truth_dir);
            }
          }
        } catch (const RolloutError& e) {
          entry.excluded = true;
          status = "divergent";
          log << "warning: " << rec->name << " " << variant.label << " start " << start << " diverged at step "
              << e.step() << "; excluded from means\n";
        }
        std::string rollout_mean;
        for (const auto& r : entry.table.rollouts) {
          if (r.variable == kMeanVariable) rollout_mean = format_double(r.rollout);
        }
        summary_lines.push_back(rec->name + "," + variant.label + "," + std::to_string(start) + "," + status + "," +
                                rollout_mean);
        result.per_trajectory.push_back(std::move(entry));
        result.statuses.push_back(status);
      }
    }
  }

  result.aggregated = aggregate(result.per_trajectory, metric.rollout_steps);

  if (write) {
    write_loss_csv(options.out_dir / "losses.csv", result.aggregated.steps);
    write_rollout_csv(options.out_dir / "rollout.csv", result.aggregated.rollouts);

    std::ofstream by_traj(options.out_dir / "losses_by_trajectory.csv", std::ios::binary | std::ios::trunc);
    by_traj << "trajectory,variant,start,step,variable,vrmse\n";
    for (const auto& t : result.per_trajectory) {
      for (const auto& r : t.table.steps) {
        by_traj << t.trajectory << ',' << r.variant << ',' << r.start << ',' << r.step << ',' << r.variable << ','
                << format_double(r.vrmse) << '\n';
      }
    }
    std::ofstream summary(options.out_dir / "trajectories.csv", std::ios::binary | std::ios::trunc);
    summary << "trajectory,variant,start,status,rollout\n";
    for (const auto& line : summary_lines) summary << line << '\n';
    if (!by_traj || !summary) throw Error(ErrorCode::kIo, "failed writing eval outputs");
  }

  for (const auto& r : result.aggregated.rollouts) {
    if (r.variable == kMeanVariable) {
      log << r.variant << " start " << r.start << ": rollout VRMSE " << format_double(r.rollout) << '\n';
    }
  }
  return result;
}

std::string run_report(const std::filesystem::path& eval_dir, std::span<const int> steps) {
  LossTable table;
  table.steps = read_loss_csv(eval_dir / "losses.csv");
  table.rollouts = read_rollout_csv(eval_dir / "rollout.csv");
  if (table.steps.empty()) throw Error(ErrorCode::kEmptyInput, "no rows in " + (eval_dir / "losses.csv").string());
  return markdown_table(table, steps);
}

}  // namespace gavg::bench
