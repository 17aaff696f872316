#include "gavg/stencil_model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "binary_io.hpp"
#include "json_support.hpp"

namespace gavg {

using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'G', 'A', 'V', 'G', 'S', 'T', 'N', 'C'};
constexpr std::uint32_t kFormatVersion = 1;

int wrap(int i, int n) { return ((i % n) + n) % n; }

// Symmetric reflection for the non-periodic y axis.
int mirror(int i, int n) {
  while (i < 0 || i >= n) i = i < 0 ? -i - 1 : 2 * n - i - 1;
  return i;
}

// Row/column lookup for patch offsets on a given grid.
struct Padding {
  int nx = 0;
  int ny = 0;
  bool periodic_y = true;

  int col(int ix) const { return wrap(ix, nx); }
  int row(int iy) const { return periodic_y ? wrap(iy, ny) : mirror(iy, ny); }
};

// Normalized input planes [k][s][cells] for one window.
template <typename T>
std::vector<double> normalized_planes(const Window<T>& window, const std::vector<double>& mean,
                                      const std::vector<double>& stddev) {
  const int s = window.schema().components();
  const std::size_t cells = window.grid().cells();
  std::vector<double> z(static_cast<std::size_t>(window.length()) * s * cells);
  for (int f = 0; f < window.length(); ++f) {
    for (int c = 0; c < s; ++c) {
      const auto plane = window[f].plane(c);
      double* dst = z.data() + (static_cast<std::size_t>(f) * s + c) * cells;
      for (std::size_t i = 0; i < cells; ++i) dst[i] = (static_cast<double>(plane[i]) - mean[c]) / stddev[c];
    }
  }
  return z;
}

}  // namespace

void StencilModelConfig::validate() const {
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "stencil model needs k >= 1");
  if (radius < 1) throw Error(ErrorCode::kInvalidArgument, "stencil radius must be at least 1");
  if (hidden < 0) throw Error(ErrorCode::kInvalidArgument, "hidden width must be non-negative");
}

StencilModel StencilModel::zeros(StencilModelConfig cfg, Schema schema) {
  StencilModel m(cfg, std::move(schema));
  std::fill(m.params_.begin(), m.params_.end(), 0.0);
  return m;
}

StencilModel::StencilModel(StencilModelConfig cfg, Schema schema) : cfg_(cfg), schema_(std::move(schema)) {
  cfg_.validate();
  const int s = channels();
  if (s < 1) throw Error(ErrorCode::kInvalidArgument, "stencil model needs at least one channel");
  const int n_in = input_size();
  const int h = cfg_.hidden;
  const std::size_t count = h > 0 ? static_cast<std::size_t>(n_in) * h + h + static_cast<std::size_t>(h) * s + s
                                  : static_cast<std::size_t>(n_in) * s + s;
  params_.assign(count, 0.0);
  mean_.assign(s, 0.0);
  stddev_.assign(s, 1.0);
  scale_.assign(s, 1.0);

  std::mt19937_64 rng(cfg_.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int first_units = h > 0 ? h : s;
  const double in_scale = 1.0 / std::sqrt(static_cast<double>(n_in));
  for (int u = 0; u < first_units; ++u) {
    for (int i = 0; i < n_in; ++i) params_[input_weight_index(u, i)] = normal(rng) * in_scale;
  }
  if (h > 0) {
    const double out_scale = 1.0 / std::sqrt(static_cast<double>(h));
    for (int c = 0; c < s; ++c) {
      for (int u = 0; u < h; ++u) params_[output_weight_index(c, u)] = normal(rng) * out_scale;
    }
  }
}

int StencilModel::input_index(int frame, int component, int dy, int dx) const {
  const int w = patch_width();
  return ((frame * channels() + component) * w + (dy + cfg_.radius)) * w + (dx + cfg_.radius);
}

std::size_t StencilModel::input_weight_index(int unit, int input) const {
  return static_cast<std::size_t>(unit) * input_size() + input;
}

std::size_t StencilModel::input_bias_index(int unit) const {
  const int first_units = cfg_.hidden > 0 ? cfg_.hidden : channels();
  return static_cast<std::size_t>(first_units) * input_size() + unit;
}

std::size_t StencilModel::output_weight_index(int channel, int unit) const {
  if (cfg_.hidden == 0) throw Error(ErrorCode::kInvalidArgument, "linear model has no output layer");
  const std::size_t base = static_cast<std::size_t>(cfg_.hidden) * input_size() + cfg_.hidden;
  return base + static_cast<std::size_t>(channel) * cfg_.hidden + unit;
}

std::size_t StencilModel::output_bias_index(int channel) const {
  if (cfg_.hidden == 0) return input_bias_index(channel);
  return static_cast<std::size_t>(cfg_.hidden) * input_size() + cfg_.hidden +
         static_cast<std::size_t>(channels()) * cfg_.hidden + channel;
}

void StencilModel::set_normalization(std::vector<double> mean, std::vector<double> stddev,
                                     std::vector<double> output_scale) {
  const std::size_t s = static_cast<std::size_t>(channels());
  if (mean.size() != s || stddev.size() != s || output_scale.size() != s) {
    throw Error(ErrorCode::kShapeMismatch, "normalization needs one value per channel component");
  }
  for (std::size_t c = 0; c < s; ++c) {
    if (!(stddev[c] > 0) || !(output_scale[c] > 0) || !std::isfinite(mean[c])) {
      throw Error(ErrorCode::kInvalidArgument, "normalization scales must be positive and finite");
    }
  }
  mean_ = std::move(mean);
  stddev_ = std::move(stddev);
  scale_ = std::move(output_scale);
}

FieldSet<float> StencilModel::predict(const Window<float>& window) const { return predict_impl(window); }
FieldSet<double> StencilModel::predict(const Window<double>& window) const { return predict_impl(window); }

template <typename T>
FieldSet<T> StencilModel::predict_impl(const Window<T>& window) const {
  if (window.length() != cfg_.k) {
    throw Error(ErrorCode::kConfigMismatch, "window length " + std::to_string(window.length()) + " but model k=" +
                                                std::to_string(cfg_.k));
  }
  if (window.schema() != schema_) throw Error(ErrorCode::kConfigMismatch, "window schema does not match model");

  const GridSpec& grid = window.grid();
  const Padding pad{grid.nx, grid.ny, grid.periodic_y()};
  const std::size_t cells = grid.cells();
  const int s = channels();
  const int h = cfg_.hidden;
  const int r = cfg_.radius;
  const int units = h > 0 ? h : s;
  const std::vector<double> z = normalized_planes(window, mean_, stddev_);

  // Accumulate the first layer as a sum of shifted planes; every cell adds its
  // inputs in the same order as the per-cell training path.
  std::vector<double> pre(static_cast<std::size_t>(units) * cells);
  for (int u = 0; u < units; ++u) {
    std::fill(pre.begin() + u * cells, pre.begin() + (u + 1) * cells, params_[input_bias_index(u)]);
  }
  std::vector<double> shifted(cells);
  for (int f = 0; f < cfg_.k; ++f) {
    for (int c = 0; c < s; ++c) {
      const double* plane = z.data() + (static_cast<std::size_t>(f) * s + c) * cells;
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          for (int iy = 0; iy < grid.ny; ++iy) {
            const double* src_row = plane + static_cast<std::size_t>(pad.row(iy + dy)) * grid.nx;
            double* dst_row = shifted.data() + static_cast<std::size_t>(iy) * grid.nx;
            for (int ix = 0; ix < grid.nx; ++ix) dst_row[ix] = src_row[pad.col(ix + dx)];
          }
          const int input = input_index(f, c, dy, dx);
          for (int u = 0; u < units; ++u) {
            const double w = params_[input_weight_index(u, input)];
            double* acc = pre.data() + static_cast<std::size_t>(u) * cells;
            for (std::size_t i = 0; i < cells; ++i) acc[i] += w * shifted[i];
          }
        }
      }
    }
  }

  std::vector<double> net;
  if (h > 0) {
    for (double& v : pre) v = std::tanh(v);
    net.resize(static_cast<std::size_t>(s) * cells);
    for (int c = 0; c < s; ++c) {
      double* out = net.data() + static_cast<std::size_t>(c) * cells;
      std::fill(out, out + cells, params_[output_bias_index(c)]);
      for (int u = 0; u < h; ++u) {
        const double w = params_[output_weight_index(c, u)];
        const double* hid = pre.data() + static_cast<std::size_t>(u) * cells;
        for (std::size_t i = 0; i < cells; ++i) out[i] += w * hid[i];
      }
    }
  } else {
    net = std::move(pre);
  }

  std::vector<T> out(static_cast<std::size_t>(s) * cells);
  for (int c = 0; c < s; ++c) {
    const auto last = window.last().plane(c);
    for (std::size_t i = 0; i < cells; ++i) {
      const double base = cfg_.residual ? static_cast<double>(last[i]) : mean_[c];
      out[static_cast<std::size_t>(c) * cells + i] =
          static_cast<T>(base + scale_[c] * net[static_cast<std::size_t>(c) * cells + i]);
    }
  }
  return FieldSet<T>(grid, schema_, std::move(out), window.last().time_index() + 1);
}

void StencilModel::save(const std::filesystem::path& path) const {
  const json header{{"format", "gavg-stencil-model"},
                    {"k", cfg_.k},
                    {"radius", cfg_.radius},
                    {"hidden", cfg_.hidden},
                    {"residual", cfg_.residual},
                    {"seed", cfg_.seed},
                    {"schema", schema_},
                    {"parameters", params_.size()}};
  const std::string text = header.dump();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(kMagic, sizeof(kMagic));
  const std::uint32_t version = kFormatVersion;
  const std::uint64_t length = text.size();
  detail::write_le<std::uint32_t>(out, std::span<const std::uint32_t>(&version, 1));
  detail::write_le<std::uint64_t>(out, std::span<const std::uint64_t>(&length, 1));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  detail::write_le<double>(out, params_);
  detail::write_le<double>(out, mean_);
  detail::write_le<double>(out, stddev_);
  detail::write_le<double>(out, scale_);
}

StencilModel StencilModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  char magic[sizeof(kMagic)] = {};
  in.read(magic, sizeof(magic));
  std::uint32_t version = 0;
  if (in) in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorCode::kVersionMismatch, path.string() + " is not a stencil model file");
  }
  if constexpr (std::endian::native != std::endian::little) {
    version = ((version & 0xFFu) << 24) | ((version & 0xFF00u) << 8) | ((version >> 8) & 0xFF00u) | (version >> 24);
  }
  if (version != kFormatVersion) {
    throw Error(ErrorCode::kVersionMismatch, "model format version " + std::to_string(version) + ", expected " +
                                                 std::to_string(kFormatVersion));
  }
  std::uint64_t length = 0;
  detail::read_le<std::uint64_t>(in, std::span<std::uint64_t>(&length, 1));
  if (length > (1u << 24)) throw Error(ErrorCode::kVersionMismatch, "implausible model header length");
  std::string text(length, '\0');
  in.read(text.data(), static_cast<std::streamsize>(length));
  if (!in) throw Error(ErrorCode::kIo, "truncated model header");

  try {
    const json header = json::parse(text);
    if (header.at("format") != "gavg-stencil-model") throw Error(ErrorCode::kVersionMismatch, "unknown model format");
    StencilModelConfig cfg;
    cfg.k = header.at("k");
    cfg.radius = header.at("radius");
    cfg.hidden = header.at("hidden");
    cfg.residual = header.at("residual");
    cfg.seed = header.at("seed");
    StencilModel model = StencilModel::zeros(cfg, header.at("schema").get<Schema>());
    if (header.at("parameters").get<std::size_t>() != model.params_.size()) {
      throw Error(ErrorCode::kVersionMismatch, "parameter count does not match model shape");
    }
    detail::read_le<double>(in, model.params_);
    detail::read_le<double>(in, model.mean_);
    detail::read_le<double>(in, model.stddev_);
    detail::read_le<double>(in, model.scale_);
    return model;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kVersionMismatch, "corrupt model header: " + std::string(e.what()));
  }
}

StencilModel StencilModel::load(const std::filesystem::path& path, const Schema& expected) {
  StencilModel model = load(path);
  if (model.schema() != expected) throw Error(ErrorCode::kConfigMismatch, "model schema does not match data");
  return model;
}

namespace {

// Per-cell forward/backward over a batch of gathered input patches.
class CellBatch {
 public:
  CellBatch(const StencilModel& model, std::size_t capacity)
      : model_(model), n_in_(model.input_size()), s_(model.channels()) {
    inputs_.reserve(capacity * n_in_);
    targets_.reserve(capacity * s_);
  }

  std::size_t size() const { return targets_.size() / s_; }

  // Appends the patch of cell (iy, ix) and its normalized target.
  template <typename T>
  void add(const std::vector<const FieldSet<T>*>& frames, const FieldSet<T>& target, int iy, int ix) {
    const StencilModelConfig& cfg = model_.config();
    const GridSpec& grid = target.grid();
    const Padding pad{grid.nx, grid.ny, grid.periodic_y()};
    const int r = cfg.radius;
    const auto& mean = model_.input_mean();
    const auto& stddev = model_.input_stddev();
    for (int f = 0; f < cfg.k; ++f) {
      for (int c = 0; c < s_; ++c) {
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx) {
            const double v = frames[f]->at(c, pad.row(iy + dy), pad.col(ix + dx));
            inputs_.push_back((v - mean[c]) / stddev[c]);
          }
        }
      }
    }
    for (int c = 0; c < s_; ++c) {
      const double base = cfg.residual ? static_cast<double>(frames.back()->at(c, iy, ix)) : mean[c];
      targets_.push_back((static_cast<double>(target.at(c, iy, ix)) - base) / model_.output_scale()[c]);
    }
  }

  // Mean squared error over cells and channels; adds the gradient into grad
  // when non-null (grad must be zeroed by the caller).
  double evaluate(std::vector<double>* grad) const {
    const auto params = model_.parameters();
    const int h = model_.config().hidden;
    const std::size_t count = size();
    if (count == 0) throw Error(ErrorCode::kEmptyInput, "empty training batch");
    const double norm = 1.0 / (static_cast<double>(count) * s_);
    std::vector<double> hid(std::max(h, 1));
    std::vector<double> out(s_);
    std::vector<double> d_out(s_);
    double loss = 0.0;
    for (std::size_t b = 0; b < count; ++b) {
      const double* x = inputs_.data() + b * n_in_;
      const double* t = targets_.data() + b * s_;
      if (h > 0) {
        for (int u = 0; u < h; ++u) {
          double acc = params[model_.input_bias_index(u)];
          const double* w = params.data() + model_.input_weight_index(u, 0);
          for (int i = 0; i < n_in_; ++i) acc += w[i] * x[i];
          hid[u] = std::tanh(acc);
        }
        for (int c = 0; c < s_; ++c) {
          double acc = params[model_.output_bias_index(c)];
          for (int u = 0; u < h; ++u) acc += params[model_.output_weight_index(c, u)] * hid[u];
          out[c] = acc;
        }
      } else {
        for (int c = 0; c < s_; ++c) {
          double acc = params[model_.input_bias_index(c)];
          const double* w = params.data() + model_.input_weight_index(c, 0);
          for (int i = 0; i < n_in_; ++i) acc += w[i] * x[i];
          out[c] = acc;
        }
      }
      for (int c = 0; c < s_; ++c) {
        const double e = out[c] - t[c];
        loss += e * e;
        d_out[c] = 2.0 * e * norm;
      }
      if (grad == nullptr) continue;
      auto& g = *grad;
      if (h > 0) {
        for (int c = 0; c < s_; ++c) {
          g[model_.output_bias_index(c)] += d_out[c];
          for (int u = 0; u < h; ++u) g[model_.output_weight_index(c, u)] += d_out[c] * hid[u];
        }
        for (int u = 0; u < h; ++u) {
          double d_hid = 0.0;
          for (int c = 0; c < s_; ++c) d_hid += params[model_.output_weight_index(c, u)] * d_out[c];
          const double d_pre = d_hid * (1.0 - hid[u] * hid[u]);
          g[model_.input_bias_index(u)] += d_pre;
          double* gw = g.data() + model_.input_weight_index(u, 0);
          for (int i = 0; i < n_in_; ++i) gw[i] += d_pre * x[i];
        }
      } else {
        for (int c = 0; c < s_; ++c) {
          g[model_.input_bias_index(c)] += d_out[c];
          double* gw = g.data() + model_.input_weight_index(c, 0);
          for (int i = 0; i < n_in_; ++i) gw[i] += d_out[c] * x[i];
        }
      }
    }
    return loss * norm;
  }

  void clear() {
    inputs_.clear();
    targets_.clear();
  }

 private:
  const StencilModel& model_;
  int n_in_;
  int s_;
  std::vector<double> inputs_;
  std::vector<double> targets_;
};

template <typename T>
std::vector<const FieldSet<T>*> frame_pointers(const Window<T>& window) {
  std::vector<const FieldSet<T>*> out;
  for (const auto& f : window.frames()) out.push_back(&f);
  return out;
}

struct SampleSite {
  std::size_t trajectory;
  int end;  // last input frame position
  int iy;
  int ix;
};

template <typename T>
class SiteSampler {
 public:
  SiteSampler(std::span<const Trajectory<T>> data, int k, std::uint64_t seed) : data_(data), k_(k), rng_(seed) {
    for (std::size_t i = 0; i < data_.size(); ++i) {
      if (data_[i].size() >= k_ + 1) usable_.push_back(i);
    }
    if (usable_.empty()) {
      throw Error(ErrorCode::kEmptyInput, "no trajectory has the k + 1 frames needed for a training pair");
    }
  }

  SampleSite next() {
    std::uniform_int_distribution<std::size_t> pick(0, usable_.size() - 1);
    const std::size_t t = usable_[pick(rng_)];
    const auto& traj = data_[t];
    std::uniform_int_distribution<int> end(k_ - 1, traj.size() - 2);
    std::uniform_int_distribution<int> row(0, traj.grid().ny - 1);
    std::uniform_int_distribution<int> col(0, traj.grid().nx - 1);
    const int e = end(rng_);
    const int iy = row(rng_);
    const int ix = col(rng_);
    return {t, e, iy, ix};
  }

  void add_to(CellBatch& batch, const SampleSite& site) const {
    const auto& traj = data_[site.trajectory];
    std::vector<const FieldSet<T>*> frames;
    for (int f = site.end - k_ + 1; f <= site.end; ++f) frames.push_back(&traj[f]);
    batch.add(frames, traj[site.end + 1], site.iy, site.ix);
  }

 private:
  std::span<const Trajectory<T>> data_;
  int k_;
  std::mt19937_64 rng_;
  std::vector<std::size_t> usable_;
};

}  // namespace

template <typename T>
LossAndGradient loss_and_gradient(const StencilModel& model, std::span<const TrainingExample<T>> batch) {
  if (batch.empty()) throw Error(ErrorCode::kEmptyInput, "empty batch");
  std::size_t cells = 0;
  for (const auto& ex : batch) {
    if (ex.window.length() != model.config().k || ex.window.schema() != model.schema() ||
        ex.target.schema() != model.schema() || ex.target.grid() != ex.window.grid()) {
      throw Error(ErrorCode::kConfigMismatch, "training example does not match model");
    }
    cells += ex.target.grid().cells();
  }
  CellBatch cell_batch(model, cells);
  for (const auto& ex : batch) {
    const auto frames = frame_pointers(ex.window);
    for (int iy = 0; iy < ex.target.grid().ny; ++iy) {
      for (int ix = 0; ix < ex.target.grid().nx; ++ix) cell_batch.add(frames, ex.target, iy, ix);
    }
  }
  LossAndGradient result;
  result.gradient.assign(model.parameter_count(), 0.0);
  result.loss = cell_batch.evaluate(&result.gradient);
  return result;
}

template <typename T>
void fit_normalization(StencilModel& model, std::span<const Trajectory<T>> data) {
  const int s = model.channels();
  std::vector<double> sum(s, 0.0), sum_sq(s, 0.0), inc_sq(s, 0.0);
  double count = 0.0;
  double inc_count = 0.0;
  for (const auto& traj : data) {
    if (traj.schema() != model.schema()) throw Error(ErrorCode::kConfigMismatch, "training data schema mismatch");
    for (int f = 0; f < traj.size(); ++f) {
      for (int c = 0; c < s; ++c) {
        const auto plane = traj[f].plane(c);
        for (std::size_t i = 0; i < plane.size(); ++i) {
          const double v = plane[i];
          sum[c] += v;
          sum_sq[c] += v * v;
          if (f > 0) {
            const double d = v - static_cast<double>(traj[f - 1].plane(c)[i]);
            inc_sq[c] += d * d;
          }
        }
      }
      count += static_cast<double>(traj.grid().cells());
      if (f > 0) inc_count += static_cast<double>(traj.grid().cells());
    }
  }
  if (count == 0.0) throw Error(ErrorCode::kEmptyInput, "no data for normalization");
  std::vector<double> mean(s), stddev(s), scale(s);
  for (int c = 0; c < s; ++c) {
    mean[c] = sum[c] / count;
    stddev[c] = std::sqrt(std::max(sum_sq[c] / count - mean[c] * mean[c], 0.0));
    if (!(stddev[c] > 1e-12)) stddev[c] = 1.0;
    if (model.config().residual) {
      scale[c] = inc_count > 0 ? std::sqrt(inc_sq[c] / inc_count) : stddev[c];
      if (!(scale[c] > 1e-12)) scale[c] = 1.0;
    } else {
      scale[c] = stddev[c];
    }
  }
  model.set_normalization(std::move(mean), std::move(stddev), std::move(scale));
}

template <typename T>
TrainResult train(StencilModel& model, std::span<const Trajectory<T>> data, const TrainConfig& cfg) {
  if (data.empty()) throw Error(ErrorCode::kEmptyInput, "training split is empty");
  if (cfg.lr < 0 || cfg.momentum < 0 || cfg.momentum >= 1 || cfg.epochs < 0 || cfg.batch < 1 ||
      cfg.updates_per_epoch < 1 || cfg.monitor_cells < 1) {
    throw Error(ErrorCode::kInvalidArgument, "invalid training configuration");
  }
  const int k = model.config().k;

  CellBatch monitor(model, static_cast<std::size_t>(cfg.monitor_cells));
  {
    SiteSampler<T> sampler(data, k, cfg.seed ^ 0x6D6F6E69746F72ULL);
    for (int i = 0; i < cfg.monitor_cells; ++i) sampler.add_to(monitor, sampler.next());
  }

  TrainResult result;
  result.initial_loss = monitor.evaluate(nullptr);

  SiteSampler<T> sampler(data, k, cfg.seed);
  CellBatch batch(model, static_cast<std::size_t>(cfg.batch));
  std::vector<double> grad(model.parameter_count());
  std::vector<double> velocity(model.parameter_count(), 0.0);
  auto params = model.parameters();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (int update = 0; update < cfg.updates_per_epoch; ++update) {
      batch.clear();
      for (int i = 0; i < cfg.batch; ++i) sampler.add_to(batch, sampler.next());
      std::fill(grad.begin(), grad.end(), 0.0);
      batch.evaluate(&grad);
      for (std::size_t p = 0; p < params.size(); ++p) {
        velocity[p] = cfg.momentum * velocity[p] - cfg.lr * grad[p];
        params[p] += velocity[p];
      }
    }
    const double loss = monitor.evaluate(nullptr);
    result.loss_curve.push_back(loss);
    if (!std::isfinite(loss) || loss > cfg.divergence_factor * result.initial_loss) {
      throw Error(ErrorCode::kDivergence, "training loss " + std::to_string(loss) + " after epoch " +
                                              std::to_string(epoch + 1) + " (initial " +
                                              std::to_string(result.initial_loss) + ")");
    }
  }
  return result;
}

#define GAVG_INSTANTIATE(T)                                                                              \
  template LossAndGradient loss_and_gradient(const StencilModel&, std::span<const TrainingExample<T>>); \
  template void fit_normalization(StencilModel&, std::span<const Trajectory<T>>);                       \
  template TrainResult train(StencilModel&, std::span<const Trajectory<T>>, const TrainConfig&);

GAVG_INSTANTIATE(float)
GAVG_INSTANTIATE(double)

#undef GAVG_INSTANTIATE

}  // namespace gavg
