#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gavg/field.hpp"
#include "gavg/reynolds.hpp"

namespace gavg {

struct StencilModelConfig {
  int k = 4;        // history length
  int radius = 2;   // patch is (2r+1) x (2r+1) cells per input plane
  int hidden = 16;  // 0 selects the linear model
  bool residual = false;  // predict u_t + delta instead of u_{t+1}
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const StencilModelConfig&) const = default;
};

// Shared-weight local stencil network. Every cell sees the same k x s x
// (2r+1)^2 patch of normalized inputs (periodic padding in x, and in y on
// periodic-both grids, mirrored otherwise), so predictions commute exactly with
// lattice shifts. Nothing ties the weights to rotations or reflections.
//
// Parameter layout with hidden h > 0: W1[h][n_in], b1[h], W2[s][h], b2[s].
// Linear layout: W[s][n_in], b[s].
class StencilModel final : public Surrogate<float>, public Surrogate<double> {
 public:
  // Gaussian fan-in initialization from cfg.seed; identity normalization.
  StencilModel(StencilModelConfig cfg, Schema schema);

  static StencilModel zeros(StencilModelConfig cfg, Schema schema);

  const StencilModelConfig& config() const { return cfg_; }
  const Schema& schema() const { return schema_; }
  int channels() const { return schema_.components(); }
  int patch_width() const { return 2 * cfg_.radius + 1; }
  int input_size() const { return cfg_.k * channels() * patch_width() * patch_width(); }
  std::size_t parameter_count() const { return params_.size(); }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  // Position of patch entry (frame, component, dy, dx) in the input vector;
  // frame 0 is the oldest, offsets are in [-radius, radius].
  int input_index(int frame, int component, int dy, int dx) const;
  // Flat parameter index of the first-layer (or linear) weight.
  std::size_t input_weight_index(int unit, int input) const;
  std::size_t input_bias_index(int unit) const;
  std::size_t output_weight_index(int channel, int unit) const;
  std::size_t output_bias_index(int channel) const;

  // Inputs become (u - mean) / stddev; outputs are base + scale * net, with
  // base = mean (direct) or the last input frame (residual).
  void set_normalization(std::vector<double> mean, std::vector<double> stddev, std::vector<double> output_scale);
  const std::vector<double>& input_mean() const { return mean_; }
  const std::vector<double>& input_stddev() const { return stddev_; }
  const std::vector<double>& output_scale() const { return scale_; }

  int window_length() const override { return cfg_.k; }
  FieldSet<float> predict(const Window<float>& window) const override;
  FieldSet<double> predict(const Window<double>& window) const override;

  void save(const std::filesystem::path& path) const;
  // Throws kVersionMismatch for a bad header.
  static StencilModel load(const std::filesystem::path& path);
  // Also throws kConfigMismatch when the stored schema differs.
  static StencilModel load(const std::filesystem::path& path, const Schema& expected);

 private:
  template <typename T>
  FieldSet<T> predict_impl(const Window<T>& window) const;

  StencilModelConfig cfg_;
  Schema schema_;
  std::vector<double> params_;
  std::vector<double> mean_;
  std::vector<double> stddev_;
  std::vector<double> scale_;
};

template <typename T>
struct TrainingExample {
  Window<T> window;
  FieldSet<T> target;
};

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

// Mean squared error in normalized output space, averaged over every cell and
// channel of every example, with its exact gradient.
template <typename T>
LossAndGradient loss_and_gradient(const StencilModel& model, std::span<const TrainingExample<T>> batch);

struct TrainConfig {
  double lr = 0.02;
  double momentum = 0.9;
  int epochs = 20;
  int updates_per_epoch = 200;
  int batch = 256;             // cells per update
  int monitor_cells = 4096;    // fixed cell sample used for the loss curve
  double divergence_factor = 1e3;
  std::uint64_t seed = 0;
};

struct TrainResult {
  double initial_loss = 0.0;
  std::vector<double> loss_curve;  // monitor loss after each epoch
};

// Per-channel mean/stddev over all frames; residual models scale outputs by
// the stddev of frame-to-frame increments instead.
template <typename T>
void fit_normalization(StencilModel& model, std::span<const Trajectory<T>> data);

// Momentum SGD over random (trajectory, time, cell) samples. Throws kDivergence
// if the monitor loss exceeds divergence_factor times its initial value.
template <typename T>
TrainResult train(StencilModel& model, std::span<const Trajectory<T>> data, const TrainConfig& cfg);

}  // namespace gavg
