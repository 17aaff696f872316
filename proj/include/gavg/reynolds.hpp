#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gavg/field.hpp"
#include "gavg/group.hpp"

namespace gavg {

// Autoregressive model mapping a k-frame window to the next frame. predict must
// be deterministic, preserve grid and schema, and tolerate concurrent calls.
template <typename T>
class Surrogate {
 public:
  virtual ~Surrogate() = default;
  virtual int window_length() const = 0;
  virtual FieldSet<T> predict(const Window<T>& window) const = 0;
};

template <typename T>
class FunctionSurrogate final : public Surrogate<T> {
 public:
  using Fn = std::function<FieldSet<T>(const Window<T>&)>;

  FunctionSurrogate(int k, Fn fn) : k_(k), fn_(std::move(fn)) {}

  int window_length() const override { return k_; }
  FieldSet<T> predict(const Window<T>& window) const override { return fn_(window); }

 private:
  int k_;
  Fn fn_;
};

// Copies the last input frame forward; equivariant under every lattice action.
template <typename T>
class PersistenceSurrogate final : public Surrogate<T> {
 public:
  explicit PersistenceSurrogate(int k = 1) : k_(k) {}

  int window_length() const override { return k_; }
  FieldSet<T> predict(const Window<T>& window) const override {
    return window.last().with_time_index(window.last().time_index() + 1);
  }

 private:
  int k_;
};

enum class AveragingMode { kFull, kMonteCarlo };

struct AveragingConfig {
  GroupSpec group;
  AveragingMode mode = AveragingMode::kFull;
  int samples = 1;
  std::uint64_t seed = 0;
  // Draw fresh elements every rollout step; otherwise step 0's draw is reused.
  bool resample_per_step = true;
  // Sample without replacement (n <= |G|).
  bool distinct = false;

  static AveragingConfig full(GroupSpec group) { return {group, AveragingMode::kFull}; }
  static AveragingConfig monte_carlo(GroupSpec group, int n, std::uint64_t seed, bool resample_per_step = true) {
    return {group, AveragingMode::kMonteCarlo, n, seed, resample_per_step};
  }

  void validate() const;
};

// Group elements averaged over at rollout step `step` (0-based).
std::vector<GroupElement> averaging_elements(const AveragingConfig& cfg, int step);

// (1/n) sum_g g^-1 . M(g . w) over the given elements, accumulated in double in
// element order.
template <typename T>
FieldSet<T> average_over(const Surrogate<T>& model, const Window<T>& window, std::span<const GroupElement> elements);

template <typename T>
FieldSet<T> averaged_predict(const Surrogate<T>& model, const Window<T>& window, const AveragingConfig& cfg,
                             int step = 0);

// The group-averaged model as a Surrogate. Monte-Carlo configs always use the
// step-0 draw, so predict stays deterministic. Holds a reference to model.
template <typename T>
class AveragedSurrogate final : public Surrogate<T> {
 public:
  AveragedSurrogate(const Surrogate<T>& model, AveragingConfig cfg);

  int window_length() const override { return model_.window_length(); }
  FieldSet<T> predict(const Window<T>& window) const override;

 private:
  const Surrogate<T>& model_;
  AveragingConfig cfg_;
  std::vector<GroupElement> elements_;
};

template <typename T>
struct RolloutResult {
  Trajectory<T> predicted;
  std::vector<std::vector<GroupElement>> elements_used;  // per step; empty for plain rollouts
};

// Feeds each prediction back through slide_window for `horizon` steps. Throws
// RolloutError carrying the failing step when a prediction is not finite.
template <typename T>
RolloutResult<T> rollout(const Surrogate<T>& model, const Window<T>& init, int horizon,
                         const std::optional<AveragingConfig>& cfg = std::nullopt, double dt = 1.0);

struct EquivarianceReport {
  double max_deviation = 0.0;
  std::string worst_element;
  int worst_probe = -1;
  double tolerance = 0.0;
  bool pass = true;
};

// max over probes and g of ||g . f(x) - f(g . x)|| / ||f(x)||.
template <typename T>
EquivarianceReport check_equivariance(const Surrogate<T>& model, std::span<const GroupElement> elements,
                                      std::span<const Window<T>> probes, double tolerance);

template <typename T>
EquivarianceReport check_equivariance(const Surrogate<T>& model, const GroupSpec& group,
                                      std::span<const Window<T>> probes, double tolerance);

}  // namespace gavg
