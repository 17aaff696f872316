#include "gavg/reynolds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parallel.hpp"

namespace gavg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

template <typename T>
void check_output(const FieldSet<T>& out, const Window<T>& window) {
  if (out.grid() != window.grid() || out.schema() != window.schema()) {
    throw Error(ErrorCode::kConfigMismatch, "model output changed grid or schema");
  }
}

}  // namespace

void AveragingConfig::validate() const {
  if (mode == AveragingMode::kMonteCarlo) {
    if (samples < 1) throw Error(ErrorCode::kInvalidArgument, "Monte-Carlo sample count must be at least 1");
    if (distinct && static_cast<std::size_t>(samples) > group.order()) {
      throw Error(ErrorCode::kInvalidArgument, "cannot draw more distinct elements than |G|");
    }
  }
}

std::vector<GroupElement> averaging_elements(const AveragingConfig& cfg, int step) {
  cfg.validate();
  if (cfg.mode == AveragingMode::kFull) return enumerate(cfg.group);
  const int draw_step = cfg.resample_per_step ? step : 0;
  const std::uint64_t seed = splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(draw_step)));
  return cfg.distinct ? sample_distinct(cfg.group, cfg.samples, seed) : sample(cfg.group, cfg.samples, seed);
}

template <typename T>
FieldSet<T> average_over(const Surrogate<T>& model, const Window<T>& window, std::span<const GroupElement> elements) {
  if (elements.empty()) throw Error(ErrorCode::kInvalidArgument, "no group elements to average over");
  if (window.length() != model.window_length()) {
    throw Error(ErrorCode::kConfigMismatch, "window length " + std::to_string(window.length()) +
                                                " does not match model k=" + std::to_string(model.window_length()));
  }
  const std::size_t size = window.last().data().size();
  std::vector<double> acc(size, 0.0);

  // Evaluate a block of elements concurrently, then fold them in element order
  // so the sum does not depend on the thread count.
  const std::size_t block = static_cast<std::size_t>(std::max(1, detail::thread_count()));
  std::vector<std::optional<FieldSet<T>>> slots(block);
  for (std::size_t begin = 0; begin < elements.size(); begin += block) {
    const std::size_t count = std::min(block, elements.size() - begin);
    detail::parallel_for(count, [&](std::size_t j) {
      const GroupElement& g = elements[begin + j];
      FieldSet<T> out = model.predict(gavg::apply_window(g, window));
      check_output(out, window);
      slots[j] = gavg::apply(inverse(g), out);
    });
    for (std::size_t j = 0; j < count; ++j) {
      const auto data = slots[j]->data();
      for (std::size_t i = 0; i < size; ++i) acc[i] += static_cast<double>(data[i]);
      slots[j].reset();
    }
  }

  const double n = static_cast<double>(elements.size());
  std::vector<T> out(size);
  for (std::size_t i = 0; i < size; ++i) out[i] = static_cast<T>(acc[i] / n);
  return FieldSet<T>(window.grid(), window.schema(), std::move(out), window.last().time_index() + 1);
}

template <typename T>
FieldSet<T> averaged_predict(const Surrogate<T>& model, const Window<T>& window, const AveragingConfig& cfg,
                             int step) {
  cfg.group.check_compatible(window.grid());
  const auto elements = averaging_elements(cfg, step);
  return average_over(model, window, elements);
}

template <typename T>
AveragedSurrogate<T>::AveragedSurrogate(const Surrogate<T>& model, AveragingConfig cfg)
    : model_(model), cfg_(std::move(cfg)), elements_(averaging_elements(cfg_, 0)) {}

template <typename T>
FieldSet<T> AveragedSurrogate<T>::predict(const Window<T>& window) const {
  cfg_.group.check_compatible(window.grid());
  return average_over(model_, window, elements_);
}

template <typename T>
RolloutResult<T> rollout(const Surrogate<T>& model, const Window<T>& init, int horizon,
                         const std::optional<AveragingConfig>& cfg, double dt) {
  if (horizon < 1) throw Error(ErrorCode::kInvalidArgument, "rollout horizon must be at least 1");
  if (init.length() != model.window_length()) {
    throw Error(ErrorCode::kConfigMismatch, "initial window length does not match model k");
  }
  if (cfg) cfg->group.check_compatible(init.grid());

  std::vector<FieldSet<T>> frames;
  std::vector<std::vector<GroupElement>> used;
  frames.reserve(horizon);
  Window<T> window = init;
  for (int step = 0; step < horizon; ++step) {
    std::optional<FieldSet<T>> next;
    try {
      if (cfg) {
        auto elements = averaging_elements(*cfg, step);
        next = average_over(model, window, elements);
        used.push_back(std::move(elements));
      } else {
        next = model.predict(window);
        check_output(*next, window);
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNonFiniteValue) throw RolloutError(step + 1, e.what());
      throw;
    }
    const FieldSet<T> expected_time = next->with_time_index(window.last().time_index() + 1);
    window = slide_window(window, expected_time);
    frames.push_back(expected_time);
  }
  return RolloutResult<T>{Trajectory<T>(init.grid(), init.schema(), std::move(frames), dt), std::move(used)};
}

template <typename T>
EquivarianceReport check_equivariance(const Surrogate<T>& model, std::span<const GroupElement> elements,
                                      std::span<const Window<T>> probes, double tolerance) {
  EquivarianceReport report;
  report.tolerance = tolerance;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const FieldSet<T> base = model.predict(probes[p]);
    const double norm = l2_norm(base);
    for (const auto& g : elements) {
      const FieldSet<T> transformed_output = gavg::apply(g, base);
      const FieldSet<T> output_of_transformed = model.predict(gavg::apply_window(g, probes[p]))
                                                    .with_time_index(transformed_output.time_index());
      const double diff = l2_distance(transformed_output, output_of_transformed);
      const double deviation = norm > 0.0 ? diff / norm : diff;
      if (deviation > report.max_deviation || report.worst_probe < 0) {
        report.max_deviation = deviation;
        report.worst_element = to_string(g);
        report.worst_probe = static_cast<int>(p);
      }
    }
  }
  report.pass = report.max_deviation <= tolerance;
  return report;
}

template <typename T>
EquivarianceReport check_equivariance(const Surrogate<T>& model, const GroupSpec& group,
                                      std::span<const Window<T>> probes, double tolerance) {
  const auto elements = enumerate(group);
  return check_equivariance(model, std::span<const GroupElement>(elements), probes, tolerance);
}

#define GAVG_INSTANTIATE(T)                                                                                     \
  template FieldSet<T> average_over(const Surrogate<T>&, const Window<T>&, std::span<const GroupElement>);      \
  template FieldSet<T> averaged_predict(const Surrogate<T>&, const Window<T>&, const AveragingConfig&, int);    \
  template class AveragedSurrogate<T>;                                                                          \
  template RolloutResult<T> rollout(const Surrogate<T>&, const Window<T>&, int,                                 \
                                    const std::optional<AveragingConfig>&, double);                             \
  template EquivarianceReport check_equivariance(const Surrogate<T>&, std::span<const GroupElement>,            \
                                                 std::span<const Window<T>>, double);                           \
  template EquivarianceReport check_equivariance(const Surrogate<T>&, const GroupSpec&,                        \
                                                 std::span<const Window<T>>, double);

GAVG_INSTANTIATE(float)
GAVG_INSTANTIATE(double)

#undef GAVG_INSTANTIATE

}  // namespace gavg
