#include "gavg/gray_scott.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace gavg {

double GrayScottParams::stability_limit(const GridSpec& grid) const {
  const double d = std::max(diff_a, diff_b);
  return 1.0 / (2.0 * d * (1.0 / (grid.dx * grid.dx) + 1.0 / (grid.dy * grid.dy)));
}

void GrayScottParams::validate(const GridSpec& grid) const {
  if (!(diff_a > 0 && diff_b > 0 && feed > 0 && kill > 0 && dt > 0) || substeps < 1) {
    throw Error(ErrorCode::kInvalidArgument, "Gray-Scott parameters must be positive");
  }
  if (dt > stability_limit(grid)) {
    throw Error(ErrorCode::kStabilityBound, "dt " + std::to_string(dt) + " exceeds explicit limit " +
                                                std::to_string(stability_limit(grid)));
  }
}

GrayScottParams GrayScottParams::with_frame_interval(const GridSpec& grid, double frame_interval,
                                                     GrayScottParams base) {
  if (!(frame_interval > 0)) throw Error(ErrorCode::kInvalidArgument, "frame interval must be positive");
  const double target = std::min(0.5 * base.stability_limit(grid), kMaxReactionStep);
  base.substeps = static_cast<int>(std::ceil(frame_interval / target));
  base.dt = frame_interval / base.substeps;
  return base;
}

GrayScottParams GrayScottParams::with_frame_interval(const GridSpec& grid, double frame_interval) {
  return with_frame_interval(grid, frame_interval, GrayScottParams{});
}

const char* to_string(InitialConditionKind kind) {
  return kind == InitialConditionKind::kRandomFourier ? "fourier" : "gaussians";
}

InitialConditionKind initial_condition_kind_from_string(std::string_view s) {
  if (s == "fourier") return InitialConditionKind::kRandomFourier;
  if (s == "gaussians") return InitialConditionKind::kGaussianClusters;
  throw Error(ErrorCode::kInvalidArgument, "unknown initial condition '" + std::string(s) + "'");
}

Schema gray_scott_schema() { return Schema::of({{"A", ChannelKind::kScalar}, {"B", ChannelKind::kScalar}}); }

FieldSet<double> initial_condition(const GridSpec& grid, const InitialConditionSpec& ic) {
  grid.validate();
  if (!(ic.amplitude > 0)) throw Error(ErrorCode::kInvalidArgument, "initial amplitude must be positive");
  const int nx = grid.nx;
  const int ny = grid.ny;
  const double lx = nx * grid.dx;
  const double ly = ny * grid.dy;
  std::mt19937_64 rng(ic.seed);
  std::vector<double> b(grid.cells(), 0.0);

  auto x_at = [&](int ix) { return (ix + 0.5) * grid.dx; };
  auto y_at = [&](int iy) { return (iy + 0.5) * grid.dy; };

  if (ic.kind == InitialConditionKind::kGaussianClusters) {
    if (ic.count < 1 || !(ic.width > 0)) throw Error(ErrorCode::kInvalidArgument, "bad cluster parameters");
    std::uniform_real_distribution<double> ux(0.0, lx);
    std::uniform_real_distribution<double> uy(0.0, ly);
    for (int c = 0; c < ic.count; ++c) {
      const double cx = ux(rng);
      const double cy = uy(rng);
      for (int iy = 0; iy < ny; ++iy) {
        double ddy = std::abs(y_at(iy) - cy);
        ddy = std::min(ddy, ly - ddy);
        for (int ix = 0; ix < nx; ++ix) {
          double ddx = std::abs(x_at(ix) - cx);
          ddx = std::min(ddx, lx - ddx);
          b[static_cast<std::size_t>(iy) * nx + ix] += std::exp(-(ddx * ddx + ddy * ddy) / (2 * ic.width * ic.width));
        }
      }
    }
    for (double& v : b) v = std::clamp(v, 0.0, 1.0) * ic.amplitude;
  } else {
    if (ic.modes < 1) throw Error(ErrorCode::kInvalidArgument, "Fourier IC needs at least one mode");
    std::normal_distribution<double> normal(0.0, 1.0);
    const double two_pi = 2.0 * std::numbers::pi;
    for (int ky = -ic.modes; ky <= ic.modes; ++ky) {
      for (int kx = -ic.modes; kx <= ic.modes; ++kx) {
        if (kx == 0 && ky == 0) continue;
        const double a = normal(rng);
        const double s = normal(rng);
        for (int iy = 0; iy < ny; ++iy) {
          for (int ix = 0; ix < nx; ++ix) {
            const double phase = two_pi * (kx * x_at(ix) / lx + ky * y_at(iy) / ly);
            b[static_cast<std::size_t>(iy) * nx + ix] += a * std::cos(phase) + s * std::sin(phase);
          }
        }
      }
    }
    // Keep the top 40% of the normalized field as the seeded B region.
    const auto [lo, hi] = std::minmax_element(b.begin(), b.end());
    const double min = *lo;
    const double range = std::max(*hi - min, 1e-300);
    for (double& v : b) v = std::clamp(((v - min) / range - 0.6) / 0.4, 0.0, 1.0) * ic.amplitude;
  }

  std::vector<double> data(2 * grid.cells());
  for (std::size_t i = 0; i < grid.cells(); ++i) {
    data[i] = 1.0 - b[i];
    data[grid.cells() + i] = b[i];
  }
  return FieldSet<double>(grid, gray_scott_schema(), std::move(data), 0);
}

template <typename T>
FieldSet<T> gray_scott_step(const FieldSet<T>& state, const GrayScottParams& p) {
  const GridSpec& grid = state.grid();
  if (grid.boundary != Boundary::kPeriodicBoth) {
    throw Error(ErrorCode::kIncompatibleGrid, "Gray-Scott solver requires periodic boundaries");
  }
  if (state.schema() != gray_scott_schema()) {
    throw Error(ErrorCode::kConfigMismatch, "Gray-Scott state must have scalar channels A and B");
  }
  p.validate(grid);

  const int nx = grid.nx;
  const int ny = grid.ny;
  const double inv_dx2 = 1.0 / (grid.dx * grid.dx);
  const double inv_dy2 = 1.0 / (grid.dy * grid.dy);
  const auto a = state.plane(0);
  const auto b = state.plane(1);
  std::vector<T> out(state.data().size());
  T* out_a = out.data();
  T* out_b = out.data() + grid.cells();

  for (int iy = 0; iy < ny; ++iy) {
    const std::size_t row = static_cast<std::size_t>(iy) * nx;
    const std::size_t up = static_cast<std::size_t>((iy + 1) % ny) * nx;
    const std::size_t down = static_cast<std::size_t>((iy + ny - 1) % ny) * nx;
    for (int ix = 0; ix < nx; ++ix) {
      const int right = (ix + 1) % nx;
      const int left = (ix + nx - 1) % nx;
      const std::size_t c = row + ix;
      const double ac = a[c];
      const double bc = b[c];
      const double lap_a = (static_cast<double>(a[row + right]) + a[row + left] - 2.0 * ac) * inv_dx2 +
                           (static_cast<double>(a[up + ix]) + a[down + ix] - 2.0 * ac) * inv_dy2;
      const double lap_b = (static_cast<double>(b[row + right]) + b[row + left] - 2.0 * bc) * inv_dx2 +
                           (static_cast<double>(b[up + ix]) + b[down + ix] - 2.0 * bc) * inv_dy2;
      const double reaction = ac * bc * bc;
      out_a[c] = static_cast<T>(ac + p.dt * (p.diff_a * lap_a - reaction + p.feed * (1.0 - ac)));
      out_b[c] = static_cast<T>(bc + p.dt * (p.diff_b * lap_b + reaction - (p.feed + p.kill) * bc));
    }
  }
  return FieldSet<T>(grid, state.schema(), std::move(out), state.time_index());
}

Trajectory<double> generate_trajectory(const GridSpec& grid, const GrayScottParams& p, const InitialConditionSpec& ic,
                                       int frames) {
  if (frames < 1) throw Error(ErrorCode::kInvalidArgument, "trajectory needs at least one frame");
  p.validate(grid);
  std::vector<FieldSet<double>> out;
  out.reserve(frames);
  out.push_back(initial_condition(grid, ic));
  for (int f = 1; f < frames; ++f) {
    FieldSet<double> state = out.back();
    try {
      for (int s = 0; s < p.substeps; ++s) state = gray_scott_step(state, p);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kNonFiniteValue) {
        throw Error(ErrorCode::kBlowUp, "Gray-Scott state diverged before frame " + std::to_string(f));
      }
      throw;
    }
    out.push_back(state.with_time_index(f));
  }
  return Trajectory<double>(grid, gray_scott_schema(), std::move(out), p.dt * p.substeps);
}

template FieldSet<float> gray_scott_step(const FieldSet<float>&, const GrayScottParams&);
template FieldSet<double> gray_scott_step(const FieldSet<double>&, const GrayScottParams&);

}  // namespace gavg
