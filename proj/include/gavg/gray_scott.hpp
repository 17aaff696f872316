#pragma once

#include <cstdint>
#include <string_view>

#include "gavg/field.hpp"

namespace gavg {

// dA/dt = D_A lap(A) - A B^2 + f (1 - A)
// dB/dt = D_B lap(B) + A B^2 - (f + k) B
// Explicit Euler on the reaction terms is unreliable beyond unit steps.
inline constexpr double kMaxReactionStep = 1.0;

struct GrayScottParams {
  double diff_a = 2e-5;
  double diff_b = 1e-5;
  double feed = 0.028;
  double kill = 0.062;
  double dt = 1.0;    // one explicit Euler substep
  int substeps = 1;   // substeps per saved frame

  // Largest stable explicit step for the 5-point Laplacian:
  // 1 / (2 D_max (1/dx^2 + 1/dy^2)), i.e. dx^2 / (4 D_max) on square cells.
  double stability_limit(const GridSpec& grid) const;

  // Throws kInvalidArgument for non-positive values, kStabilityBound when dt
  // exceeds stability_limit.
  void validate(const GridSpec& grid) const;

  // Fewest substeps covering frame_interval with dt at most half the
  // diffusive stability limit and at most kMaxReactionStep.
  static GrayScottParams with_frame_interval(const GridSpec& grid, double frame_interval, GrayScottParams base);
  static GrayScottParams with_frame_interval(const GridSpec& grid, double frame_interval);
};

enum class InitialConditionKind { kRandomFourier, kGaussianClusters };

const char* to_string(InitialConditionKind kind);
InitialConditionKind initial_condition_kind_from_string(std::string_view s);

// Both kinds are translation- and D4-invariant in distribution: uniformly
// random phases (Fourier) or uniformly placed isotropic blobs (clusters).
struct InitialConditionSpec {
  InitialConditionKind kind = InitialConditionKind::kGaussianClusters;
  int modes = 4;           // Fourier: wavenumbers |kx|, |ky| <= modes
  int count = 8;           // clusters
  double width = 0.05;     // cluster standard deviation, in domain units
  double amplitude = 0.5;  // peak B concentration
  std::uint64_t seed = 0;
};

// Channels A and B, both scalar.
Schema gray_scott_schema();

// B in [0, amplitude], A = 1 - B.
FieldSet<double> initial_condition(const GridSpec& grid, const InitialConditionSpec& ic);

// One explicit Euler substep with a periodic 5-point Laplacian. Requires a
// periodic-both grid and the gray_scott_schema channels.
template <typename T>
FieldSet<T> gray_scott_step(const FieldSet<T>& state, const GrayScottParams& p);

// Frame 0 is the initial condition; later frames are `substeps` solver steps
// apart. Throws kBlowUp if the state leaves the finite range.
Trajectory<double> generate_trajectory(const GridSpec& grid, const GrayScottParams& p, const InitialConditionSpec& ic,
                                       int frames);

}  // namespace gavg
