#pragma once

#include <filesystem>

#include "gavg/field.hpp"

namespace gavg {

// On-disk trajectory: a directory holding meta.json (grid, schema, dt, frame
// count, dtype, endianness) and frames.bin (little-endian component planes,
// frame-major then channel-major).
template <typename T>
void save_trajectory(const Trajectory<T>& trajectory, const std::filesystem::path& dir);

// Converts when the stored dtype differs from T; same-dtype loads are bit-exact.
template <typename T>
Trajectory<T> load_trajectory(const std::filesystem::path& dir);

}  // namespace gavg
