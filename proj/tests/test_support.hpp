#pragma once

#include <atomic>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "gavg/field.hpp"

namespace gavg::testing {

inline GridSpec periodic_grid(int nx, int ny) { return GridSpec{nx, ny, 1.0, 1.0, Boundary::kPeriodicBoth}; }

inline Schema mixed_schema() {
  return Schema::of({{"rho", ChannelKind::kScalar}, {"u", ChannelKind::kVector}, {"D", ChannelKind::kTensor}});
}

template <typename T>
FieldSet<T> random_field(const GridSpec& grid, const Schema& schema, std::uint64_t seed, int time_index = 0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<T> data(grid.cells() * static_cast<std::size_t>(schema.components()));
  for (auto& v : data) v = static_cast<T>(u(rng));
  return FieldSet<T>(grid, schema, std::move(data), time_index);
}

template <typename T>
Window<T> random_window(const GridSpec& grid, const Schema& schema, int k, std::uint64_t seed, int first_time = 0) {
  std::vector<FieldSet<T>> frames;
  for (int i = 0; i < k; ++i) frames.push_back(random_field<T>(grid, schema, seed * 1000 + i, first_time + i));
  return Window<T>(std::move(frames));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("gavg_test_" + std::to_string(stamp) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

template <typename T>
bool bit_equal(const FieldSet<T>& a, const FieldSet<T>& b) {
  if (a.grid() != b.grid() || a.schema() != b.schema()) return false;
  return std::memcmp(a.data().data(), b.data().data(), a.data().size_bytes()) == 0;
}

template <typename T>
bool value_equal(const FieldSet<T>& a, const FieldSet<T>& b) {
  if (a.grid() != b.grid() || a.schema() != b.schema()) return false;
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] != y[i]) return false;
  }
  return true;
}

}  // namespace gavg::testing
