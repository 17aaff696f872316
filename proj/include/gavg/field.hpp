#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gavg/error.hpp"

namespace gavg {

#ifdef GAVG_USE_DOUBLE
using Real = double;
#else
using Real = float;
#endif

enum class Boundary { kPeriodicBoth, kPeriodicXNeumannY };

const char* to_string(Boundary b);
Boundary boundary_from_string(std::string_view s);

// Uniform 2D grid. x indexes columns (fastest varying), y indexes rows.
struct GridSpec {
  int nx = 0;
  int ny = 0;
  double dx = 1.0;
  double dy = 1.0;
  Boundary boundary = Boundary::kPeriodicBoth;

  std::size_t cells() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  bool square() const { return nx == ny && dx == dy; }
  bool periodic_x() const { return true; }
  bool periodic_y() const { return boundary == Boundary::kPeriodicBoth; }

  // Throws kInvalidArgument unless nx, ny >= 2 and spacings are positive.
  void validate() const;

  bool operator==(const GridSpec&) const = default;
};

enum class ChannelKind { kScalar, kVector, kTensor };

const char* to_string(ChannelKind kind);
ChannelKind channel_kind_from_string(std::string_view s);

// 1, 2 (x, y) or 4 (xx, xy, yx, yy).
constexpr int component_count(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::kScalar: return 1;
    case ChannelKind::kVector: return 2;
    case ChannelKind::kTensor: return 4;
  }
  return 0;
}

struct ChannelGroup {
  std::string name;
  ChannelKind kind = ChannelKind::kScalar;
  int offset = 0;

  int components() const { return component_count(kind); }
  bool operator==(const ChannelGroup&) const = default;
};

// Ordered channel groups whose component ranges tile [0, s) contiguously.
class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<ChannelGroup> groups);

  // Offsets are assigned in order.
  static Schema of(std::vector<std::pair<std::string, ChannelKind>> channels);

  const std::vector<ChannelGroup>& groups() const { return groups_; }
  int components() const { return components_; }
  const ChannelGroup& find(std::string_view name) const;

  bool operator==(const Schema&) const = default;

 private:
  std::vector<ChannelGroup> groups_;
  int components_ = 0;
};

// One time snapshot stored channel-major as [s][ny][nx]. Immutable once built.
template <typename T>
class FieldSet {
 public:
  using value_type = T;

  // Validates shape and rejects NaN/Inf.
  FieldSet(GridSpec grid, Schema schema, std::vector<T> data, int time_index = 0);

  const GridSpec& grid() const { return grid_; }
  const Schema& schema() const { return schema_; }
  int time_index() const { return time_index_; }
  int components() const { return schema_.components(); }
  std::span<const T> data() const { return data_; }
  std::span<const T> plane(int component) const {
    return std::span<const T>(data_).subspan(static_cast<std::size_t>(component) * grid_.cells(),
                                             grid_.cells());
  }
  T at(int component, int iy, int ix) const {
    return data_[(static_cast<std::size_t>(component) * grid_.ny + iy) * grid_.nx + ix];
  }

  FieldSet with_time_index(int t) const;

  template <typename U>
  FieldSet<U> cast() const {
    return FieldSet<U>(grid_, schema_, std::vector<U>(data_.begin(), data_.end()), time_index_);
  }

 private:
  GridSpec grid_;
  Schema schema_;
  std::vector<T> data_;
  int time_index_ = 0;
};

template <typename T>
FieldSet<T> make_fieldset(GridSpec grid, Schema schema, std::vector<T> data, int time_index = 0) {
  return FieldSet<T>(std::move(grid), std::move(schema), std::move(data), time_index);
}

// k consecutive snapshots, oldest first.
template <typename T>
class Window {
 public:
  explicit Window(std::vector<FieldSet<T>> frames);

  int length() const { return static_cast<int>(frames_.size()); }
  const std::vector<FieldSet<T>>& frames() const { return frames_; }
  const FieldSet<T>& operator[](int i) const { return frames_[i]; }
  const FieldSet<T>& last() const { return frames_.back(); }
  const GridSpec& grid() const { return frames_.front().grid(); }
  const Schema& schema() const { return frames_.front().schema(); }

 private:
  std::vector<FieldSet<T>> frames_;
};

// Drops the oldest frame and appends next; throws kTimeIndexGap unless next
// directly follows the last frame.
template <typename T>
Window<T> slide_window(const Window<T>& window, FieldSet<T> next);

template <typename T>
class Trajectory {
 public:
  Trajectory(GridSpec grid, Schema schema, std::vector<FieldSet<T>> frames, double dt);

  const GridSpec& grid() const { return grid_; }
  const Schema& schema() const { return schema_; }
  double dt() const { return dt_; }
  int size() const { return static_cast<int>(frames_.size()); }
  const std::vector<FieldSet<T>>& frames() const { return frames_; }
  const FieldSet<T>& operator[](int i) const { return frames_[i]; }

  // Frame whose time index equals t (frames are contiguous in time).
  const FieldSet<T>& at_time(int t) const;

  // Frames [end - k + 1 .. end] by position.
  Window<T> window_ending_at(int end, int k) const;

  template <typename U>
  Trajectory<U> cast() const {
    std::vector<FieldSet<U>> out;
    out.reserve(frames_.size());
    for (const auto& f : frames_) out.push_back(f.template cast<U>());
    return Trajectory<U>(grid_, schema_, std::move(out), dt_);
  }

 private:
  GridSpec grid_;
  Schema schema_;
  std::vector<FieldSet<T>> frames_;
  double dt_ = 1.0;
};

// Mean over all cells of each component of the named channel.
template <typename T>
std::vector<double> spatial_mean(const FieldSet<T>& field, std::string_view channel);

// Euclidean norm over every stored value.
template <typename T>
double l2_norm(const FieldSet<T>& field);

// ||a - b||_2; throws kShapeMismatch when grids or schemas differ.
template <typename T>
double l2_distance(const FieldSet<T>& a, const FieldSet<T>& b);

}  // namespace gavg
