#include "gavg/field.hpp"

#include <cmath>

namespace gavg {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kShapeMismatch: return "shape-mismatch";
    case ErrorCode::kNonFiniteValue: return "non-finite-value";
    case ErrorCode::kTimeIndexGap: return "time-index-gap";
    case ErrorCode::kUnknownChannel: return "unknown-channel";
    case ErrorCode::kMixedGroup: return "mixed-group";
    case ErrorCode::kIncompatibleGrid: return "incompatible-grid";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kStabilityBound: return "stability-bound";
    case ErrorCode::kBlowUp: return "blow-up";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kVersionMismatch: return "version-mismatch";
    case ErrorCode::kConfigMismatch: return "config-mismatch";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kMisalignment: return "misalignment";
    case ErrorCode::kEmptyInput: return "empty-input";
  }
  return "unknown";
}

const char* to_string(Boundary b) {
  return b == Boundary::kPeriodicBoth ? "periodic-both" : "periodic-x-neumann-y";
}

Boundary boundary_from_string(std::string_view s) {
  if (s == "periodic-both") return Boundary::kPeriodicBoth;
  if (s == "periodic-x-neumann-y") return Boundary::kPeriodicXNeumannY;
  throw Error(ErrorCode::kInvalidArgument, "unknown boundary '" + std::string(s) + "'");
}

void GridSpec::validate() const {
  if (nx < 2 || ny < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "grid needs at least 2 cells per axis, got " + std::to_string(nx) + "x" +
                    std::to_string(ny));
  }
  if (!(dx > 0.0) || !(dy > 0.0)) throw Error(ErrorCode::kInvalidArgument, "grid spacing must be positive");
}

const char* to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::kScalar: return "scalar";
    case ChannelKind::kVector: return "vector";
    case ChannelKind::kTensor: return "tensor";
  }
  return "unknown";
}

ChannelKind channel_kind_from_string(std::string_view s) {
  if (s == "scalar") return ChannelKind::kScalar;
  if (s == "vector") return ChannelKind::kVector;
  if (s == "tensor") return ChannelKind::kTensor;
  throw Error(ErrorCode::kInvalidArgument, "unknown channel kind '" + std::string(s) + "'");
}

Schema::Schema(std::vector<ChannelGroup> groups) : groups_(std::move(groups)) {
  int next = 0;
  for (const auto& g : groups_) {
    if (g.offset != next) {
      throw Error(ErrorCode::kInvalidArgument,
                  "channel '" + g.name + "' offset " + std::to_string(g.offset) + ", expected " +
                      std::to_string(next));
    }
    for (const auto& h : groups_) {
      if (&h != &g && h.name == g.name) {
        throw Error(ErrorCode::kInvalidArgument, "duplicate channel '" + g.name + "'");
      }
    }
    next += g.components();
  }
  components_ = next;
}

Schema Schema::of(std::vector<std::pair<std::string, ChannelKind>> channels) {
  std::vector<ChannelGroup> groups;
  int offset = 0;
  for (auto& [name, kind] : channels) {
    groups.push_back({std::move(name), kind, offset});
    offset += component_count(kind);
  }
  return Schema(std::move(groups));
}

const ChannelGroup& Schema::find(std::string_view name) const {
  for (const auto& g : groups_) {
    if (g.name == name) return g;
  }
  throw Error(ErrorCode::kUnknownChannel, "no channel named '" + std::string(name) + "'");
}

template <typename T>
FieldSet<T>::FieldSet(GridSpec grid, Schema schema, std::vector<T> data, int time_index)
    : grid_(grid), schema_(std::move(schema)), data_(std::move(data)), time_index_(time_index) {
  grid_.validate();
  if (schema_.components() < 1) throw Error(ErrorCode::kShapeMismatch, "schema has no channels");
  const std::size_t expected = static_cast<std::size_t>(schema_.components()) * grid_.cells();
  if (data_.size() != expected) {
    throw Error(ErrorCode::kShapeMismatch, "expected " + std::to_string(expected) + " values, got " +
                                               std::to_string(data_.size()));
  }
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!std::isfinite(data_[i])) {
      throw Error(ErrorCode::kNonFiniteValue, "value at flat index " + std::to_string(i));
    }
  }
}

template <typename T>
FieldSet<T> FieldSet<T>::with_time_index(int t) const {
  FieldSet copy = *this;
  copy.time_index_ = t;
  return copy;
}

template <typename T>
Window<T>::Window(std::vector<FieldSet<T>> frames) : frames_(std::move(frames)) {
  if (frames_.empty()) throw Error(ErrorCode::kInvalidArgument, "window needs at least one frame");
  for (std::size_t i = 1; i < frames_.size(); ++i) {
    if (frames_[i].grid() != frames_[0].grid() || frames_[i].schema() != frames_[0].schema()) {
      throw Error(ErrorCode::kShapeMismatch, "window frames differ in grid or schema");
    }
    if (frames_[i].time_index() != frames_[i - 1].time_index() + 1) {
      throw Error(ErrorCode::kTimeIndexGap, "window frames are not consecutive");
    }
  }
}

template <typename T>
Window<T> slide_window(const Window<T>& window, FieldSet<T> next) {
  if (next.time_index() != window.last().time_index() + 1) {
    throw Error(ErrorCode::kTimeIndexGap, "next frame has time index " + std::to_string(next.time_index()) +
                                              ", expected " +
                                              std::to_string(window.last().time_index() + 1));
  }
  std::vector<FieldSet<T>> frames(window.frames().begin() + 1, window.frames().end());
  frames.push_back(std::move(next));
  return Window<T>(std::move(frames));
}

template <typename T>
Trajectory<T>::Trajectory(GridSpec grid, Schema schema, std::vector<FieldSet<T>> frames, double dt)
    : grid_(grid), schema_(std::move(schema)), frames_(std::move(frames)), dt_(dt) {
  if (frames_.empty()) throw Error(ErrorCode::kInvalidArgument, "trajectory has no frames");
  if (!(dt_ > 0.0)) throw Error(ErrorCode::kInvalidArgument, "trajectory dt must be positive");
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    if (frames_[i].grid() != grid_ || frames_[i].schema() != schema_) {
      throw Error(ErrorCode::kShapeMismatch, "frame " + std::to_string(i) + " differs in grid or schema");
    }
    if (i > 0 && frames_[i].time_index() != frames_[i - 1].time_index() + 1) {
      throw Error(ErrorCode::kTimeIndexGap, "frame " + std::to_string(i) + " breaks time index sequence");
    }
  }
}

template <typename T>
const FieldSet<T>& Trajectory<T>::at_time(int t) const {
  const int pos = t - frames_.front().time_index();
  if (pos < 0 || pos >= size()) {
    throw Error(ErrorCode::kMisalignment, "time index " + std::to_string(t) + " outside trajectory");
  }
  return frames_[pos];
}

template <typename T>
Window<T> Trajectory<T>::window_ending_at(int end, int k) const {
  if (k < 1 || end - k + 1 < 0 || end >= size()) {
    throw Error(ErrorCode::kInvalidArgument, "window of length " + std::to_string(k) + " ending at frame " +
                                                 std::to_string(end) + " does not fit trajectory of " +
                                                 std::to_string(size()) + " frames");
  }
  return Window<T>(std::vector<FieldSet<T>>(frames_.begin() + (end - k + 1), frames_.begin() + end + 1));
}

template <typename T>
std::vector<double> spatial_mean(const FieldSet<T>& field, std::string_view channel) {
  const ChannelGroup& group = field.schema().find(channel);
  std::vector<double> means;
  for (int c = 0; c < group.components(); ++c) {
    double sum = 0.0;
    for (T v : field.plane(group.offset + c)) sum += v;
    means.push_back(sum / static_cast<double>(field.grid().cells()));
  }
  return means;
}

template <typename T>
double l2_norm(const FieldSet<T>& field) {
  double sum = 0.0;
  for (T v : field.data()) sum += static_cast<double>(v) * v;
  return std::sqrt(sum);
}

template <typename T>
double l2_distance(const FieldSet<T>& a, const FieldSet<T>& b) {
  if (a.grid() != b.grid() || a.schema() != b.schema()) {
    throw Error(ErrorCode::kShapeMismatch, "fields differ in grid or schema");
  }
  double sum = 0.0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = static_cast<double>(da[i]) - static_cast<double>(db[i]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

#define GAVG_INSTANTIATE(T)                                                           \
  template class FieldSet<T>;                                                         \
  template class Window<T>;                                                           \
  template class Trajectory<T>;                                                       \
  template Window<T> slide_window(const Window<T>&, FieldSet<T>);                     \
  template std::vector<double> spatial_mean(const FieldSet<T>&, std::string_view);    \
  template double l2_norm(const FieldSet<T>&);                                        \
  template double l2_distance(const FieldSet<T>&, const FieldSet<T>&);

GAVG_INSTANTIATE(float)
GAVG_INSTANTIATE(double)

#undef GAVG_INSTANTIATE

}  // namespace gavg
