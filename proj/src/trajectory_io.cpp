#include "gavg/trajectory_io.hpp"

#include <fstream>

#include "binary_io.hpp"
#include "json_support.hpp"

namespace gavg {

using nlohmann::json;

void to_json(json& j, const GridSpec& grid) {
  j = json{{"nx", grid.nx}, {"ny", grid.ny}, {"dx", grid.dx}, {"dy", grid.dy},
           {"boundary", to_string(grid.boundary)}};
}

void from_json(const json& j, GridSpec& grid) {
  grid.nx = j.at("nx").get<int>();
  grid.ny = j.at("ny").get<int>();
  grid.dx = j.at("dx").get<double>();
  grid.dy = j.at("dy").get<double>();
  grid.boundary = boundary_from_string(j.at("boundary").get<std::string>());
  grid.validate();
}

void to_json(json& j, const Schema& schema) {
  j = json::array();
  for (const auto& g : schema.groups()) j.push_back({{"name", g.name}, {"kind", to_string(g.kind)}});
}

void from_json(const json& j, Schema& schema) {
  std::vector<std::pair<std::string, ChannelKind>> channels;
  for (const auto& c : j) {
    channels.emplace_back(c.at("name").get<std::string>(), channel_kind_from_string(c.at("kind").get<std::string>()));
  }
  schema = Schema::of(std::move(channels));
}

namespace detail {

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, "malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

}  // namespace detail

template <typename T>
void save_trajectory(const Trajectory<T>& trajectory, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());

  json meta{{"format", "gavg-trajectory"},
            {"version", 1},
            {"grid", trajectory.grid()},
            {"schema", trajectory.schema()},
            {"dt", trajectory.dt()},
            {"frames", trajectory.size()},
            {"first_time_index", trajectory[0].time_index()},
            {"dtype", detail::dtype_name<T>()},
            {"endianness", "little"}};
  detail::write_json_file(dir / "meta.json", meta);

  std::ofstream out(dir / "frames.bin", std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + (dir / "frames.bin").string());
  for (const auto& frame : trajectory.frames()) detail::write_le<T>(out, frame.data());
}

namespace {

template <typename Stored, typename T>
std::vector<FieldSet<T>> read_frames(std::istream& in, const GridSpec& grid, const Schema& schema, int count,
                                     int first) {
  const std::size_t per_frame = static_cast<std::size_t>(schema.components()) * grid.cells();
  std::vector<Stored> buffer(per_frame);
  std::vector<FieldSet<T>> frames;
  frames.reserve(count);
  for (int f = 0; f < count; ++f) {
    detail::read_le<Stored>(in, buffer);
    frames.emplace_back(grid, schema, std::vector<T>(buffer.begin(), buffer.end()), first + f);
  }
  return frames;
}

}  // namespace

template <typename T>
Trajectory<T> load_trajectory(const std::filesystem::path& dir) {
  const json meta = detail::read_json_file(dir / "meta.json");
  try {
    if (meta.at("format") != "gavg-trajectory") throw Error(ErrorCode::kIo, "not a trajectory: " + dir.string());
    if (meta.at("version").get<int>() != 1) throw Error(ErrorCode::kVersionMismatch, "trajectory version");
    if (meta.at("endianness") != "little") throw Error(ErrorCode::kIo, "unsupported endianness");
    const auto grid = meta.at("grid").get<GridSpec>();
    const auto schema = meta.at("schema").get<Schema>();
    const int count = meta.at("frames").get<int>();
    const int first = meta.at("first_time_index").get<int>();
    const std::string dtype = meta.at("dtype").get<std::string>();

    std::ifstream in(dir / "frames.bin", std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot open " + (dir / "frames.bin").string());
    std::vector<FieldSet<T>> frames;
    if (dtype == "float32") {
      frames = read_frames<float, T>(in, grid, schema, count, first);
    } else if (dtype == "float64") {
      frames = read_frames<double, T>(in, grid, schema, count, first);
    } else {
      throw Error(ErrorCode::kIo, "unknown dtype " + dtype);
    }
    if (in.peek() != std::char_traits<char>::eof()) {
      throw Error(ErrorCode::kIo, "trailing bytes in " + (dir / "frames.bin").string());
    }
    return Trajectory<T>(grid, schema, std::move(frames), meta.at("dt").get<double>());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, "bad trajectory metadata in " + dir.string() + ": " + e.what());
  }
}

template void save_trajectory(const Trajectory<float>&, const std::filesystem::path&);
template void save_trajectory(const Trajectory<double>&, const std::filesystem::path&);
template Trajectory<float> load_trajectory(const std::filesystem::path&);
template Trajectory<double> load_trajectory(const std::filesystem::path&);

}  // namespace gavg
