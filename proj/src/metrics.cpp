#include "gavg/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <tuple>

namespace gavg {

namespace {

constexpr std::array<const char*, 2> kVectorSuffix{"x", "y"};
constexpr std::array<const char*, 4> kTensorSuffix{"xx", "xy", "yx", "yy"};

template <typename T>
void check_same_shape(const FieldSet<T>& pred, const FieldSet<T>& truth) {
  if (pred.grid() != truth.grid() || pred.schema() != truth.schema()) {
    throw Error(ErrorCode::kShapeMismatch, "prediction and truth differ in grid or schema");
  }
}

template <typename T>
double vrmse_range(const FieldSet<T>& pred, const FieldSet<T>& truth, int first, int count, double epsilon) {
  const double cells = static_cast<double>(truth.grid().cells());
  double err = 0.0;
  double var = 0.0;
  for (int c = first; c < first + count; ++c) {
    const auto u = pred.plane(c);
    const auto v = truth.plane(c);
    double mean = 0.0;
    for (T x : v) mean += x;
    mean /= cells;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double d = static_cast<double>(u[i]) - static_cast<double>(v[i]);
      const double m = static_cast<double>(v[i]) - mean;
      err += d * d;
      var += m * m;
    }
  }
  return std::sqrt((err / cells) / (var / cells + epsilon));
}

std::string component_name(const ChannelGroup& g, int c) {
  switch (g.kind) {
    case ChannelKind::kScalar: return g.name;
    case ChannelKind::kVector: return g.name + "." + kVectorSuffix[c];
    case ChannelKind::kTensor: return g.name + "." + kTensorSuffix[c];
  }
  return g.name;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Error(ErrorCode::kIo, "bad number '" + s + "' in CSV");
  return v;
}

int parse_int(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw Error(ErrorCode::kIo, "bad integer '" + s + "' in CSV");
  return v;
}

void check_field(const std::string& s) {
  if (s.find_first_of(",\n\r") != std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "CSV field contains a separator: '" + s + "'");
  }
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, const std::string& header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw Error(ErrorCode::kIo, path.string() + ": expected header '" + header + "'");
  }
  const std::size_t columns = split_csv(header).size();
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() != columns) throw Error(ErrorCode::kIo, path.string() + ": wrong column count");
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

}  // namespace

template <typename T>
double vrmse(const FieldSet<T>& pred, const FieldSet<T>& truth, std::string_view channel, double epsilon) {
  check_same_shape(pred, truth);
  const ChannelGroup& g = truth.schema().find(channel);
  return vrmse_range(pred, truth, g.offset, g.components(), epsilon);
}

template <typename T>
double vrmse_component(const FieldSet<T>& pred, const FieldSet<T>& truth, int component, double epsilon) {
  check_same_shape(pred, truth);
  if (component < 0 || component >= truth.components()) {
    throw Error(ErrorCode::kUnknownChannel, "component " + std::to_string(component) + " out of range");
  }
  return vrmse_range(pred, truth, component, 1, epsilon);
}

double stable_sum(std::span<const double> values) {
  double sum = 0.0;
  double compensation = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      compensation += (sum - t) + v;
    } else {
      compensation += (v - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

std::vector<RolloutRow> rollout_sums(std::span<const LossRow> rows, int steps) {
  // (variant, start) blocks in first-seen order, variables in first-seen order.
  std::vector<std::pair<std::string, int>> blocks;
  std::map<std::pair<std::string, int>, std::vector<std::string>> variables;
  std::map<std::tuple<std::string, int, std::string, int>, double> value;
  for (const auto& r : rows) {
    const auto block = std::make_pair(r.variant, r.start);
    auto& vars = variables[block];
    if (vars.empty()) blocks.push_back(block);
    if (std::find(vars.begin(), vars.end(), r.variable) == vars.end()) vars.push_back(r.variable);
    value[{r.variant, r.start, r.variable, r.step}] = r.vrmse;
  }

  std::vector<RolloutRow> out;
  for (const auto& block : blocks) {
    const auto& vars = variables[block];
    std::vector<double> step_means;
    std::vector<std::vector<double>> per_var(vars.size());
    for (int step = 1; step <= steps; ++step) {
      std::vector<double> at_step;
      for (std::size_t v = 0; v < vars.size(); ++v) {
        const auto it = value.find({block.first, block.second, vars[v], step});
        if (it == value.end()) {
          throw Error(ErrorCode::kMisalignment, "variant " + block.first + " start " + std::to_string(block.second) +
                                                    " lacks step " + std::to_string(step) + " for " + vars[v]);
        }
        at_step.push_back(it->second);
        per_var[v].push_back(it->second);
      }
      step_means.push_back(stable_sum(at_step) / static_cast<double>(at_step.size()));
    }
    for (std::size_t v = 0; v < vars.size(); ++v) out.push_back({block.first, block.second, vars[v], stable_sum(per_var[v])});
    out.push_back({block.first, block.second, std::string(kMeanVariable), stable_sum(step_means)});
  }
  return out;
}

template <typename T>
LossTable evaluate_rollout(const Trajectory<T>& pred, const Trajectory<T>& truth, const std::string& variant,
                           int start, const MetricConfig& cfg) {
  if (pred.grid() != truth.grid() || pred.schema() != truth.schema()) {
    throw Error(ErrorCode::kShapeMismatch, "prediction and truth trajectories differ in grid or schema");
  }
  if (pred[0].time_index() != start + 1) {
    throw Error(ErrorCode::kMisalignment, "prediction starts at time " + std::to_string(pred[0].time_index()) +
                                              ", expected " + std::to_string(start + 1));
  }
  if (pred.size() < cfg.rollout_steps) {
    throw Error(ErrorCode::kInvalidArgument, "rollout of " + std::to_string(pred.size()) +
                                                 " steps is shorter than the rollout sum window of " +
                                                 std::to_string(cfg.rollout_steps));
  }
  LossTable table;
  for (int i = 0; i < pred.size(); ++i) {
    const FieldSet<T>& p = pred[i];
    const FieldSet<T>& t = truth.at_time(p.time_index());
    const int step = i + 1;
    for (const auto& g : truth.schema().groups()) {
      if (cfg.per_component) {
        for (int c = 0; c < g.components(); ++c) {
          table.steps.push_back(
              {variant, start, step, component_name(g, c), vrmse_component(p, t, g.offset + c, cfg.epsilon)});
        }
      } else {
        table.steps.push_back({variant, start, step, g.name, vrmse(p, t, g.name, cfg.epsilon)});
      }
    }
  }
  table.rollouts = rollout_sums(table.steps, cfg.rollout_steps);
  return table;
}

LossTable aggregate(std::span<const TrajectoryLosses> tables, int rollout_steps) {
  using Key = std::tuple<std::string, int, int, std::string>;
  std::vector<Key> order;
  std::map<Key, std::vector<double>> values;
  for (const auto& t : tables) {
    if (t.excluded) continue;
    for (const auto& r : t.table.steps) {
      Key key{r.variant, r.start, r.step, r.variable};
      auto& bucket = values[key];
      if (bucket.empty()) order.push_back(key);
      bucket.push_back(r.vrmse);
    }
  }
  if (order.empty()) throw Error(ErrorCode::kEmptyInput, "no loss tables left to aggregate");
  LossTable out;
  for (const auto& key : order) {
    const auto& bucket = values[key];
    out.steps.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), std::get<3>(key),
                         stable_sum(bucket) / static_cast<double>(bucket.size())});
  }
  out.rollouts = rollout_sums(out.steps, rollout_steps);
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw Error(ErrorCode::kInvalidArgument, "cannot format number");
  return std::string(buf, ptr);
}

void write_loss_csv(const std::filesystem::path& path, std::span<const LossRow> rows) {
  auto out = open_for_write(path);
  out << "variant,start,step,variable,vrmse\n";
  for (const auto& r : rows) {
    check_field(r.variant);
    check_field(r.variable);
    out << r.variant << ',' << r.start << ',' << r.step << ',' << r.variable << ',' << format_double(r.vrmse) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

void write_rollout_csv(const std::filesystem::path& path, std::span<const RolloutRow> rows) {
  auto out = open_for_write(path);
  out << "variant,start,variable,rollout\n";
  for (const auto& r : rows) {
    check_field(r.variant);
    check_field(r.variable);
    out << r.variant << ',' << r.start << ',' << r.variable << ',' << format_double(r.rollout) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<LossRow> read_loss_csv(const std::filesystem::path& path) {
  std::vector<LossRow> rows;
  for (const auto& c : read_csv(path, "variant,start,step,variable,vrmse")) {
    rows.push_back({c[0], parse_int(c[1]), parse_int(c[2]), c[3], parse_double(c[4])});
  }
  return rows;
}

std::vector<RolloutRow> read_rollout_csv(const std::filesystem::path& path) {
  std::vector<RolloutRow> rows;
  for (const auto& c : read_csv(path, "variant,start,variable,rollout")) {
    rows.push_back({c[0], parse_int(c[1]), c[2], parse_double(c[3])});
  }
  return rows;
}

std::string markdown_table(const LossTable& table, std::span<const int> steps) {
  if (table.steps.empty() && table.rollouts.empty()) throw Error(ErrorCode::kEmptyInput, "no rows to report");

  std::vector<int> starts;
  std::map<int, std::vector<std::string>> variants;
  std::map<std::tuple<std::string, int, int>, std::vector<double>> step_values;
  std::map<std::pair<std::string, int>, double> rollout;
  auto note_block = [&](const std::string& variant, int start) {
    if (std::find(starts.begin(), starts.end(), start) == starts.end()) starts.push_back(start);
    auto& v = variants[start];
    if (std::find(v.begin(), v.end(), variant) == v.end()) v.push_back(variant);
  };
  for (const auto& r : table.steps) {
    note_block(r.variant, r.start);
    step_values[{r.variant, r.start, r.step}].push_back(r.vrmse);
  }
  for (const auto& r : table.rollouts) {
    if (r.variable != kMeanVariable) continue;
    note_block(r.variant, r.start);
    rollout[{r.variant, r.start}] = r.rollout;
  }

  std::ostringstream md;
  md << "| Model | Start |";
  for (int s : steps) md << ' ' << s << " |";
  md << " Rollout |\n|:--|--:|";
  for (std::size_t i = 0; i < steps.size(); ++i) md << "--:|";
  md << "--:|\n";

  for (int start : starts) {
    const auto& names = variants[start];
    const std::size_t columns = steps.size() + 1;
    std::vector<std::vector<double>> cells(names.size(), std::vector<double>(columns));
    for (std::size_t v = 0; v < names.size(); ++v) {
      for (std::size_t s = 0; s < steps.size(); ++s) {
        const auto it = step_values.find({names[v], start, steps[s]});
        if (it == step_values.end()) {
          throw Error(ErrorCode::kMisalignment, "no step " + std::to_string(steps[s]) + " for variant " + names[v] +
                                                    " at start " + std::to_string(start));
        }
        cells[v][s] = stable_sum(it->second) / static_cast<double>(it->second.size());
      }
      const auto it = rollout.find({names[v], start});
      if (it == rollout.end()) {
        throw Error(ErrorCode::kMisalignment, "no rollout sum for variant " + names[v]);
      }
      cells[v][steps.size()] = it->second;
    }
    std::vector<double> minima(columns, std::numeric_limits<double>::infinity());
    for (const auto& row : cells)
      for (std::size_t c = 0; c < columns; ++c) minima[c] = std::min(minima[c], row[c]);

    for (std::size_t v = 0; v < names.size(); ++v) {
      md << "| " << names[v] << " | " << start << " |";
      for (std::size_t c = 0; c < columns; ++c) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", cells[v][c]);
        const bool bold = names.size() > 1 && cells[v][c] == minima[c];
        md << ' ' << (bold ? "**" : "") << buf << (bold ? "**" : "") << " |";
      }
      md << '\n';
    }
  }
  return md.str();
}

template double vrmse(const FieldSet<float>&, const FieldSet<float>&, std::string_view, double);
template double vrmse(const FieldSet<double>&, const FieldSet<double>&, std::string_view, double);
template double vrmse_component(const FieldSet<float>&, const FieldSet<float>&, int, double);
template double vrmse_component(const FieldSet<double>&, const FieldSet<double>&, int, double);
template LossTable evaluate_rollout(const Trajectory<float>&, const Trajectory<float>&, const std::string&, int,
                                    const MetricConfig&);
template LossTable evaluate_rollout(const Trajectory<double>&, const Trajectory<double>&, const std::string&, int,
                                    const MetricConfig&);

}  // namespace gavg
