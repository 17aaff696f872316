// gavg: generate Gray-Scott data, train the stencil surrogate, evaluate plain
// and group-averaged rollouts, and render loss tables.
//
// Exit codes: 0 success, 1 usage error, 2 runtime or numerical failure.

#include <fstream>
#include <iostream>
#include <memory>

#include "CLI11.hpp"
#include "gavg/bench.hpp"
#include "json.hpp"

namespace {

// Reads {"<subcommand>": {"<option>": value, ...}} JSON files for --config.
// Options given on the command line take precedence.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError("config", std::string("invalid JSON config: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  }

  static void collect(const nlohmann::json& j, std::vector<std::string> parents, std::vector<CLI::ConfigItem>& out) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto nested = parents;
        nested.push_back(key);
        collect(value, nested, out);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& e : value) item.inputs.push_back(scalar(e));
      } else {
        item.inputs.push_back(scalar(value));
      }
      out.push_back(std::move(item));
    }
  }
};

int exit_code_for(const gavg::Error& e) {
  switch (e.code()) {
    case gavg::ErrorCode::kInvalidArgument:
    case gavg::ErrorCode::kEmptyInput:
      return 1;
    default:
      return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Test-time group averaging benchmark for autoregressive grid surrogates"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file; command-line flags take precedence");

  // generate
  gavg::DatasetConfig dataset;
  int grid_size = 64;
  double frame_interval = 10.0;
  std::string ic_mix = "alternate";
  std::string data_out;
  auto* generate = app.add_subcommand("generate", "Simulate a Gray-Scott dataset");
  generate->configurable();
  generate->add_option("--grid", grid_size, "Cells per side of the square periodic grid")->capture_default_str();
  generate->add_option("--trajectories", dataset.trajectories, "Number of trajectories")->capture_default_str();
  generate->add_option("--frames", dataset.frames, "Saved frames per trajectory")->capture_default_str();
  generate->add_option("--seed", dataset.seed, "Master seed; trajectory i uses seed + i")->capture_default_str();
  generate->add_option("--test-fraction", dataset.test_fraction, "Fraction of trajectories held out")
      ->capture_default_str();
  generate->add_option("--frame-interval", frame_interval, "Simulated time between saved frames")
      ->capture_default_str();
  generate->add_option("--feed", dataset.params.feed, "Feed rate f")->capture_default_str();
  generate->add_option("--kill", dataset.params.kill, "Kill rate k")->capture_default_str();
  generate->add_option("--diff-a", dataset.params.diff_a, "Diffusion of species A")->capture_default_str();
  generate->add_option("--diff-b", dataset.params.diff_b, "Diffusion of species B")->capture_default_str();
  generate->add_option("--ic", ic_mix, "Initial conditions: alternate, fourier or gaussians")
      ->check(CLI::IsMember({"alternate", "fourier", "gaussians"}))
      ->capture_default_str();
  generate->add_flag("--double", dataset.store_double, "Store frames as float64");
  generate->add_option("--out", data_out, "Dataset directory")->required();

  // train
  gavg::bench::TrainOptions train;
  std::string train_dataset;
  std::string model_out;
  std::string loss_curve;
  auto* train_cmd = app.add_subcommand("train", "Train the stencil surrogate on a dataset's train split");
  train_cmd->configurable();
  train_cmd->add_option("--dataset", train_dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  train_cmd->add_option("--model", model_out, "Output model file")->required();
  train_cmd->add_option("--loss-curve", loss_curve, "Loss-curve CSV (default <model>.loss.csv)");
  train_cmd->add_option("--k", train.model.k, "History length")->capture_default_str();
  train_cmd->add_option("--radius", train.model.radius, "Stencil radius")->capture_default_str();
  train_cmd->add_option("--hidden", train.model.hidden, "Hidden units (0 = linear)")->capture_default_str();
  train_cmd->add_flag("--residual", train.model.residual, "Predict increments over the last frame");
  train_cmd->add_option("--model-seed", train.model.seed, "Weight initialization seed")->capture_default_str();
  train_cmd->add_option("--lr", train.train.lr, "Learning rate")->capture_default_str();
  train_cmd->add_option("--momentum", train.train.momentum, "SGD momentum")->capture_default_str();
  train_cmd->add_option("--epochs", train.train.epochs, "Epochs")->capture_default_str();
  train_cmd->add_option("--updates", train.train.updates_per_epoch, "Updates per epoch")->capture_default_str();
  train_cmd->add_option("--batch", train.train.batch, "Cells per update")->capture_default_str();
  train_cmd->add_option("--seed", train.train.seed, "Sampling seed")->capture_default_str();
  train_cmd->add_flag("--include-steady", train.include_steady, "Train on steady-state flagged runs too");

  // eval
  gavg::bench::EvalOptions eval;
  std::string eval_dataset;
  std::string eval_model;
  std::string eval_out;
  auto* eval_cmd = app.add_subcommand("eval", "Score baseline and group-averaged rollouts on the test split");
  eval_cmd->configurable();
  eval_cmd->add_option("--dataset", eval_dataset, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--model", eval_model, "Model file, or 'persistence'")->required();
  eval_cmd->add_option("--groups", eval.groups, "Variants, e.g. d4,torus:mc:n=1")->delimiter(',');
  eval_cmd->add_option("--starts", eval.starts, "Start offsets")->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--horizon", eval.horizon, "Rollout steps")->capture_default_str();
  eval_cmd->add_option("--seed", eval.seed, "Base seed for Monte-Carlo draws")->capture_default_str();
  eval_cmd->add_option("--out", eval_out, "Output directory")->required();
  eval_cmd->add_flag("--dump-fields", eval.dump_fields, "Write predicted and true fields");
  eval_cmd->add_flag("--include-steady", eval.include_steady, "Evaluate steady-state flagged runs too");
  eval_cmd->add_flag("--per-component", eval.metric.per_component, "Score vector/tensor components separately");

  // report
  std::string report_dir;
  std::string report_out;
  std::vector<int> report_steps{1, 5, 10};
  auto* report = app.add_subcommand("report", "Render an eval directory as a Markdown table");
  report->configurable();
  report->add_option("--eval", report_dir, "Eval output directory")->required()->check(CLI::ExistingDirectory);
  report->add_option("--steps", report_steps, "Step columns")->delimiter(',')->capture_default_str();
  report->add_option("--out", report_out, "Also write the table to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*generate) {
      dataset.grid = gavg::GridSpec{grid_size, grid_size, 1.0 / grid_size, 1.0 / grid_size,
                                    gavg::Boundary::kPeriodicBoth};
      dataset.params = gavg::GrayScottParams::with_frame_interval(dataset.grid, frame_interval, dataset.params);
      dataset.ic_mix = ic_mix == "fourier"     ? gavg::InitialConditionMix::kFourier
                       : ic_mix == "gaussians" ? gavg::InitialConditionMix::kGaussians
                                               : gavg::InitialConditionMix::kAlternate;
      gavg::bench::run_generate(dataset, data_out, std::cout);
    } else if (*train_cmd) {
      train.dataset = train_dataset;
      train.model_out = model_out;
      train.loss_curve_csv = loss_curve;
      gavg::bench::run_train(train, std::cout);
    } else if (*eval_cmd) {
      eval.dataset = eval_dataset;
      eval.model = eval_model;
      eval.out_dir = eval_out;
      gavg::bench::run_eval(eval, std::cout);
    } else if (*report) {
      const std::string table = gavg::bench::run_report(report_dir, report_steps);
      std::cout << table;
      if (!report_out.empty()) {
        std::ofstream out(report_out, std::ios::binary | std::ios::trunc);
        out << table;
        if (!out) throw gavg::Error(gavg::ErrorCode::kIo, "cannot write " + report_out);
      }
    }
  } catch (const gavg::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
