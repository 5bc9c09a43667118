#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tiknest/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Inertial gradient method with Tikhonov regularization: experiments and checks"};
  app.require_subcommand(1);
  app.fallthrough();

  tiknest::CommandOptions opts;
  std::optional<long long> iters;
  std::string format = "csv";
  std::string step;
  app.add_option("--iters", iters, "Override the iteration budget")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "csv+svg"}));
  app.add_flag("--quiet", opts.quiet, "Only print warnings and failures");
  app.add_option("--step", step, "Step size for reproduced figures (number or auto)");

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("config", config_path, "Config file (JSON)")->required();
  auto* check = app.add_subcommand("check", "Check schedule hypotheses and lemmas for a config");
  check->add_option("config", config_path, "Config file (JSON)")->required();
  std::string figure;
  std::string out_dir;
  auto* reproduce = app.add_subcommand("reproduce", "Reproduce a figure (fig1, fig2, fig3a, fig3b)");
  reproduce->add_option("figure", figure, "Figure tag")->required();
  reproduce->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : tiknest::kExitConfigError;
  }

  if (iters) opts.iters = static_cast<tiknest::Index>(*iters);
  opts.svg = format == "csv+svg";
  if (!step.empty()) {
    if (step == "auto") {
      opts.step = 0.0;
    } else {
      try {
        std::size_t used = 0;
        opts.step = std::stod(step, &used);
        if (used != step.size()) throw std::invalid_argument(step);
      } catch (const std::exception&) {
        std::cerr << "error: --step expects a number or auto\n";
        return tiknest::kExitConfigError;
      }
    }
  }

  if (*run) return tiknest::cmd_run(config_path, opts, std::cout, std::cerr);
  if (*check) return tiknest::cmd_check(config_path, opts, std::cout, std::cerr);
  return tiknest::cmd_reproduce(figure, out_dir, opts, std::cout, std::cerr);
}
