#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rshare/harness.hpp"
#include "rshare/plot.hpp"

namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reward-share participation experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "train or simulate one experiment preset");
  std::string exp;
  int seeds = 0;
  long episodes = 0;
  int workers = 1;
  std::string out;
  std::string config_file;
  std::vector<std::string> overrides;
  run->add_option("--exp", exp, "experiment id (see `list`)")->required();
  auto* seeds_opt = run->add_option("--seeds", seeds, "number of seeds")->check(CLI::PositiveNumber);
  auto* episodes_opt =
      run->add_option("--episodes", episodes, "episode budget per seed")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "result directory")->required();
  auto* workers_opt =
      run->add_option("--workers", workers, "concurrent runs")->check(CLI::PositiveNumber);
  run->add_option("--config", config_file, "file of key=value lines");
  run->add_option("--set", overrides, "key=value override, repeatable");

  auto* plot = app.add_subcommand("plot", "render SVG charts from a result directory");
  std::string in;
  std::string metric;
  plot->add_option("--in", in, "result directory holding metrics.csv")->required();
  plot->add_option("--metric", metric, "plot only this metric");

  auto* list = app.add_subcommand("list", "show experiment presets");
  bool show_keys = false;
  list->add_flag("--keys", show_keys, "also show every config key with its default");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (*list) {
      std::cout << rshare::harness::list_experiments();
      if (show_keys) {
        std::cout << "\nconfig keys (defaults for ipd-i):\n"
                  << rshare::harness::ExperimentConfig::from_preset("ipd-i").snapshot();
      }
      return 0;
    }
    if (*plot) {
      for (const auto& path : rshare::plot::plot_directory(in, metric))
        std::cout << path.string() << '\n';
      return 0;
    }

    auto cfg = rshare::harness::ExperimentConfig::from_preset(exp);
    if (!config_file.empty()) cfg.load_file(config_file);
    for (const auto& kv : overrides) cfg.set(kv);
    if (cfg.experiment != exp)
      throw std::invalid_argument("--exp and the config's experiment key disagree");
    if (seeds_opt->count()) cfg.seeds = seeds;
    if (episodes_opt->count()) cfg.episodes = episodes;
    if (workers_opt->count()) cfg.workers = workers;
    cfg.out = out;
    cfg.validate();
    rshare::harness::run(cfg, &std::cerr);
    std::cout << (cfg.out / "metrics.csv").string() << '\n';
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
