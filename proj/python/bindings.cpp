#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rshare/analytic.hpp"
#include "rshare/cleanup.hpp"
#include "rshare/harness.hpp"
#include "rshare/matrix_games.hpp"
#include "rshare/participation.hpp"
#include "rshare/plot.hpp"
#include "rshare/training.hpp"

namespace py = pybind11;
using namespace rshare;

namespace {

std::vector<std::vector<double>> rows(const ShareAllocation& a) {
  std::vector<std::vector<double>> out(a.agents(), std::vector<double>(a.agents()));
  for (std::size_t i = 0; i < a.agents(); ++i)
    for (std::size_t j = 0; j < a.agents(); ++j) out[i][j] = a(i, j);
  return out;
}

ipd::Variant variant_from(const std::string& name) {
  if (name == "i") return ipd::Variant::kNoParticipation;
  if (name == "ii") return ipd::Variant::kEqualSplit;
  if (name == "iii") return ipd::Variant::kChooseShare;
  if (name == "iv") return ipd::Variant::kTrade50;
  if (name == "v") return ipd::Variant::kTrade10;
  throw std::invalid_argument("unknown variant '" + name + "' (expected i, ii, iii, iv or v)");
}

TradeIntent intent_from(const std::string& name) {
  if (name == "hold") return TradeIntent::kHold;
  if (name == "buy_own") return TradeIntent::kBuyOwn;
  if (name == "buy_other") return TradeIntent::kBuyOther;
  throw std::invalid_argument("unknown trade intent '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_rshare, m) {
  m.doc() = "Reward-sharing mechanisms for sequential social dilemmas";

  // Participation mechanisms. Allocations are lists of rows: row i holds what
  // agent i receives from each owner.
  m.def("apply_participation",
        [](const std::vector<std::vector<double>>& allocation, const std::vector<double>& rewards) {
          return apply_participation(ShareAllocation::from_rows(allocation), rewards);
        },
        py::arg("allocation"), py::arg("rewards"));
  m.def("equal_split", [](const std::vector<double>& r) { return equal_split(r); },
        py::arg("rewards"));
  m.def("pre_trade_resolve",
        [](const std::vector<int>& choices) { return rows(pre_trade_resolve(choices)); },
        py::arg("choices"));
  m.def("joins_pool", &joins_pool, py::arg("choice"));
  m.def("common_pool_resolve",
        [](const std::vector<bool>& participants, const std::vector<double>& rewards) {
          return common_pool_resolve(participants, rewards);
        },
        py::arg("participants"), py::arg("rewards"));
  m.def("execute_trade",
        [](int ticks_per_unit, std::array<int, 2> own_ticks, std::array<std::string, 2> intents) {
          const auto r = execute_trade(TickShares(ticks_per_unit, own_ticks),
                                       {intent_from(intents[0]), intent_from(intents[1])});
          return py::make_tuple(std::array<int, 2>{r.shares.own_ticks(0), r.shares.own_ticks(1)},
                                to_string(r.outcome));
        },
        py::arg("ticks_per_unit"), py::arg("own_ticks"), py::arg("intents"),
        "Returns the new own ticks and the trade outcome.");

  // Iterated prisoner's dilemma.
  m.def("pd_step",
        [](bool cooperate1, bool cooperate2) {
          return ipd::pd_step(cooperate1 ? ipd::Move::kCooperate : ipd::Move::kDefect,
                              cooperate2 ? ipd::Move::kCooperate : ipd::Move::kDefect);
        },
        py::arg("cooperate1"), py::arg("cooperate2"));
  m.def("ipd_variant",
        [](const std::string& name) {
          const auto spec = ipd::VariantSpec::preset(variant_from(name));
          py::dict d;
          d["states"] = spec.state_count();
          d["actions"] = spec.action_count();
          d["episode_length"] = spec.episode_length;
          d["ticks_per_unit"] = spec.ticks_per_unit;
          return d;
        },
        py::arg("variant"));
  m.def("train_ipd",
        [](const std::string& variant, long episodes, std::uint64_t seed, int run) {
          IpdTrainConfig cfg;
          cfg.variant = variant_from(variant);
          cfg.episodes = episodes;
          IpdRunResult result;
          {
            py::gil_scoped_release release;
            result = train_ipd(cfg, seed, run);
          }
          py::dict d;
          std::vector<double> joint, own, c1, c2;
          for (const auto& e : result.episodes) {
            joint.push_back(e.joint_reward);
            own.push_back(e.own_share);
            c1.push_back(e.cooperation[0]);
            c2.push_back(e.cooperation[1]);
          }
          d["joint_reward"] = joint;
          d["own_share"] = own;
          d["cooperation"] = py::make_tuple(c1, c2);
          return d;
        },
        py::arg("variant"), py::arg("episodes"), py::arg("seed") = 1, py::arg("run") = 0,
        "Per-episode joint reward, own share and cooperation of both agents.");

  // Cleanup.
  m.def("cleanup_map",
        [](const std::string& which) {
          if (which != "small" && which != "big")
            throw std::invalid_argument("map must be 'small' or 'big'");
          const auto cfg = cleanup::Config::preset(which == "small" ? cleanup::MapId::kSmall7x7
                                                                    : cleanup::MapId::kBig10x10);
          return cleanup::dump(cleanup::reset(cfg));
        },
        py::arg("map") = "small");
  m.def("apple_probability",
        [](double waste_fraction) {
          return cleanup::apple_probability(cleanup::Config{}, waste_fraction);
        },
        py::arg("waste_fraction"));

  // Closed-form dynamics.
  py::enum_<analytic::PriceMode>(m, "PriceMode")
      .value("none", analytic::PriceMode::kNone)
      .value("transfer", analytic::PriceMode::kPerUnitTransfer)
      .value("bracket", analytic::PriceMode::kLiteralBracket);
  m.def("joint_probs", &analytic::joint_probs, py::arg("coop1"), py::arg("coop2"));
  m.def("reward_vectors", &analytic::reward_vectors, py::arg("m"), py::arg("n"));
  m.def("value", &analytic::value, py::arg("coop1"), py::arg("coop2"), py::arg("m"),
        py::arg("n"), py::arg("gamma"), py::arg("agent"));
  m.def("broker_price", &analytic::broker_price, py::arg("coop1"), py::arg("coop2"),
        py::arg("gamma"));
  m.def("simulate",
        [](int runs, int episodes, analytic::PriceMode price, std::uint64_t seed) {
          analytic::SimulationConfig cfg;
          cfg.runs = runs;
          cfg.episodes = episodes;
          cfg.price = price;
          cfg.seed = seed;
          py::list out;
          for (const auto& p : analytic::simulate(cfg)) {
            py::dict d;
            d["run"] = p.run;
            d["episode"] = p.episode;
            d["m"] = p.m;
            d["n"] = p.n;
            d["coop1"] = p.coop1;
            d["coop2"] = p.coop2;
            d["price"] = p.price;
            d["joint_reward"] = p.joint_reward;
            out.append(d);
          }
          return out;
        },
        py::arg("runs") = 20, py::arg("episodes") = 100,
        py::arg("price") = analytic::PriceMode::kPerUnitTransfer, py::arg("seed") = 0);

  // Harness.
  m.def("list_experiments", [] {
    std::vector<std::string> ids;
    for (const auto& p : harness::presets()) ids.push_back(p.id);
    return ids;
  });
  m.def("run_experiment",
        [](const std::string& experiment, const std::filesystem::path& out, int seeds,
           long episodes, int workers, const std::vector<std::string>& overrides) {
          auto cfg = harness::ExperimentConfig::from_preset(experiment);
          for (const auto& o : overrides) cfg.set(o);
          if (seeds > 0) cfg.seeds = seeds;
          if (episodes > 0) cfg.episodes = episodes;
          cfg.workers = workers;
          cfg.out = out;
          py::gil_scoped_release release;
          return harness::run(cfg);
        },
        py::arg("experiment"), py::arg("out"), py::arg("seeds") = 0, py::arg("episodes") = 0,
        py::arg("workers") = 1, py::arg("overrides") = std::vector<std::string>{},
        "Runs a preset and returns its output directory.");
  m.def("read_metrics",
        [](const std::filesystem::path& path) {
          py::list out;
          for (const auto& r : harness::read_metrics(path))
            out.append(py::make_tuple(r.experiment, r.seed, r.episode, r.agent, r.metric, r.value));
          return out;
        },
        py::arg("path"));
  m.def("plot_directory", &plot::plot_directory, py::arg("directory"), py::arg("metric") = "");
}
