#include "rshare/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace rshare::harness {

namespace fs = std::filesystem;

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"ipd-i", Family::kIpd, "(i)", "IPD, no participation", 5, 10000},
      {"ipd-ii", Family::kIpd, "(ii)", "IPD, rewards always split equally", 5, 50000},
      {"ipd-iii", Family::kIpd, "(iii)", "IPD, per-step choice to share half the reward", 5,
       50000},
      {"ipd-iv", Family::kIpd, "(iv)", "IPD, trading reward shares in 50% steps", 10, 30000},
      {"ipd-v", Family::kIpd, "(v)", "IPD, trading reward shares in 10% steps", 10, 30000},
      {"cleanup2-none", Family::kCleanup, "(i)", "Cleanup 7x7, two agents, no participation",
       5, 50000},
      {"cleanup2-equal", Family::kCleanup, "(iii)", "Cleanup 7x7, two agents, equal split", 5,
       50000},
      {"cleanup2-pretrade", Family::kCleanup, "(iv)",
       "Cleanup 7x7, two agents, shares fixed in a pre-trade step", 5, 50000},
      {"cleanup3-none", Family::kCleanup, "(i)", "Cleanup 10x10, three agents, no participation",
       5, 50000},
      {"cleanup3-equal", Family::kCleanup, "(iii)", "Cleanup 10x10, three agents, equal split",
       5, 50000},
      {"cleanup3-pretrade", Family::kCleanup, "(iv)",
       "Cleanup 10x10, three agents, shares fixed in a pre-trade step", 5, 50000},
      {"cleanup3-pool", Family::kCleanup, "(v)",
       "Cleanup 10x10, three agents, opt-in common reward pool", 5, 50000},
      {"analytic", Family::kAnalytic, "theory",
       "Broker-priced share trading with gradient policy updates", 20, 100},
  };
  return table;
}

const Preset& find_preset(const std::string& id) {
  for (const auto& p : presets())
    if (p.id == id) return p;
  throw std::invalid_argument("unknown experiment '" + id + "' (see `list`)");
}

std::string list_experiments() {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-18s %-8s %6s %9s  %s\n", "id", "variant", "seeds",
                "episodes", "description");
  out << line;
  for (const auto& p : presets()) {
    std::snprintf(line, sizeof line, "%-18s %-8s %6d %9ld  %s\n", p.id.c_str(),
                  p.variant.c_str(), p.default_seeds, p.default_episodes,
                  p.description.c_str());
    out << line;
  }
  return out.str();
}

namespace {

ipd::Variant ipd_variant(const std::string& id) {
  if (id == "ipd-i") return ipd::Variant::kNoParticipation;
  if (id == "ipd-ii") return ipd::Variant::kEqualSplit;
  if (id == "ipd-iii") return ipd::Variant::kChooseShare;
  if (id == "ipd-iv") return ipd::Variant::kTrade50;
  return ipd::Variant::kTrade10;
}

cleanup::Mechanism cleanup_mechanism(const std::string& id) {
  const std::string tail = id.substr(id.find('-') + 1);
  if (tail == "equal") return cleanup::Mechanism::kEqualSplit;
  if (tail == "pretrade") return cleanup::Mechanism::kPreTrade;
  if (tail == "pool") return cleanup::Mechanism::kCommonPool;
  return cleanup::Mechanism::kNone;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw std::invalid_argument(key + ": expected a number, got '" + text + "'");
  return v;
}

long parse_long(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size())
    throw std::invalid_argument(key + ": expected an integer, got '" + text + "'");
  return v;
}

std::string price_name(analytic::PriceMode m) {
  switch (m) {
    case analytic::PriceMode::kNone: return "none";
    case analytic::PriceMode::kPerUnitTransfer: return "transfer";
    case analytic::PriceMode::kLiteralBracket: return "bracket";
  }
  return "transfer";
}

analytic::PriceMode parse_price(const std::string& text) {
  if (text == "none") return analytic::PriceMode::kNone;
  if (text == "transfer") return analytic::PriceMode::kPerUnitTransfer;
  if (text == "bracket") return analytic::PriceMode::kLiteralBracket;
  throw std::invalid_argument("analytic.price: expected none, transfer or bracket");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Knob {
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> put;
};

#define RSHARE_REAL(name, field)                                                     \
  Knob {                                                                             \
    name, [](const ExperimentConfig& c) { return format_number(c.field); },          \
        [](ExperimentConfig& c, const std::string& v) { c.field = parse_double(name, v); } \
  }
#define RSHARE_INT(name, field, type)                                                \
  Knob {                                                                             \
    name, [](const ExperimentConfig& c) { return std::to_string(c.field); },         \
        [](ExperimentConfig& c, const std::string& v) {                              \
          c.field = static_cast<type>(parse_long(name, v));                          \
        }                                                                            \
  }

const std::vector<Knob>& knobs() {
  static const std::vector<Knob> table = {
      Knob{"experiment", [](const ExperimentConfig& c) { return c.experiment; },
           [](ExperimentConfig& c, const std::string& v) {
             find_preset(v);
             c.experiment = v;
           }},
      RSHARE_INT("seeds", seeds, int),
      RSHARE_INT("episodes", episodes, long),
      Knob{"seed", [](const ExperimentConfig& c) { return std::to_string(c.master_seed); },
           [](ExperimentConfig& c, const std::string& v) {
             const long s = parse_long("seed", v);
             if (s < 0) throw std::invalid_argument("seed must be non-negative");
             c.master_seed = static_cast<std::uint64_t>(s);
           }},
      RSHARE_INT("workers", workers, int),
      RSHARE_INT("log_every", log_every, int),
      RSHARE_REAL("ipd.actor_step", ipd.actor_step),
      RSHARE_REAL("ipd.critic_step", ipd.critic_step),
      RSHARE_REAL("ipd.discount", ipd.discount),
      RSHARE_REAL("explore.start", exploration.start),
      RSHARE_REAL("explore.end", exploration.end),
      RSHARE_REAL("explore.decay_fraction", exploration.decay_fraction),
      RSHARE_INT("cleanup.hidden", cleanup.hidden, std::size_t),
      RSHARE_REAL("cleanup.learning_rate", cleanup.learning_rate),
      RSHARE_REAL("cleanup.value_weight", cleanup.value_weight),
      RSHARE_REAL("cleanup.entropy_weight", cleanup.entropy_weight),
      RSHARE_REAL("cleanup.discount", cleanup.discount),
      RSHARE_REAL("cleanup.gae_lambda", cleanup.gae_lambda),
      RSHARE_REAL("cleanup.init_scale", cleanup.init_scale),
      RSHARE_INT("cleanup.horizon", cleanup.env.horizon, int),
      RSHARE_REAL("cleanup.apple_spawn", cleanup.env.apple_spawn),
      RSHARE_REAL("cleanup.waste_spawn", cleanup.env.waste_spawn),
      RSHARE_REAL("cleanup.depletion_threshold", cleanup.env.depletion_threshold),
      RSHARE_REAL("analytic.gamma", theory.gamma),
      RSHARE_REAL("analytic.alpha", theory.alpha),
      RSHARE_REAL("analytic.tick", theory.tick),
      RSHARE_REAL("analytic.cap", theory.cap),
      RSHARE_REAL("analytic.init_low", theory.init_low),
      RSHARE_REAL("analytic.init_high", theory.init_high),
      Knob{"analytic.price", [](const ExperimentConfig& c) { return price_name(c.theory.price); },
           [](ExperimentConfig& c, const std::string& v) { c.theory.price = parse_price(v); }},
  };
  return table;
}

#undef RSHARE_REAL
#undef RSHARE_INT

}  // namespace

ExperimentConfig ExperimentConfig::from_preset(const std::string& id) {
  const Preset& p = find_preset(id);
  ExperimentConfig cfg;
  cfg.experiment = p.id;
  cfg.seeds = p.default_seeds;
  cfg.episodes = p.default_episodes;
  if (p.family == Family::kCleanup)
    cfg.cleanup.env = cleanup::Config::preset(id.rfind("cleanup3", 0) == 0
                                                  ? cleanup::MapId::kBig10x10
                                                  : cleanup::MapId::kSmall7x7);
  return cfg;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const std::string k = trim(key);
  for (const auto& knob : knobs()) {
    if (k == knob.key) {
      if (k == "experiment") {
        // Switching preset keeps the map consistent with the new id.
        const auto map = ExperimentConfig::from_preset(trim(value)).cleanup.env.map;
        knob.put(*this, trim(value));
        cleanup.env.map = map;
      } else {
        knob.put(*this, trim(value));
      }
      return;
    }
  }
  throw std::invalid_argument("unknown config key '" + k + "'");
}

void ExperimentConfig::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("expected key=value, got '" + assignment + "'");
  set(assignment.substr(0, eq), assignment.substr(eq + 1));
}

void ExperimentConfig::load_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path.string());
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      set(line);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(path.string() + ":" + std::to_string(number) + ": " +
                                  e.what());
    }
  }
}

std::string ExperimentConfig::snapshot() const {
  std::ostringstream out;
  for (const auto& knob : knobs()) out << knob.key << '=' << knob.get(*this) << '\n';
  return out.str();
}

std::vector<std::string> ExperimentConfig::keys() {
  std::vector<std::string> out;
  for (const auto& knob : knobs()) out.emplace_back(knob.key);
  return out;
}

void ExperimentConfig::validate() const {
  const Preset& p = find_preset(experiment);
  if (seeds < 1) throw std::invalid_argument("seeds must be >= 1");
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  if (log_every < 1) throw std::invalid_argument("log_every must be >= 1");
  if (p.family == Family::kCleanup) {
    cleanup.env.validate();
    if (cleanup.hidden < 1 || cleanup.hidden > 4096)
      throw std::invalid_argument("cleanup.hidden must be in [1, 4096]");
  }
  if (p.family == Family::kAnalytic) {
    if (!(theory.gamma > 0.0 && theory.gamma < 1.0))
      throw std::invalid_argument("analytic.gamma must be in (0, 1)");
    if (!(theory.init_low <= theory.init_high))
      throw std::invalid_argument("analytic.init_low must not exceed analytic.init_high");
  }
}

void write_row(std::ostream& out, const MetricRow& row) {
  out << row.experiment << ',' << row.seed << ',' << row.episode << ',' << row.agent << ','
      << row.metric << ',' << format_number(row.value) << '\n';
}

MetricRow parse_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (fields.size() != 6) throw std::runtime_error("expected 6 fields in '" + line + "'");
  MetricRow row;
  try {
    row.experiment = fields[0];
    row.seed = static_cast<int>(parse_long("seed", fields[1]));
    row.episode = parse_long("episode", fields[2]);
    row.agent = fields[3];
    row.metric = fields[4];
    row.value = parse_double("value", trim(fields[5]));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("bad metrics row '") + line + "': " + e.what());
  }
  if (row.experiment.empty() || row.agent.empty() || row.metric.empty())
    throw std::runtime_error("empty field in '" + line + "'");
  return row;
}

std::vector<MetricRow> read_metrics(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw std::runtime_error("cannot open " + csv.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != kMetricsHeader)
    throw std::runtime_error(csv.string() + ": missing or unexpected header");
  std::vector<MetricRow> rows;
  long number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    try {
      rows.push_back(parse_row(trim(line)));
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(csv.string() + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return rows;
}

namespace {

bool keep_episode(const ExperimentConfig& cfg, long e, long last) {
  return e % cfg.log_every == 0 || e == last;
}

void save_tabular(const TabularActorCritic& t, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "tabular " << t.states() << ' ' << t.actions() << '\n';
  for (int s = 0; s < t.states(); ++s) {
    for (int a = 0; a < t.actions(); ++a) out << format_number(t.preference(s, a)) << ' ';
    out << format_number(t.value(s)) << '\n';
  }
}

std::vector<MetricRow> run_ipd(const ExperimentConfig& cfg, int seed,
                               const fs::path& param_dir) {
  IpdTrainConfig tc;
  tc.variant = ipd_variant(cfg.experiment);
  tc.episodes = cfg.episodes;
  tc.learner = cfg.ipd;
  tc.exploration = cfg.exploration;
  const IpdRunResult result = train_ipd(tc, cfg.master_seed, seed);

  std::vector<MetricRow> rows;
  const long last = static_cast<long>(result.episodes.size()) - 1;
  auto add = [&](long e, std::string agent, const char* metric, double v) {
    rows.push_back({cfg.experiment, seed, e, std::move(agent), metric, v});
  };
  for (const auto& st : result.episodes) {
    if (!keep_episode(cfg, st.episode, last)) continue;
    add(st.episode, "joint", "joint_reward", st.joint_reward);
    for (int i = 0; i < 2; ++i)
      add(st.episode, std::to_string(i), "cooperation", st.cooperation[static_cast<std::size_t>(i)]);
    add(st.episode, "joint", "own_share", st.own_share);
    add(st.episode, "joint", "trades", st.trades);
  }
  if (!param_dir.empty())
    for (std::size_t i = 0; i < result.learners.size(); ++i)
      save_tabular(result.learners[i], param_dir / ("agent" + std::to_string(i) + ".txt"));
  return rows;
}

std::vector<MetricRow> run_cleanup(const ExperimentConfig& cfg, int seed,
                                   const fs::path& param_dir) {
  CleanupTrainConfig tc = cfg.cleanup;
  tc.mechanism = cleanup_mechanism(cfg.experiment);
  tc.episodes = cfg.episodes;
  tc.exploration = cfg.exploration;
  const CleanupRunResult result = train_cleanup(tc, cfg.master_seed, seed);

  std::vector<MetricRow> rows;
  const long last = static_cast<long>(result.episodes.size()) - 1;
  auto add = [&](long e, std::string agent, const char* metric, double v) {
    rows.push_back({cfg.experiment, seed, e, std::move(agent), metric, v});
  };
  for (const auto& st : result.episodes) {
    if (!keep_episode(cfg, st.episode, last)) continue;
    add(st.episode, "joint", "joint_reward", st.joint_reward);
    for (std::size_t i = 0; i < st.rewards.size(); ++i) {
      const std::string id = std::to_string(i);
      add(st.episode, id, "reward", st.rewards[i]);
      add(st.episode, id, "apples", st.apples[i]);
      add(st.episode, id, "waste_cleared", st.waste_cleared[i]);
    }
    add(st.episode, "joint", "own_share", st.own_share);
    if (tc.mechanism == cleanup::Mechanism::kCommonPool)
      add(st.episode, "joint", "participants", st.participants);
  }
  if (!param_dir.empty()) {
    for (std::size_t i = 0; i < result.policies.size(); ++i) {
      const fs::path path = param_dir / ("agent" + std::to_string(i) + ".txt");
      std::ofstream out(path);
      if (!out) throw std::runtime_error("cannot write " + path.string());
      result.policies[i].save(out);
    }
  }
  return rows;
}

std::vector<MetricRow> run_analytic(const ExperimentConfig& cfg, int seed,
                                    const fs::path& param_dir) {
  analytic::SimulationConfig sc = cfg.theory;
  sc.episodes = static_cast<int>(cfg.episodes);
  sc.runs = cfg.seeds;
  sc.seed = cfg.master_seed;
  const auto series = analytic::simulate_run(sc, seed);

  std::vector<MetricRow> rows;
  const long last = static_cast<long>(series.size());
  auto add = [&](long e, std::string agent, const char* metric, double v) {
    rows.push_back({cfg.experiment, seed, e, std::move(agent), metric, v});
  };
  for (const auto& p : series) {
    if (!keep_episode(cfg, p.episode, last)) continue;
    add(p.episode, "joint", "m", p.m);
    add(p.episode, "joint", "n", p.n);
    add(p.episode, "0", "cooperation", p.coop1);
    add(p.episode, "1", "cooperation", p.coop2);
    add(p.episode, "joint", "price", p.price);
    add(p.episode, "joint", "joint_reward", p.joint_reward);
  }
  if (!param_dir.empty() && !series.empty()) {
    const fs::path path = param_dir / "theory.txt";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    const auto& p = series.back();
    out << "coop1=" << format_number(p.coop1) << "\ncoop2=" << format_number(p.coop2)
        << "\nm=" << format_number(p.m) << "\nn=" << format_number(p.n) << '\n';
  }
  return rows;
}

}  // namespace

std::vector<MetricRow> run_seed(const ExperimentConfig& cfg, int seed,
                                const fs::path& param_dir) {
  cfg.validate();
  if (seed < 0) throw std::invalid_argument("seed index must be non-negative");
  switch (find_preset(cfg.experiment).family) {
    case Family::kIpd: return run_ipd(cfg, seed, param_dir);
    case Family::kCleanup: return run_cleanup(cfg, seed, param_dir);
    case Family::kAnalytic: return run_analytic(cfg, seed, param_dir);
  }
  return {};
}

fs::path run(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  const fs::path runs_dir = cfg.out / "runs";
  const fs::path params_dir = cfg.out / "params";
  try {
    fs::create_directories(runs_dir);
    fs::create_directories(params_dir);
  } catch (const fs::filesystem_error& e) {
    throw std::runtime_error("cannot create output directory " + cfg.out.string() + ": " +
                             e.code().message());
  }
  {
    std::ofstream snap(cfg.out / "config.txt");
    if (!snap) throw std::runtime_error("cannot write " + (cfg.out / "config.txt").string());
    snap << cfg.snapshot();
  }

  auto run_file = [&](int seed) { return runs_dir / ("seed" + std::to_string(seed) + ".csv"); };
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(cfg.seeds));
  std::atomic<int> next{0};
  std::mutex log_mutex;

  auto worker = [&] {
    for (int seed = next++; seed < cfg.seeds; seed = next++) {
      try {
        const fs::path dir = params_dir / ("seed" + std::to_string(seed));
        fs::create_directories(dir);
        const auto rows = run_seed(cfg, seed, dir);
        std::ofstream out(run_file(seed));
        if (!out) throw std::runtime_error("cannot write " + run_file(seed).string());
        for (const auto& row : rows) write_row(out, row);
        if (!out) throw std::runtime_error("write failed for " + run_file(seed).string());
        if (log) {
          std::lock_guard lock(log_mutex);
          *log << cfg.experiment << ": seed " << seed << " done (" << rows.size()
               << " rows)\n";
        }
      } catch (...) {
        errors[static_cast<std::size_t>(seed)] = std::current_exception();
      }
    }
  };
  const int threads = std::min(cfg.workers, cfg.seeds);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (int seed = 0; seed < cfg.seeds; ++seed) {
    if (!errors[static_cast<std::size_t>(seed)]) continue;
    try {
      std::rethrow_exception(errors[static_cast<std::size_t>(seed)]);
    } catch (const std::exception& e) {
      throw std::runtime_error("seed " + std::to_string(seed) + " failed: " + e.what());
    }
  }

  const fs::path metrics = cfg.out / "metrics.csv";
  std::ofstream merged(metrics, std::ios::binary);
  if (!merged) throw std::runtime_error("cannot write " + metrics.string());
  merged << kMetricsHeader << '\n';
  for (int seed = 0; seed < cfg.seeds; ++seed) {
    std::ifstream part(run_file(seed), std::ios::binary);
    if (part.peek() != std::ifstream::traits_type::eof()) merged << part.rdbuf();
  }
  merged.close();
  if (!merged) throw std::runtime_error("write failed for " + metrics.string());
  fs::remove_all(runs_dir);
  return cfg.out;
}

}  // namespace rshare::harness
