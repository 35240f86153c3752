// SPDX-License-Identifier: Apache-2.0
//
// navsim CLI: scenario simulation, encounter classification, dataset
// generation and log replay. Exit codes: 0 success, 2 input error,
// 3 assertion breach, 4 write failure.

#include <algorithm>
#include <filesystem>
#include <future>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "navsim/agent.hpp"
#include "navsim/datasets.hpp"
#include "navsim/llm_client.hpp"
#include "navsim/scenario_io.hpp"
#include "navsim/simulator.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitAssertionBreach = 3;
constexpr int kExitWriteError = 4;

struct RemoteFlags {
  std::string endpoint;
  std::string model = "navigation-core";
  double temperature = 0.0;
  double timeout_s = 60.0;
  int retries = 2;
  std::string api_key_env;
};

std::vector<std::string> load_script(const std::string& path) {
  const std::string text = navsim::read_file(path);
  std::vector<std::string> responses;
  std::string current;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string line =
        text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    if (line == "---") {
      responses.push_back(current);
      current.clear();
    } else {
      if (!current.empty()) current += '\n';
      current += line;
    }
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  if (!current.empty()) responses.push_back(current);
  if (responses.empty())
    throw navsim::LoadError("scripted core file has no responses: " + path);
  return responses;
}

std::unique_ptr<navsim::DecisionCore> make_core(const std::string& selection,
                                                const RemoteFlags& remote) {
  if (selection == "rule") return std::make_unique<navsim::RuleCore>();
  if (selection == "remote") {
    if (remote.endpoint.empty())
      throw navsim::LoadError("--core remote requires --endpoint");
    navsim::RemoteEndpoint ep;
    ep.url = remote.endpoint;
    ep.model = remote.model;
    ep.temperature = remote.temperature;
    ep.timeout_s = remote.timeout_s;
    ep.max_retries = remote.retries;
    ep.api_key_env = remote.api_key_env;
    return std::make_unique<navsim::RemoteLlmCore>(ep);
  }
  if (selection.rfind("scripted:", 0) == 0)
    return std::make_unique<navsim::ScriptedCore>(load_script(selection.substr(9)));
  throw navsim::LoadError("unknown core selection '" + selection +
                          "' (use rule, remote, or scripted:<file>)");
}

int run_one_scenario(const std::string& config_path, const std::string& core_sel,
                     const RemoteFlags& remote, std::string out_dir,
                     bool seed_given, std::uint64_t seed, double assert_safe_nm) {
  navsim::ScenarioConfig cfg = navsim::load_scenario(config_path);
  if (seed_given) cfg.seed = seed;

  auto core = make_core(core_sel, remote);
  navsim::SimulationLog log = navsim::run(cfg, *core);
  navsim::Metrics metrics = navsim::compute_metrics(log);

  if (out_dir.empty()) out_dir = "runs/" + cfg.name;
  navsim::save_log(log, out_dir + "/log.jsonl", out_dir + "/latency.jsonl");
  navsim::write_file(out_dir + "/track.csv", navsim::track_csv(log));
  navsim::write_file(out_dir + "/distances.csv", navsim::distances_csv(log));
  navsim::write_file(out_dir + "/metrics.json",
                     navsim::metrics_to_json(metrics).dump() + "\n");

  std::cout << "scenario: " << cfg.name << "\n"
            << "end: " << log.end_reason << " at " << log.end_time << " s\n"
            << "decisions: " << metrics.decision_count << "\n";
  for (const auto& [pair, d] : metrics.min_distance_m)
    std::cout << "min distance " << pair << ": " << navsim::fmt_nm(d) << " nm\n";
  for (const auto& [flag, verdict] : metrics.colregs_flags)
    std::cout << "colregs " << flag << ": " << verdict << "\n";
  std::cout << "outputs: " << out_dir << "\n";

  if (assert_safe_nm >= 0.0) {
    std::string own_id;
    for (const auto& s : cfg.ships)
      if (s.is_own) own_id = s.id;
    for (const auto& [pair, d] : metrics.min_distance_m) {
      const bool own_pair = pair.rfind(own_id + "-", 0) == 0 ||
                            pair.size() > own_id.size() + 1 &&
                                pair.compare(pair.size() - own_id.size() - 1,
                                             std::string::npos, "-" + own_id) == 0;
      if (own_pair && d < navsim::nm2m(assert_safe_nm)) {
        std::cerr << "assert-safe breach: " << pair << " min distance "
                  << navsim::fmt_nm(d) << " nm < " << assert_safe_nm << " nm\n";
        return kExitAssertionBreach;
      }
    }
  }
  return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& core_sel,
                 const RemoteFlags& remote, const std::string& out_dir,
                 bool seed_given, std::uint64_t seed, double assert_safe_nm,
                 bool batch) {
  if (!batch)
    return run_one_scenario(config_path, core_sel, remote, out_dir, seed_given,
                            seed, assert_safe_nm);

  namespace fs = std::filesystem;
  if (!fs::is_directory(config_path))
    throw navsim::LoadError("--batch expects a directory: " + config_path);
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(config_path))
    if (entry.path().extension() == ".json") files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw navsim::LoadError("no .json scenarios in " + config_path);

  std::vector<std::future<int>> results;
  for (const auto& f : files) {
    results.push_back(std::async(std::launch::async, [&, f] {
      const std::string name = fs::path(f).stem().string();
      const std::string out =
          out_dir.empty() ? "runs/" + name : out_dir + "/" + name;
      try {
        return run_one_scenario(f, core_sel, remote, out, seed_given, seed,
                                assert_safe_nm);
      } catch (const std::exception& e) {
        std::cerr << f << ": " << e.what() << "\n";
        return kExitInputError;
      }
    }));
  }
  int status = kExitOk;
  for (auto& r : results) status = std::max(status, r.get());
  return status;
}

int cmd_classify(double own_lon, double own_lat, double own_course_deg,
                 double own_speed_kn, double tgt_lon, double tgt_lat,
                 double tgt_course_deg, double tgt_speed_kn) {
  using namespace navsim;
  const GeoPosition origin{own_lon, own_lat};
  ShipState os;
  os.pos = project(origin, {own_lon, own_lat});
  os.heading = wrap_two_pi(deg2rad(own_course_deg));
  os.speed = knots2mps(own_speed_kn);
  ShipState ts;
  ts.pos = project(origin, {tgt_lon, tgt_lat});
  ts.heading = wrap_two_pi(deg2rad(tgt_course_deg));
  ts.speed = knots2mps(tgt_speed_kn);

  const EncounterType label = classify(os, ts);  // throws on coincident input
  const double beta = relative_bearing(os.heading, os.pos, ts.pos);
  const double dc = wrap_two_pi(ts.heading - os.heading);
  std::cout << to_string(label) << "\n"
            << "relative bearing: " << fmt_deg(beta) << " deg\n"
            << "course difference: " << fmt_deg(dc) << " deg\n";
  return kExitOk;
}

int cmd_gen_dataset(const std::string& kind, int n, std::uint64_t seed,
                    const std::string& out_path, int per_trajectory) {
  using namespace navsim;
  if (kind == "setd") {
    const auto records = gen_setd(n, seed, per_trajectory);
    write_file(out_path, setd_to_jsonl(records, seed));
    std::map<std::string, int> counts;
    for (const auto& r : records) ++counts[encounter_phrase(r.label)];
    std::cout << "wrote " << records.size() << " records to " << out_path << "\n";
    for (const auto& [phrase, c] : counts)
      std::cout << phrase << ": " << c << "\n";
    return kExitOk;
  }
  if (kind == "scadd") {
    const auto records = gen_scadd(n, seed);
    write_file(out_path, scadd_to_jsonl(records, seed));
    std::cout << "wrote " << records.size() << " records to " << out_path << "\n";
    return kExitOk;
  }
  throw navsim::LoadError("dataset kind must be 'setd' or 'scadd', got '" + kind + "'");
}

int cmd_replay(const std::string& log_path, std::string latency_path,
               const std::string& diff_path) {
  namespace fs = std::filesystem;
  if (latency_path.empty()) {
    const fs::path p =
        fs::path(log_path).parent_path() / "latency.jsonl";
    latency_path = p.string();
  }
  const navsim::SimulationLog log = navsim::load_log(log_path, latency_path);
  const navsim::Metrics metrics = navsim::compute_metrics(log);
  const std::string rendered = navsim::metrics_to_json(metrics).dump() + "\n";
  std::cout << rendered;

  if (!diff_path.empty()) {
    const std::string stored = navsim::read_file(diff_path);
    if (stored != rendered) {
      std::cerr << "metrics mismatch against " << diff_path << "\n";
      return kExitAssertionBreach;
    }
    std::cout << "metrics match " << diff_path << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"navsim: maritime collision-avoidance simulator and agent harness"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "run a scenario configuration");
  std::string config_path;
  sim->add_option("config", config_path, "scenario .json (or directory with --batch)")
      ->required();
  std::string core_sel = "rule";
  sim->add_option("--core", core_sel, "decision core: rule | remote | scripted:<file>");
  std::string out_dir;
  sim->add_option("--out", out_dir, "output directory (default runs/<name>)");
  std::uint64_t seed = 0;
  auto* seed_opt = sim->add_option("--seed", seed, "override the scenario seed");
  double assert_safe_nm = -1.0;
  sim->add_option("--assert-safe", assert_safe_nm,
                  "exit 3 if any own-ship pair gets closer than this, nm");
  bool batch = false;
  sim->add_flag("--batch", batch, "treat config as a directory of scenarios");
  RemoteFlags remote;
  sim->add_option("--endpoint", remote.endpoint, "remote core chat-completion URL");
  sim->add_option("--model", remote.model, "remote core model name");
  sim->add_option("--temperature", remote.temperature, "remote core temperature");
  sim->add_option("--timeout", remote.timeout_s, "remote core timeout, s");
  sim->add_option("--retries", remote.retries, "remote core retry count");
  sim->add_option("--api-key-env", remote.api_key_env,
                  "environment variable holding the API key");

  // classify
  auto* cls = app.add_subcommand("classify", "classify one two-ship encounter");
  double own_lon = 0, own_lat = 0, own_course = 0, own_speed = 0;
  double tgt_lon = 0, tgt_lat = 0, tgt_course = 0, tgt_speed = 0;
  cls->add_option("--own-lon", own_lon)->required();
  cls->add_option("--own-lat", own_lat)->required();
  cls->add_option("--own-course", own_course, "deg")->required();
  cls->add_option("--own-speed", own_speed, "kn")->required();
  cls->add_option("--target-lon", tgt_lon)->required();
  cls->add_option("--target-lat", tgt_lat)->required();
  cls->add_option("--target-course", tgt_course, "deg")->required();
  cls->add_option("--target-speed", tgt_speed, "kn")->required();

  // gen-dataset
  auto* gen = app.add_subcommand("gen-dataset", "generate a training dataset");
  std::string kind;
  gen->add_option("kind", kind, "setd | scadd")->required();
  int count = 4;
  gen->add_option("-n,--count", count, "number of records");
  std::uint64_t gen_seed = 0;
  gen->add_option("--seed", gen_seed, "generator seed");
  std::string gen_out;
  gen->add_option("--out", gen_out, "output path (default <kind>.jsonl)");
  int per_trajectory = 1;
  gen->add_option("--per-trajectory", per_trajectory,
                  "instants emitted along each sampled encounter");

  // replay
  auto* rep = app.add_subcommand("replay", "recompute metrics from a log");
  std::string log_path;
  rep->add_option("log", log_path, "log.jsonl path")->required();
  std::string latency_path;
  rep->add_option("--latency", latency_path, "latency side-channel path");
  std::string diff_path;
  rep->add_option("--diff", diff_path, "compare against a stored metrics.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(config_path, core_sel, remote, out_dir,
                          seed_opt->count() > 0, seed, assert_safe_nm, batch);
    if (cls->parsed())
      return cmd_classify(own_lon, own_lat, own_course, own_speed, tgt_lon,
                          tgt_lat, tgt_course, tgt_speed);
    if (gen->parsed())
      return cmd_gen_dataset(kind, count, gen_seed,
                             gen_out.empty() ? kind + ".jsonl" : gen_out,
                             per_trajectory);
    if (rep->parsed()) return cmd_replay(log_path, latency_path, diff_path);
  } catch (const navsim::WriteError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitWriteError;
  } catch (const navsim::LoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
