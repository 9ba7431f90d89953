#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "oil/baselines.hpp"
#include "oil/errors.hpp"
#include "oil/io.hpp"
#include "oil/oil.hpp"
#include "oil/teachers.hpp"
#include "oil/track_gen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace oil::cli {

Settings default_settings() {
  Settings s;
  const std::pair<const char*, const char*> defaults[] = {
      {"vehicle", "car"},
      {"seed", "1"},
      {"trainer", "oil"},
      {"teachers", "1,2,3,4,5"},
      {"teacher_file", ""},  // JSON ensemble replacing the built-in one
      {"epsilon", "auto"},  // multi with several teachers, single with one
      {"steps", "0"},       // simulator-step budget, 0 = trainer default
      // oil
      {"rounds", "400"},
      {"horizon", "auto"},  // car 300, uav 200
      {"max_episodes", "50"},
      {"act_steps", "60"},
      {"mc_rollouts", "1"},
      {"batch_size", "64"},
      {"dropout", "0.5"},
      {"lr", "0.0001"},
      {"dataset_capacity", "0"},
      {"gamma", "1"},
      // bc / dagger
      {"bc_episodes", "30"},
      {"bc_train_steps", "30000"},
      {"dagger_iterations", "5"},
      // ddpg
      {"ddpg_steps", "100000"},
      {"ddpg_actor_lr", "0.0001"},
      {"ddpg_critic_lr", "0.001"},
      {"ddpg_tau", "0.005"},
      {"ddpg_gamma", "0.99"},
      {"ddpg_noise", "0.1"},
      {"ddpg_beta", "auto"},  // car 0, uav 1
      // simulator and evaluation
      {"waypoint_noise", "0"},
      {"laps", "auto"},
      {"checkpoint_timeout", "auto"},
      // track generation
      {"train_tracks", "6"},
      {"test_tracks", "4"},
      {"track_control_points", "12"},
      {"track_radius_min", "40"},
      {"track_radius_max", "110"},
      {"track_half_width", "4"},
      {"track_min_turn_radius", "10"},
      {"checkpoint_spacing", "50"},
      // ablation
      {"n_list", "60,180,300,600"},
  };
  for (const auto& [k, v] : defaults) s.set(k, v);
  return s;
}

namespace {

// ---- settings -> typed configs ----

VehicleKind kind_of(const Settings& s) { return parse_vehicle_kind(s.get("vehicle")); }

int horizon_of(const Settings& s, VehicleKind kind) {
  if (s.get("horizon") == "auto") return kind == VehicleKind::car ? 300 : 200;
  return s.get_int("horizon");
}

SimConfig sim_config(const Settings& s, VehicleKind kind) {
  SimConfig c;
  c.kind = kind;
  c.waypoint_noise = s.get_double("waypoint_noise");
  if (c.waypoint_noise < 0.0) throw ConfigError("waypoint_noise must be >= 0");
  return c;
}

RewardConfig reward_config(const Settings& s, VehicleKind kind) {
  RewardConfig r;
  r.mode = kind == VehicleKind::car ? RewardMode::driving : RewardMode::uav;
  r.gamma = s.get_double("gamma");
  validate(r);
  return r;
}

std::vector<TeacherSpec> ensemble_of(const Settings& s, VehicleKind kind) {
  if (s.get("teacher_file").empty()) return make_default_ensemble(kind);
  return load_teacher_specs(s.get("teacher_file"));
}

EpsilonMode epsilon_of(const Settings& s, std::size_t teacher_count) {
  const std::string& e = s.get("epsilon");
  if (e == "auto") return teacher_count > 1 ? EpsilonMode::multi : EpsilonMode::single;
  return parse_epsilon_mode(e);
}

OilParams oil_params(const Settings& s, VehicleKind kind) {
  OilParams p = OilParams::defaults_for(kind);
  p.rounds = s.get_int("rounds");
  p.horizon = horizon_of(s, kind);
  p.max_episodes = s.get_int("max_episodes");
  p.act_steps = s.get_int("act_steps");
  p.epsilon_mode = epsilon_of(s, parse_teacher_subset(s.get("teachers"), ensemble_of(s, kind).size()).size());
  p.mc_rollouts = s.get_int("mc_rollouts");
  p.batch_size = static_cast<std::size_t>(std::max(0, s.get_int("batch_size")));
  p.dropout = s.get_double("dropout");
  p.learning_rate = s.get_double("lr");
  p.dataset_capacity = static_cast<std::size_t>(s.get_u64("dataset_capacity"));
  p.step_budget = s.get_long("steps");
  validate(p);
  return p;
}

ImitationParams imitation_params(const Settings& s, VehicleKind kind) {
  ImitationParams p = ImitationParams::defaults_for(kind);
  p.episodes = s.get_int("bc_episodes");
  p.horizon = horizon_of(s, kind);
  p.train_steps = s.get_int("bc_train_steps");
  p.iterations = s.get_int("dagger_iterations");
  p.batch_size = static_cast<std::size_t>(std::max(0, s.get_int("batch_size")));
  p.dropout = s.get_double("dropout");
  p.learning_rate = s.get_double("lr");
  p.step_budget = s.get_long("steps");
  validate(p);
  return p;
}

DdpgConfig ddpg_config(const Settings& s, VehicleKind kind) {
  DdpgConfig c = DdpgConfig::defaults_for(kind);
  c.actor_lr = s.get_double("ddpg_actor_lr");
  c.critic_lr = s.get_double("ddpg_critic_lr");
  c.tau = s.get_double("ddpg_tau");
  c.gamma = s.get_double("ddpg_gamma");
  c.noise_sigma = s.get_double("ddpg_noise");
  c.noise_sigma_final = 0.1 * c.noise_sigma;
  if (s.get("ddpg_beta") != "auto") c.beta = s.get_double("ddpg_beta");
  c.horizon = horizon_of(s, kind);
  c.batch_size = static_cast<std::size_t>(std::max(0, s.get_int("batch_size")));
  validate(c, kind);
  return c;
}

EvalConfig eval_config(const Settings& s, VehicleKind kind) {
  EvalConfig c = EvalConfig::defaults_for(kind);
  if (s.get("laps") != "auto") c.laps = s.get_int("laps");
  if (s.get("checkpoint_timeout") != "auto") c.checkpoint_timeout = s.get_double("checkpoint_timeout");
  c.score_horizon = horizon_of(s, kind);
  c.reward = reward_config(s, kind);
  validate(c);
  return c;
}

TrackGenParams track_params(const Settings& s) {
  TrackGenParams p;
  p.control_points = s.get_int("track_control_points");
  p.radius_min = s.get_double("track_radius_min");
  p.radius_max = s.get_double("track_radius_max");
  p.half_width = s.get_double("track_half_width");
  p.min_turn_radius = s.get_double("track_min_turn_radius");
  p.checkpoint_spacing = s.get_double("checkpoint_spacing");
  return p;
}

std::vector<std::unique_ptr<Policy>> teachers_of(const Settings& s, const std::string& subset, VehicleKind kind) {
  const auto specs = ensemble_of(s, kind);
  std::vector<TeacherSpec> chosen;
  for (auto i : parse_teacher_subset(subset, specs.size())) chosen.push_back(specs[i]);
  return make_teacher_policies(chosen);
}

Provenance provenance_of(const Settings& s) {
  Provenance p;
  p.config_hash = hex64(fnv1a64(s.canonical()));
  p.seed = s.get_u64("seed");
  return p;
}

std::string stamp_line(const Provenance& p) {
  return "# config_hash=" + p.config_hash + " seed=" + std::to_string(p.seed) + " tool_version=" + p.tool_version +
         "\n";
}

json settings_json(const Settings& s) {
  json j = json::object();
  for (const auto& [k, v] : s.values()) j[k] = v;
  return j;
}

std::vector<NamedTrack> load_split(const std::string& tracks, const char* split) {
  if (tracks.empty()) throw ConfigError("--tracks is required");
  auto out = load_track_dir(fs::path(tracks) / split);
  if (out.empty()) throw ConfigError("no track files in " + (fs::path(tracks) / split).string());
  return out;
}

std::string safe_name(std::string name) {
  for (auto& c : name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  return name;
}

std::string eval_csv(const EvalResult& r, const Provenance& prov) {
  std::ostringstream os;
  os << stamp_line(prov);
  os << "track,mean_abs_error,completion_time,checkpoints_passed,checkpoints_total,passed_pct,resets,crashes,"
        "mean_reward\n";
  os.precision(17);
  for (const auto& t : r.tracks)
    os << t.track << ',' << t.mean_abs_error << ',' << t.completion_time << ',' << t.checkpoints_passed << ','
       << t.checkpoints_total << ',' << t.passed_pct << ',' << t.resets << ',' << t.crashes << ',' << t.mean_reward
       << '\n';
  os << "mean," << r.mean_abs_error << ',' << r.completion_time << ",,," << r.passed_pct << ',' << r.resets << ','
     << r.crashes << ',' << r.mean_reward << '\n';
  return os.str();
}

// ---- flags ----

struct Flags {
  std::string config;
  std::string out;
  std::string tracks;
  std::vector<std::string> sets;
  std::map<std::string, std::string> raw;
  std::vector<std::pair<std::string, CLI::Option*>> bound;

  void bind(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    bound.emplace_back(key, app->add_option(flag, raw[key], help));
  }

  Settings resolve() const {
    Settings file;
    if (!config.empty()) file = load_settings_file(config);
    Settings flags;
    for (const auto& [key, opt] : bound)
      if (opt->count() > 0) flags.set(key, raw.at(key));
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + kv + "'");
      flags.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return resolve_settings(default_settings(), file, flags);
  }
};

void add_shared(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "Flat key=value settings file");
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--tracks", f.tracks, "Track root holding train/ and test/");
  f.bind(app, "--seed", "seed", "Master seed");
  f.bind(app, "--vehicle", "vehicle", "car or uav");
  f.bind(app, "--trainer", "trainer", "oil, bc, dagger or ddpg");
  f.bind(app, "--teachers", "teachers", "Teacher subset, e.g. 1,3,4");
  f.bind(app, "--steps", "steps", "Simulator step budget (0 = trainer default)");
  app->add_option("--set", f.sets, "Override any setting, key=value (repeatable)");
}

fs::path require_out(const Flags& f) {
  if (f.out.empty()) throw ConfigError("--out is required");
  fs::create_directories(f.out);
  return f.out;
}

// ---- commands ----

int cmd_gen_tracks(const Flags& f, std::ostream& out) {
  const Settings s = f.resolve();
  const fs::path root = require_out(f);
  const Provenance prov = provenance_of(s);
  const TrackGenParams params = track_params(s);
  const std::uint64_t seed = s.get_u64("seed");
  int written[2] = {0, 0};
  const std::pair<const char*, const char*> splits[] = {{"train", "train_tracks"}, {"test", "test_tracks"}};
  for (int k = 0; k < 2; ++k) {
    const fs::path dir = root / splits[k].first;
    fs::create_directories(dir);
    for (const auto& entry : fs::directory_iterator(dir))
      if (entry.path().filename().string().rfind("track_", 0) == 0 && entry.path().extension() == ".json")
        fs::remove(entry.path());
    const auto suite = generate_suite(seed, k, s.get_int(splits[k].second), params);
    for (std::size_t i = 0; i < suite.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "track_%02zu.json", i);
      save_track(dir / name, suite[i], prov);
      ++written[k];
    }
  }
  out << "wrote " << written[0] << " train and " << written[1] << " test tracks to " << root.string() << '\n';
  return 0;
}

int cmd_train(const Flags& f, std::ostream& out) {
  const Settings s = f.resolve();
  const VehicleKind kind = kind_of(s);
  const std::string trainer = s.get("trainer");
  if (trainer != "oil" && trainer != "bc" && trainer != "dagger" && trainer != "ddpg")
    throw ConfigError("unknown trainer '" + trainer + "' (expected oil, bc, dagger or ddpg)");
  const auto train = load_split(f.tracks, "train");
  const fs::path dir = require_out(f);
  const SimConfig sim = sim_config(s, kind);
  const Provenance prov = provenance_of(s);
  const std::uint64_t seed = s.get_u64("seed");

  write_text_file(dir / "settings.txt", stamp_line(prov) + s.canonical());
  json header = {{"type", "header"},
                 {"provenance", to_json(prov)},
                 {"trainer", trainer},
                 {"vehicle", std::string(to_string(kind))},
                 {"settings", settings_json(s)}};

  Checkpoint ckpt;
  ckpt.trainer = trainer;
  ckpt.kind = kind;
  ckpt.provenance = prov;
  ckpt.waypoint_count = sim.waypoint_count;
  ckpt.waypoint_spacing = sim.waypoint_spacing;
  ckpt.feature_distance_scale = sim.feature_distance_scale;
  ckpt.feature_speed_scale = sim.feature_speed_scale;
  long sim_steps = 0;

  if (trainer == "ddpg") {
    const DdpgConfig cfg = ddpg_config(s, kind);
    const long budget = s.get_long("steps") > 0 ? s.get_long("steps") : s.get_long("ddpg_steps");
    JsonlWriter log(dir / "train_log.jsonl", header);
    DdpgRun run = train_ddpg(train, sim, cfg, budget, seed, [&](const DdpgEpisodeLog& l) {
      json j = to_json(l);
      j["type"] = "episode";
      log.write(j);
    });
    ckpt.net = run.nets.actor;
    ckpt.adam = run.actor_adam;
    ckpt.fixed_throttle = cfg.fixed_throttle;
    sim_steps = run.sim_steps;
  } else {
    const std::string subset = s.get("teachers");
    const auto teachers = teachers_of(s, subset, kind);
    json labels = json::array();
    for (const auto& t : teachers) labels.push_back(t->name());
    header["teachers"] = labels;
    JsonlWriter log(dir / "train_log.jsonl", header);
    if (trainer == "oil") {
      const OilParams params = oil_params(s, kind);
      OilRun run = train_oil(train, sim, teachers, params, reward_config(s, kind), seed, [&](const RoundLog& l) {
        json j = to_json(l);
        j["type"] = "round";
        log.write(j);
      });
      ckpt.net = run.learner.net;
      ckpt.adam = run.learner.adam;
      sim_steps = run.sim_steps;
    } else {
      const ImitationParams params = imitation_params(s, kind);
      auto cb = [&](const ImitationLog& l) {
        json j = to_json(l);
        j["type"] = "iteration";
        log.write(j);
      };
      ImitationRun run = trainer == "bc" ? train_bc(train, sim, teachers, params, seed, cb)
                                         : train_dagger(train, sim, teachers, params, seed, cb);
      ckpt.net = run.learner.net;
      ckpt.adam = run.learner.adam;
      sim_steps = run.sim_steps;
    }
  }
  save_checkpoint(dir / "checkpoint.json", ckpt);
  out << trainer << ": " << sim_steps << " simulator steps, checkpoint " << (dir / "checkpoint.json").string()
      << '\n';
  return 0;
}

void write_eval(const fs::path& dir, const EvalResult& r, VehicleKind kind, const Provenance& prov) {
  const std::string stem = "eval_" + safe_name(r.policy);
  write_json_file(dir / (stem + ".json"),
                  {{"provenance", to_json(prov)}, {"vehicle", std::string(to_string(kind))}, {"result", to_json(r)}});
  write_text_file(dir / (stem + ".csv"), eval_csv(r, prov));
}

int cmd_eval(const Flags& f, const std::string& checkpoint, const std::string& teacher, const std::string& name,
             std::ostream& out) {
  const Settings s = f.resolve();
  if (checkpoint.empty() == teacher.empty()) throw ConfigError("eval needs exactly one of --checkpoint or --teacher");
  const auto test = load_split(f.tracks, "test");
  const fs::path dir = require_out(f);
  const Provenance prov = provenance_of(s);

  std::vector<EvalResult> results;
  VehicleKind kind = kind_of(s);
  if (!checkpoint.empty()) {
    const Checkpoint ckpt = load_checkpoint(checkpoint);
    kind = ckpt.kind;
    SimConfig sim = sim_config(s, kind);
    apply_features(ckpt, sim);
    const MlpPolicy policy(ckpt.net, name.empty() ? ckpt.trainer : name, ckpt.fixed_throttle);
    results.push_back(run_evaluation(policy, test, sim, eval_config(s, kind)));
  } else {
    const SimConfig sim = sim_config(s, kind);
    for (const auto& t : teachers_of(s, teacher, kind)) results.push_back(run_evaluation(*t, test, sim, eval_config(s, kind)));
  }
  for (const auto& r : results) write_eval(dir, r, kind, prov);
  out << compare(results, kind).to_text();
  return 0;
}

int cmd_compare(const Flags& f, const std::vector<std::string>& files, std::ostream& out) {
  std::vector<EvalResult> results;
  std::optional<VehicleKind> kind;
  for (const auto& file : files) {
    const json j = read_json_file(file);
    if (!j.contains("result") || !j.contains("vehicle")) throw LoadError(file + " is not an evaluation result");
    const VehicleKind k = parse_vehicle_kind(j.at("vehicle").get<std::string>());
    if (kind && *kind != k) throw ConfigError("cannot compare car and uav results in one table");
    kind = k;
    results.push_back(eval_result_from_json(j.at("result")));
  }
  const ComparisonTable table = compare(results, *kind);
  out << table.to_text();
  if (!f.out.empty()) {
    fs::create_directories(f.out);
    write_text_file(fs::path(f.out) / "comparison.txt", table.to_text());
    write_text_file(fs::path(f.out) / "comparison.csv", table.to_csv());
  }
  return 0;
}

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != tok.size() || v < 1) throw ConfigError("bad trajectory length '" + tok + "' in N list");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("empty N list");
  return out;
}

std::string subset_label(const std::string& subset) { return subset == "1,2,3,4,5" ? "1-5" : subset; }

int cmd_ablate(const Flags& f, std::ostream& out, std::ostream& err) {
  const Settings base = f.resolve();
  const VehicleKind kind = kind_of(base);
  const auto train = load_split(f.tracks, "train");
  const auto test = load_split(f.tracks, "test");
  const fs::path dir = require_out(f);
  const fs::path cells_dir = dir / "cells";
  fs::create_directories(cells_dir);
  const SimConfig sim = sim_config(base, kind);
  const std::uint64_t seed = base.get_u64("seed");

  const auto ns = parse_n_list(base.get("n_list"));
  std::vector<std::pair<std::string, int>> cells;
  for (int n : ns) cells.emplace_back("1,2,3,4,5", n);
  if (std::find(ns.begin(), ns.end(), 300) != ns.end()) {
    cells.emplace_back("1,3,4", 300);
    cells.emplace_back("3", 300);
  }

  std::ostringstream csv;
  csv << stamp_line(provenance_of(base));
  csv << "teachers,steps,status,mean_abs_error,completion_time,passed_pct,mean_reward,resets,crashes\n";
  csv.precision(17);
  ComparisonTable table;
  table.kind = kind;
  int failed = 0;

  for (const auto& [subset, n] : cells) {
    Settings s = base;
    s.set("teachers", subset);
    s.set("horizon", std::to_string(n));
    s.set("trainer", "oil");
    s.set("n_list", "");
    const Provenance prov = provenance_of(s);
    const std::string label = "Teachers #" + subset_label(subset) + ", " + std::to_string(n) + " steps";
    const fs::path cell_file = cells_dir / ("N" + std::to_string(n) + "_T" + safe_name(subset) + ".json");

    json cell;
    bool cached = false;
    if (fs::exists(cell_file)) {
      try {
        cell = read_json_file(cell_file);
        cached = cell.at("provenance").at("config_hash") == prov.config_hash;
      } catch (const std::exception&) {
        cached = false;
      }
    }
    if (!cached) {
      cell = {{"provenance", to_json(prov)}, {"teachers", subset}, {"steps", n}, {"label", label}};
      try {
        const auto teachers = teachers_of(s, subset, kind);
        OilRun run = train_oil(train, sim, teachers, oil_params(s, kind), reward_config(s, kind), seed);
        const MlpPolicy learner(run.learner.net, label);
        cell["status"] = "ok";
        cell["rounds"] = run.log.size();
        cell["sim_steps"] = run.sim_steps;
        cell["result"] = to_json(run_evaluation(learner, test, sim, eval_config(s, kind)));
      } catch (const DivergenceError& e) {
        cell["status"] = "diverged";
        cell["error"] = e.what();
      }
      write_json_file(cell_file, cell);
    }

    const std::string status = cell.at("status").get<std::string>();
    err << (cached ? "cached " : "done   ") << label << ": " << status << '\n';
    csv << '"' << subset << "\"," << n << ',' << status;
    if (status == "ok") {
      const EvalResult r = eval_result_from_json(cell.at("result"));
      csv << ',' << r.mean_abs_error << ',' << r.completion_time << ',' << r.passed_pct << ',' << r.mean_reward
          << ',' << r.resets << ',' << r.crashes << '\n';
      table.rows.push_back(
          {label, r.mean_abs_error, r.completion_time, r.passed_pct, r.mean_reward, r.resets, r.crashes});
    } else {
      ++failed;
      csv << ",,,,,,\n";
    }
  }

  write_text_file(dir / "ablation.csv", csv.str());
  write_text_file(dir / "ablation.txt", stamp_line(provenance_of(base)) + table.to_text());
  out << table.to_text();
  if (failed > 0) throw DivergenceError(std::to_string(failed) + " ablation cell(s) diverged");
  return 0;
}

std::string one_line(std::string msg) {
  std::replace(msg.begin(), msg.end(), '\n', ' ');
  return msg;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Observational imitation learning: tracks, training, evaluation, ablation", "oil"};
  app.require_subcommand(1);

  Flags gen_f, train_f, eval_f, cmp_f, abl_f;
  auto* gen = app.add_subcommand("gen-tracks", "Generate train and test tracks");
  add_shared(gen, gen_f);
  gen_f.bind(gen, "--train-count", "train_tracks", "Number of training tracks");
  gen_f.bind(gen, "--test-count", "test_tracks", "Number of test tracks");

  auto* train = app.add_subcommand("train", "Train a policy and write a checkpoint and log");
  add_shared(train, train_f);
  train_f.bind(train, "--epsilon", "epsilon", "single, multi or auto");
  train_f.bind(train, "--rounds", "rounds", "OIL observation rounds");

  std::string checkpoint, teacher, name;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint or teachers on the test tracks");
  add_shared(eval, eval_f);
  eval->add_option("--checkpoint", checkpoint, "Checkpoint written by train");
  eval->add_option("--teacher", teacher, "Teacher index or list, e.g. 1,2,3,4,5");
  eval->add_option("--name", name, "Row name for a checkpoint");

  std::vector<std::string> files;
  auto* cmp = app.add_subcommand("compare", "Tabulate evaluation results in the given order");
  add_shared(cmp, cmp_f);
  cmp->add_option("results", files, "eval_*.json files")->required();

  auto* abl = app.add_subcommand("ablate", "Trajectory-length and teacher-subset ablation for OIL");
  add_shared(abl, abl_f);
  abl_f.bind(abl, "--N-list", "n_list", "Comma-separated trajectory lengths");
  abl_f.bind(abl, "--rounds", "rounds", "OIL observation rounds per cell");
  abl_f.bind(abl, "--epsilon", "epsilon", "single, multi or auto");

  std::vector<const char*> argv{"oil"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "oil: error: " << one_line(e.what()) << '\n';
    return 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_tracks(gen_f, out);
    if (train->parsed()) return cmd_train(train_f, out);
    if (eval->parsed()) return cmd_eval(eval_f, checkpoint, teacher, name, out);
    if (cmp->parsed()) return cmd_compare(cmp_f, files, out);
    if (abl->parsed()) return cmd_ablate(abl_f, out, err);
  } catch (const ConfigError& e) {
    err << "oil: config error: " << one_line(e.what()) << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "oil: error: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}

}  // namespace oil::cli
