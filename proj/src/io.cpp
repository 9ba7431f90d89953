#include "oil/io.hpp"

#include <algorithm>
#include <sstream>

#include "oil/errors.hpp"

namespace oil {

using nlohmann::json;

json to_json(const Provenance& p) {
  return {{"config_hash", p.config_hash}, {"seed", p.seed}, {"tool_version", p.tool_version}};
}

Provenance provenance_from_json(const json& j) {
  Provenance p;
  p.config_hash = j.value("config_hash", "");
  p.seed = j.value("seed", std::uint64_t{0});
  p.tool_version = j.value("tool_version", "");
  return p;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw LoadError(path.string() + " is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_json_file(const std::filesystem::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

// ---- tracks ----

json track_to_json(const Track& track, const Provenance& prov) {
  json pts = json::array();
  for (const auto& p : track.centerline) pts.push_back({p.x, p.y});
  return {{"format", "oil-track"},
          {"version", 1},
          {"provenance", to_json(prov)},
          {"seed", track.seed},
          {"half_width", track.half_width},
          {"checkpoint_spacing", track.checkpoint_spacing},
          {"centerline", std::move(pts)}};
}

Track track_from_json(const json& j) {
  try {
    if (j.at("format") != "oil-track") throw LoadError("not a track file");
    std::vector<Vec2> pts;
    for (const auto& p : j.at("centerline")) pts.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    return Track::from_centerline(std::move(pts), j.at("half_width").get<double>(),
                                  j.at("checkpoint_spacing").get<double>(), j.at("seed").get<std::uint64_t>());
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed track: ") + e.what());
  } catch (const ContractError& e) {
    throw LoadError(std::string("invalid track: ") + e.what());
  }
}

void save_track(const std::filesystem::path& path, const Track& track, const Provenance& prov) {
  write_json_file(path, track_to_json(track, prov));
}

Track load_track(const std::filesystem::path& path) {
  try {
    return track_from_json(read_json_file(path));
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

std::vector<NamedTrack> load_track_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("track directory " + dir.string() + " does not exist");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::vector<NamedTrack> out;
  for (const auto& f : files) out.push_back({f.stem().string(), load_track(f)});
  return out;
}

// ---- teacher ensembles ----

namespace {

json pid_json(const PidGains& g) {
  return {{"kp", g.kp}, {"ki", g.ki}, {"kd", g.kd}, {"integral_limit", g.integral_limit}};
}

PidGains pid_from(const json& j) {
  PidGains g;
  g.kp = j.at("kp").get<double>();
  g.ki = j.at("ki").get<double>();
  g.kd = j.at("kd").get<double>();
  g.integral_limit = j.at("integral_limit").get<double>();
  return g;
}

}  // namespace

json to_json(const TeacherSpec& t) {
  return {{"label", t.label},
          {"steer_pid", pid_json(t.steer_pid)},
          {"speed_pid", pid_json(t.speed_pid)},
          {"lateral_pid", pid_json(t.lateral_pid)},
          {"target_speed", t.target_speed},
          {"lookahead_index", t.lookahead_index}};
}

TeacherSpec teacher_spec_from_json(const json& j) {
  try {
    TeacherSpec t;
    t.label = j.at("label").get<std::string>();
    t.steer_pid = pid_from(j.at("steer_pid"));
    t.speed_pid = pid_from(j.at("speed_pid"));
    if (j.contains("lateral_pid")) t.lateral_pid = pid_from(j.at("lateral_pid"));
    t.target_speed = j.at("target_speed").get<double>();
    t.lookahead_index = j.at("lookahead_index").get<int>();
    validate(t);
    return t;
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed teacher spec: ") + e.what());
  } catch (const ContractError& e) {
    throw LoadError(std::string("invalid teacher spec: ") + e.what());
  }
}

void save_teacher_specs(const std::filesystem::path& path, const std::vector<TeacherSpec>& specs) {
  json arr = json::array();
  for (const auto& t : specs) arr.push_back(to_json(t));
  write_json_file(path, {{"teachers", std::move(arr)}});
}

std::vector<TeacherSpec> load_teacher_specs(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  std::vector<TeacherSpec> out;
  try {
    for (const auto& t : j.at("teachers")) out.push_back(teacher_spec_from_json(t));
  } catch (const json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  if (out.empty()) throw LoadError(path.string() + " lists no teachers");
  return out;
}

// ---- checkpoints ----

json checkpoint_to_json(const Checkpoint& c) {
  const auto params = c.net.params();
  return {{"format", "oil-checkpoint"},
          {"version", 1},
          {"provenance", to_json(c.provenance)},
          {"trainer", c.trainer},
          {"vehicle", std::string(to_string(c.kind))},
          {"fixed_throttle", c.fixed_throttle ? json(*c.fixed_throttle) : json(nullptr)},
          {"features",
           {{"waypoint_count", c.waypoint_count},
            {"waypoint_spacing", c.waypoint_spacing},
            {"distance_scale", c.feature_distance_scale},
            {"speed_scale", c.feature_speed_scale}}},
          {"dims", c.net.dims()},
          {"params", std::vector<double>(params.begin(), params.end())},
          {"adam",
           {{"step", c.adam.step},
            {"lr", c.adam.lr},
            {"beta1", c.adam.beta1},
            {"beta2", c.adam.beta2},
            {"eps", c.adam.eps},
            {"m", c.adam.m},
            {"v", c.adam.v}}}};
}

Checkpoint checkpoint_from_json(const json& j) {
  try {
    if (j.at("format") != "oil-checkpoint") throw LoadError("not a checkpoint file");
    Checkpoint c;
    c.provenance = provenance_from_json(j.at("provenance"));
    c.trainer = j.at("trainer").get<std::string>();
    c.kind = parse_vehicle_kind(j.at("vehicle").get<std::string>());
    if (!j.at("fixed_throttle").is_null()) c.fixed_throttle = j.at("fixed_throttle").get<double>();
    const auto& f = j.at("features");
    c.waypoint_count = f.at("waypoint_count").get<int>();
    c.waypoint_spacing = f.at("waypoint_spacing").get<double>();
    c.feature_distance_scale = f.at("distance_scale").get<double>();
    c.feature_speed_scale = f.at("speed_scale").get<double>();
    c.net = Mlp(j.at("dims").get<std::vector<std::size_t>>());
    const auto params = j.at("params").get<std::vector<double>>();
    if (params.size() != c.net.param_count()) throw LoadError("parameter count does not match dims");
    std::copy(params.begin(), params.end(), c.net.params().begin());
    const auto& a = j.at("adam");
    c.adam.step = a.at("step").get<long>();
    c.adam.lr = a.at("lr").get<double>();
    c.adam.beta1 = a.at("beta1").get<double>();
    c.adam.beta2 = a.at("beta2").get<double>();
    c.adam.eps = a.at("eps").get<double>();
    c.adam.m = a.at("m").get<std::vector<double>>();
    c.adam.v = a.at("v").get<std::vector<double>>();
    if (c.adam.m.size() != params.size() || c.adam.v.size() != params.size())
      throw LoadError("optimizer state does not match the parameter count");
    return c;
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed checkpoint: ") + e.what());
  } catch (const ContractError& e) {
    throw LoadError(std::string("invalid checkpoint: ") + e.what());
  } catch (const ConfigError& e) {
    throw LoadError(std::string("invalid checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_json_file(path, checkpoint_to_json(ckpt));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  try {
    return checkpoint_from_json(read_json_file(path));
  } catch (const LoadError& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
}

void apply_features(const Checkpoint& ckpt, SimConfig& cfg) {
  cfg.kind = ckpt.kind;
  cfg.waypoint_count = ckpt.waypoint_count;
  cfg.waypoint_spacing = ckpt.waypoint_spacing;
  cfg.feature_distance_scale = ckpt.feature_distance_scale;
  cfg.feature_speed_scale = ckpt.feature_speed_scale;
  if (feature_dim(cfg) != ckpt.net.input_dim())
    throw LoadError("checkpoint network input does not match its feature encoding");
}

// ---- logs and results ----

json to_json(const RoundLog& l) {
  return {{"round", l.round},
          {"track", l.track},
          {"s1_arc", l.s1_arc},
          {"s1_speed", l.s1_speed},
          {"v_learner", l.v_learner},
          {"teacher_values", l.teacher_values},
          {"critic", l.critic},
          {"advantage", l.advantage},
          {"epsilon", l.epsilon},
          {"rehearsed", l.rehearsed},
          {"episodes_used", l.episodes_used},
          {"final_advantage", l.final_advantage},
          {"dataset_size", l.dataset_size},
          {"labels_added", l.labels_added},
          {"label_sources", l.label_sources},
          {"sim_steps", l.sim_steps}};
}

json to_json(const ImitationLog& l) {
  return {{"iteration", l.iteration},
          {"dataset_size", l.dataset_size},
          {"sim_steps", l.sim_steps},
          {"crashes", l.crashes},
          {"final_loss", l.final_loss}};
}

json to_json(const DdpgEpisodeLog& l) {
  return {{"episode", l.episode},
          {"track", l.track},
          {"steps", l.steps},
          {"return", l.episode_return},
          {"terminal", l.terminal},
          {"noise_sigma", l.noise_sigma},
          {"critic_loss", l.critic_loss},
          {"sim_steps", l.sim_steps}};
}

json to_json(const TrackResult& r) {
  return {{"track", r.track},
          {"mean_abs_error", r.mean_abs_error},
          {"completion_time", r.completion_time},
          {"checkpoints_passed", r.checkpoints_passed},
          {"checkpoints_total", r.checkpoints_total},
          {"passed_pct", r.passed_pct},
          {"resets", r.resets},
          {"crashes", r.crashes},
          {"steps", r.steps},
          {"mean_reward", r.mean_reward}};
}

json to_json(const EvalResult& r) {
  json tracks = json::array();
  for (const auto& t : r.tracks) tracks.push_back(to_json(t));
  return {{"policy", r.policy},
          {"aggregate",
           {{"mean_abs_error", r.mean_abs_error},
            {"completion_time", r.completion_time},
            {"passed_pct", r.passed_pct},
            {"mean_reward", r.mean_reward},
            {"resets", r.resets},
            {"crashes", r.crashes}}},
          {"tracks", std::move(tracks)}};
}

EvalResult eval_result_from_json(const json& j) {
  try {
    EvalResult r;
    r.policy = j.at("policy").get<std::string>();
    for (const auto& t : j.at("tracks")) {
      TrackResult tr;
      tr.track = t.at("track").get<std::string>();
      tr.mean_abs_error = t.at("mean_abs_error").get<double>();
      tr.completion_time = t.at("completion_time").get<double>();
      tr.checkpoints_passed = t.at("checkpoints_passed").get<int>();
      tr.checkpoints_total = t.at("checkpoints_total").get<int>();
      tr.passed_pct = t.at("passed_pct").get<double>();
      tr.resets = t.at("resets").get<int>();
      tr.crashes = t.at("crashes").get<int>();
      tr.steps = t.at("steps").get<long>();
      tr.mean_reward = t.at("mean_reward").get<double>();
      r.tracks.push_back(std::move(tr));
    }
    aggregate(r);
    return r;
  } catch (const json::exception& e) {
    throw LoadError(std::string("malformed evaluation result: ") + e.what());
  }
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path, const json& header) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw Error("cannot write " + path.string());
  write(header);
}

void JsonlWriter::write(const json& record) {
  out_ << record.dump() << '\n';
  out_.flush();
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open " + path.string());
  std::vector<json> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw LoadError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace oil
