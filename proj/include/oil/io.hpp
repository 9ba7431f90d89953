#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oil/baselines.hpp"
#include "oil/eval.hpp"
#include "oil/mlp.hpp"
#include "oil/oil.hpp"
#include "oil/teachers.hpp"

namespace oil {

inline constexpr const char* kToolVersion = "0.1.0";

// Stamp carried by every file the tools write.
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
};

nlohmann::json to_json(const Provenance& p);
Provenance provenance_from_json(const nlohmann::json& j);

// ---- tracks ----

nlohmann::json track_to_json(const Track& track, const Provenance& prov);
Track track_from_json(const nlohmann::json& j);
void save_track(const std::filesystem::path& path, const Track& track, const Provenance& prov);
// Throws LoadError on a missing or malformed file.
Track load_track(const std::filesystem::path& path);
// Every *.json file in `dir`, sorted by file name. Throws ConfigError when the
// directory does not exist.
std::vector<NamedTrack> load_track_dir(const std::filesystem::path& dir);

// ---- teacher ensembles ----

nlohmann::json to_json(const TeacherSpec& spec);
TeacherSpec teacher_spec_from_json(const nlohmann::json& j);
// File holds {"teachers": [spec, ...]}. Throws LoadError.
void save_teacher_specs(const std::filesystem::path& path, const std::vector<TeacherSpec>& specs);
std::vector<TeacherSpec> load_teacher_specs(const std::filesystem::path& path);

// ---- checkpoints ----

struct Checkpoint {
  std::string trainer;  // oil | bc | dagger | ddpg
  VehicleKind kind = VehicleKind::car;
  std::optional<double> fixed_throttle;
  Mlp net;
  AdamState adam;
  // Feature encoding the net was trained with.
  int waypoint_count = 5;
  double waypoint_spacing = 5.0;
  double feature_distance_scale = 25.0;
  double feature_speed_scale = 20.0;
  Provenance provenance;
};

nlohmann::json checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const nlohmann::json& j);
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Copies the checkpoint's feature encoding into a simulator config.
void apply_features(const Checkpoint& ckpt, SimConfig& cfg);

// ---- logs and results ----

nlohmann::json to_json(const RoundLog& log);
nlohmann::json to_json(const ImitationLog& log);
nlohmann::json to_json(const DdpgEpisodeLog& log);

nlohmann::json to_json(const TrackResult& r);
nlohmann::json to_json(const EvalResult& r);
EvalResult eval_result_from_json(const nlohmann::json& j);

// JSON Lines: a header record, then one record per line. Flushed per line so a
// killed run leaves a readable prefix.
class JsonlWriter {
 public:
  JsonlWriter(const std::filesystem::path& path, const nlohmann::json& header);
  void write(const nlohmann::json& record);

 private:
  std::ofstream out_;
};

std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
// Pretty-printed, trailing newline. Writes to a temporary name and renames so
// readers never see a partial file.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace oil
