#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "oil/io.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result oil_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = oil::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), {}};
}

int line_count(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "oil_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// One shared track root; generated once per process.
const fs::path& tracks() {
  static const fs::path root = [] {
    const auto dir = scratch("tracks");
    const auto r = oil_cli({"gen-tracks", "--seed", "1", "--out", dir.string()});
    REQUIRE(r.code == 0);
    return dir;
  }();
  return root;
}

std::vector<std::string> tiny_oil(const fs::path& out) {
  return {"train",         "--tracks",         tracks().string(), "--out",          out.string(),
          "--rounds",      "3",                "--set",           "horizon=40",     "--set",
          "max_episodes=2", "--set",           "act_steps=20"};
}

}  // namespace

TEST_CASE("gen-tracks writes the requested suites deterministically") {
  const auto a = scratch("gen_a"), b = scratch("gen_b");
  REQUIRE(oil_cli({"gen-tracks", "--seed", "3", "--out", a.string()}).code == 0);
  REQUIRE(oil_cli({"gen-tracks", "--seed", "3", "--out", b.string()}).code == 0);
  CHECK(oil::load_track_dir(a / "train").size() == 6);
  CHECK(oil::load_track_dir(a / "test").size() == 4);
  for (const char* f : {"train/track_00.json", "train/track_05.json", "test/track_03.json"})
    CHECK(slurp(a / f) == slurp(b / f));

  const auto c = scratch("gen_c");
  REQUIRE(oil_cli({"gen-tracks", "--seed", "4", "--out", c.string()}).code == 0);
  CHECK(slurp(a / "test/track_00.json") != slurp(c / "test/track_00.json"));

  REQUIRE(oil_cli({"gen-tracks", "--seed", "3", "--out", c.string(), "--train-count", "2", "--test-count", "0"})
              .code == 0);
  CHECK(oil::load_track_dir(c / "train").size() == 2);
  CHECK(oil::load_track_dir(c / "test").empty());

  const auto j = oil::read_json_file(a / "train/track_00.json");
  CHECK(j.at("provenance").at("seed") == 3);
  CHECK(j.at("provenance").at("tool_version") == "0.1.0");
  CHECK(j.at("provenance").at("config_hash").get<std::string>().size() == 16);
}

TEST_CASE("errors give a nonzero exit and one diagnostic line") {
  const auto out = scratch("errors");
  const Result missing = oil_cli({"train", "--tracks", (out / "nowhere").string(), "--out", out.string()});
  CHECK(missing.code != 0);
  CHECK(line_count(missing.err) == 1);

  const Result bad_ckpt = oil_cli({"eval", "--tracks", tracks().string(), "--out", out.string(), "--checkpoint",
                                   (out / "nope.json").string()});
  CHECK(bad_ckpt.code == 1);
  CHECK(line_count(bad_ckpt.err) == 1);

  const Result unknown_key = oil_cli({"train", "--tracks", tracks().string(), "--out", out.string(), "--set", "foo=1"});
  CHECK(unknown_key.code == 2);
  CHECK(line_count(unknown_key.err) == 1);

  const Result bad_flag = oil_cli({"train", "--bogus"});
  CHECK(bad_flag.code == 2);
  CHECK(line_count(bad_flag.err) == 1);

  CHECK(oil_cli({}).code != 0);
  CHECK(oil_cli({"train", "--tracks", tracks().string(), "--out", out.string(), "--trainer", "sarsa"}).code == 2);
  CHECK(oil_cli({"train", "--tracks", tracks().string(), "--out", out.string(), "--vehicle", "boat"}).code == 2);
  CHECK(oil_cli({"train", "--tracks", tracks().string(), "--out", out.string(), "--teachers", "9"}).code != 0);
  CHECK(oil_cli({"eval", "--tracks", tracks().string(), "--out", out.string()}).code == 2);
  CHECK(oil_cli({"ablate", "--tracks", tracks().string(), "--out", out.string(), "--N-list", "0"}).code == 2);
}

TEST_CASE("train then eval is deterministic and composable") {
  const auto a = scratch("train_a"), b = scratch("train_b");
  REQUIRE(oil_cli(tiny_oil(a)).code == 0);
  REQUIRE(oil_cli(tiny_oil(b)).code == 0);
  CHECK(slurp(a / "train_log.jsonl") == slurp(b / "train_log.jsonl"));
  CHECK(slurp(a / "checkpoint.json") == slurp(b / "checkpoint.json"));
  CHECK(slurp(a / "settings.txt") == slurp(b / "settings.txt"));

  const auto log = oil::read_jsonl(a / "train_log.jsonl");
  REQUIRE(log.size() == 4);
  CHECK(log[0].at("type") == "header");
  CHECK(log[0].at("teachers").size() == 5);
  CHECK(log[1].at("type") == "round");

  for (const auto& dir : {a, b})
    REQUIRE(oil_cli({"eval", "--tracks", tracks().string(), "--out", dir.string(), "--checkpoint",
                     (dir / "checkpoint.json").string(), "--name", "learner"})
                .code == 0);
  CHECK(slurp(a / "eval_learner.json") == slurp(b / "eval_learner.json"));
  CHECK(slurp(a / "eval_learner.csv") == slurp(b / "eval_learner.csv"));
  const auto csv = slurp(a / "eval_learner.csv");
  CHECK(csv.rfind("# config_hash=", 0) == 0);
  CHECK(line_count(csv) == 2 + 4 + 1);

  const auto c = scratch("train_c");
  auto other_seed = tiny_oil(c);
  other_seed.insert(other_seed.end(), {"--seed", "2"});
  REQUIRE(oil_cli(other_seed).code == 0);
  CHECK(slurp(a / "checkpoint.json") != slurp(c / "checkpoint.json"));
}

TEST_CASE("teachers are evaluated directly and compared in order") {
  const auto out = scratch("teachers");
  const Result r = oil_cli({"eval", "--tracks", tracks().string(), "--out", out.string(), "--teacher", "3,1"});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(out / "eval_teacher3-balanced.json"));
  CHECK(fs::exists(out / "eval_teacher1-cautious.json"));
  CHECK(r.out.find("teacher3") < r.out.find("teacher1"));

  const Result cmp = oil_cli({"compare", "--out", out.string(), (out / "eval_teacher1-cautious.json").string(),
                              (out / "eval_teacher3-balanced.json").string()});
  REQUIRE(cmp.code == 0);
  CHECK(cmp.out.find("teacher1") < cmp.out.find("teacher3"));
  CHECK(fs::exists(out / "comparison.csv"));
  CHECK(oil_cli({"compare", (out / "comparison.csv").string()}).code != 0);
}

TEST_CASE("config file precedence: flags over file over defaults") {
  const auto out = scratch("precedence");
  {
    std::ofstream cfg(out / "run.cfg");
    cfg << "# tiny run\nrounds = 2\nhorizon = 30\nmax_episodes = 1\nact_steps = 10\nseed = 5\n";
  }
  const auto run_dir = out / "run";
  REQUIRE(oil_cli({"train", "--tracks", tracks().string(), "--out", run_dir.string(), "--config",
                   (out / "run.cfg").string(), "--seed", "8"})
              .code == 0);
  const auto settings = slurp(run_dir / "settings.txt");
  CHECK(settings.find("\nseed=8\n") != std::string::npos);
  CHECK(settings.find("\nrounds=2\n") != std::string::npos);
  CHECK(settings.find("\nhorizon=30\n") != std::string::npos);
  CHECK(settings.find("\nvehicle=car\n") != std::string::npos);
  CHECK(oil::read_jsonl(run_dir / "train_log.jsonl").size() == 3);
  CHECK(oil::load_checkpoint(run_dir / "checkpoint.json").provenance.seed == 8u);

  {
    std::ofstream cfg(out / "bad.cfg");
    cfg << "roudns = 2\n";
  }
  const Result bad = oil_cli({"train", "--tracks", tracks().string(), "--out", run_dir.string(), "--config",
                              (out / "bad.cfg").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("roudns") != std::string::npos);
}

TEST_CASE("bc, dagger and ddpg trainers run from the command line") {
  const auto out = scratch("baselines");
  const std::vector<std::string> imitation{"--set", "bc_episodes=2", "--set", "horizon=40", "--set",
                                           "bc_train_steps=20"};
  for (const std::string trainer : {"bc", "dagger"}) {
    std::vector<std::string> args{"train", "--tracks", tracks().string(), "--out", (out / trainer).string(),
                                  "--trainer", trainer, "--set", "dagger_iterations=2"};
    args.insert(args.end(), imitation.begin(), imitation.end());
    REQUIRE(oil_cli(args).code == 0);
    const auto ckpt = oil::load_checkpoint(out / trainer / "checkpoint.json");
    CHECK(ckpt.trainer == trainer);
    CHECK(ckpt.net.dims().back() == 2);
  }
  CHECK(oil::read_jsonl(out / "bc" / "train_log.jsonl").size() == 2);
  CHECK(oil::read_jsonl(out / "dagger" / "train_log.jsonl").size() == 3);

  REQUIRE(oil_cli({"train", "--tracks", tracks().string(), "--out", (out / "ddpg").string(), "--trainer", "ddpg",
                   "--steps", "300", "--set", "horizon=50", "--set", "batch_size=16"})
              .code == 0);
  const auto ddpg = oil::load_checkpoint(out / "ddpg" / "checkpoint.json");
  CHECK(ddpg.net.dims().back() == 1);
  CHECK(ddpg.fixed_throttle == 0.5);
  REQUIRE(oil_cli({"eval", "--tracks", tracks().string(), "--out", (out / "ddpg").string(), "--checkpoint",
                   (out / "ddpg" / "checkpoint.json").string()})
              .code == 0);
  CHECK(fs::exists(out / "ddpg" / "eval_ddpg.csv"));
}

TEST_CASE("ablate with a custom N list gives one row and resumes from cell files") {
  const auto out = scratch("ablate");
  const std::vector<std::string> args{"ablate", "--tracks", tracks().string(), "--out", out.string(), "--N-list",
                                      "100",    "--rounds", "2",   "--set",  "max_episodes=1", "--set",
                                      "act_steps=20"};
  const Result first = oil_cli(args);
  REQUIRE(first.code == 0);
  const auto csv = slurp(out / "ablation.csv");
  CHECK(line_count(csv) == 3);
  CHECK(csv.find("\n\"1,2,3,4,5\",100,ok,") != std::string::npos);
  CHECK(first.err.find("done") != std::string::npos);

  const Result second = oil_cli(args);
  REQUIRE(second.code == 0);
  CHECK(second.err.find("cached") != std::string::npos);
  CHECK(second.err.find("done") == std::string::npos);
  CHECK(slurp(out / "ablation.csv") == csv);
  CHECK(second.out == first.out);

  // A changed budget invalidates the cell.
  auto longer = args;
  longer[8] = "3";
  const Result third = oil_cli(longer);
  REQUIRE(third.code == 0);
  CHECK(third.err.find("done") != std::string::npos);
}
