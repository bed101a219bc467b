#include <gtest/gtest.h>

#include <cstdlib>
#include <nlohmann/json.hpp>
#include <set>

#include "ecl/cli/commands.hpp"
#include "ecl/common/error.hpp"
#include "ecl/common/io.hpp"
#include "ecl/executor/expert.hpp"
#include "ecl/world/scene.hpp"
#include "support/fixtures.hpp"

using namespace ecl;
namespace fs = std::filesystem;
namespace fx = ecl::fixture;
using nlohmann::json;

namespace {

json default_json() { return json::parse(read_file(fx::data_dir() / "default_config.json")); }

RunConfig config_from(const json& j) { return RunConfig::parse(j.dump(), fx::data_dir()); }

RunConfig small_config(int seen = 3, int unseen = 2, bool oracle = false) {
  json j = default_json();
  j["executor"]["oracle_semantics"] = oracle;
  j["scenes"]["seen"] = seen;
  j["scenes"]["unseen"] = unseen;
  j["train"]["epochs"] = 3;
  return config_from(j);
}

// Per-process directory, removed when the test ends.
struct Scratch {
  fs::path root = fs::temp_directory_path() / ("ecl-cli-test-" + std::to_string(::getpid()));
  ~Scratch() { fs::remove_all(root); }
};

fs::path scratch(const std::string& name) {
  static Scratch s;
  const fs::path dir = s.root / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<fs::path> of_split(const std::vector<fs::path>& files, Split s) {
  std::vector<fs::path> out;
  for (const auto& f : files)
    if (f.filename().string().starts_with(std::string(split_name(s)) + "_")) out.push_back(f);
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(ECL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, DefaultLoadsAndValidates) {
  const RunConfig c = RunConfig::load(fx::data_dir() / "default_config.json");
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.seen_scenes, 40);
  EXPECT_EQ(c.unseen_scenes, 50);
  EXPECT_EQ(RunConfig::parse(c.to_json(), fx::data_dir()).hash(), c.hash());
}

TEST(Config, BadValuesAreConfigErrors) {
  auto bad = [](auto edit) {
    json j = default_json();
    edit(j);
    return j;
  };
  EXPECT_THROW(RunConfig::parse("{not json", fx::data_dir()), ConfigError);
  EXPECT_THROW(config_from(bad([](json& j) { j["format"] = "v0"; })), ConfigError);
  EXPECT_THROW(config_from(bad([](json& j) { j["surprise"] = 1; })), ConfigError);
  EXPECT_THROW(config_from(bad([](json& j) { j["train"]["epochz"] = 1; })), ConfigError);
  EXPECT_THROW(config_from(bad([](json& j) { j["train"]["epochs"] = "many"; })), ConfigError);
  EXPECT_THROW(config_from(bad([](json& j) { j["executor"]["budget"] = -1; })).validate(), ConfigError);
  EXPECT_THROW(config_from(bad([](json& j) { j["executor"]["corruption_prob"] = 1.5; })).validate(), ConfigError);
  EXPECT_THROW(config_from(bad([](json& j) { j["scenes"]["counts"]["Tomato"] = {3, 1}; })).validate(),
               ConfigError);
  EXPECT_THROW(config_from(bad([](json& j) { j["catalog"] = "missing.txt"; })).validate(), ConfigError);
  EXPECT_THROW(Pipeline(config_from(bad([](json& j) { j["scenes"]["counts"]["Unicorn"] = {0, 1}; }))),
               ConfigError);
}

TEST(Config, ReseedChangesDerivedSeeds) {
  RunConfig a = small_config();
  RunConfig b = a;
  b.reseed(2);
  EXPECT_NE(a.hash(), b.hash());
  b.reseed(1);
  EXPECT_EQ(a.hash(), b.hash());
}

TEST(GenScenes, SingleSceneRoundTrips) {
  const Pipeline p(small_config());
  const fs::path dir = scratch("one");
  Warnings w;
  const auto files = cmd_gen_scenes(p, dir, Split::Unseen, 1, w);
  ASSERT_EQ(files.size(), 1u);
  EXPECT_EQ(files[0].filename(), scene_file_name(Split::Unseen, 0));
  const std::string text = read_file(files[0]);
  EXPECT_EQ(serialize_world(parse_world(text)), text);
  EXPECT_EQ(serialize_world(make_scene(p, Split::Unseen, 0, w)), text);
}

TEST(GenScenes, ByteDeterministicAndSplitsDisjoint) {
  const Pipeline p(small_config(6, 6));
  Warnings w;
  const auto a = cmd_gen_scenes(p, scratch("det-a"), std::nullopt, std::nullopt, w);
  const auto b = cmd_gen_scenes(p, scratch("det-b"), std::nullopt, std::nullopt, w);
  ASSERT_EQ(a.size(), 12u);
  ASSERT_EQ(a.size(), b.size());
  std::set<std::string> seen, unseen;
  for (size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(read_file(a[i]), read_file(b[i]));
    (a[i].filename().string().starts_with("seen_") ? seen : unseen).insert(read_file(a[i]));
  }
  EXPECT_EQ(seen.size(), 6u);
  EXPECT_EQ(unseen.size(), 6u);
  for (const auto& s : seen) EXPECT_EQ(unseen.count(s), 0u);
}

TEST(GenDemos, NoScenesNoDemos) {
  const Pipeline p(small_config());
  Warnings w;
  EXPECT_TRUE(cmd_gen_demos(p, {}, scratch("empty-demos"), w).empty());
}

TEST(GenDemos, DemosReplayWithCompletions) {
  const Pipeline p(small_config());
  const fs::path dir = scratch("demos");
  Warnings w;
  const auto scenes = cmd_gen_scenes(p, dir / "scenes", Split::Seen, std::nullopt, w);
  const auto demos = cmd_gen_demos(p, scenes, dir / "demos", w);
  ASSERT_GE(demos.size(), scenes.size());
  for (const auto& f : demos) {
    const Demonstration d = Demonstration::parse(read_file(f), *p.catalog);
    EXPECT_FALSE(d.completions.empty()) << f;
    const GridWorld world = parse_world(read_file(dir / "scenes" / (d.scene + ".world")));
    GridWorld end;
    EXPECT_NO_THROW(replay(world, d, p.features, p.demo_sensor(), &end)) << f;
    EXPECT_TRUE(evaluate_goal_conditions(end, parse({d.instruction, std::nullopt}, p.grammar, *p.catalog))
                    .satisfied())
        << f;
  }
}

TEST(Run, EmptyEpisodeListWritesEmptyFile) {
  const Pipeline p(small_config(3, 2, true));
  const fs::path dir = scratch("run-empty");
  Warnings w;
  const auto scenes = cmd_gen_scenes(p, dir / "scenes", Split::Unseen, std::nullopt, w);
  const auto rs = cmd_run(p, scenes, std::vector<EpisodeSpec>{}, nullptr, Split::Unseen, dir / "results.jsonl", w);
  EXPECT_TRUE(rs.empty());
  EXPECT_TRUE(fs::exists(dir / "results.jsonl"));
  EXPECT_EQ(read_file(dir / "results.jsonl"), "");
}

TEST(Run, LearnedSemanticsNeedAModel) {
  const Pipeline p(small_config());
  const fs::path dir = scratch("run-nomodel");
  Warnings w;
  const auto scenes = cmd_gen_scenes(p, dir / "scenes", Split::Unseen, 1, w);
  EXPECT_THROW(cmd_run(p, scenes, std::nullopt, nullptr, Split::Unseen, dir / "results.jsonl", w), ConfigError);
}

TEST(Run, UnparseableInstructionIsSkipped) {
  const Pipeline p(small_config(3, 2, true));
  const fs::path dir = scratch("run-skip");
  Warnings w;
  const auto scenes = cmd_gen_scenes(p, dir / "scenes", Split::Unseen, 1, w);
  const int before = w.count();
  const auto rs = cmd_run(p, scenes, parse_episode_list("unseen_000\tjuggle three moons\n"), nullptr, Split::Unseen,
                          dir / "results.jsonl", w);
  EXPECT_TRUE(rs.empty());
  ASSERT_GT(w.count(), before);
  EXPECT_NE(w.messages.back().find("skipped 'juggle three moons'"), std::string::npos);
}

TEST(Eval, FixtureThroughFiles) {
  const fs::path dir = scratch("eval");
  std::vector<EpisodeResult> rs(2);
  rs[0].id = "a";
  rs[0].success = true;
  rs[0].goal_conditions_met = rs[0].goal_conditions_total = 1;
  rs[0].agent_path_length = 20;
  rs[0].expert_path_length = 10;
  rs[1].id = "b";
  rs[1].goal_conditions_total = 2;
  rs[1].agent_path_length = 5;
  rs[1].expert_path_length = 10;
  rs[1].error = ErrorMode::Collision;
  write_file_atomic(dir / "results.jsonl", results_to_jsonl(rs));
  Warnings w;
  const MetricsReport r = cmd_eval({dir / "results.jsonl"}, dir / "out", w);
  EXPECT_DOUBLE_EQ(r.overall.sr, 0.5);
  EXPECT_DOUBLE_EQ(r.overall.plwsr, 0.25);
  EXPECT_DOUBLE_EQ(r.error_percent.at("Collision"), 100.0);
  EXPECT_EQ(json::parse(read_file(dir / "out" / "metrics.json")).is_object(), true);
  EXPECT_FALSE(read_file(dir / "out" / "metrics.txt").empty());
}

TEST(Cli, EndToEndSmoke) {
  const fs::path dir = scratch("smoke");
  json j = default_json();
  j["catalog"] = (fx::data_dir() / "catalog.txt").string();
  j["grammar"] = (fx::data_dir() / "grammar.txt").string();
  j["scenes"]["seen"] = 2;
  j["scenes"]["unseen"] = 2;
  j["train"]["epochs"] = 2;
  write_file_atomic(dir / "config.json", j.dump());
  const std::string cfg = "--config " + (dir / "config.json").string() + " ";
  const std::string d = dir.string();
  ASSERT_EQ(run_cli(cfg + "--out " + d + "/scenes gen-scenes"), 0);
  ASSERT_EQ(run_cli(cfg + "--out " + d + "/demos gen-demos --scenes " + d + "/scenes"), 0);
  ASSERT_EQ(run_cli(cfg + "--out " + d + "/model train --scenes " + d + "/scenes --demos " + d + "/demos"), 0);
  ASSERT_EQ(run_cli(cfg + "--out " + d + "/run run --scenes " + d + "/scenes --model " + d + "/model"), 0);
  ASSERT_EQ(run_cli("--out " + d + "/eval eval " + d + "/run/results.jsonl"), 0);
  ASSERT_EQ(run_cli(cfg + "--out " + d + "/reason reason --scenes " + d + "/scenes --model " + d + "/model"), 0);
  EXPECT_TRUE(fs::exists(dir / "eval" / "metrics.json"));
  EXPECT_TRUE(fs::exists(dir / "run" / "warnings_run.json"));
  EXPECT_FALSE(list_files(dir / "reason", ".jsonl").empty());
}

TEST(Cli, ErrorsExitNonZero) {
  const fs::path dir = scratch("errors");
  write_file_atomic(dir / "bad.json", "{\"format\": \"ecl-config v1\", \"seed\": \"x\"}");
  EXPECT_NE(run_cli("--config " + (dir / "bad.json").string() + " --out " + dir.string() + " gen-scenes"), 0);
  EXPECT_NE(run_cli("--out " + dir.string() + " eval " + (dir / "missing.jsonl").string()), 0);
  EXPECT_NE(run_cli("frobnicate"), 0);
  EXPECT_NE(run_cli("--split sideways --out " + dir.string() + " gen-scenes"), 0);
}
