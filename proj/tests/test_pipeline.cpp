#include <gtest/gtest.h>

#include "soccerseq/cli.hpp"
#include "soccerseq/pipeline.hpp"

#include <fstream>
#include <sstream>

using namespace soccerseq;
using namespace soccerseq::pipeline;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("soccerseq_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "soccerseq");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

RunConfig tiny(const fs::path& dir) {
  RunConfig c;
  c.seed = 3;
  c.out_dir = dir.string();
  c.simulate.matches = 1;
  c.simulate.cycles = 300;
  c.train_fmaca.generations = 10;
  c.train_lcs.iterations = 4000;
  c.diagnose.generations = 2;
  c.diagnose.run_steps = 200;
  c.diagnose.trials = 2;
  return c;
}

}  // namespace

TEST(Config, DefaultsAndSeedResolution) {
  auto c = parse_run_config(R"({"seed": 10})");
  EXPECT_EQ(c.simulate.matches, 100);
  EXPECT_EQ(c.train_lcs.ga_period, 4000);
  c.resolve();
  EXPECT_EQ(c.simulate.seed, 10u);
  EXPECT_EQ(c.train_fmaca.seed, 11u);
  EXPECT_EQ(c.train_lcs.seed, 12u);
  EXPECT_EQ(c.diagnose.seed, 13u);
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(parse_run_config(R"({"sed": 1})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"mine": {"minimum": 2}})"), ConfigError);
  EXPECT_THROW(parse_run_config(R"({"mine": {"min": "two"}})"), ConfigError);
  EXPECT_THROW(parse_run_config("not json"), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  auto c = parse_run_config(R"({"seed": 4, "train_lcs": {"iterations": 123}})");
  const auto back = parse_run_config(run_config_to_json(c));
  EXPECT_EQ(back.seed, 4u);
  EXPECT_EQ(back.train_lcs.iterations, 123);
  EXPECT_EQ(run_config_to_json(back), run_config_to_json(c));
}

TEST(Annotations, GoalAndConcedingThreat) {
  sim::MatchLog log;
  log.config.team_size = 2;
  for (int c = 0; c < 10; ++c) {
    sim::CycleRecord r;
    r.cycle = c;
    r.agents = sim::kickoff_formation(log.config);
    r.ball.position = sim::Vec2(50.0, 0.0);
    if (c == 3) r.events.push_back({3, sim::EventKind::kick, 'a', 0, sim::Team::home, true});
    if (c == 7) r.events.push_back({7, sim::EventKind::goal, 0, 0, sim::Team::home, true});
    log.cycles.push_back(r);
  }
  codec::GameSequence game{"-----", 2};
  std::vector<codec::PlayerSequence> players{{'a', "ACGTA"}, {'c', "-----"}, {'d', "-----"}};
  const auto recs = annotate_match(log, game, players, "m0", 10);
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].sequence_id, "player:a@game:m0");
  EXPECT_EQ(recs[0].label, mining::MotifLabel::goal);
  EXPECT_EQ(recs[0].index, 4u);
  EXPECT_EQ(recs[0].window, "------ACGT");
  EXPECT_EQ(recs[1].sequence_id, "player:d@game:m0");
  EXPECT_EQ(recs[1].label, mining::MotifLabel::threat);
}

TEST(Stages, MissingCorpusNamesStage) {
  const auto dir = scratch("missing");
  auto c = tiny(dir);
  try {
    pipeline_run([&] {
      auto bad = c;
      bad.simulate.matches = 0;
      return bad;
    }());
    FAIL() << "pipeline accepted zero matches";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "simulate");
  }
  const auto r2 = invoke({"--out-dir", dir.string(), "mine", "--corpus", (dir / "nowhere").string()});
  EXPECT_EQ(r2.code, 2);
  EXPECT_NE(r2.err.find("mine"), std::string::npos);
}

TEST(Stages, TinyPipelineWritesArtifactsDeterministically) {
  const auto a = scratch("tiny_a");
  const auto b = scratch("tiny_b");
  pipeline_run(tiny(a));
  pipeline_run(tiny(b));
  for (const char* f : {"patterns.csv", "tandem.csv", "motifs.csv", "tree.json", "lcs_population.csv",
                        "lcs_curve.csv", "diag.csv", "corpus/match_000.jsonl", "corpus/match_000.fasta",
                        "corpus/match_000.annotations.json"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  const auto manifest = load_manifest(a / "corpus" / "manifest.json");
  ASSERT_EQ(manifest.entries.size(), 1u);
  EXPECT_EQ(manifest.entries[0].match_id, "match_000");
  EXPECT_FALSE(load_annotated_corpus(a / "corpus").empty());
}

TEST(Cli, FcaRunPrintsTrajectory) {
  const auto r = invoke({"fca-run", "--rules", "238,254,238,252", "--state", "0.8,0.2,0.2,0.0"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("P(1) = (1.00,1.00,0.20,0.20)"), std::string::npos);
  EXPECT_NE(r.out.find("P(4) = (1.00,1.00,1.00,1.00)"), std::string::npos);
  EXPECT_NE(r.out.find("fixed point at index 4"), std::string::npos);
}

TEST(Cli, BadInputsFail) {
  EXPECT_EQ(invoke({"fca-run", "--rules", "238,30", "--state", "0.1,0.2"}).code, 1);
  EXPECT_NE(invoke({"no-such-command"}).code, 0);
  EXPECT_NE(invoke({"fca-run", "--rules", "238"}).code, 0);
}

TEST(Cli, SimulateEncodeMine) {
  const auto dir = scratch("cli");
  const auto corpus = (dir / "corpus").string();
  const auto sim = invoke({"--seed", "5", "--out-dir", dir.string(), "simulate", "--matches", "2", "--cycles", "200"});
  ASSERT_EQ(sim.code, 0) << sim.err;
  const auto enc = invoke({"--out-dir", dir.string(), "encode", "--window", "5"});
  ASSERT_EQ(enc.code, 0) << enc.err;
  const auto r = invoke({"--out-dir", dir.string(), "mine", "--corpus", corpus, "--min", "2", "--max", "3"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "corpus" / "match_001.fasta"));
  EXPECT_TRUE(fs::exists(dir / "patterns.csv"));
}
