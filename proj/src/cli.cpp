#include "soccerseq/cli.hpp"

#include "soccerseq/fca_engine.hpp"
#include "soccerseq/fmaca_classifier.hpp"
#include "soccerseq/match_log_io.hpp"
#include "soccerseq/pipeline.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace soccerseq::cli {

namespace fs = std::filesystem;
using pipeline::RunConfig;

namespace {

std::ofstream open_file(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

bool given(const CLI::Option* opt) { return opt->count() > 0; }

template <typename T>
void override_with(const CLI::Option* opt, const T& value, T& target) {
  if (given(opt)) target = value;
}

struct Args {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;

  // simulate
  int matches = 0, cycles = 0, team_size = 0;
  std::string home_policy, away_policy, feedback_tree, sim_out;
  bool no_jitter = false;
  // encode
  std::string log, encode_out, encode_corpus;
  int window = 0;
  std::size_t lookback = 0;
  // mine
  std::string mine_in, mine_corpus;
  std::size_t min_len = 0, max_len = 0, min_occ = 0;
  // motifs
  std::string motif_corpus, motif_label = "goal", motif_out;
  std::vector<std::string> motif_templates;
  std::size_t motif_lookback = 10;
  bool idle_wildcard = false;
  // fca-run
  std::string rules, state;
  std::size_t steps = 10;
  double tolerance = fca::kDefaultTolerance;
  // train-fmaca
  std::string fmaca_corpus, tree_out;
  int k = 0, population = 0, generations = 0;
  std::size_t fmaca_window = 0;
  std::uint64_t fmaca_seed = 0;
  // feedback
  std::string tree_path, feedback_window;
  // train-lcs
  std::string env, lcs_corpus;
  int iters = 0, ga_period = 0;
  std::size_t lcs_population = 0;
  std::uint64_t lcs_seed = 0;
  // diagnose
  std::string diag_rules, diag_out;
  std::size_t n = 0;
  int run_steps = 0, trials = 0, diag_generations = 0;
  std::uint64_t diag_seed = 0;
};

void print_trajectory(std::ostream& out, const fca::Trajectory<double>& traj) {
  for (std::size_t t = 0; t < traj.states.size(); ++t)
    out << "P(" << t << ") = (" << fca::format_state(traj.states[t]) << ")\n";
  switch (traj.terminal) {
    case fca::TerminalKind::fixed_point:
      out << "fixed point at index " << traj.index << '\n';
      break;
    case fca::TerminalKind::cycle:
      out << "cycle from index " << traj.index << " with period " << traj.period << '\n';
      break;
    case fca::TerminalKind::truncated:
      out << "no attractor within " << traj.states.size() - 1 << " steps\n";
      break;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Soccer sequence analysis workbench"};
  app.require_subcommand(1);
  app.fallthrough();
  Args a;
  auto* o_config = app.add_option("--config", a.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  auto* o_seed = app.add_option("--seed", a.seed, "master seed");
  auto* o_out_dir = app.add_option("--out-dir", a.out_dir, "directory for artifacts");
  auto* o_verbose = app.add_flag("--verbose", "log stage progress to stderr");

  auto* simulate = app.add_subcommand("simulate", "run matches and write match logs");
  auto* o_matches = simulate->add_option("--matches", a.matches, "number of matches in the corpus");
  auto* o_cycles = simulate->add_option("--cycles", a.cycles, "cycles per match");
  auto* o_home = simulate->add_option("--home-policy", a.home_policy, "shooter, chaser, random or null");
  auto* o_away = simulate->add_option("--away-policy", a.away_policy, "shooter, chaser, random or null");
  auto* o_team = simulate->add_option("--team-size", a.team_size, "agents per team");
  auto* o_tree_fb = simulate->add_option("--feedback-tree", a.feedback_tree, "tree consulted before shots");
  simulate->add_flag("--no-jitter", a.no_jitter, "deliver exactly one perception per cycle");
  simulate->add_option("--out", a.sim_out, "write a single match log here instead of a corpus");

  auto* encode = app.add_subcommand("encode", "encode match logs as game and player sequences");
  encode->add_option("--log", a.log, "single match log")->check(CLI::ExistingFile);
  auto* o_window = encode->add_option("--window", a.window, "cycles per letter");
  auto* o_lookback = encode->add_option("--lookback", a.lookback, "letters kept before each annotated event");
  encode->add_option("--out", a.encode_out, "FASTA output for --log");
  auto* o_enc_corpus = encode->add_option("--corpus", a.encode_corpus, "corpus directory");

  auto* mine = app.add_subcommand("mine", "enumerate patterns and tandem repeats");
  mine->add_option("--in", a.mine_in, "FASTA input")->check(CLI::ExistingFile);
  auto* o_min = mine->add_option("--min", a.min_len, "shortest pattern");
  auto* o_max = mine->add_option("--max", a.max_len, "longest pattern");
  auto* o_min_occ = mine->add_option("--min-occurrences", a.min_occ, "drop rarer patterns");
  auto* o_mine_corpus = mine->add_option("--corpus", a.mine_corpus, "corpus directory");

  auto* motifs = app.add_subcommand("motifs", "goal and threat motif statistics");
  motifs->add_option("--corpus", a.motif_corpus, "corpus directory")->required();
  motifs->add_option("--lookback", a.motif_lookback, "letters searched before each event");
  motifs->add_option("--motif", a.motif_templates, "template such as xxCCT (repeatable)");
  motifs->add_option("--label", a.motif_label, "goal or threat");
  motifs->add_flag("--wildcard-matches-idle", a.idle_wildcard, "let x match '-'");
  motifs->add_option("--out", a.motif_out, "CSV output (default stdout)");

  auto* fca_run = app.add_subcommand("fca-run", "evolve one fuzzy CA state");
  fca_run->add_option("--rules", a.rules, "comma-separated rule numbers")->required();
  fca_run->add_option("--state", a.state, "comma-separated cell values")->required();
  fca_run->add_option("--steps", a.steps, "maximum number of updates");
  fca_run->add_option("--tolerance", a.tolerance, "fixed-point tolerance");

  auto* train_fmaca = app.add_subcommand("train-fmaca", "train the shot feedback tree");
  auto* o_fm_corpus = train_fmaca->add_option("--corpus", a.fmaca_corpus, "corpus directory");
  auto* o_k = train_fmaca->add_option("--k", a.k, "number of classes");
  auto* o_fm_window = train_fmaca->add_option("--window", a.fmaca_window, "letters per feedback window");
  auto* o_fm_seed = train_fmaca->add_option("--seed", a.fmaca_seed, "GA seed");
  auto* o_fm_pop = train_fmaca->add_option("--population", a.population, "GA population");
  auto* o_fm_gen = train_fmaca->add_option("--generations", a.generations, "GA generations");
  train_fmaca->add_option("--out", a.tree_out, "tree JSON output");

  auto* feedback = app.add_subcommand("feedback", "ask a trained tree about an action window");
  feedback->add_option("--tree", a.tree_path, "tree JSON")->required()->check(CLI::ExistingFile);
  feedback->add_option("--window", a.feedback_window, "recent action letters")->required();

  auto* train_lcs = app.add_subcommand("train-lcs", "train the classifier system");
  auto* o_env = train_lcs->add_option("--env", a.env, "oracle or match");
  auto* o_iters = train_lcs->add_option("--iters", a.iters, "iterations");
  auto* o_ga = train_lcs->add_option("--ga-period", a.ga_period, "iterations between GA runs");
  auto* o_lcs_seed = train_lcs->add_option("--seed", a.lcs_seed, "LCS seed");
  auto* o_lcs_pop = train_lcs->add_option("--population", a.lcs_population, "rules in the population");
  auto* o_lcs_corpus = train_lcs->add_option("--corpus", a.lcs_corpus, "corpus for --env match");

  auto* diagnose = app.add_subcommand("diagnose", "entropy and mutual information per GA generation");
  auto* o_rules = diagnose->add_option("--rules", a.diag_rules, "rule-vector file, or 'random'");
  auto* o_n = diagnose->add_option("--n", a.n, "cells for random rule evolution");
  auto* o_diag_seed = diagnose->add_option("--seed", a.diag_seed, "diagnostics seed");
  auto* o_steps = diagnose->add_option("--run-steps", a.run_steps, "CA steps per trial");
  auto* o_trials = diagnose->add_option("--trials", a.trials, "random initial states");
  auto* o_diag_gen = diagnose->add_option("--generations", a.diag_generations, "GA generations for 'random'");
  diagnose->add_option("--out", a.diag_out, "CSV output");

  auto* pipeline_cmd = app.add_subcommand("pipeline", "run every stage in order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    RunConfig config = given(o_config) ? pipeline::load_run_config(a.config_path) : RunConfig{};
    override_with(o_seed, a.seed, config.seed);
    override_with(o_out_dir, a.out_dir, config.out_dir);
    if (given(o_verbose)) config.verbose = true;

    auto& s = config.simulate;
    override_with(o_matches, a.matches, s.matches);
    override_with(o_cycles, a.cycles, s.cycles);
    override_with(o_home, a.home_policy, s.home_policy);
    override_with(o_away, a.away_policy, s.away_policy);
    override_with(o_team, a.team_size, s.team_size);
    override_with(o_tree_fb, a.feedback_tree, s.feedback_tree);
    if (a.no_jitter) s.perception_jitter = false;
    override_with(o_window, a.window, config.encode.window);
    override_with(o_lookback, a.lookback, config.encode.lookback);
    override_with(o_enc_corpus, a.encode_corpus, config.encode.corpus);
    override_with(o_min, a.min_len, config.mine.min_len);
    override_with(o_max, a.max_len, config.mine.max_len);
    override_with(o_min_occ, a.min_occ, config.mine.min_occurrences);
    override_with(o_mine_corpus, a.mine_corpus, config.mine.corpus);
    override_with(o_fm_corpus, a.fmaca_corpus, config.train_fmaca.corpus);
    override_with(o_k, a.k, config.train_fmaca.k);
    override_with(o_fm_window, a.fmaca_window, config.train_fmaca.window);
    override_with(o_fm_pop, a.population, config.train_fmaca.population);
    override_with(o_fm_gen, a.generations, config.train_fmaca.generations);
    if (given(o_fm_seed)) config.train_fmaca.seed = a.fmaca_seed;
    override_with(o_env, a.env, config.train_lcs.env);
    override_with(o_iters, a.iters, config.train_lcs.iterations);
    override_with(o_ga, a.ga_period, config.train_lcs.ga_period);
    override_with(o_lcs_pop, a.lcs_population, config.train_lcs.population);
    override_with(o_lcs_corpus, a.lcs_corpus, config.train_lcs.corpus);
    if (given(o_lcs_seed)) config.train_lcs.seed = a.lcs_seed;
    override_with(o_rules, a.diag_rules, config.diagnose.rules);
    override_with(o_n, a.n, config.diagnose.n);
    override_with(o_steps, a.run_steps, config.diagnose.run_steps);
    override_with(o_trials, a.trials, config.diagnose.trials);
    override_with(o_diag_gen, a.diag_generations, config.diagnose.generations);
    if (given(o_diag_seed)) config.diagnose.seed = a.diag_seed;
    config.resolve();

    // Failures inside a stage are reported under the stage's name.
    auto stage = [](const char* name, auto&& body) {
      try {
        return body();
      } catch (const pipeline::StageError&) {
        throw;
      } catch (const std::exception& e) {
        throw pipeline::StageError(name, e.what());
      }
    };

    if (simulate->parsed()) {
      if (!a.sim_out.empty()) {
        const auto log = pipeline::simulate_match(config, *config.simulate.seed);
        sim::save_match_log(a.sim_out, log);
        out << "score " << log.score.home << ':' << log.score.away << " (" << sim::to_string(log.outcome) << ")\n";
      } else {
        const auto manifest = stage("simulate", [&] { return pipeline::stage_simulate(config); });
        out << "wrote " << manifest.entries.size() << " match logs to " << config.corpus_dir("").string() << '\n';
      }
    } else if (encode->parsed()) {
      if (!a.log.empty()) {
        if (a.encode_out.empty()) throw std::invalid_argument("encode --log needs --out");
        const auto log = sim::load_match_log(a.log);
        const std::string id = fs::path(a.log).stem().string();
        const auto game = codec::encode_game(log, config.encode.window);
        std::vector<codec::FastaRecord> records{{codec::game_header(id), game.letters}};
        for (const auto& agent : log.roster())
          records.push_back({codec::player_header(agent.id, id), codec::encode_player(log, game, agent.id).letters});
        codec::save_fasta(a.encode_out, records);
      } else {
        stage("encode", [&] { pipeline::stage_encode(config); });
      }
    } else if (mine->parsed()) {
      if (!a.mine_in.empty()) {
        std::vector<mining::NamedSequence> named;
        for (auto& rec : codec::load_fasta(a.mine_in))
          if (rec.header.rfind("game:", 0) != 0) named.push_back({rec.header, rec.letters});
        const mining::PatternQuery q{config.mine.min_len, config.mine.max_len, "ACGT-"};
        const auto report = mining::mine_patterns(named, q, config.mine.min_occurrences);
        auto p = open_file(fs::path(config.out_dir) / "patterns.csv");
        mining::write_pattern_csv(p, report);
        auto t = open_file(fs::path(config.out_dir) / "tandem.csv");
        mining::write_tandem_csv(t, report);
        out << report.rows.size() << " pattern rows, " << report.tandem_runs.size() << " tandem runs\n";
      } else {
        stage("mine", [&] { pipeline::stage_mine(config); });
      }
    } else if (motifs->parsed()) {
      const auto corpus = pipeline::load_annotated_corpus(a.motif_corpus);
      if (a.motif_templates.empty()) a.motif_templates = {"xxCCT"};
      std::vector<mining::MotifStat> rows;
      for (const auto& t : a.motif_templates) {
        const auto table = mining::motif_table(corpus, {t, mining::motif_label_from_string(a.motif_label)},
                                               a.motif_lookback, a.idle_wildcard);
        rows.insert(rows.end(), table.begin(), table.end());
      }
      if (a.motif_out.empty()) {
        mining::write_motif_csv(out, rows);
      } else {
        auto f = open_file(a.motif_out);
        mining::write_motif_csv(f, rows);
      }
    } else if (fca_run->parsed()) {
      const auto rules = fca::parse_rules(a.rules);
      const auto state = fca::parse_state(a.state);
      print_trajectory(out, fca::evolve(state, rules, a.steps, a.tolerance));
    } else if (train_fmaca->parsed()) {
      stage("train-fmaca", [&] { pipeline::stage_train_fmaca(config, a.tree_out); });
    } else if (feedback->parsed()) {
      const auto tree = fmaca::load_tree(a.tree_path);
      const auto r = fmaca::ca_feedback(tree, a.feedback_window);
      out << (r.decision == fmaca::Feedback::proceed ? "proceed" : "veto");
      if (r.flagged) out << " (window shorter than " << tree.window << ")";
      out << '\n';
    } else if (train_lcs->parsed()) {
      stage("train-lcs", [&] { pipeline::stage_train_lcs(config); });
    } else if (diagnose->parsed()) {
      stage("diagnose", [&] { pipeline::stage_diagnose(config, a.diag_out); });
    } else if (pipeline_cmd->parsed()) {
      pipeline::pipeline_run(config);
      out << "pipeline finished; artifacts in " << config.out_dir << '\n';
    }
  } catch (const pipeline::StageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace soccerseq::cli
