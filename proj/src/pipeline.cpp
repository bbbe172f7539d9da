#include "soccerseq/pipeline.hpp"

#include "soccerseq/ca_diagnostics.hpp"
#include "soccerseq/fmaca_classifier.hpp"
#include "soccerseq/lcs_engine.hpp"
#include "soccerseq/match_log_io.hpp"
#include "soccerseq/shooting_behavior.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace soccerseq::pipeline {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kRunConfigName = "run_config.json";
constexpr const char* kPatternCsv = "patterns.csv";
constexpr const char* kTandemCsv = "tandem.csv";
constexpr const char* kMotifCsv = "motifs.csv";
constexpr const char* kTreeJson = "tree.json";
constexpr const char* kPopulationCsv = "lcs_population.csv";
constexpr const char* kCurveCsv = "lcs_curve.csv";
constexpr const char* kDiagCsv = "diag.csv";

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// Reads the keys of one JSON object, complaining about anything left over.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("config section '" + name_ + "' must be an object");
  }

  template <typename T>
  void get(const char* key, T& value) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    try {
      value = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError("config key '" + name_ + "." + key + "' has the wrong type");
    }
  }

  void get_seed(const char* key, std::optional<std::uint64_t>& value) {
    if (!j_.contains(key)) return;
    std::uint64_t v = 0;
    get(key, v);
    value = v;
  }

  const json* child(const char* key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return &j_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError("unknown config key '" + name_ + "." + key + "'");
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

void put_seed(json& j, const std::optional<std::uint64_t>& seed) {
  if (seed) j["seed"] = *seed;
}

sim::FieldConfig field_for(const RunConfig& config, std::uint64_t seed) {
  sim::FieldConfig field;
  field.cycle_count = config.simulate.cycles;
  field.team_size = config.simulate.team_size;
  field.perception_jitter = config.simulate.perception_jitter;
  field.rng_seed = seed;
  return field;
}

std::unique_ptr<sim::Policy> make_policy(const std::string& name, const sim::FieldConfig& field,
                                         std::uint64_t seed, const sim::ShotFeedback& feedback) {
  if (name == "shooter") return std::make_unique<sim::ShootingBehavior>(field, sim::ShootingConfig{}, feedback);
  if (name == "chaser") return std::make_unique<sim::ChaserPolicy>(field);
  if (name == "random") return std::make_unique<sim::RandomPolicy>(seed);
  if (name == "null") return std::make_unique<sim::NullPolicy>();
  throw ConfigError("unknown policy '" + name + "' (shooter, chaser, random, null)");
}

std::string match_id_for(int i) {
  std::ostringstream out;
  out << "match_" << std::setw(3) << std::setfill('0') << i;
  return out.str();
}

std::string padded_window(const std::string& letters, std::size_t index, std::size_t lookback) {
  std::string out(lookback, codec::kIdle);
  for (std::size_t i = 0; i < lookback && i < index; ++i) out[lookback - 1 - i] = letters[index - 1 - i];
  return out;
}

fs::path corpus_manifest(const fs::path& dir) { return dir / kManifestName; }

template <typename Fn>
void run_stage(const char* name, bool verbose, Fn&& fn) {
  if (verbose) std::fprintf(stderr, "[%s] start\n", name);
  try {
    fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
  if (verbose) std::fprintf(stderr, "[%s] done\n", name);
}

}  // namespace

// Configuration.

void RunConfig::resolve() {
  if (!simulate.seed) simulate.seed = seed;
  if (!train_fmaca.seed) train_fmaca.seed = seed + 1;
  if (!train_lcs.seed) train_lcs.seed = seed + 2;
  if (!diagnose.seed) diagnose.seed = seed + 3;
}

fs::path RunConfig::corpus_dir(const std::string& override_path) const {
  return override_path.empty() ? fs::path(out_dir) / "corpus" : fs::path(override_path);
}

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  Section top(j, "config");
  top.get("schema_version", c.schema_version);
  if (c.schema_version != kRunConfigSchemaVersion)
    throw ConfigError("config schema_version " + std::to_string(c.schema_version) + " is not supported");
  top.get("seed", c.seed);
  top.get("out_dir", c.out_dir);
  top.get("verbose", c.verbose);

  if (const json* s = top.child("simulate")) {
    Section sec(*s, "simulate");
    sec.get("matches", c.simulate.matches);
    sec.get("cycles", c.simulate.cycles);
    sec.get("home_policy", c.simulate.home_policy);
    sec.get("away_policy", c.simulate.away_policy);
    sec.get("team_size", c.simulate.team_size);
    sec.get("perception_jitter", c.simulate.perception_jitter);
    sec.get("feedback_tree", c.simulate.feedback_tree);
    sec.get_seed("seed", c.simulate.seed);
    sec.finish();
  }
  if (const json* s = top.child("encode")) {
    Section sec(*s, "encode");
    sec.get("window", c.encode.window);
    sec.get("lookback", c.encode.lookback);
    sec.get("corpus", c.encode.corpus);
    sec.finish();
  }
  if (const json* s = top.child("mine")) {
    Section sec(*s, "mine");
    sec.get("min", c.mine.min_len);
    sec.get("max", c.mine.max_len);
    sec.get("min_occurrences", c.mine.min_occurrences);
    sec.get("lookback", c.mine.lookback);
    sec.get("goal_motifs", c.mine.goal_motifs);
    sec.get("threat_motifs", c.mine.threat_motifs);
    sec.get("wildcard_matches_idle", c.mine.wildcard_matches_idle);
    sec.get("corpus", c.mine.corpus);
    sec.finish();
  }
  if (const json* s = top.child("train_fmaca")) {
    Section sec(*s, "train_fmaca");
    sec.get("k", c.train_fmaca.k);
    sec.get("window", c.train_fmaca.window);
    sec.get("population", c.train_fmaca.population);
    sec.get("generations", c.train_fmaca.generations);
    sec.get("mutation_rate", c.train_fmaca.mutation_rate);
    sec.get("crossover_rate", c.train_fmaca.crossover_rate);
    sec.get("max_depth", c.train_fmaca.max_depth);
    sec.get("min_node_size", c.train_fmaca.min_node_size);
    sec.get("corpus", c.train_fmaca.corpus);
    sec.get_seed("seed", c.train_fmaca.seed);
    sec.finish();
  }
  if (const json* s = top.child("train_lcs")) {
    Section sec(*s, "train_lcs");
    sec.get("env", c.train_lcs.env);
    sec.get("iterations", c.train_lcs.iterations);
    sec.get("ga_period", c.train_lcs.ga_period);
    sec.get("population", c.train_lcs.population);
    sec.get("beta", c.train_lcs.beta);
    sec.get("reward_win", c.train_lcs.reward_win);
    sec.get("reward_play", c.train_lcs.reward_play);
    sec.get("eval_block", c.train_lcs.eval_block);
    sec.get("top_patterns", c.train_lcs.top_patterns);
    sec.get("corpus", c.train_lcs.corpus);
    sec.get_seed("seed", c.train_lcs.seed);
    sec.finish();
  }
  if (const json* s = top.child("diagnose")) {
    Section sec(*s, "diagnose");
    sec.get("rules", c.diagnose.rules);
    sec.get("n", c.diagnose.n);
    sec.get("generations", c.diagnose.generations);
    sec.get("run_steps", c.diagnose.run_steps);
    sec.get("trials", c.diagnose.trials);
    sec.get("window", c.diagnose.window);
    sec.get("mi_lag", c.diagnose.mi_lag);
    sec.get_seed("seed", c.diagnose.seed);
    sec.finish();
  }
  top.finish();
  return c;
}

RunConfig load_run_config(const fs::path& path) { return parse_run_config(read_text(path)); }

std::string run_config_to_json(const RunConfig& c) {
  json sim{{"matches", c.simulate.matches},
           {"cycles", c.simulate.cycles},
           {"home_policy", c.simulate.home_policy},
           {"away_policy", c.simulate.away_policy},
           {"team_size", c.simulate.team_size},
           {"perception_jitter", c.simulate.perception_jitter},
           {"feedback_tree", c.simulate.feedback_tree}};
  put_seed(sim, c.simulate.seed);
  json enc{{"window", c.encode.window}, {"lookback", c.encode.lookback}, {"corpus", c.encode.corpus}};
  json mine{{"min", c.mine.min_len},
            {"max", c.mine.max_len},
            {"min_occurrences", c.mine.min_occurrences},
            {"lookback", c.mine.lookback},
            {"goal_motifs", c.mine.goal_motifs},
            {"threat_motifs", c.mine.threat_motifs},
            {"wildcard_matches_idle", c.mine.wildcard_matches_idle},
            {"corpus", c.mine.corpus}};
  json fm{{"k", c.train_fmaca.k},
          {"window", c.train_fmaca.window},
          {"population", c.train_fmaca.population},
          {"generations", c.train_fmaca.generations},
          {"mutation_rate", c.train_fmaca.mutation_rate},
          {"crossover_rate", c.train_fmaca.crossover_rate},
          {"max_depth", c.train_fmaca.max_depth},
          {"min_node_size", c.train_fmaca.min_node_size},
          {"corpus", c.train_fmaca.corpus}};
  put_seed(fm, c.train_fmaca.seed);
  json lcs{{"env", c.train_lcs.env},
           {"iterations", c.train_lcs.iterations},
           {"ga_period", c.train_lcs.ga_period},
           {"population", c.train_lcs.population},
           {"beta", c.train_lcs.beta},
           {"reward_win", c.train_lcs.reward_win},
           {"reward_play", c.train_lcs.reward_play},
           {"eval_block", c.train_lcs.eval_block},
           {"top_patterns", c.train_lcs.top_patterns},
           {"corpus", c.train_lcs.corpus}};
  put_seed(lcs, c.train_lcs.seed);
  json diag{{"rules", c.diagnose.rules},
            {"n", c.diagnose.n},
            {"generations", c.diagnose.generations},
            {"run_steps", c.diagnose.run_steps},
            {"trials", c.diagnose.trials},
            {"window", c.diagnose.window},
            {"mi_lag", c.diagnose.mi_lag}};
  put_seed(diag, c.diagnose.seed);
  json j{{"schema_version", c.schema_version},
         {"seed", c.seed},
         {"out_dir", c.out_dir},
         {"verbose", c.verbose},
         {"simulate", sim},
         {"encode", enc},
         {"mine", mine},
         {"train_fmaca", fm},
         {"train_lcs", lcs},
         {"diagnose", diag}};
  return j.dump(2);
}

// Manifest and annotations.

void save_manifest(const fs::path& path, const CorpusManifest& m) {
  json entries = json::array();
  for (const auto& e : m.entries)
    entries.push_back(json{{"match_id", e.match_id},
                           {"seed", e.seed},
                           {"log_path", e.log_path},
                           {"sequence_paths", e.sequence_paths},
                           {"annotations_path", e.annotations_path},
                           {"goals", e.goals},
                           {"created", e.created}});
  json j{{"schema_version", kManifestSchemaVersion},
         {"master_seed", m.master_seed},
         {"window_cycles", m.window_cycles},
         {"created", m.created},
         {"entries", entries}};
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

CorpusManifest load_manifest(const fs::path& path) {
  const json j = json::parse(read_text(path));
  if (j.value("schema_version", -1) != kManifestSchemaVersion)
    throw std::runtime_error("manifest schema_version missing or mismatched in " + path.string());
  CorpusManifest m;
  m.master_seed = j.at("master_seed").get<std::uint64_t>();
  m.window_cycles = j.at("window_cycles").get<int>();
  m.created = j.at("created").get<std::string>();
  std::set<std::string> ids;
  const fs::path base = path.parent_path();
  auto require = [&](const std::string& rel) {
    if (!fs::exists(base / rel)) throw std::runtime_error("manifest refers to missing file " + (base / rel).string());
  };
  for (const auto& e : j.at("entries")) {
    ManifestEntry entry;
    entry.match_id = e.at("match_id").get<std::string>();
    entry.seed = e.at("seed").get<std::uint64_t>();
    entry.log_path = e.at("log_path").get<std::string>();
    entry.sequence_paths = e.at("sequence_paths").get<std::vector<std::string>>();
    entry.annotations_path = e.at("annotations_path").get<std::string>();
    entry.goals = e.at("goals").get<int>();
    entry.created = e.at("created").get<std::string>();
    if (!ids.insert(entry.match_id).second) throw std::runtime_error("duplicate match id " + entry.match_id);
    require(entry.log_path);
    for (const auto& p : entry.sequence_paths) require(p);
    if (!entry.annotations_path.empty()) require(entry.annotations_path);
    m.entries.push_back(std::move(entry));
  }
  return m;
}

std::vector<AnnotationRecord> annotate_match(const sim::MatchLog& log, const codec::GameSequence& game,
                                             const std::vector<codec::PlayerSequence>& players,
                                             const std::string& match_id, std::size_t lookback) {
  std::map<sim::AgentId, const codec::PlayerSequence*> by_id;
  for (const auto& p : players) by_id[p.player] = &p;
  const auto roster = log.roster();
  std::map<sim::AgentId, sim::Team> team_of;
  for (const auto& a : roster) team_of[a.id] = a.team;

  std::vector<AnnotationRecord> out;
  auto annotate = [&](sim::AgentId agent, mining::MotifLabel label, int cycle) {
    const auto it = by_id.find(agent);
    if (it == by_id.end()) return;
    const std::string& letters = it->second->letters;
    const auto window = static_cast<std::size_t>(cycle / game.window_cycles);
    const std::size_t index = std::min(window + 1, letters.size());
    out.push_back({codec::player_header(agent, match_id), label, index, padded_window(letters, index, lookback)});
  };

  std::optional<sim::AgentId> holder;
  std::optional<sim::AgentId> last_kicker[2];
  std::optional<sim::AgentId> last_any_kicker;
  for (std::size_t c = 0; c < log.cycles.size(); ++c) {
    const auto& record = log.cycles[c];
    for (const auto& ev : record.events) {
      switch (ev.kind) {
        case sim::EventKind::kick:
          if (ev.effective) {
            last_kicker[ev.team == sim::Team::home ? 0 : 1] = ev.agent;
            last_any_kicker = ev.agent;
          }
          break;
        case sim::EventKind::possession_change:
          if (holder && team_of[*holder] != ev.team) annotate(*holder, mining::MotifLabel::threat, record.cycle);
          holder = ev.agent;
          break;
        case sim::EventKind::goal: {
          const int side = ev.team == sim::Team::home ? 0 : 1;
          std::optional<sim::AgentId> scorer = last_kicker[side] ? last_kicker[side] : last_any_kicker;
          if (!scorer) {
            for (const auto& a : roster)
              if (a.team == ev.team) {
                scorer = a.id;
                break;
              }
          }
          if (scorer) annotate(*scorer, mining::MotifLabel::goal, record.cycle);

          // The conceding team's player nearest the ball just before the goal.
          const auto& agents = c > 0 ? log.cycles[c - 1].agents : roster;
          const sim::Vec2 ball = c > 0 ? log.cycles[c - 1].ball.position : sim::Vec2::Zero();
          std::optional<sim::AgentId> nearest;
          double best = 0.0;
          for (const auto& a : agents) {
            if (a.team == ev.team) continue;
            const double d = (a.position - ball).norm();
            if (!nearest || d < best) {
              nearest = a.id;
              best = d;
            }
          }
          if (nearest) annotate(*nearest, mining::MotifLabel::threat, record.cycle);
          last_kicker[0].reset();
          last_kicker[1].reset();
          last_any_kicker.reset();
          holder.reset();
          break;
        }
        default:
          break;
      }
    }
  }
  return out;
}

void save_annotations(const fs::path& path, const std::string& match_id, int window_cycles,
                      std::size_t lookback, const std::vector<AnnotationRecord>& records) {
  json list = json::array();
  for (const auto& r : records)
    list.push_back(json{{"sequence_id", r.sequence_id},
                        {"label", mining::to_string(r.label)},
                        {"index", r.index},
                        {"window", r.window}});
  json j{{"schema_version", kAnnotationSchemaVersion},
         {"match_id", match_id},
         {"window_cycles", window_cycles},
         {"lookback", lookback},
         {"annotations", list}};
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

std::vector<AnnotationRecord> load_annotations(const fs::path& path) {
  const json j = json::parse(read_text(path));
  if (j.value("schema_version", -1) != kAnnotationSchemaVersion)
    throw std::runtime_error("annotation schema_version missing or mismatched in " + path.string());
  std::vector<AnnotationRecord> out;
  for (const auto& a : j.at("annotations"))
    out.push_back({a.at("sequence_id").get<std::string>(),
                   mining::motif_label_from_string(a.at("label").get<std::string>()),
                   a.at("index").get<std::size_t>(), a.at("window").get<std::string>()});
  return out;
}

std::vector<mining::AnnotatedSequence> load_annotated_corpus(const fs::path& corpus_dir) {
  const auto manifest = load_manifest(corpus_manifest(corpus_dir));
  std::vector<mining::AnnotatedSequence> out;
  for (const auto& entry : manifest.entries) {
    if (entry.sequence_paths.empty() || entry.annotations_path.empty())
      throw std::runtime_error("match " + entry.match_id + " has not been encoded");
    std::map<std::string, std::size_t> slot;
    for (const auto& rel : entry.sequence_paths)
      for (auto& rec : codec::load_fasta(corpus_dir / rel)) {
        if (rec.header.rfind("player:", 0) != 0) continue;
        slot[rec.header] = out.size();
        out.push_back({rec.header, std::move(rec.letters), {}});
      }
    for (const auto& a : load_annotations(corpus_dir / entry.annotations_path)) {
      const auto it = slot.find(a.sequence_id);
      if (it == slot.end()) throw std::runtime_error("annotation refers to unknown sequence " + a.sequence_id);
      out[it->second].events.push_back({a.index, a.label});
    }
  }
  return out;
}

// Simulation and encoding.

sim::MatchLog simulate_match(const RunConfig& config, std::uint64_t seed) {
  const auto field = field_for(config, seed);
  sim::ShotFeedback feedback;
  if (!config.simulate.feedback_tree.empty()) {
    auto tree = std::make_shared<fmaca::FmacaTree>(fmaca::load_tree(config.simulate.feedback_tree));
    feedback = [tree](std::string_view recent) {
      return fmaca::ca_feedback(*tree, recent).decision == fmaca::Feedback::proceed ? sim::ShotDecision::proceed
                                                                                   : sim::ShotDecision::veto;
    };
  }
  auto home = make_policy(config.simulate.home_policy, field, seed * 2 + 1, feedback);
  auto away = make_policy(config.simulate.away_policy, field, seed * 2 + 2, feedback);
  return sim::run_match(*home, *away, field);
}

namespace {

ManifestEntry encode_entry(const fs::path& dir, ManifestEntry entry, int window, std::size_t lookback) {
  const auto log = sim::load_match_log(dir / entry.log_path);
  const auto game = codec::encode_game(log, window);
  std::vector<codec::PlayerSequence> players;
  std::vector<codec::FastaRecord> records{{codec::game_header(entry.match_id), game.letters}};
  for (const auto& a : log.roster()) {
    players.push_back(codec::encode_player(log, game, a.id));
    records.push_back({codec::player_header(a.id, entry.match_id), players.back().letters});
  }
  const std::string fasta = entry.match_id + ".fasta";
  const std::string notes = entry.match_id + ".annotations.json";
  codec::save_fasta(dir / fasta, records);
  save_annotations(dir / notes, entry.match_id, window, lookback,
                   annotate_match(log, game, players, entry.match_id, lookback));
  entry.sequence_paths = {fasta};
  entry.annotations_path = notes;
  entry.goals = log.score.home + log.score.away;
  return entry;
}

CorpusManifest simulate_into(const RunConfig& config, const fs::path& dir) {
  if (config.simulate.matches < 1) throw std::invalid_argument("need at least one match");
  fs::create_directories(dir);
  CorpusManifest manifest;
  manifest.master_seed = *config.simulate.seed;
  manifest.created = utc_timestamp();
  for (int i = 0; i < config.simulate.matches; ++i) {
    ManifestEntry entry;
    entry.match_id = match_id_for(i);
    entry.seed = manifest.master_seed + static_cast<std::uint64_t>(i);
    const auto log = simulate_match(config, entry.seed);
    if (!log.valid) throw std::runtime_error(entry.match_id + " aborted: " + log.abort_reason);
    entry.log_path = entry.match_id + ".jsonl";
    sim::save_match_log(dir / entry.log_path, log);
    entry.goals = log.score.home + log.score.away;
    entry.created = utc_timestamp();
    manifest.entries.push_back(std::move(entry));
  }
  save_manifest(corpus_manifest(dir), manifest);
  return manifest;
}

CorpusManifest encode_into(const RunConfig& config, const fs::path& dir) {
  if (config.encode.window < 1) throw std::invalid_argument("encode window must be at least 1");
  auto manifest = load_manifest(corpus_manifest(dir));
  manifest.window_cycles = config.encode.window;
  for (auto& entry : manifest.entries) entry = encode_entry(dir, entry, config.encode.window, config.encode.lookback);
  save_manifest(corpus_manifest(dir), manifest);
  return manifest;
}

std::vector<std::pair<std::string, std::size_t>> top_patterns(const fs::path& csv, std::size_t limit) {
  std::ifstream in(csv);
  if (!in) throw std::runtime_error("cannot read " + csv.string());
  std::map<std::string, std::size_t> totals;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto a = line.find(',');
    const auto b = line.find(',', a + 1);
    if (a == std::string::npos || b == std::string::npos) throw std::runtime_error("malformed row in " + csv.string());
    totals[line.substr(0, a)] += std::stoul(line.substr(a + 1, b - a - 1));
  }
  std::vector<std::pair<std::string, std::size_t>> rows(totals.begin(), totals.end());
  std::stable_sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) { return x.second > y.second; });
  if (rows.size() > limit) rows.resize(limit);
  return rows;
}

std::vector<fmaca::LabeledPattern> synthetic_dataset(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 0.3);
  std::vector<fmaca::LabeledPattern> out;
  for (std::size_t i = 0; i < count; ++i) {
    const int label = 1 + static_cast<int>(i % 2);
    fmaca::State s(static_cast<Eigen::Index>(n));
    for (Eigen::Index j = 0; j < s.size(); ++j) s(j) = (label == 1 ? 0.0 : 0.7) + u(rng);
    out.push_back({s, label});
  }
  return out;
}

}  // namespace

CorpusManifest build_corpus(const RunConfig& config, const fs::path& dir) {
  RunConfig c = config;
  c.resolve();
  simulate_into(c, dir);
  return encode_into(c, dir);
}

// Stages.

CorpusManifest stage_simulate(const RunConfig& config) {
  RunConfig c = config;
  c.resolve();
  return simulate_into(c, c.corpus_dir(""));
}

CorpusManifest stage_encode(const RunConfig& config) {
  return encode_into(config, config.corpus_dir(config.encode.corpus));
}

void stage_mine(const RunConfig& config) {
  const fs::path dir = config.corpus_dir(config.mine.corpus);
  if (!fs::exists(corpus_manifest(dir))) throw std::runtime_error("no corpus manifest at " + dir.string());
  const auto corpus = load_annotated_corpus(dir);

  std::vector<mining::NamedSequence> named;
  for (const auto& s : corpus) named.push_back({s.id, s.letters});
  const mining::PatternQuery query{config.mine.min_len, config.mine.max_len, "ACGT-"};
  const auto report = mining::mine_patterns(named, query, config.mine.min_occurrences);
  const fs::path out_dir(config.out_dir);
  {
    auto out = open_out(out_dir / kPatternCsv);
    mining::write_pattern_csv(out, report);
  }
  {
    auto out = open_out(out_dir / kTandemCsv);
    mining::write_tandem_csv(out, report);
  }

  std::vector<mining::MotifStat> rows;
  auto add = [&](const std::vector<std::string>& templates, mining::MotifLabel label) {
    const bool any = std::any_of(corpus.begin(), corpus.end(), [&](const auto& s) {
      return std::any_of(s.events.begin(), s.events.end(), [&](const auto& e) { return e.label == label; });
    });
    if (!any) return;
    for (const auto& t : templates) {
      const auto table = mining::motif_table(corpus, {t, label}, config.mine.lookback, config.mine.wildcard_matches_idle);
      rows.insert(rows.end(), table.begin(), table.end());
    }
  };
  add(config.mine.goal_motifs, mining::MotifLabel::goal);
  add(config.mine.threat_motifs, mining::MotifLabel::threat);
  auto out = open_out(out_dir / kMotifCsv);
  mining::write_motif_csv(out, rows);
}

void stage_train_fmaca(const RunConfig& config, const fs::path& out) {
  const auto& sec = config.train_fmaca;
  if (sec.k != 2) throw std::invalid_argument("feedback trees separate two classes (goal, threat); k must be 2");
  const fs::path dir = config.corpus_dir(sec.corpus);
  if (!fs::exists(corpus_manifest(dir))) throw std::runtime_error("no corpus manifest at " + dir.string());
  const auto manifest = load_manifest(corpus_manifest(dir));

  // Identical (window, label) pairs add nothing to the basin purity ranking.
  std::set<std::pair<std::string, int>> unique;
  for (const auto& entry : manifest.entries) {
    if (entry.annotations_path.empty()) throw std::runtime_error("match " + entry.match_id + " has not been encoded");
    for (const auto& a : load_annotations(dir / entry.annotations_path)) {
      if (a.window.size() < sec.window)
        throw std::invalid_argument("annotation windows are shorter than the feedback window");
      unique.emplace(a.window.substr(a.window.size() - sec.window), a.label == mining::MotifLabel::goal ? 1 : 2);
    }
  }
  if (unique.empty()) throw std::runtime_error("corpus has no goal or threat annotations to train on");
  const std::vector<std::pair<std::string, int>> windows(unique.begin(), unique.end());

  fmaca::GaConfig ga;
  ga.population_size = sec.population;
  ga.generations = sec.generations;
  ga.mutation_rate = sec.mutation_rate;
  ga.crossover_rate = sec.crossover_rate;
  ga.rng_seed = sec.seed.value_or(config.seed + 1);
  fmaca::TreeConfig tree;
  tree.max_depth = sec.max_depth;
  tree.min_node_size = sec.min_node_size;
  const fs::path target = out.empty() ? fs::path(config.out_dir) / kTreeJson : out;
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fmaca::save_tree(target, fmaca::train_feedback_tree(windows, sec.window, ga, tree));
}

void stage_train_lcs(const RunConfig& config) {
  const auto& sec = config.train_lcs;
  lcs::LcsConfig lc;
  lc.population_size = sec.population;
  lc.beta = sec.beta;
  lc.ga_period = sec.ga_period;
  lc.max_iterations = sec.iterations;
  lc.reward_win = sec.reward_win;
  lc.reward_play = sec.reward_play;
  lc.eval_block = sec.eval_block;
  lc.rng_seed = sec.seed.value_or(config.seed + 2);

  lcs::MinerStats stats;
  const fs::path patterns = fs::path(config.out_dir) / kPatternCsv;
  if (fs::exists(patterns))
    for (const auto& [p, n] : top_patterns(patterns, sec.top_patterns)) stats.patterns.push_back(p);
  for (const auto& m : config.mine.goal_motifs) stats.goal_motifs.push_back({m, mining::MotifLabel::goal});

  std::unique_ptr<lcs::Environment> env;
  if (sec.env == "oracle") {
    lcs::OracleEnvironment::Options o;
    o.context_length = lc.context_length;
    o.reward_play = lc.reward_play;
    o.seed = lc.rng_seed + 1;
    env = std::make_unique<lcs::OracleEnvironment>(o);
  } else if (sec.env == "match") {
    env = std::make_unique<lcs::MatchEnvironment>(load_annotated_corpus(config.corpus_dir(sec.corpus)),
                                                  lc.context_length, lc.reward_win, lc.reward_play);
  } else {
    throw std::invalid_argument("unknown LCS environment '" + sec.env + "' (oracle, match)");
  }

  const auto result = lcs::train(*env, lc, stats);
  const fs::path out_dir(config.out_dir);
  {
    auto out = open_out(out_dir / kPopulationCsv);
    lcs::write_population_csv(out, result.population);
  }
  auto out = open_out(out_dir / kCurveCsv);
  lcs::write_curve_csv(out, result.curve);
}

void stage_diagnose(const RunConfig& config, const fs::path& out_path) {
  const auto& sec = config.diagnose;
  diag::DiagnosticsConfig dc;
  dc.window = sec.window;
  dc.run_steps = sec.run_steps;
  dc.trials = sec.trials;
  dc.mi_lag = sec.mi_lag;
  dc.rng_seed = sec.seed.value_or(config.seed + 3);
  dc.validate();

  std::vector<fca::RuleVector> generations;
  if (sec.rules == "random") {
    if (sec.n < 1) throw std::invalid_argument("diagnose needs n >= 1");
    // Track the best rule vector of each GA generation on a separable task.
    const auto data = synthetic_dataset(sec.n, 100, dc.rng_seed);
    fmaca::GaConfig ga;
    ga.generations = sec.generations;
    ga.rng_seed = dc.rng_seed;
    ga.stop_when_perfect = false;
    fmaca::evolve_rules(data, 2, ga, {}, [&](int, const fca::RuleVector& best, double) { generations.push_back(best); });
  } else {
    std::istringstream lines(read_text(sec.rules));
    std::string line;
    while (std::getline(lines, line)) {
      if (line.empty() || line[0] == '#') continue;
      generations.push_back(fca::parse_rules(line));
    }
    if (generations.empty()) throw std::runtime_error("no rule vectors in " + sec.rules);
  }

  std::vector<diag::GenerationRow> rows;
  for (std::size_t g = 0; g < generations.size(); ++g)
    rows.push_back(diag::diagnose_rules(static_cast<int>(g), generations[g], dc));
  auto out = open_out(out_path.empty() ? fs::path(config.out_dir) / kDiagCsv : out_path);
  diag::write_diag_csv(out, rows);
}

void pipeline_run(const RunConfig& config) {
  RunConfig c = config;
  c.resolve();
  fs::create_directories(c.out_dir);
  {
    auto out = open_out(fs::path(c.out_dir) / kRunConfigName);
    out << run_config_to_json(c) << '\n';
  }
  run_stage("simulate", c.verbose, [&] { stage_simulate(c); });
  run_stage("encode", c.verbose, [&] { stage_encode(c); });
  run_stage("mine", c.verbose, [&] { stage_mine(c); });
  run_stage("train-fmaca", c.verbose, [&] { stage_train_fmaca(c); });
  run_stage("train-lcs", c.verbose, [&] { stage_train_lcs(c); });
  run_stage("diagnose", c.verbose, [&] { stage_diagnose(c); });
}

}  // namespace soccerseq::pipeline
