#include "morphevo/experiment.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "morphevo/analysis.hpp"
#include "morphevo/encoding_lsystem.hpp"
#include "morphevo/encoding_tree.hpp"
#include "morphevo/util.hpp"

namespace morphevo {

namespace {

struct KeyBinding {
  const char* name;
  enum class Type { String, U64, Int, Double, Bool } type;
  void* field;
};

std::vector<KeyBinding> bindings(ExperimentConfig& c) {
  using T = KeyBinding::Type;
  return {
      {"encoding", T::String, &c.encoding},
      {"seed", T::U64, &c.seed},
      {"population", T::Int, &c.population},
      {"generations", T::Int, &c.generations},
      {"repetitions", T::Int, &c.repetitions},
      {"tournament_size", T::Int, &c.tournament_size},
      {"module_cap", T::Int, &c.module_cap},
      {"mutation_aggregate", T::Double, &c.mutation_aggregate},
      {"param_mutation_rate", T::Double, &c.param_mutation_rate},
      {"param_sigma_fraction", T::Double, &c.param_sigma_fraction},
      {"init_fill", T::Double, &c.init_fill},
      {"max_init_depth", T::Int, &c.max_init_depth},
      {"lsystem_iterations", T::Int, &c.lsystem_iterations},
      {"sentence_cap", T::Int, &c.sentence_cap},
      {"max_rule_length", T::Int, &c.max_rule_length},
      {"coupling_range", T::Int, &c.coupling_range},
      {"duration_s", T::Double, &c.duration_s},
      {"control_dt_s", T::Double, &c.control_dt_s},
      {"sample_period_s", T::Double, &c.sample_period_s},
      {"cell_size_cm", T::Double, &c.cell_size_cm},
      {"output_dir", T::String, &c.output_dir},
      {"dump_trajectories", T::Bool, &c.dump_trajectories},
  };
}

void assign(const KeyBinding& b, const std::string& value) {
  switch (b.type) {
    case KeyBinding::Type::String:
      *static_cast<std::string*>(b.field) = value;
      break;
    case KeyBinding::Type::U64:
      *static_cast<std::uint64_t*>(b.field) = static_cast<std::uint64_t>(parse_long(value));
      break;
    case KeyBinding::Type::Int:
      *static_cast<int*>(b.field) = static_cast<int>(parse_long(value));
      break;
    case KeyBinding::Type::Double:
      *static_cast<double*>(b.field) = parse_double(value);
      break;
    case KeyBinding::Type::Bool: {
      if (value == "true" || value == "1")
        *static_cast<bool*>(b.field) = true;
      else if (value == "false" || value == "0")
        *static_cast<bool*>(b.field) = false;
      else
        throw std::runtime_error("expected true/false, got '" + value + "'");
      break;
    }
  }
}

std::string render(const ExperimentConfig& c, const KeyBinding& b) {
  switch (b.type) {
    case KeyBinding::Type::String:
      return *static_cast<const std::string*>(b.field);
    case KeyBinding::Type::U64:
      return std::to_string(*static_cast<const std::uint64_t*>(b.field));
    case KeyBinding::Type::Int:
      return std::to_string(*static_cast<const int*>(b.field));
    case KeyBinding::Type::Double:
      return fmt_double(*static_cast<const double*>(b.field));
    case KeyBinding::Type::Bool:
      return *static_cast<const bool*>(b.field) ? "true" : "false";
  }
  (void)c;
  return "";
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_text(std::string_view text) {
  ExperimentConfig cfg;
  auto binds = bindings(cfg);
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected key = value");
    const std::string key{trim(t.substr(0, eq))};
    const std::string value{trim(t.substr(eq + 1))};
    const auto it = std::find_if(binds.begin(), binds.end(),
                                 [&](const KeyBinding& b) { return key == b.name; });
    if (it == binds.end())
      throw std::runtime_error("config line " + std::to_string(line_no) + ": unknown key '" +
                               key + "'");
    try {
      assign(*it, value);
    } catch (const std::exception& e) {
      throw std::runtime_error("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::filesystem::path& path) {
  return parse_text(read_text_file(path));
}

std::string ExperimentConfig::canonical_text() const {
  auto& self = const_cast<ExperimentConfig&>(*this);
  std::string out;
  for (const auto& b : bindings(self)) {
    out += b.name;
    out += " = ";
    out += render(*this, b);
    out += '\n';
  }
  return out;
}

void ExperimentConfig::validate() const {
  if (encoding != "tree" && encoding != "lsystem")
    throw std::runtime_error("encoding must be tree or lsystem");
  if (population < 2) throw std::runtime_error("population must be at least 2");
  if (generations < 1) throw std::runtime_error("generations must be at least 1");
  if (repetitions < 1) throw std::runtime_error("repetitions must be at least 1");
  if (tournament_size < 1 || tournament_size > population)
    throw std::runtime_error("tournament_size must be in [1, population]");
  if (module_cap < 1) throw std::runtime_error("module_cap must be positive");
  if (mutation_aggregate < 0 || mutation_aggregate > 1)
    throw std::runtime_error("mutation_aggregate must be in [0, 1]");
  if (param_mutation_rate < 0 || param_mutation_rate > 1)
    throw std::runtime_error("param_mutation_rate must be in [0, 1]");
  if (init_fill < 0 || init_fill > 1)
    throw std::runtime_error("init_fill must be in [0, 1]");
  if (max_init_depth < 0) throw std::runtime_error("max_init_depth must be non-negative");
  if (lsystem_iterations < 1) throw std::runtime_error("lsystem_iterations must be positive");
  if (sentence_cap < 1) throw std::runtime_error("sentence_cap must be positive");
  if (max_rule_length < 1) throw std::runtime_error("max_rule_length must be positive");
  if (coupling_range < 0) throw std::runtime_error("coupling_range must be non-negative");
  if (output_dir.empty()) throw std::runtime_error("output_dir must not be empty");
  sim_config().check();
}

SimConfig ExperimentConfig::sim_config() const {
  SimConfig sim;
  sim.duration_s = duration_s;
  sim.control_dt_s = control_dt_s;
  sim.sample_period_s = sample_period_s;
  sim.cell_size_cm = cell_size_cm;
  return sim;
}

EngineConfig ExperimentConfig::engine_config() const {
  EngineConfig engine;
  engine.population = population;
  engine.generations = generations;
  engine.tournament_size = tournament_size;
  engine.sim = sim_config();
  return engine;
}

namespace {

std::string run_dir_name(int repetition) {
  std::string s = std::to_string(repetition);
  if (s.size() < 2) s = "0" + s;
  return "run_" + s;
}

RunLog run_one(const ExperimentConfig& cfg, int repetition, unsigned workers) {
  EngineConfig engine = cfg.engine_config();
  engine.workers = workers;
  if (cfg.dump_trajectories)
    engine.trajectory_dir =
        std::filesystem::path(cfg.output_dir) / run_dir_name(repetition) / "trajectories";

  const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(repetition);
  RunLog log;
  if (cfg.encoding == "tree") {
    TreeEncoding enc;
    enc.limits.module_cap = cfg.module_cap;
    enc.limits.max_init_depth = cfg.max_init_depth;
    enc.limits.init_fill = cfg.init_fill;
    enc.rates.body_aggregate = cfg.mutation_aggregate;
    enc.rates.param_rate = cfg.param_mutation_rate;
    enc.rates.param_sigma_fraction = cfg.param_sigma_fraction;
    log = run_evolution(enc, engine, seed);
  } else {
    LsystemEncoding enc;
    enc.limits.iterations = cfg.lsystem_iterations;
    enc.limits.sentence_cap = cfg.sentence_cap;
    enc.limits.max_rule_length = cfg.max_rule_length;
    enc.limits.module_cap = cfg.module_cap;
    enc.limits.coupling_range = cfg.coupling_range;
    enc.grammar_mutation = cfg.mutation_aggregate;
    log = run_evolution(enc, engine, seed);
  }
  log.run_index = repetition;
  return log;
}

}  // namespace

void run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::filesystem::path out(cfg.output_dir);
  std::filesystem::create_directories(out);
  write_text_file(out / "config.txt", cfg.canonical_text());

  if (cfg.repetitions == 1) {
    RunLog log = run_one(cfg, 0, 0);
    log.save(out / run_dir_name(0));
  } else {
    // Repetitions run concurrently, each single-threaded inside.
    std::vector<RunLog> logs(static_cast<std::size_t>(cfg.repetitions));
    parallel_for(static_cast<std::size_t>(cfg.repetitions), 0,
                 [&](std::size_t r) { logs[r] = run_one(cfg, static_cast<int>(r), 1); });
    for (std::size_t r = 0; r < logs.size(); ++r)
      logs[r].save(out / run_dir_name(static_cast<int>(r)));
  }
  analyze_artifact(out);
}

std::vector<RunLog> load_artifact(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> run_dirs;
  if (!std::filesystem::is_directory(dir))
    throw std::runtime_error("not a directory: " + dir.string());
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_directory() && entry.path().filename().string().rfind("run_", 0) == 0)
      run_dirs.push_back(entry.path());
  }
  std::sort(run_dirs.begin(), run_dirs.end());
  if (run_dirs.empty())
    throw std::runtime_error("no run_* directories under " + dir.string());
  std::vector<RunLog> logs;
  logs.reserve(run_dirs.size());
  for (const auto& rd : run_dirs) logs.push_back(RunLog::load(rd));
  return logs;
}

void analyze_artifact(const std::filesystem::path& dir) {
  const std::vector<RunLog> logs = load_artifact(dir);

  std::vector<HeritabilityRow> h2;
  std::vector<DiversityRow> div;
  std::vector<SelectionResponseRow> resp;
  std::vector<MedianRow> med;
  for (const auto& log : logs) {
    const auto h = heritability_table(log);
    h2.insert(h2.end(), h.begin(), h.end());
    const auto d = diversity_table(log);
    div.insert(div.end(), d.begin(), d.end());
    const auto r = selection_response_table(log);
    resp.insert(resp.end(), r.begin(), r.end());
    const auto m = median_table(log);
    med.insert(med.end(), m.begin(), m.end());
  }

  const std::filesystem::path analysis = dir / "analysis";
  std::filesystem::create_directories(analysis);
  write_text_file(analysis / "heritability.csv", heritability_csv(h2));
  write_text_file(analysis / "diversity.csv", diversity_csv(div));
  write_text_file(analysis / "selection_response.csv", selection_response_csv(resp));
  write_text_file(analysis / "medians.csv", medians_csv(med));
}

}  // namespace morphevo
