#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "morphevo/encoding_tree.hpp"
#include "morphevo/experiment.hpp"
#include "morphevo/figures.hpp"
#include "morphevo/sim.hpp"
#include "morphevo/traits.hpp"
#include "morphevo/util.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& out_override) {
  morphevo::ExperimentConfig cfg = morphevo::ExperimentConfig::parse_file(config_path);
  if (!out_override.empty()) cfg.output_dir = out_override;
  cfg.validate();
  morphevo::run_experiment(cfg);
  std::printf("artifact written to %s\n", cfg.output_dir.c_str());
  return 0;
}

int cmd_analyze(const std::string& artifact_dir) {
  morphevo::analyze_artifact(artifact_dir);
  std::printf("analysis written to %s/analysis\n", artifact_dir.c_str());
  return 0;
}

int cmd_render(const std::string& artifact_dir) {
  morphevo::render_figures(artifact_dir);
  std::printf("figures written to %s/figures\n", artifact_dir.c_str());
  return 0;
}

int cmd_oracle_traits(const std::string& body_file) {
  const std::string text = morphevo::read_text_file(body_file);
  const morphevo::TreeGenotype genotype =
      morphevo::parse_tree_genotype(morphevo::trim(text));
  const morphevo::DecodedTree decoded = morphevo::decode_tree(genotype);

  const morphevo::ValidationReport report =
      morphevo::validate(decoded.body, morphevo::ValidationLimits{});
  for (const auto& violation : report.violations)
    std::fprintf(stderr, "warning: %s\n", violation.c_str());

  const morphevo::GridEmbedding grid = morphevo::embed(decoded.body);
  const int channels = morphevo::tree_joint_channels(decoded.body);
  morphevo::AnyController controller(decoded.brain, channels);
  const morphevo::Trajectory trajectory =
      morphevo::simulate(decoded.body, controller, morphevo::SimConfig{});
  const morphevo::TraitVector tv = morphevo::trait_vector(grid, trajectory);

  const auto values = tv.values();
  for (std::size_t i = 0; i < morphevo::kTraitCount; ++i)
    std::printf("%s %s\n", morphevo::kTraitNames[i], morphevo::fmt_double(values[i]).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"modular robot evolution: runs, analysis, figures"};
  app.set_version_flag("--version", "morphevo 0.1.0");
  app.require_subcommand(1);
  app.footer("Worker threads default to the hardware count; set MORPHEVO_THREADS to override.");

  std::string config_path, out_override, artifact_dir, body_file;

  CLI::App* run = app.add_subcommand("run", "run an experiment from a config file");
  run->add_option("--config", config_path, "key = value config file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--out", out_override, "override the configured output directory");

  CLI::App* analyze =
      app.add_subcommand("analyze", "recompute heritability and diversity tables");
  analyze->add_option("dir", artifact_dir, "artifact directory with run_* folders")
      ->required()
      ->check(CLI::ExistingDirectory);

  CLI::App* render = app.add_subcommand("render", "draw SVG figures for an artifact");
  render->add_option("dir", artifact_dir, "artifact directory with run_* folders")
      ->required()
      ->check(CLI::ExistingDirectory);

  CLI::App* oracle = app.add_subcommand("oracle-traits", "print the six traits of a body");
  oracle->add_option("body", body_file, "file holding the nested body text")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_override);
    if (analyze->parsed()) return cmd_analyze(artifact_dir);
    if (render->parsed()) return cmd_render(artifact_dir);
    if (oracle->parsed()) return cmd_oracle_traits(body_file);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
