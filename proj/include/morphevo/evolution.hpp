#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "morphevo/controller.hpp"
#include "morphevo/morphology.hpp"
#include "morphevo/rng.hpp"
#include "morphevo/sim.hpp"
#include "morphevo/traits.hpp"
#include "morphevo/util.hpp"

namespace morphevo {

struct TraitRow {
  std::uint64_t individual_id = 0;
  TraitVector traits;
};

struct GenerationTable {
  int index = 0;
  std::vector<TraitRow> rows;
};

// Parents live in generation offspring_generation - 1.
struct LineageRecord {
  std::uint64_t offspring_id = 0;
  std::uint64_t parent1_id = 0;
  std::uint64_t parent2_id = 0;
  int offspring_generation = 0;
  TraitVector offspring, parent1, parent2;
};

// Everything one evolutionary run leaves behind. save() lays the data out as
// a directory of CSVs plus manifest and event log; load() restores it so
// downstream analysis works identically from memory or from disk.
struct RunLog {
  int run_index = 0;
  std::uint64_t seed = 0;
  std::string encoding;
  std::vector<GenerationTable> generations;          // generations + 1 tables
  std::vector<std::vector<LineageRecord>> lineages;  // [g] holds offspring of gen g+1
  std::vector<std::string> events;
  std::vector<std::pair<std::string, std::string>> manifest_extra;

  void save(const std::filesystem::path& dir) const;
  static RunLog load(const std::filesystem::path& dir);
};

struct EngineConfig {
  int population = 100;
  int generations = 50;
  int tournament_size = 2;
  bool distinct_parents = true;
  unsigned workers = 0;  // 0: MORPHEVO_THREADS or hardware concurrency
  SimConfig sim;
  // When set, per-individual trajectory CSVs are written here.
  std::filesystem::path trajectory_dir;
};

// Draws k entrants without replacement and returns the index of the fittest;
// ties go to the earliest drawn.
std::size_t tournament_select(const std::vector<double>& fitness, int k, Rng& rng);

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& t);

namespace detail {

std::string non_finite_event(int generation, std::uint64_t id);
TraitVector zero_non_finite(TraitVector tv);

}  // namespace detail

// Non-overlapping generational loop: the offspring population fully replaces
// its parents, so a run costs population * (generations + 1) evaluations.
template <typename Encoding>
RunLog run_evolution(Encoding& enc, const EngineConfig& cfg, std::uint64_t seed) {
  using Genotype = typename Encoding::Genotype;
  const std::size_t n = static_cast<std::size_t>(cfg.population);

  RunLog log;
  log.seed = seed;
  log.encoding = enc.name();

  Rng rng(seed);
  std::vector<Genotype> population;
  population.reserve(n);
  for (std::size_t i = 0; i < n; ++i) population.push_back(enc.random(rng));

  if (!cfg.trajectory_dir.empty())
    std::filesystem::create_directories(cfg.trajectory_dir);

  const auto evaluate = [&](const std::vector<Genotype>& genotypes, int generation,
                            std::uint64_t first_id) {
    std::vector<TraitVector> traits(genotypes.size());
    std::vector<std::string> issues(genotypes.size());
    parallel_for(genotypes.size(), cfg.workers, [&](std::size_t i) {
      const Phenotype ph = enc.decode(genotypes[i]);
      const GridEmbedding body_grid = embed(ph.body);
      const Trajectory trajectory = simulate(ph.body, ph.controller, cfg.sim);
      TraitVector tv = trait_vector(body_grid, trajectory);
      if (!tv.all_finite()) {
        issues[i] = detail::non_finite_event(generation, first_id + i);
        tv = detail::zero_non_finite(tv);
      }
      if (!cfg.trajectory_dir.empty()) {
        const std::string name = "g" + std::to_string(generation) + "_i" +
                                 std::to_string(first_id + i) + ".csv";
        write_trajectory_csv(cfg.trajectory_dir / name, trajectory);
      }
      traits[i] = tv;
    });
    for (const auto& issue : issues)
      if (!issue.empty()) log.events.push_back(issue);
    return traits;
  };

  std::vector<TraitVector> traits = evaluate(population, 0, 0);
  std::vector<double> fitness(n);
  for (std::size_t i = 0; i < n; ++i) fitness[i] = traits[i].speed;

  GenerationTable first;
  first.index = 0;
  for (std::size_t i = 0; i < n; ++i) first.rows.push_back({i, traits[i]});
  log.generations.push_back(std::move(first));

  for (int gen = 1; gen <= cfg.generations; ++gen) {
    const std::uint64_t first_id = static_cast<std::uint64_t>(gen) * n;
    std::vector<Genotype> offspring;
    offspring.reserve(n);
    std::vector<std::pair<std::size_t, std::size_t>> parents(n);

    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t p1 = tournament_select(fitness, cfg.tournament_size, rng);
      std::size_t p2 = tournament_select(fitness, cfg.tournament_size, rng);
      if (cfg.distinct_parents && n > 1) {
        for (int tries = 0; p2 == p1 && tries < 1000; ++tries)
          p2 = tournament_select(fitness, cfg.tournament_size, rng);
        if (p2 == p1) p2 = (p1 + 1) % n;
      }
      parents[i] = {p1, p2};
      offspring.push_back(enc.mutate(
          enc.crossover(population[p1], population[p2], fitness[p1], fitness[p2], rng), rng));
    }

    std::vector<TraitVector> offspring_traits = evaluate(offspring, gen, first_id);

    GenerationTable table;
    table.index = gen;
    std::vector<LineageRecord> lineage(n);
    const std::uint64_t parent_first_id = static_cast<std::uint64_t>(gen - 1) * n;
    for (std::size_t i = 0; i < n; ++i) {
      table.rows.push_back({first_id + i, offspring_traits[i]});
      LineageRecord& rec = lineage[i];
      rec.offspring_id = first_id + i;
      rec.parent1_id = parent_first_id + parents[i].first;
      rec.parent2_id = parent_first_id + parents[i].second;
      rec.offspring_generation = gen;
      rec.offspring = offspring_traits[i];
      rec.parent1 = traits[parents[i].first];
      rec.parent2 = traits[parents[i].second];
    }
    log.generations.push_back(std::move(table));
    log.lineages.push_back(std::move(lineage));

    population = std::move(offspring);
    traits = std::move(offspring_traits);
    for (std::size_t i = 0; i < n; ++i) fitness[i] = traits[i].speed;
  }

  const auto pop = static_cast<std::uint64_t>(cfg.population);
  const auto gens = static_cast<std::uint64_t>(cfg.generations);
  log.manifest_extra.push_back({"evaluations_initial", std::to_string(pop)});
  log.manifest_extra.push_back({"evaluations_offspring", std::to_string(pop * gens)});
  log.manifest_extra.push_back({"evaluations_total", std::to_string(pop * (gens + 1))});
  log.manifest_extra.push_back(
      {"evaluation_note",
       "offspring evaluations exclude the seeded generation 0; total counts it once"});
  return log;
}

}  // namespace morphevo
