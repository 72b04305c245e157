#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "morphevo/evolution.hpp"
#include "morphevo/traits.hpp"

namespace morphevo {

// Additive-genetic, non-additive genetic, mutation and environmental variance
// components; the ratio accessors express the textbook identities.
struct VarianceDecomposition {
  double additive = 0;
  double epistatic = 0;
  double mutation_effects = 0;
  double environmental = 0;

  double genetic() const { return additive + epistatic + mutation_effects; }
  double phenotypic() const { return genetic() + environmental; }
  double broad_sense() const { return genetic() / phenotypic(); }
  double narrow_sense() const { return additive / phenotypic(); }
};

struct RegressionResult {
  double slope = 0;
  double intercept = 0;
  int n = 0;
  bool degenerate = false;    // predictor variance below 1e-12
  bool out_of_range = false;  // slope outside [0, 1]
};

// Ordinary least squares of offspring value on mid-parent value. The slope
// estimates narrow-sense heritability and is reported unclamped. Degenerate
// fits report slope 0 with the intercept at the response mean.
RegressionResult midparent_regression(const std::vector<std::pair<double, double>>& pairs);

struct HeritabilityRow {
  int run = 0;
  int parent_generation = 0;
  int trait = 0;  // index into kTraitNames
  RegressionResult fit;
};

// One row per parent generation and trait, built from the lineage records.
std::vector<HeritabilityRow> heritability_table(const RunLog& log);

// For each value, the mean absolute difference to every other value.
std::vector<double> per_individual_mean_abs_diff(const std::vector<double>& values);

// Mean of the per-individual mean absolute differences.
double trait_diversity(const std::vector<double>& values);

// Per-axis bounds over every individual of the whole run, used to normalise
// the six traits before mixing them into one distance.
struct TraitBounds {
  std::array<double, 6> lo{}, hi{};
};

TraitBounds trait_bounds(const RunLog& log);

// Mean pairwise Euclidean distance after min-max normalising each trait.
double population_diversity(const std::vector<TraitVector>& traits, const TraitBounds& bounds);

struct DiversityRow {
  int run = 0;
  int generation = 0;
  int trait = -1;  // -1 is the all-trait row
  double value = 0;
};

// Per-trait rows report the median of the per-individual mean absolute
// differences; the all-trait row reports the normalised population diversity.
std::vector<DiversityRow> diversity_table(const RunLog& log);

// Mean of the selected group minus the population mean.
double selection_differential(const std::vector<double>& selected,
                              const std::vector<double>& population);

// Breeder's equation: expected response for one generation of selection.
inline double expected_response(double heritability, double differential) {
  return heritability * differential;
}

std::vector<double> first_differences(const std::vector<double>& series);

struct SelectionResponseRow {
  int run = 0;
  int parent_generation = 0;
  int trait = 0;
  double heritability = 0;
  double differential = 0;
  double predicted = 0;  // heritability * differential
  double observed = 0;   // offspring mean minus parent population mean
};

std::vector<SelectionResponseRow> selection_response_table(const RunLog& log);

struct MedianRow {
  int run = 0;
  int generation = 0;
  int trait = 0;
  double median = 0;
  double increment = 0;  // difference to the previous generation, 0 at generation 0
};

// Per-generation trait medians with their first differences.
std::vector<MedianRow> median_table(const RunLog& log);

// CSV renderers shared by the pipeline and the analyze command.
std::string heritability_csv(const std::vector<HeritabilityRow>& rows);
std::string diversity_csv(const std::vector<DiversityRow>& rows);
std::string selection_response_csv(const std::vector<SelectionResponseRow>& rows);
std::string medians_csv(const std::vector<MedianRow>& rows);

}  // namespace morphevo
