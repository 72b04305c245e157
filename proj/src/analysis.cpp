#include "morphevo/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "morphevo/util.hpp"

namespace morphevo {

RegressionResult midparent_regression(const std::vector<std::pair<double, double>>& pairs) {
  RegressionResult r;
  r.n = static_cast<int>(pairs.size());
  if (pairs.size() < 2) {
    r.degenerate = true;
    r.intercept = pairs.empty() ? 0.0 : pairs.front().second;
    return r;
  }
  double mx = 0, my = 0;
  for (const auto& [x, y] : pairs) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pairs.size());
  my /= static_cast<double>(pairs.size());

  double sxx = 0, sxy = 0;
  for (const auto& [x, y] : pairs) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  sxx /= static_cast<double>(pairs.size());
  sxy /= static_cast<double>(pairs.size());

  if (sxx < 1e-12) {
    r.degenerate = true;
    r.intercept = my;
    return r;
  }
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  r.out_of_range = r.slope < 0.0 || r.slope > 1.0;
  return r;
}

std::vector<HeritabilityRow> heritability_table(const RunLog& log) {
  std::vector<HeritabilityRow> rows;
  for (const auto& lineage : log.lineages) {
    if (lineage.empty()) continue;
    const int parent_generation = lineage.front().offspring_generation - 1;
    for (int trait = 0; trait < static_cast<int>(kTraitCount); ++trait) {
      std::vector<std::pair<double, double>> pairs;
      pairs.reserve(lineage.size());
      for (const auto& rec : lineage) {
        const double midparent = 0.5 * (rec.parent1.values()[static_cast<std::size_t>(trait)] +
                                        rec.parent2.values()[static_cast<std::size_t>(trait)]);
        pairs.emplace_back(midparent, rec.offspring.values()[static_cast<std::size_t>(trait)]);
      }
      rows.push_back({log.run_index, parent_generation, trait, midparent_regression(pairs)});
    }
  }
  return rows;
}

std::vector<double> per_individual_mean_abs_diff(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) acc += std::fabs(values[i] - values[j]);
    out[i] = acc / static_cast<double>(n - 1);
  }
  return out;
}

double trait_diversity(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  const std::vector<double> per = per_individual_mean_abs_diff(values);
  double acc = 0;
  for (const double v : per) acc += v;
  return acc / static_cast<double>(per.size());
}

TraitBounds trait_bounds(const RunLog& log) {
  TraitBounds b;
  bool seeded = false;
  for (const auto& table : log.generations) {
    for (const auto& row : table.rows) {
      const auto v = row.traits.values();
      if (!seeded) {
        b.lo = v;
        b.hi = v;
        seeded = true;
        continue;
      }
      for (std::size_t k = 0; k < kTraitCount; ++k) {
        b.lo[k] = std::min(b.lo[k], v[k]);
        b.hi[k] = std::max(b.hi[k], v[k]);
      }
    }
  }
  return b;
}

double population_diversity(const std::vector<TraitVector>& traits, const TraitBounds& bounds) {
  const std::size_t n = traits.size();
  if (n < 2) return 0.0;
  const auto normalised = [&](const TraitVector& tv) {
    std::array<double, 6> v = tv.values();
    for (std::size_t k = 0; k < kTraitCount; ++k) {
      const double span = bounds.hi[k] - bounds.lo[k];
      v[k] = span > 0 ? (v[k] - bounds.lo[k]) / span : 0.0;
    }
    return v;
  };
  std::vector<std::array<double, 6>> points;
  points.reserve(n);
  for (const auto& tv : traits) points.push_back(normalised(tv));

  double acc = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double d2 = 0;
      for (std::size_t k = 0; k < kTraitCount; ++k) {
        const double d = points[i][k] - points[j][k];
        d2 += d * d;
      }
      acc += std::sqrt(d2);
      ++pairs;
    }
  return acc / static_cast<double>(pairs);
}

std::vector<DiversityRow> diversity_table(const RunLog& log) {
  const TraitBounds bounds = trait_bounds(log);
  std::vector<DiversityRow> rows;
  for (const auto& table : log.generations) {
    std::vector<TraitVector> traits;
    traits.reserve(table.rows.size());
    for (const auto& row : table.rows) traits.push_back(row.traits);

    for (int trait = 0; trait < static_cast<int>(kTraitCount); ++trait) {
      std::vector<double> values;
      values.reserve(traits.size());
      for (const auto& tv : traits) values.push_back(tv.values()[static_cast<std::size_t>(trait)]);
      const std::vector<double> per = per_individual_mean_abs_diff(values);
      rows.push_back({log.run_index, table.index, trait,
                      per.empty() ? 0.0 : median_of(per)});
    }
    rows.push_back({log.run_index, table.index, -1, population_diversity(traits, bounds)});
  }
  return rows;
}

double selection_differential(const std::vector<double>& selected,
                              const std::vector<double>& population) {
  if (selected.empty() || population.empty())
    throw std::runtime_error("selection differential needs non-empty groups");
  double ms = 0, mp = 0;
  for (const double v : selected) ms += v;
  for (const double v : population) mp += v;
  return ms / static_cast<double>(selected.size()) - mp / static_cast<double>(population.size());
}

std::vector<double> first_differences(const std::vector<double>& series) {
  std::vector<double> out;
  if (series.size() < 2) return out;
  out.reserve(series.size() - 1);
  for (std::size_t i = 1; i < series.size(); ++i) out.push_back(series[i] - series[i - 1]);
  return out;
}

std::vector<SelectionResponseRow> selection_response_table(const RunLog& log) {
  const std::vector<HeritabilityRow> h2 = heritability_table(log);
  std::vector<SelectionResponseRow> rows;
  for (std::size_t g = 0; g < log.lineages.size(); ++g) {
    const auto& lineage = log.lineages[g];
    if (lineage.empty()) continue;
    const int parent_generation = lineage.front().offspring_generation - 1;
    const auto& parent_table = log.generations.at(static_cast<std::size_t>(parent_generation));

    for (int trait = 0; trait < static_cast<int>(kTraitCount); ++trait) {
      const std::size_t t = static_cast<std::size_t>(trait);
      std::vector<double> selected, population, offspring;
      for (const auto& rec : lineage) {
        selected.push_back(rec.parent1.values()[t]);
        selected.push_back(rec.parent2.values()[t]);
        offspring.push_back(rec.offspring.values()[t]);
      }
      for (const auto& row : parent_table.rows) population.push_back(row.traits.values()[t]);

      SelectionResponseRow row;
      row.run = log.run_index;
      row.parent_generation = parent_generation;
      row.trait = trait;
      for (const auto& h : h2)
        if (h.parent_generation == parent_generation && h.trait == trait)
          row.heritability = h.fit.degenerate ? 0.0 : h.fit.slope;
      row.differential = selection_differential(selected, population);
      row.predicted = expected_response(row.heritability, row.differential);
      double mo = 0, mp = 0;
      for (const double v : offspring) mo += v;
      for (const double v : population) mp += v;
      row.observed = mo / static_cast<double>(offspring.size()) -
                     mp / static_cast<double>(population.size());
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<MedianRow> median_table(const RunLog& log) {
  std::vector<MedianRow> rows;
  std::array<std::vector<double>, kTraitCount> series;
  for (const auto& table : log.generations) {
    for (std::size_t t = 0; t < kTraitCount; ++t) {
      std::vector<double> values;
      values.reserve(table.rows.size());
      for (const auto& row : table.rows) values.push_back(row.traits.values()[t]);
      series[t].push_back(values.empty() ? 0.0 : median_of(values));
    }
  }
  for (std::size_t g = 0; g < log.generations.size(); ++g) {
    for (std::size_t t = 0; t < kTraitCount; ++t) {
      MedianRow row;
      row.run = log.run_index;
      row.generation = log.generations[g].index;
      row.trait = static_cast<int>(t);
      row.median = series[t][g];
      row.increment = g == 0 ? 0.0 : series[t][g] - series[t][g - 1];
      rows.push_back(row);
    }
  }
  return rows;
}

std::string heritability_csv(const std::vector<HeritabilityRow>& rows) {
  std::string out = "run,generation,trait,slope,intercept,n,degenerate\n";
  for (const auto& row : rows) {
    out += std::to_string(row.run);
    out += ',';
    out += std::to_string(row.parent_generation);
    out += ',';
    out += kTraitNames[static_cast<std::size_t>(row.trait)];
    out += ',';
    out += fmt_double(row.fit.slope);
    out += ',';
    out += fmt_double(row.fit.intercept);
    out += ',';
    out += std::to_string(row.fit.n);
    out += ',';
    out += row.fit.degenerate ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string diversity_csv(const std::vector<DiversityRow>& rows) {
  std::string out = "run,generation,trait,value\n";
  for (const auto& row : rows) {
    out += std::to_string(row.run);
    out += ',';
    out += std::to_string(row.generation);
    out += ',';
    out += row.trait < 0 ? "ALL" : kTraitNames[static_cast<std::size_t>(row.trait)];
    out += ',';
    out += fmt_double(row.value);
    out += '\n';
  }
  return out;
}

std::string selection_response_csv(const std::vector<SelectionResponseRow>& rows) {
  std::string out = "run,generation,trait,heritability,differential,predicted,observed\n";
  for (const auto& row : rows) {
    out += std::to_string(row.run);
    out += ',';
    out += std::to_string(row.parent_generation);
    out += ',';
    out += kTraitNames[static_cast<std::size_t>(row.trait)];
    out += ',';
    out += fmt_double(row.heritability);
    out += ',';
    out += fmt_double(row.differential);
    out += ',';
    out += fmt_double(row.predicted);
    out += ',';
    out += fmt_double(row.observed);
    out += '\n';
  }
  return out;
}

std::string medians_csv(const std::vector<MedianRow>& rows) {
  std::string out = "run,generation,trait,median,increment\n";
  for (const auto& row : rows) {
    out += std::to_string(row.run);
    out += ',';
    out += std::to_string(row.generation);
    out += ',';
    out += kTraitNames[static_cast<std::size_t>(row.trait)];
    out += ',';
    out += fmt_double(row.median);
    out += ',';
    out += fmt_double(row.increment);
    out += '\n';
  }
  return out;
}

}  // namespace morphevo
