#include "morphevo/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace morphevo {

std::size_t tournament_select(const std::vector<double>& fitness, int k, Rng& rng) {
  const std::size_t n = fitness.size();
  if (n == 0) throw std::runtime_error("empty population");
  const std::size_t entrants = std::min<std::size_t>(static_cast<std::size_t>(std::max(k, 1)), n);

  std::vector<std::size_t> drawn;
  drawn.reserve(entrants);
  while (drawn.size() < entrants) {
    const std::size_t candidate = rng.index(n);
    if (std::find(drawn.begin(), drawn.end(), candidate) == drawn.end())
      drawn.push_back(candidate);
  }
  std::size_t best = drawn[0];
  for (const std::size_t idx : drawn)
    if (fitness[idx] > fitness[best]) best = idx;
  return best;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& t) {
  std::string out = "t_s,x_cm,y_cm,z_cm,roll_deg,pitch_deg,yaw_deg\n";
  for (std::size_t i = 0; i < t.samples.size(); ++i) {
    const TrajectorySample& s = t.samples[i];
    out += fmt_double(static_cast<double>(i) * t.sample_period_s);
    out += ',';
    out += fmt_double(s.position_cm.x);
    out += ',';
    out += fmt_double(s.position_cm.y);
    out += ',';
    out += fmt_double(s.position_cm.z);
    out += ',';
    out += fmt_double(s.roll_deg);
    out += ',';
    out += fmt_double(s.pitch_deg);
    out += ',';
    out += fmt_double(s.yaw_deg);
    out += '\n';
  }
  write_text_file(path, out);
}

namespace detail {

std::string non_finite_event(int generation, std::uint64_t id) {
  return "generation " + std::to_string(generation) + " individual " + std::to_string(id) +
         ": non-finite traits zeroed";
}

TraitVector zero_non_finite(TraitVector tv) {
  auto v = tv.values();
  for (double& x : v)
    if (!std::isfinite(x)) x = 0.0;
  return TraitVector::from_values(v);
}

}  // namespace detail

namespace {

std::string pad2(int v) {
  std::string s = std::to_string(v);
  return s.size() < 2 ? "0" + s : s;
}

std::string trait_csv_row(int run, int generation, const TraitRow& row) {
  std::string out = std::to_string(run);
  out += ',';
  out += std::to_string(generation);
  out += ',';
  out += std::to_string(row.individual_id);
  for (const double v : row.traits.values()) {
    out += ',';
    out += fmt_double(v);
  }
  out += '\n';
  return out;
}

constexpr const char* kTraitsHeader =
    "run_id,generation,individual_id,proportion,size,limbs,coverage,speed,balance\n";

std::string lineage_header() {
  std::string h = "run_id,generation,offspring_id,parent1_id,parent2_id";
  for (const char* prefix : {"offspring", "parent1", "parent2"})
    for (const char* trait : kTraitNames) {
      h += ',';
      h += prefix;
      h += '_';
      h += trait;
    }
  h += '\n';
  return h;
}

TraitVector traits_from_fields(const std::vector<std::string>& fields, std::size_t start) {
  std::array<double, 6> v{};
  for (std::size_t k = 0; k < 6; ++k) v[k] = parse_double(fields.at(start + k));
  return TraitVector::from_values(v);
}

}  // namespace

void RunLog::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);

  std::map<std::string, std::string> manifest;
  manifest["run_id"] = std::to_string(run_index);
  manifest["seed"] = std::to_string(seed);
  manifest["encoding"] = encoding;
  manifest["population"] =
      std::to_string(generations.empty() ? 0 : generations.front().rows.size());
  manifest["generations"] =
      std::to_string(generations.empty() ? 0 : static_cast<int>(generations.size()) - 1);
  for (const auto& [key, value] : manifest_extra) manifest[key] = value;
  std::string mtext;
  for (const auto& [key, value] : manifest) mtext += key + "=" + value + "\n";
  write_text_file(dir / "manifest.txt", mtext);

  for (const auto& table : generations) {
    std::string out = kTraitsHeader;
    for (const auto& row : table.rows) out += trait_csv_row(run_index, table.index, row);
    write_text_file(dir / ("traits_g" + pad2(table.index) + ".csv"), out);
  }

  for (const auto& lineage : lineages) {
    if (lineage.empty()) continue;
    const int gen = lineage.front().offspring_generation;
    std::string out = lineage_header();
    for (const auto& rec : lineage) {
      out += std::to_string(run_index);
      out += ',';
      out += std::to_string(gen);
      out += ',';
      out += std::to_string(rec.offspring_id);
      out += ',';
      out += std::to_string(rec.parent1_id);
      out += ',';
      out += std::to_string(rec.parent2_id);
      for (const TraitVector* tv : {&rec.offspring, &rec.parent1, &rec.parent2})
        for (const double v : tv->values()) {
          out += ',';
          out += fmt_double(v);
        }
      out += '\n';
    }
    write_text_file(dir / ("lineage_g" + pad2(gen) + ".csv"), out);
  }

  std::string etext;
  for (const auto& event : events) etext += event + "\n";
  write_text_file(dir / "events.log", etext);
}

RunLog RunLog::load(const std::filesystem::path& dir) {
  RunLog log;

  std::map<std::string, std::string> manifest;
  {
    std::istringstream in(read_text_file(dir / "manifest.txt"));
    std::string line;
    while (std::getline(in, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      manifest[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  log.run_index = static_cast<int>(parse_long(manifest.at("run_id")));
  log.seed = static_cast<std::uint64_t>(parse_long(manifest.at("seed")));
  log.encoding = manifest.at("encoding");
  const int gens = static_cast<int>(parse_long(manifest.at("generations")));
  for (const auto& [key, value] : manifest) {
    if (key == "run_id" || key == "seed" || key == "encoding" || key == "population" ||
        key == "generations")
      continue;
    log.manifest_extra.push_back({key, value});
  }

  const auto read_rows = [](const std::filesystem::path& path) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(read_text_file(path));
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (first) {
        first = false;
        continue;
      }
      if (trim(line).empty()) continue;
      rows.push_back(split(line, ','));
    }
    return rows;
  };

  for (int g = 0; g <= gens; ++g) {
    GenerationTable table;
    table.index = g;
    for (const auto& fields : read_rows(dir / ("traits_g" + pad2(g) + ".csv"))) {
      TraitRow row;
      row.individual_id = static_cast<std::uint64_t>(parse_long(fields.at(2)));
      row.traits = traits_from_fields(fields, 3);
      table.rows.push_back(row);
    }
    log.generations.push_back(std::move(table));
  }

  for (int g = 1; g <= gens; ++g) {
    std::vector<LineageRecord> lineage;
    for (const auto& fields : read_rows(dir / ("lineage_g" + pad2(g) + ".csv"))) {
      LineageRecord rec;
      rec.offspring_generation = static_cast<int>(parse_long(fields.at(1)));
      rec.offspring_id = static_cast<std::uint64_t>(parse_long(fields.at(2)));
      rec.parent1_id = static_cast<std::uint64_t>(parse_long(fields.at(3)));
      rec.parent2_id = static_cast<std::uint64_t>(parse_long(fields.at(4)));
      rec.offspring = traits_from_fields(fields, 5);
      rec.parent1 = traits_from_fields(fields, 11);
      rec.parent2 = traits_from_fields(fields, 17);
      lineage.push_back(rec);
    }
    log.lineages.push_back(std::move(lineage));
  }

  {
    const auto events_path = dir / "events.log";
    if (std::filesystem::exists(events_path)) {
      std::istringstream in(read_text_file(events_path));
      std::string line;
      while (std::getline(in, line))
        if (!trim(line).empty()) log.events.push_back(line);
    }
  }
  return log;
}

}  // namespace morphevo
