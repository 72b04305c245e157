#include "morphevo/figures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "morphevo/analysis.hpp"
#include "morphevo/experiment.hpp"
#include "morphevo/util.hpp"

namespace morphevo {

namespace {

std::string escape_xml(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  // Two decimals are plenty for pixel coordinates and keep files small.
  const double r = std::round(v * 100.0) / 100.0;
  return fmt_double(r == 0.0 ? 0.0 : r);
}

}  // namespace

SvgCanvas::SvgCanvas(double width, double height) : width_(width), height_(height) {}

void SvgCanvas::comment(const std::string& text) {
  body_ += "<!-- " + escape_xml(text) + " -->\n";
}

void SvgCanvas::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                     double width) {
  body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
           num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void SvgCanvas::polyline(const std::vector<std::pair<double, double>>& points,
                         const std::string& stroke, double width) {
  if (points.size() < 2) return;
  body_ += "<polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) +
           "\" points=\"";
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i) body_ += ' ';
    body_ += num(points[i].first) + "," + num(points[i].second);
  }
  body_ += "\"/>\n";
}

void SvgCanvas::circle(double cx, double cy, double r, const std::string& fill) {
  body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
           "\" fill=\"" + fill + "\"/>\n";
}

void SvgCanvas::rect(double x, double y, double w, double h, const std::string& fill,
                     const std::string& stroke) {
  body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
           "\" height=\"" + num(h) + "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\"/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& content, const std::string& anchor,
                     double size, const std::string& fill) {
  body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" text-anchor=\"" + anchor +
           "\" font-family=\"sans-serif\" font-size=\"" + num(size) + "\" fill=\"" + fill +
           "\">" + escape_xml(content) + "</text>\n";
}

std::string SvgCanvas::finish() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) + "\" height=\"" +
         num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) +
         "\">\n<rect x=\"0\" y=\"0\" width=\"" + num(width_) + "\" height=\"" + num(height_) +
         "\" fill=\"#ffffff\"/>\n" + body_ + "</svg>\n";
}

namespace {

constexpr const char* kBlue = "#1f77b4";
constexpr const char* kRed = "#d62728";
constexpr const char* kPalette[8] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                     "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct Series {
  std::string color;
  std::vector<std::pair<double, double>> points;
  bool scatter = false;
};

struct Panel {
  double x = 0, y = 0, w = 360, h = 250;
  std::string title, xlabel, ylabel;
  std::vector<Series> series;
};

std::string tick_label(double v) {
  const double r = std::round(v * 1000.0) / 1000.0;
  return fmt_double(r == 0.0 ? 0.0 : r);
}

void draw_panel(SvgCanvas& svg, const Panel& p) {
  const double ml = 52, mr = 12, mt = 28, mb = 40;
  const double px = p.x + ml, py = p.y + mt;
  const double pw = p.w - ml - mr, ph = p.h - mt - mb;

  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  bool seeded = false;
  for (const auto& s : p.series)
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (!seeded) {
        xmin = xmax = x;
        ymin = ymax = y;
        seeded = true;
      } else {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
    }
  if (xmax - xmin < 1e-12) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const auto mapx = [&](double v) { return px + (v - xmin) / (xmax - xmin) * pw; };
  const auto mapy = [&](double v) { return py + ph - (v - ymin) / (ymax - ymin) * ph; };

  svg.rect(px, py, pw, ph, "none", "#888888");
  for (int t = 0; t <= 4; ++t) {
    const double fx = xmin + (xmax - xmin) * t / 4.0;
    const double fy = ymin + (ymax - ymin) * t / 4.0;
    const double gx = mapx(fx), gy = mapy(fy);
    svg.line(gx, py + ph, gx, py + ph + 4, "#888888");
    svg.text(gx, py + ph + 16, tick_label(fx), "middle", 10, "#555555");
    svg.line(px - 4, gy, px, gy, "#888888");
    svg.text(px - 6, gy + 3, tick_label(fy), "end", 10, "#555555");
    if (t > 0 && t < 4) svg.line(px, gy, px + pw, gy, "#eeeeee");
  }

  svg.text(p.x + p.w / 2, p.y + 16, p.title, "middle", 12);
  svg.text(px + pw / 2, p.y + p.h - 6, p.xlabel, "middle", 11, "#555555");
  svg.text(p.x + 14, py - 8, p.ylabel, "start", 11, "#555555");

  for (const auto& s : p.series) {
    std::vector<std::pair<double, double>> mapped;
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      mapped.emplace_back(mapx(x), mapy(y));
    }
    if (s.scatter) {
      for (const auto& [x, y] : mapped) svg.circle(x, y, 2.2, s.color);
    } else {
      svg.polyline(mapped, s.color);
    }
  }
}

void draw_legend(SvgCanvas& svg, double x, double y,
                 const std::vector<std::pair<std::string, std::string>>& entries) {
  double cx = x;
  for (const auto& [label, color] : entries) {
    svg.rect(cx, y - 8, 14, 3, color);
    svg.text(cx + 18, y - 4, label, "start", 11, "#333333");
    cx += 26 + 7.0 * static_cast<double>(label.size());
  }
}

void save_svg(const std::filesystem::path& path, const SvgCanvas& svg) {
  write_text_file(path, svg.finish());
}

// The line charts plot analysis CSV columns as-is; nothing is recomputed from
// the run logs here, so every plotted number can be checked against the files.
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw std::runtime_error("missing analysis CSV: " + path.string());
  std::vector<std::vector<std::string>> rows;
  for (const std::string& line : split(read_text_file(path), '\n')) {
    if (line.empty()) continue;
    rows.push_back(split(line, ','));
  }
  if (rows.empty()) throw std::runtime_error("empty analysis CSV: " + path.string());
  rows.erase(rows.begin());
  return rows;
}

int trait_index(const std::string& name) {
  for (std::size_t i = 0; i < kTraitCount; ++i)
    if (name == kTraitNames[i]) return static_cast<int>(i);
  return -1;
}

std::vector<std::pair<std::string, std::string>> run_legend(const std::vector<int>& runs) {
  std::vector<std::pair<std::string, std::string>> entries;
  for (std::size_t i = 0; i < runs.size(); ++i)
    entries.push_back({"run " + std::to_string(runs[i]), kPalette[i % 8]});
  return entries;
}

// One panel per trait, one polyline per run. Rows: (run, generation, trait
// name, value); select picks the plotted column.
void trait_grid_figure(const std::filesystem::path& out_file, const std::string& heading,
                       const std::string& ylabel,
                       const std::vector<std::vector<std::string>>& rows, std::size_t value_col,
                       bool with_all_panel, bool skip_generation_zero) {
  std::map<int, std::size_t> run_slot;
  for (const auto& r : rows) run_slot.emplace(static_cast<int>(parse_long(r[0])), 0);
  std::vector<int> runs;
  for (auto& [run, slot] : run_slot) {
    slot = runs.size();
    runs.push_back(run);
  }

  const int panels = with_all_panel ? 7 : 6;
  const int columns = with_all_panel ? 4 : 3;
  const double pw = 380, ph = 270;
  SvgCanvas svg(columns * pw + 20, 2 * ph + 70);
  svg.text(14, 24, heading, "start", 15);
  draw_legend(svg, 14, 46, run_legend(runs));

  for (int slot = 0; slot < panels; ++slot) {
    const int trait = slot < 6 ? slot : -1;
    Panel p;
    p.x = (slot % columns) * pw + 10;
    p.y = (slot / columns) * ph + 56;
    p.w = pw - 10;
    p.h = ph - 10;
    p.title = trait < 0 ? "all traits" : kTraitNames[static_cast<std::size_t>(trait)];
    p.xlabel = "generation";
    p.ylabel = ylabel;
    p.series.resize(runs.size());
    for (std::size_t r = 0; r < runs.size(); ++r) p.series[r].color = kPalette[r % 8];
    for (const auto& row : rows) {
      if (trait_index(row[2]) != trait && !(trait < 0 && row[2] == "ALL")) continue;
      const double generation = parse_double(row[1]);
      if (skip_generation_zero && generation == 0) continue;
      const std::size_t slot_of_run = run_slot[static_cast<int>(parse_long(row[0]))];
      p.series[slot_of_run].points.emplace_back(generation, parse_double(row[value_col]));
    }
    draw_panel(svg, p);
  }
  save_svg(out_file, svg);
}

void heritability_figure(const std::filesystem::path& out,
                         const std::filesystem::path& analysis) {
  auto rows = read_csv(analysis / "heritability.csv");
  rows.erase(std::remove_if(rows.begin(), rows.end(),
                            [](const std::vector<std::string>& r) { return r[6] == "1"; }),
             rows.end());
  trait_grid_figure(out / "heritability.svg",
                    "Heritability of the six traits across generations", "h2", rows, 3, false,
                    false);
}

void scatter_figures(const std::filesystem::path& out, const std::vector<RunLog>& logs) {
  for (std::size_t t = 0; t < kTraitCount; ++t) {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& log : logs)
      for (const auto& lineage : log.lineages)
        for (const auto& rec : lineage) {
          if (rec.offspring_generation != 1) continue;
          pairs.emplace_back(
              0.5 * (rec.parent1.values()[t] + rec.parent2.values()[t]),
              rec.offspring.values()[t]);
        }
    const std::string trait = kTraitNames[t];

    SvgCanvas svg(470, 430);
    svg.comment("trait " + trait + " generation 0 parents");
    if (pairs.size() >= 2) {
      const RegressionResult fit = midparent_regression(pairs);
      if (fit.degenerate) {
        svg.comment("slope degenerate");
      } else {
        svg.comment("slope " + fmt_double(fit.slope));
        svg.comment("intercept " + fmt_double(fit.intercept));
      }
      svg.comment("pairs " + std::to_string(fit.n));

      double lo = pairs.front().first, hi = lo;
      for (const auto& [x, y] : pairs) {
        lo = std::min(lo, std::min(x, y));
        hi = std::max(hi, std::max(x, y));
      }
      if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
      }

      Panel p;
      p.x = 10;
      p.y = 40;
      p.w = 450;
      p.h = 370;
      p.title = fit.degenerate
                    ? "degenerate fit (n " + std::to_string(fit.n) + ")"
                    : "slope " + fmt_double(std::round(fit.slope * 1000.0) / 1000.0) + "  (n " +
                          std::to_string(fit.n) + ")";
      p.xlabel = "mid-parent " + trait;
      p.ylabel = "offspring " + trait;

      Series dots;
      dots.color = "#555555";
      dots.scatter = true;
      dots.points = pairs;
      p.series.push_back(std::move(dots));

      Series reference;
      reference.color = kRed;
      reference.points = {{lo, lo}, {hi, hi}};
      p.series.push_back(std::move(reference));

      if (!fit.degenerate) {
        Series ols;
        ols.color = kBlue;
        ols.points = {{lo, fit.intercept + fit.slope * lo},
                      {hi, fit.intercept + fit.slope * hi}};
        p.series.push_back(std::move(ols));
      }
      draw_panel(svg, p);
    } else {
      svg.comment("slope degenerate");
      svg.comment("pairs " + std::to_string(pairs.size()));
      svg.text(14, 70, "no generation 0 lineage records", "start", 13);
    }
    svg.text(14, 24, "Mid-parent regression, " + trait, "start", 15);
    save_svg(out / ("scatter_" + trait + ".svg"), svg);
  }
}

void fitness_histogram_figure(const std::filesystem::path& out,
                              const std::vector<RunLog>& logs) {
  std::vector<double> speeds;
  for (const auto& log : logs) {
    if (log.generations.empty()) continue;
    for (const auto& row : log.generations.front().rows) speeds.push_back(row.traits.speed);
  }

  SvgCanvas svg(470, 400);
  svg.comment("speed distribution of the random initial population");
  svg.text(14, 24, "Initial population speed", "start", 15);

  const double ml = 62, mr = 16, mt = 50, mb = 50;
  const double pw = 470 - ml - mr, ph = 400 - mt - mb;

  if (!speeds.empty()) {
    double lo = *std::min_element(speeds.begin(), speeds.end());
    double hi = *std::max_element(speeds.begin(), speeds.end());
    if (hi - lo < 1e-12) hi = lo + 1.0;
    constexpr int kBins = 20;
    std::vector<int> counts(kBins, 0);
    for (const double v : speeds) {
      int bin = static_cast<int>((v - lo) / (hi - lo) * kBins);
      bin = std::clamp(bin, 0, kBins - 1);
      ++counts[static_cast<std::size_t>(bin)];
    }
    const int cmax = *std::max_element(counts.begin(), counts.end());

    svg.rect(ml, mt, pw, ph, "none", "#888888");
    for (int b = 0; b < kBins; ++b) {
      const double h = ph * counts[static_cast<std::size_t>(b)] / cmax;
      svg.rect(ml + pw * b / kBins + 1, mt + ph - h, pw / kBins - 2, h, kBlue);
    }
    for (int t = 0; t <= 4; ++t) {
      const double fx = lo + (hi - lo) * t / 4.0;
      const double gx = ml + pw * t / 4.0;
      svg.line(gx, mt + ph, gx, mt + ph + 4, "#888888");
      svg.text(gx, mt + ph + 16, tick_label(fx), "middle", 10, "#555555");
      const double gy = mt + ph - ph * t / 4.0;
      svg.line(ml - 4, gy, ml, gy, "#888888");
      svg.text(ml - 6, gy + 3, tick_label(cmax * t / 4.0), "end", 10, "#555555");
    }
    svg.text(ml + pw / 2, 394, "speed (cm/s)", "middle", 11, "#555555");
    svg.text(14, mt - 8, "individuals", "start", 11, "#555555");
  } else {
    svg.text(14, 70, "no generation 0 rows", "start", 13);
  }
  save_svg(out / "fitness_gen0.svg", svg);
}

}  // namespace

void render_figures(const std::filesystem::path& artifact_dir) {
  const std::vector<RunLog> logs = load_artifact(artifact_dir);
  const std::filesystem::path analysis = artifact_dir / "analysis";
  const std::filesystem::path out = artifact_dir / "figures";
  std::filesystem::create_directories(out);

  scatter_figures(out, logs);
  heritability_figure(out, analysis);
  trait_grid_figure(out / "diversity.svg", "Phenotypic diversity across generations",
                    "diversity", read_csv(analysis / "diversity.csv"), 3, true, false);
  trait_grid_figure(out / "medians.svg", "Median trait value per generation", "median",
                    read_csv(analysis / "medians.csv"), 3, false, false);
  trait_grid_figure(out / "increments.svg", "Increment of the median per generation",
                    "increment", read_csv(analysis / "medians.csv"), 4, false, true);
  fitness_histogram_figure(out, logs);
}

}  // namespace morphevo
