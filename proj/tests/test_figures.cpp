#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "morphevo/experiment.hpp"
#include "morphevo/figures.hpp"
#include "morphevo/util.hpp"

using namespace morphevo;
namespace fs = std::filesystem;

namespace {

const std::vector<const char*> kFigureFiles = {
    "scatter_proportion.svg", "scatter_size.svg",  "scatter_limbs.svg",
    "scatter_coverage.svg",   "scatter_speed.svg", "scatter_balance.svg",
    "heritability.svg",       "diversity.svg",     "medians.svg",
    "increments.svg",         "fitness_gen0.svg",
};

fs::path rendered_artifact() {
  static const fs::path out = [] {
    const fs::path dir = fs::temp_directory_path() / "morphevo_fig_artifact";
    fs::remove_all(dir);
    ExperimentConfig cfg;
    cfg.population = 6;
    cfg.generations = 2;
    cfg.repetitions = 2;
    cfg.duration_s = 1.0;
    cfg.seed = 19;
    cfg.output_dir = dir.string();
    run_experiment(cfg);
    render_figures(dir);
    return dir;
  }();
  return out;
}

}  // namespace

TEST_CASE("the canvas draws what it is told") {
  SvgCanvas canvas(200, 100);
  canvas.comment("hello");
  canvas.line(0, 0, 10, 20, "#ff0000");
  canvas.circle(5, 5, 2, "#00ff00");
  canvas.rect(1, 2, 3, 4, "#0000ff");
  canvas.polyline({{0, 0}, {1, 1}, {2, 0}}, "#123456");
  canvas.text(50, 50, "label", "middle");
  const std::string svg = canvas.finish();

  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("width=\"200\"") != std::string::npos);
  CHECK(svg.find("<!-- hello -->") != std::string::npos);
  CHECK(svg.find("<line") != std::string::npos);
  CHECK(svg.find("<circle") != std::string::npos);
  CHECK(svg.find("<rect") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find(">label</text>") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("canvas text escapes markup") {
  SvgCanvas canvas(10, 10);
  canvas.text(0, 0, "a<b&c>d");
  const std::string svg = canvas.finish();
  CHECK(svg.find("a&lt;b&amp;c&gt;d") != std::string::npos);
  CHECK(svg.find("a<b") == std::string::npos);
}

TEST_CASE("identical draw sequences give identical bytes") {
  const auto draw = [] {
    SvgCanvas canvas(64, 64);
    canvas.line(0, 0, 64, 64, "#888888", 0.5);
    canvas.text(4, 10, "x");
    return canvas.finish();
  };
  CHECK(draw() == draw());
}

TEST_CASE("rendering an artifact produces the whole figure set") {
  const fs::path dir = rendered_artifact();
  for (const char* name : kFigureFiles) {
    const fs::path file = dir / "figures" / name;
    REQUIRE_MESSAGE(fs::exists(file), name);
    const std::string svg = read_text_file(file);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("nan") == std::string::npos);
    CHECK(svg.find("inf") == std::string::npos);
  }
}

TEST_CASE("scatter plots carry their fit in a comment") {
  const fs::path dir = rendered_artifact();
  const std::string svg = read_text_file(dir / "figures" / "scatter_speed.svg");
  const bool fitted = svg.find("<!-- slope ") != std::string::npos;
  const bool degenerate = svg.find("<!-- slope degenerate -->") != std::string::npos;
  CHECK((fitted || degenerate));
  if (fitted && !degenerate) {
    const std::size_t at = svg.find("<!-- slope ");
    const std::size_t end = svg.find(" -->", at);
    const std::string value = svg.substr(at + 11, end - at - 11);
    CHECK(std::isfinite(parse_double(value)));
    CHECK(svg.find("<!-- intercept ") != std::string::npos);
    CHECK(svg.find("<!-- pairs ") != std::string::npos);
  }
}

TEST_CASE("re-rendering writes byte-identical figures") {
  const fs::path dir = rendered_artifact();
  std::vector<std::string> before;
  for (const char* name : kFigureFiles)
    before.push_back(read_text_file(dir / "figures" / name));
  render_figures(dir);
  std::size_t i = 0;
  for (const char* name : kFigureFiles)
    CHECK(read_text_file(dir / "figures" / name) == before[i++]);
}

TEST_CASE("figures refuse to run without their source tables") {
  const fs::path dir = fs::temp_directory_path() / "morphevo_fig_broken";
  fs::remove_all(dir);
  ExperimentConfig cfg;
  cfg.population = 4;
  cfg.generations = 1;
  cfg.duration_s = 1.0;
  cfg.output_dir = dir.string();
  run_experiment(cfg);
  fs::remove(dir / "analysis" / "diversity.csv");
  try {
    render_figures(dir);
    FAIL("expected a missing-table error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("diversity.csv") != std::string::npos);
  }
}
