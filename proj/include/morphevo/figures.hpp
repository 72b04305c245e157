#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace morphevo {

// Minimal SVG writer; output is deterministic for identical draw calls.
class SvgCanvas {
public:
  SvgCanvas(double width, double height);

  void comment(const std::string& text);
  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double width = 1.0);
  void polyline(const std::vector<std::pair<double, double>>& points, const std::string& stroke,
                double width = 1.5);
  void circle(double cx, double cy, double r, const std::string& fill);
  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke = "none");
  // anchor: start | middle | end
  void text(double x, double y, const std::string& content, const std::string& anchor = "start",
            double size = 12.0, const std::string& fill = "#222222");

  std::string finish() const;

private:
  double width_, height_;
  std::string body_;
};

// Renders the figure suite into <artifact_dir>/figures: per-trait mid-parent
// scatter plots for the first generation (OLS line plus identity reference,
// slope recorded in an SVG comment), heritability, diversity, median and
// increment line charts, and the initial-population speed histogram. Charts
// plot the analysis CSVs; scatters and the histogram plot the run CSVs.
void render_figures(const std::filesystem::path& artifact_dir);

}  // namespace morphevo
