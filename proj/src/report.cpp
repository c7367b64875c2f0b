// Copyright 2026 The advmt Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "advmt/harness.hpp"

namespace advmt {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::set<std::string> frontier_labels(const std::vector<ParetoPoint>& points,
                                      const std::string& metric) {
  std::set<std::string> labels;
  for (const auto& p : oriented_frontier(points, metric)) labels.insert(p.label);
  return labels;
}

struct ChartSeries {
  std::string name;
  std::vector<ParetoPoint> points;
  std::set<std::string> frontier;
};

// Plain SVG scatter: one color per attack, frontier points joined by a
// polyline, axes labeled sim(X, X_att) / sim(Y, Y_att).
void write_svg_chart(const std::string& path, const std::string& metric,
                     const std::vector<ChartSeries>& series) {
  const double width = 640, height = 480;
  const double ml = 70, mr = 30, mt = 40, mb = 60;
  double lo_x = 0.0, hi_x = 1.0, lo_y = 0.0, hi_y = 1.0;
  bool any = false;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      if (!any) {
        lo_x = hi_x = p.sim_input;
        lo_y = hi_y = p.sim_output;
        any = true;
      }
      lo_x = std::min(lo_x, p.sim_input);
      hi_x = std::max(hi_x, p.sim_input);
      lo_y = std::min(lo_y, p.sim_output);
      hi_y = std::max(hi_y, p.sim_output);
    }
  if (hi_x - lo_x < 1e-9) { lo_x -= 0.5; hi_x += 0.5; }
  if (hi_y - lo_y < 1e-9) { lo_y -= 0.5; hi_y += 0.5; }
  double pad_x = 0.05 * (hi_x - lo_x), pad_y = 0.05 * (hi_y - lo_y);
  lo_x -= pad_x; hi_x += pad_x; lo_y -= pad_y; hi_y += pad_y;

  auto sx = [&](double v) {
    return ml + (v - lo_x) / (hi_x - lo_x) * (width - ml - mr);
  };
  auto sy = [&](double v) {
    return height - mb - (v - lo_y) / (hi_y - lo_y) * (height - mt - mb);
  };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                  "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width
      << "' height='" << height << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<text x='" << width / 2 << "' y='24' text-anchor='middle' "
      << "font-size='16'>" << metric << " similarity trade-off</text>\n";
  // axes
  svg << "<line x1='" << ml << "' y1='" << height - mb << "' x2='"
      << width - mr << "' y2='" << height - mb << "' stroke='black'/>\n";
  svg << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='"
      << height - mb << "' stroke='black'/>\n";
  svg << "<text x='" << (ml + width - mr) / 2 << "' y='" << height - 16
      << "' text-anchor='middle' font-size='13'>sim(X, X_att)</text>\n";
  svg << "<text x='18' y='" << (mt + height - mb) / 2
      << "' text-anchor='middle' font-size='13' transform='rotate(-90 18 "
      << (mt + height - mb) / 2 << ")'>sim(Y, Y_att)</text>\n";
  for (int t = 0; t <= 4; ++t) {
    double vx = lo_x + t * (hi_x - lo_x) / 4;
    double vy = lo_y + t * (hi_y - lo_y) / 4;
    svg << "<text x='" << sx(vx) << "' y='" << height - mb + 18
        << "' text-anchor='middle' font-size='10'>" << fmt(vx, 2)
        << "</text>\n";
    svg << "<text x='" << ml - 8 << "' y='" << sy(vy) + 4
        << "' text-anchor='end' font-size='10'>" << fmt(vy, 2) << "</text>\n";
  }

  int color_idx = 0;
  double legend_y = mt + 4;
  for (const auto& s : series) {
    const char* color = kColors[color_idx % 6];
    ++color_idx;
    std::vector<ParetoPoint> front;
    for (const auto& p : s.points)
      if (s.frontier.count(p.label)) front.push_back(p);
    std::sort(front.begin(), front.end(),
              [](const ParetoPoint& a, const ParetoPoint& b) {
                return a.sim_input < b.sim_input;
              });
    if (front.size() > 1) {
      svg << "<polyline fill='none' stroke='" << color
          << "' stroke-width='1.5' points='";
      for (const auto& p : front)
        svg << sx(p.sim_input) << "," << sy(p.sim_output) << " ";
      svg << "'/>\n";
    }
    for (const auto& p : s.points) {
      bool on_front = s.frontier.count(p.label) > 0;
      svg << "<circle cx='" << sx(p.sim_input) << "' cy='"
          << sy(p.sim_output) << "' r='" << (on_front ? 5 : 3.5)
          << "' fill='" << color << "' fill-opacity='"
          << (on_front ? "0.95" : "0.45") << "'/>\n";
      svg << "<text x='" << sx(p.sim_input) + 6 << "' y='"
          << sy(p.sim_output) - 6 << "' font-size='9' fill='#444'>"
          << p.label << "</text>\n";
    }
    svg << "<circle cx='" << width - mr - 140 << "' cy='" << legend_y
        << "' r='4' fill='" << color << "'/>\n";
    svg << "<text x='" << width - mr - 130 << "' y='" << legend_y + 4
        << "' font-size='11'>" << s.name << "</text>\n";
    legend_y += 16;
  }
  svg << "</svg>\n";

  std::ofstream out(path);
  if (!out) throw Error("report: cannot write " + path);
  out << svg.str();
}

}  // namespace

void render_report(const std::vector<FrontierBundle>& frontiers,
                   const std::vector<DeltaRow>& deltas,
                   const std::vector<AttackRecord>& samples,
                   const std::string& out_dir) {
  fs::path dir(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("report: cannot create directory " + out_dir);

  std::ostringstream md;
  md << "# Attack evaluation report\n\n";
  md << "Dominance direction: an ideal attack keeps sim(X, X_att) high and "
        "pushes sim(Y, Y_att) low. WER is a distance, so its coordinates "
        "are negated before frontier analysis and reported raw.\n\n";

  if (frontiers.empty()) md << "_No frontier data._\n\n";
  for (const auto& bundle : frontiers) {
    std::string csv_path = (dir / ("frontier_" + bundle.metric + ".csv")).string();
    std::ofstream csv(csv_path);
    if (!csv) throw Error("report: cannot write " + csv_path);
    csv << "metric,attack,hyperparam_label,sim_input,sim_output,on_frontier\n";

    std::vector<ChartSeries> series;
    for (const auto& [attack, points] : bundle.points_by_attack) {
      ChartSeries s;
      s.name = attack;
      s.points = points;
      s.frontier = frontier_labels(points, bundle.metric);
      for (const auto& p : points) {
        csv << bundle.metric << "," << csv_escape(attack) << ","
            << csv_escape(p.label) << "," << fmt(p.sim_input, 6) << ","
            << fmt(p.sim_output, 6) << ","
            << (s.frontier.count(p.label) ? "true" : "false") << "\n";
      }
      series.push_back(std::move(s));
    }
    write_svg_chart((dir / ("frontier_" + bundle.metric + ".svg")).string(),
                    bundle.metric, series);

    md << "## " << bundle.metric << " frontier\n\n";
    bool empty = true;
    for (const auto& s : series) empty = empty && s.points.empty();
    if (empty) {
      md << "_no data_\n\n";
      continue;
    }
    md << "![frontier](frontier_" << bundle.metric << ".svg)\n\n";
    md << "| attack | setting | sim(X, X_att) | sim(Y, Y_att) | frontier |\n";
    md << "|---|---|---|---|---|\n";
    for (const auto& s : series)
      for (const auto& p : s.points)
        md << "| " << s.name << " | " << p.label << " | "
           << fmt(p.sim_input) << " | " << fmt(p.sim_output) << " | "
           << (s.frontier.count(p.label) ? "yes" : "") << " |\n";
    md << "\n";
  }

  // Delta table, metrics as rows and attacks as columns.
  md << "## Best-setting deltas\n\n";
  if (deltas.empty()) {
    md << "_no data_\n\n";
  } else {
    std::vector<std::string> attacks;
    for (const auto& row : deltas)
      if (std::find(attacks.begin(), attacks.end(), row.attack_name) ==
          attacks.end())
        attacks.push_back(row.attack_name);
    md << "| Metric |";
    for (const auto& a : attacks) md << " " << a << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < attacks.size(); ++i) md << "---|";
    md << "\n";
    std::vector<std::string> seen_metrics;
    for (const auto& row : deltas)
      if (std::find(seen_metrics.begin(), seen_metrics.end(),
                    row.metric_name) == seen_metrics.end())
        seen_metrics.push_back(row.metric_name);
    for (const auto& metric : seen_metrics) {
      md << "| " << metric << (metric_is_distance(metric) ? " ↓" : " ↑")
         << " |";
      for (const auto& attack : attacks) {
        const DeltaRow* found = nullptr;
        for (const auto& row : deltas)
          if (row.metric_name == metric && row.attack_name == attack)
            found = &row;
        md << " " << (found ? fmt(found->delta, 2) : "-") << " |";
      }
      md << "\n";
    }
    md << "\nPer-cell deltas are mean sim(X, X_att) minus mean "
          "sim(Y, Y_att) at the attack's best setting.\n\n";
  }

  // Appendix-style samples.
  md << "## Attack samples\n\n";
  if (samples.empty()) md << "_no data_\n";
  for (const auto& rec : samples) {
    md << "| Attack type | Sentence type | Sentence |\n|---|---|---|\n";
    md << "| " << rec.attack_name << " | Orig. sentence | " << rec.x << " |\n";
    md << "| | Attacked sentence | " << rec.x_att << " |\n";
    md << "| | Orig. translation | " << rec.y << " |\n";
    md << "| | Attacked translation | " << rec.y_att << " |\n\n";
  }

  std::string md_path = (dir / "report.md").string();
  std::ofstream out(md_path);
  if (!out) throw Error("report: cannot write " + md_path);
  out << md.str();
}

}  // namespace advmt
