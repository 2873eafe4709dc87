// Copyright 2026 The usersim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "usersim/report.h"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "usersim/error.h"
#include "usersim/hash.h"

namespace usersim {

using nlohmann::json;

namespace {

const char* const kUndefined = "Undefined";

std::string CsvEscape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

std::string Real(double v) { return fmt::format("{:.4f}", v); }

bool IsDefined(const json& v) { return v.is_number(); }

const json& At(const json& j, std::initializer_list<const char*> path) {
  static const json kNull;
  const json* cur = &j;
  for (const char* p : path) {
    if (!cur->is_object() || !cur->contains(p)) return kNull;
    cur = &(*cur)[p];
  }
  return *cur;
}

std::string Generator(const json& report) {
  const json& m = At(report, {"backend", "model"});
  return m.is_string() ? m.get<std::string>() : "simulator";
}

std::vector<const json*> OfTask(const std::vector<json>& reports, const char* task) {
  std::vector<const json*> out;
  for (const auto& r : reports) {
    if (r.value("task", "") == task) out.push_back(&r);
  }
  return out;
}

void WriteFile(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string FormatCell(const json& value) {
  if (value.is_null()) return "";
  if (value.is_number_integer() || value.is_number_unsigned()) return value.dump();
  if (value.is_number_float()) return Real(value.get<double>());
  if (value.is_string()) return value.get<std::string>();
  if (value.is_object() && value.contains("undefined")) return kUndefined;
  return value.dump();
}

std::string Table::ToCsv() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out.push_back(',');
      out += CsvEscape(cells[i]);
    }
    out.push_back('\n');
  };
  line(header);
  for (const auto& r : rows) line(r);
  return out;
}

std::string Table::ToText() const {
  std::vector<size_t> width(header.size(), 0);
  auto measure = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size() && i < width.size(); ++i) {
      width[i] = std::max(width[i], cells[i].size());
    }
  };
  measure(header);
  for (const auto& r : rows) measure(r);
  std::string out = title + "\n\n";
  auto line = [&](const std::vector<std::string>& cells) {
    std::string l;
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) l += "  ";
      l += cells[i];
      if (i + 1 < cells.size()) l.append(width[i] - cells[i].size(), ' ');
    }
    out += l + "\n";
  };
  line(header);
  size_t total = 0;
  for (size_t w : width) total += w;
  out += std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') + "\n";
  for (const auto& r : rows) line(r);
  if (!notes.empty()) {
    out += "\n";
    for (const auto& n : notes) out += "note: " + n + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tables

namespace {

const std::vector<std::string> kDatasets = {"imdb", "reddit", "redial"};

std::vector<std::string> OrderedBaselines(const std::vector<const json*>& rs) {
  static const std::vector<std::string> kOrder = {"vanilla", "di", "di-pp", "ih"};
  std::set<std::string> present;
  for (const auto* r : rs) present.insert(r->value("baseline", ""));
  std::vector<std::string> out;
  for (const auto& b : kOrder) {
    if (present.count(b)) out.push_back(b);
  }
  return out;
}

Table ItemsEntropyTable(const std::vector<const json*>& t1) {
  Table t{"items_entropy", "Entropy of mentioned items (bits)", {"Generator", "Baseline"}, {}, {}};
  for (const auto& d : kDatasets) t.header.push_back(d);
  for (const auto& b : OrderedBaselines(t1)) {
    std::vector<std::string> human = {"Human", b}, sim;
    std::string gen;
    for (const auto& d : kDatasets) {
      const json* match = nullptr;
      for (const auto* r : t1) {
        if (r->value("baseline", "") == b && r->value("scope", "") == d) match = r;
      }
      if (match == nullptr) {
        human.push_back("");
        sim.push_back("");
        continue;
      }
      gen = Generator(*match);
      human.push_back(FormatCell(At(*match, {"human", "entropy"})));
      sim.push_back(FormatCell(At(*match, {"metrics", "entropy"})));
    }
    t.rows.push_back(human);
    sim.insert(sim.begin(), {gen, b});
    t.rows.push_back(sim);
  }
  return t;
}

std::vector<std::string> OrderedGroups(const std::vector<const json*>& t2) {
  static const std::vector<std::string> kOrder = {"frequent", "infrequent", "random"};
  std::set<std::string> present;
  for (const auto* r : t2) {
    for (const auto& [g, v] : At(*r, {"metrics"}).items()) present.insert(g);
  }
  std::vector<std::string> out;
  for (const auto& g : kOrder) {
    if (present.erase(g)) out.push_back(g);
  }
  out.insert(out.end(), present.begin(), present.end());
  return out;
}

Table CorrelationTable(const std::vector<const json*>& t2) {
  Table t{"preference_correlation",
          "Pearson correlation between average rating and positive rate",
          {"Generator", "Baseline"},
          {},
          {}};
  const auto groups = OrderedGroups(t2);
  for (const auto& g : groups) {
    t.header.push_back(g + " r");
    t.header.push_back(g + " p");
    t.header.push_back(g + " mean rate");
  }
  for (const auto* r : t2) {
    for (const char* side : {"human", "metrics"}) {
      std::vector<std::string> row = {std::string(side) == "human" ? "Human" : Generator(*r),
                                      r->value("baseline", "")};
      for (const auto& g : groups) {
        const json& block = At(*r, {side});
        const json& gb = block.contains(g) ? block[g] : json();
        row.push_back(FormatCell(At(gb, {"pearson", "r"})));
        row.push_back(FormatCell(At(gb, {"pearson", "p_value"})));
        row.push_back(FormatCell(At(gb, {"mean_positive_rate"})));
      }
      t.rows.push_back(row);
    }
  }
  t.notes.push_back("Human positive rate is the fraction of ratings at or above the like threshold.");
  return t;
}

Table AspectTable(const std::vector<const json*>& t3) {
  Table t{"aspects",
          "Aspects and sentiments of open-ended preferences",
          {"Generator", "Baseline", "Pairs", "Aspects", "Aspect entropy", "Sentiment entropy",
           "Positive", "Negative", "Neutral", "Extraction failures"},
          {},
          {}};
  for (const auto* r : t3) {
    for (const char* side : {"human", "metrics"}) {
      const json& b = At(*r, {side});
      t.rows.push_back({std::string(side) == "human" ? "Human" : Generator(*r),
                        r->value("baseline", ""), FormatCell(At(b, {"num_pairs"})),
                        FormatCell(At(b, {"num_aspects"})), FormatCell(At(b, {"aspect_entropy"})),
                        FormatCell(At(b, {"sentiment_entropy"})),
                        FormatCell(At(b, {"sentiment_counts", "positive"})),
                        FormatCell(At(b, {"sentiment_counts", "negative"})),
                        FormatCell(At(b, {"sentiment_counts", "neutral"})),
                        FormatCell(At(b, {"extraction_failures"}))});
    }
  }
  return t;
}

Table DiversityTable(const std::vector<const json*>& t4) {
  Table t{"request_diversity",
          "Diversity of recommendation requests",
          {"Generator", "Requests", "Type-token ratio", "Word diversity", "Sentence diversity",
           "Mean length"},
          {},
          {}};
  for (const auto* r : t4) {
    for (const char* side : {"human", "metrics"}) {
      const json& b = At(*r, {side});
      t.rows.push_back({std::string(side) == "human" ? "Human" : Generator(*r),
                        FormatCell(At(b, {"requests"})), FormatCell(At(b, {"type_token_ratio"})),
                        FormatCell(At(b, {"word_diversity"})),
                        FormatCell(At(b, {"sentence_diversity"})),
                        FormatCell(At(b, {"mean_length"}))});
    }
    t.notes.push_back("word embeddings: " + FormatCell(At(*r, {"metrics", "word_provider"})) +
                      "; sentence embeddings: " +
                      FormatCell(At(*r, {"metrics", "sentence_provider"})));
  }
  return t;
}

Table BinnedTable(const std::vector<const json*>& t4) {
  Table t{"entropy_binned_diversity",
          "Sentence diversity of requests per word-entropy bin",
          {"Generator", "Bin", "Lower", "Upper", "Requests", "Diversity"},
          {},
          {}};
  for (const auto* r : t4) {
    for (const char* side : {"human", "metrics"}) {
      const json& bins = At(*r, {side, "bins"});
      if (!bins.is_array()) continue;
      for (size_t i = 0; i < bins.size(); ++i) {
        t.rows.push_back({std::string(side) == "human" ? "Human" : Generator(*r),
                          std::to_string(i), FormatCell(bins[i]["lower"]),
                          FormatCell(bins[i]["upper"]), FormatCell(bins[i]["requests"]),
                          FormatCell(bins[i]["diversity"])});
      }
    }
  }
  return t;
}

Table CoherenceTable(const std::vector<const json*>& t5) {
  Table t{"feedback_coherence",
          "Coherence of feedback on positive and negative recommendations",
          {"Generator", "Variant", "Positive accept", "Positive reject", "Negative reject",
           "Negative accept", "Accept/reject coherent", "Compare coherent", "Neither rate",
           "Invalid"},
          {},
          {}};
  for (const auto* r : t5) {
    for (const char* side : {"human", "metrics"}) {
      const json& b = At(*r, {side});
      for (const char* variant : {"items_only", "with_explanations"}) {
        if (!b.contains(variant)) continue;
        const json& v = b[variant];
        t.rows.push_back({std::string(side) == "human" ? "Human" : Generator(*r), variant,
                          FormatCell(At(v, {"accept_reject", "positive", "coherent"})),
                          FormatCell(At(v, {"accept_reject", "positive", "likely_incoherent"})),
                          FormatCell(At(v, {"accept_reject", "negative", "coherent"})),
                          FormatCell(At(v, {"accept_reject", "negative", "incoherent"})),
                          FormatCell(At(v, {"accept_reject", "coherent"})),
                          FormatCell(At(v, {"compare", "coherent"})),
                          FormatCell(At(v, {"compare", "neither_rate"})),
                          FormatCell(At(v, {"invalid"}))});
      }
    }
  }
  t.notes.push_back(
      "Human rows are the reference labels: accept positive, reject negative, prefer positive.");
  return t;
}

Table SummaryTable(const std::vector<json>& reports) {
  Table t{"run_summary",
          "Case accounting per report",
          {"Report", "Source cases", "Skipped", "Cases", "Failures", "Invalid"},
          {},
          {}};
  std::set<std::string> tasks;
  for (const auto& r : reports) {
    tasks.insert(r.value("task", ""));
    const json& c = At(r, {"counts"});
    t.rows.push_back({r.value("task", "") + "_" + r.value("baseline", "") + "_" +
                          r.value("scope", ""),
                      FormatCell(c["source_cases"]), FormatCell(c["skipped"]),
                      FormatCell(c["cases"]), FormatCell(c["failures"]),
                      FormatCell(c["invalid"])});
  }
  for (const char* task : {"t1", "t2", "t3", "t4", "t5"}) {
    if (!tasks.count(task)) t.notes.push_back(std::string(task) + ": no report in this run");
  }
  return t;
}

}  // namespace

std::vector<Table> BuildTables(const std::vector<json>& reports) {
  std::vector<Table> out;
  if (auto t1 = OfTask(reports, "t1"); !t1.empty()) out.push_back(ItemsEntropyTable(t1));
  if (auto t2 = OfTask(reports, "t2"); !t2.empty()) out.push_back(CorrelationTable(t2));
  if (auto t3 = OfTask(reports, "t3"); !t3.empty()) out.push_back(AspectTable(t3));
  if (auto t4 = OfTask(reports, "t4"); !t4.empty()) {
    out.push_back(DiversityTable(t4));
    out.push_back(BinnedTable(t4));
  }
  if (auto t5 = OfTask(reports, "t5"); !t5.empty()) out.push_back(CoherenceTable(t5));
  out.push_back(SummaryTable(reports));
  return out;
}

// ---------------------------------------------------------------------------
// Charts

namespace {

constexpr double kW = 640, kH = 400, kLeft = 60, kRight = 20, kTop = 40, kBottom = 60;
const char* const kColors[] = {"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3"};

std::string SvgEscape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string Num(double v) { return fmt::format("{:.2f}", v); }

std::string SvgOpen(const std::string& title) {
  return fmt::format(
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
             "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"11\">\n"
             "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n",
             kW, kH) +
         fmt::format("<text x=\"{}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     Num(kW / 2), SvgEscape(title));
}

std::string NoData(const std::string& title) {
  return SvgOpen(title) +
         fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"#888\">no data</text>\n",
                     Num(kW / 2), Num(kH / 2)) +
         "</svg>\n";
}

std::string Axes(double y_max, const std::string& y_label) {
  std::string s;
  const double x0 = kLeft, y0 = kH - kBottom, x1 = kW - kRight, y1 = kTop;
  s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n",
                   Num(x0), Num(y0), Num(x1));
  s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n",
                   Num(x0), Num(y0), Num(y1));
  for (int i = 0; i <= 4; ++i) {
    const double v = y_max * i / 4.0;
    const double y = y0 - (y0 - y1) * i / 4.0;
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>\n", Num(x0 - 4),
                     Num(y + 4), fmt::format("{:.2f}", v));
  }
  s += fmt::format(
      "<text x=\"14\" y=\"{0}\" transform=\"rotate(-90 14 {0})\" text-anchor=\"middle\">{1}</text>\n",
      Num((y0 + y1) / 2), SvgEscape(y_label));
  return s;
}

struct Series {
  std::string name;
  std::vector<std::optional<double>> values;
};

std::string Legend(const std::vector<std::string>& names) {
  std::string s;
  for (size_t i = 0; i < names.size(); ++i) {
    const double x = kLeft + 10 + 130.0 * static_cast<double>(i);
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n", Num(x),
                     Num(kH - 22), kColors[i % 5]);
    s += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", Num(x + 14), Num(kH - 13),
                     SvgEscape(names[i]));
  }
  return s;
}

std::string BarChart(const std::string& title, const std::string& y_label,
                     const std::vector<std::string>& categories, const std::vector<Series>& series,
                     bool label_categories) {
  double y_max = 0;
  for (const auto& s : series) {
    for (const auto& v : s.values) {
      if (v) y_max = std::max(y_max, *v);
    }
  }
  if (categories.empty() || y_max <= 0) return NoData(title);
  std::string svg = SvgOpen(title) + Axes(y_max, y_label);
  const double plot_w = kW - kLeft - kRight, plot_h = kH - kTop - kBottom;
  const double group_w = plot_w / static_cast<double>(categories.size());
  const double bar_w = group_w * 0.8 / static_cast<double>(series.size());
  for (size_t c = 0; c < categories.size(); ++c) {
    const double gx = kLeft + group_w * static_cast<double>(c) + group_w * 0.1;
    for (size_t s = 0; s < series.size(); ++s) {
      const auto& v = series[s].values[c];
      if (!v) continue;
      const double h = plot_h * (*v / y_max);
      svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"/>\n",
                         Num(gx + bar_w * static_cast<double>(s)), Num(kH - kBottom - h),
                         Num(bar_w), Num(h), kColors[s % 5]);
    }
    if (label_categories) {
      svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                         Num(gx + group_w * 0.4), Num(kH - kBottom + 14),
                         SvgEscape(categories[c]));
    }
  }
  std::vector<std::string> names;
  for (const auto& s : series) names.push_back(s.name);
  return svg + Legend(names) + "</svg>\n";
}

struct Point {
  double x, y;
};

std::string ScatterChart(const std::string& title, const std::string& x_label,
                         const std::string& y_label, double x_min, double x_max,
                         const std::vector<std::pair<std::string, std::vector<Point>>>& series) {
  bool any = false;
  for (const auto& [n, pts] : series) any |= !pts.empty();
  if (!any) return NoData(title);
  std::string svg = SvgOpen(title) + Axes(1.0, y_label);
  const double plot_w = kW - kLeft - kRight, plot_h = kH - kTop - kBottom;
  for (double x = x_min; x <= x_max + 1e-9; x += 1.0) {
    const double px = kLeft + plot_w * (x - x_min) / (x_max - x_min);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", Num(px),
                       Num(kH - kBottom + 14), fmt::format("{:.0f}", x));
  }
  svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                     Num(kLeft + plot_w / 2), Num(kH - kBottom + 30), SvgEscape(x_label));
  std::vector<std::string> names;
  for (size_t s = 0; s < series.size(); ++s) {
    names.push_back(series[s].first);
    for (const auto& p : series[s].second) {
      const double px = kLeft + plot_w * (p.x - x_min) / (x_max - x_min);
      const double py = kH - kBottom - plot_h * p.y;
      svg += fmt::format("<circle cx=\"{}\" cy=\"{}\" r=\"3\" fill=\"{}\" fill-opacity=\"0.7\"/>\n",
                         Num(px), Num(py), kColors[s % 5]);
    }
  }
  return svg + Legend(names) + "</svg>\n";
}

std::optional<double> Opt(const json& v) {
  if (IsDefined(v)) return v.get<double>();
  return std::nullopt;
}

std::string CsvNum(const std::optional<double>& v) { return v ? Real(*v) : kUndefined; }

Chart ItemsChart(const json& r) {
  const std::string name =
      "t1_items_" + r.value("baseline", "") + "_" + r.value("scope", "");
  const json& h = At(r, {"series", "human", "sorted_counts"});
  const json& s = At(r, {"series", "simulator", "sorted_counts"});
  const size_t n = std::max(h.size(), s.size());
  std::string csv = "rank,human,simulator\n";
  for (size_t i = 0; i < n; ++i) {
    csv += fmt::format("{},{},{}\n", i + 1, i < h.size() ? h[i].dump() : "0",
                       i < s.size() ? s[i].dump() : "0");
  }
  const size_t shown = std::min<size_t>(n, 50);
  std::vector<std::string> cats;
  Series hs{"Human", {}}, ss{Generator(r), {}};
  for (size_t i = 0; i < shown; ++i) {
    cats.push_back(std::to_string(i + 1));
    hs.values.push_back(i < h.size() ? std::optional<double>(h[i].get<double>()) : 0.0);
    ss.values.push_back(i < s.size() ? std::optional<double>(s[i].get<double>()) : 0.0);
  }
  return {name,
          BarChart("Mentioned items by frequency rank (" + r.value("scope", "") + ", " +
                       r.value("baseline", "") + ")",
                   "mentions", cats, {hs, ss}, false),
          csv};
}

Chart RatingChart(const json& r) {
  const std::string name = "t2_rating_" + r.value("baseline", "");
  std::string csv = "group,movie,avg_rating,positive_rate,liked_fraction\n";
  std::vector<std::pair<std::string, std::vector<Point>>> series;
  for (const auto& [group, points] : At(r, {"series"}).items()) {
    std::vector<Point> pts;
    for (const auto& p : points) {
      const auto rate = Opt(p["positive_rate"]);
      csv += fmt::format("{},{},{},{},{}\n", CsvEscape(group),
                         CsvEscape(p["movie"].get<std::string>()),
                         Real(p["avg_rating"].get<double>()), CsvNum(rate),
                         Real(p["liked_fraction"].get<double>()));
      if (rate) pts.push_back({p["avg_rating"].get<double>(), *rate});
    }
    series.emplace_back(group, std::move(pts));
  }
  return {name,
          ScatterChart("Positive rate against average rating (" + r.value("baseline", "") + ")",
                       "average rating", "positive rate", 0.0, 5.0, series),
          csv};
}

Chart SentimentChart(const json& r) {
  const std::string name = "t3_sentiment_" + r.value("baseline", "");
  std::string csv = "sentiment,human,simulator\n";
  std::vector<std::string> cats = {"positive", "negative", "neutral"};
  Series hs{"Human", {}}, ss{Generator(r), {}};
  for (const auto& c : cats) {
    const json& h = At(r, {"human", "sentiment_counts"});
    const json& s = At(r, {"metrics", "sentiment_counts"});
    const int64_t hv = h.contains(c) ? h[c].get<int64_t>() : 0;
    const int64_t sv = s.contains(c) ? s[c].get<int64_t>() : 0;
    csv += fmt::format("{},{},{}\n", c, hv, sv);
    hs.values.push_back(static_cast<double>(hv));
    ss.values.push_back(static_cast<double>(sv));
  }
  return {name,
          BarChart("Sentiment of aspects (" + r.value("baseline", "") + ")", "pairs", cats,
                   {hs, ss}, true),
          csv};
}

Chart BinsChart(const json& r) {
  const json& h = At(r, {"human", "bins"});
  const json& s = At(r, {"metrics", "bins"});
  const size_t n = std::max(h.is_array() ? h.size() : 0, s.is_array() ? s.size() : 0);
  std::string csv =
      "bin,human_lower,human_upper,human_requests,human_diversity,"
      "simulator_lower,simulator_upper,simulator_requests,simulator_diversity\n";
  std::vector<std::string> cats;
  Series hs{"Human", {}}, ss{Generator(r), {}};
  auto cells = [](const json& bins, size_t i) -> std::string {
    if (!bins.is_array() || i >= bins.size()) return ",,,";
    const json& b = bins[i];
    return Real(b["lower"].get<double>()) + "," + Real(b["upper"].get<double>()) + "," +
           b["requests"].dump() + "," + CsvNum(Opt(b["diversity"]));
  };
  for (size_t i = 0; i < n; ++i) {
    csv += fmt::format("{},{},{}\n", i, cells(h, i), cells(s, i));
    cats.push_back(std::to_string(i));
    hs.values.push_back(h.is_array() && i < h.size() ? Opt(h[i]["diversity"]) : std::nullopt);
    ss.values.push_back(s.is_array() && i < s.size() ? Opt(s[i]["diversity"]) : std::nullopt);
  }
  return {"t4_binned_diversity",
          BarChart("Request diversity per entropy bin", "cosine diversity", cats, {hs, ss}, true),
          csv};
}

Chart CoherenceChart(const json& r) {
  static const std::vector<std::pair<std::string, std::vector<const char*>>> kCells = {
      {"pos accept", {"accept_reject", "positive", "coherent"}},
      {"pos reject", {"accept_reject", "positive", "likely_incoherent"}},
      {"neg reject", {"accept_reject", "negative", "coherent"}},
      {"neg accept", {"accept_reject", "negative", "incoherent"}},
      {"compare", {"compare", "coherent"}},
      {"neither", {"compare", "neither_rate"}}};
  std::string csv = "variant,cell,value\n";
  std::vector<std::string> cats;
  std::vector<Series> series;
  for (const auto& [cell, path] : kCells) cats.push_back(cell);
  const json& m = At(r, {"metrics"});
  for (const char* variant : {"items_only", "with_explanations"}) {
    if (!m.contains(variant)) continue;
    Series s{variant, {}};
    for (const auto& [cell, path] : kCells) {
      const json* cur = &m[variant];
      for (const char* p : path) cur = cur->contains(p) ? &(*cur)[p] : nullptr;
      const auto v = cur ? Opt(*cur) : std::nullopt;
      csv += fmt::format("{},{},{}\n", variant, CsvEscape(cell), CsvNum(v));
      s.values.push_back(v);
    }
    series.push_back(std::move(s));
  }
  if (series.empty()) return {"t5_coherence", NoData("Feedback coherence"), csv};
  return {"t5_coherence", BarChart("Feedback coherence", "fraction", cats, series, true), csv};
}

}  // namespace

std::vector<Chart> BuildCharts(const std::vector<json>& reports) {
  std::vector<Chart> out;
  for (const auto& r : reports) {
    const std::string task = r.value("task", "");
    if (task == "t1") out.push_back(ItemsChart(r));
    if (task == "t2") out.push_back(RatingChart(r));
    if (task == "t3") out.push_back(SentimentChart(r));
    if (task == "t4") out.push_back(BinsChart(r));
    if (task == "t5") out.push_back(CoherenceChart(r));
  }
  return out;
}

std::vector<std::string> RenderReports(const std::vector<json>& reports,
                                       const std::filesystem::path& run_dir) {
  std::vector<std::string> written;
  for (const auto& t : BuildTables(reports)) {
    WriteFile(run_dir / "tables" / (t.name + ".csv"), t.ToCsv());
    WriteFile(run_dir / "tables" / (t.name + ".txt"), t.ToText());
    written.push_back("tables/" + t.name + ".csv");
    written.push_back("tables/" + t.name + ".txt");
  }
  for (const auto& c : BuildCharts(reports)) {
    WriteFile(run_dir / "charts" / (c.name + ".svg"), c.svg);
    WriteFile(run_dir / "charts" / (c.name + ".csv"), c.csv);
    written.push_back("charts/" + c.name + ".svg");
    written.push_back("charts/" + c.name + ".csv");
  }
  return written;
}

std::vector<json> LoadReports(const std::filesystem::path& run_dir) {
  const auto dir = run_dir / "reports";
  std::vector<std::filesystem::path> files;
  if (std::filesystem::is_directory(dir)) {
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
      if (e.path().extension() == ".json") files.push_back(e.path());
    }
  }
  if (files.empty()) throw DataError("no reports in " + run_dir.string());
  std::sort(files.begin(), files.end());
  std::vector<json> out;
  for (const auto& f : files) {
    try {
      out.push_back(json::parse(ReadFile(f)));
    } catch (const json::exception& e) {
      throw DataError(f.string() + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run directory

namespace {

std::string JsonLines(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) out += r.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
  return out;
}

std::vector<std::string> ListFiles(const std::filesystem::path& run_dir) {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(run_dir)) {
    if (!e.is_regular_file()) continue;
    const std::string rel = std::filesystem::relative(e.path(), run_dir).generic_string();
    if (rel != "manifest.json") out.push_back(rel);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

void WriteRunDirectory(const std::filesystem::path& run_dir, const std::vector<TaskRun>& runs,
                       json manifest) {
  std::filesystem::create_directories(run_dir);
  std::vector<json> reports;
  json names = json::array();
  for (const auto& run : runs) {
    const std::string name = run.report.Name();
    names.push_back(name);
    std::vector<json> cases, replies;
    for (const auto& p : run.prompts) cases.push_back(p.ToJson());
    for (const auto& r : run.replies) replies.push_back(r.ToJson());
    WriteFile(run_dir / "cases" / (name + ".jsonl"), JsonLines(cases));
    WriteFile(run_dir / "replies" / (name + ".jsonl"), JsonLines(replies));
    const json report = run.report.ToJson();
    WriteFile(run_dir / "reports" / (name + ".json"), report.dump(2, ' ', false, json::error_handler_t::replace) + "\n");
    reports.push_back(report);
  }
  RenderReports(reports, run_dir);
  json files = json::object();
  for (const auto& rel : ListFiles(run_dir)) files[rel] = Sha256File(run_dir / rel);
  manifest["reports"] = names;
  manifest["files"] = files;
  WriteFile(run_dir / "manifest.json", manifest.dump(2) + "\n");
}

VerifyResult VerifyRunDirectory(const std::filesystem::path& run_dir) {
  VerifyResult result;
  auto fail = [&](std::string msg) {
    result.ok = false;
    result.problems.push_back(std::move(msg));
  };
  const auto manifest_path = run_dir / "manifest.json";
  if (!std::filesystem::exists(manifest_path)) {
    fail("manifest.json missing");
    return result;
  }
  json manifest;
  try {
    manifest = json::parse(ReadFile(manifest_path));
  } catch (const json::exception& e) {
    fail(std::string("manifest.json unreadable: ") + e.what());
    return result;
  }
  const json& files = At(manifest, {"files"});
  if (!files.is_object()) {
    fail("manifest has no file hashes");
    return result;
  }
  for (const auto& [rel, hash] : files.items()) {
    const auto p = run_dir / rel;
    if (!std::filesystem::exists(p)) {
      fail("missing: " + rel);
    } else if (Sha256File(p) != hash.get<std::string>()) {
      fail("hash mismatch: " + rel);
    }
  }
  for (const auto& rel : ListFiles(run_dir)) {
    if (!files.contains(rel)) fail("not in manifest: " + rel);
  }
  return result;
}

}  // namespace usersim
