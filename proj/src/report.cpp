#include "reasonmine/report.hpp"

#include <cstdio>
#include <set>
#include <tuple>

namespace reasonmine::report {

namespace {

std::string num(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string opt_num(const std::optional<double> &v, int precision = 2) {
  return v ? num(*v, precision) : "-";
}

std::string slug(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '+') continue;
    out += (c == ' ' || c == '/') ? '_' : c;
  }
  return out;
}

constexpr std::array<std::string_view, 5> kBinLabels{"0-2", "2-4", "4-6", "6-8", "8-10"};

struct HistRow {
  std::string source;
  std::string stage;
  std::vector<eval::ScoredOutput> scores;
};

}  // namespace

bool survives(const FilterOutcome &o, std::size_t stage) {
  if (stage >= 1 && !o.pattern_pass) return false;
  if (stage >= 2 && !o.length_pass) return false;
  if (stage >= 3 && !o.rep2_pass) return false;
  if (stage >= 4 && !o.ppl_pass) return false;
  return true;
}

const std::vector<ReferenceRow> &reference_rows() {
  using D = Dataset;
  static const std::vector<ReferenceRow> rows{
      {"GPT-3.5 (teacher)", "zero-shot CoT", D::StrategyQA, 53.45, {}, 76.77, 0.36},
      {"GPT-2", "finetune", D::StrategyQA, 54.00, {}, {}, {}},
      {"GPT-2", "self-train", D::StrategyQA, 54.00, 0.91, 145.33, 0.53},
      {"GPT-2", "self-train + distill", D::StrategyQA, 54.65, 0.99, 116.62, 0.50},
      {"GPT-2", "distill", D::StrategyQA, 52.69, 0.92, 116.23, 0.52},
      {"GPT-2-medium", "finetune", D::StrategyQA, 50.22, {}, {}, {}},
      {"GPT-2-medium", "self-train", D::StrategyQA, 55.17, 0.89, 149.11, 0.49},
      {"GPT-2-medium", "self-train + distill", D::StrategyQA, 56.34, 1.00, 103.42, 0.49},
      {"GPT-2-medium", "distill", D::StrategyQA, 52.69, 0.85, 181.06, 0.56},
      {"GPT-2-large", "finetune", D::StrategyQA, 53.57, {}, {}, {}},
      {"GPT-2-large", "self-train", D::StrategyQA, 55.75, 0.94, 63.06, 0.33},
      {"GPT-2-large", "self-train + distill", D::StrategyQA, 57.21, 0.97, 80.28, 0.47},
      {"GPT-2-large", "distill", D::StrategyQA, 50.22, 0.79, 90.48, 0.51},
      {"GPT-3.5 (teacher)", "zero-shot CoT", D::CommonsenseQA, 60.07, {}, 63.82, 0.31},
      {"GPT-2", "finetune", D::CommonsenseQA, 20.80, {}, {}, {}},
      {"GPT-2", "self-train", D::CommonsenseQA, 20.72, 0.96, 120.80, 0.50},
      {"GPT-2", "self-train + distill", D::CommonsenseQA, 21.95, 0.97, 114.30, 0.49},
      {"GPT-2", "distill", D::CommonsenseQA, 21.87, 0.91, 167.11, 0.61},
      {"GPT-2-medium", "finetune", D::CommonsenseQA, 19.82, {}, {}, {}},
      {"GPT-2-medium", "self-train", D::CommonsenseQA, 23.10, 0.82, 160.26, 0.56},
      {"GPT-2-medium", "self-train + distill", D::CommonsenseQA, 25.72, 0.90, 116.34, 0.52},
      {"GPT-2-medium", "distill", D::CommonsenseQA, 21.54, 0.66, 257.40, 0.67},
      {"GPT-2-large", "finetune", D::CommonsenseQA, 20.88, {}, {}, {}},
      {"GPT-2-large", "self-train", D::CommonsenseQA, 22.63, 0.99, 77.53, 0.46},
      {"GPT-2-large", "self-train + distill", D::CommonsenseQA, 26.03, 1.00, 94.18, 0.47},
      {"GPT-2-large", "distill", D::CommonsenseQA, 22.93, 0.93, 96.15, 0.51},
  };
  return rows;
}

std::string render_svg(const Histogram &h, std::string_view title) {
  constexpr int width = 420, height = 260, left = 50, base = 210, plot_h = 170, bar_w = 56, gap = 14;
  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
       "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " +
       std::to_string(height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + std::to_string(width / 2) +
       "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">";
  for (char c : title) {
    if (c == '<') s += "&lt;";
    else if (c == '>') s += "&gt;";
    else if (c == '&') s += "&amp;";
    else s += c;
  }
  s += "</text>\n";
  s += "<line x1=\"" + std::to_string(left - 4) + "\" y1=\"" + std::to_string(base) + "\" x2=\"" +
       std::to_string(width - 10) + "\" y2=\"" + std::to_string(base) +
       "\" stroke=\"black\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const int y = base - plot_h * tick / 4;
    s += "<text x=\"" + std::to_string(left - 8) + "\" y=\"" + std::to_string(y + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" +
         num(tick * 0.25, 2) + "</text>\n";
  }
  for (std::size_t b = 0; b < 5; ++b) {
    const int x = left + static_cast<int>(b) * (bar_w + gap) + gap / 2;
    const double v = h.values[b];
    const int bh = static_cast<int>(v * plot_h + 0.5);
    s += "<rect x=\"" + std::to_string(x) + "\" y=\"" + std::to_string(base - bh) +
         "\" width=\"" + std::to_string(bar_w) + "\" height=\"" + std::to_string(bh) +
         "\" fill=\"#4c72b0\"/>\n";
    s += "<text x=\"" + std::to_string(x + bar_w / 2) + "\" y=\"" + std::to_string(base - bh - 4) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" + num(v, 2) +
         "</text>\n";
    s += "<text x=\"" + std::to_string(x + bar_w / 2) + "\" y=\"" + std::to_string(base + 16) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
         std::string(kBinLabels[b]) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::map<std::string, std::string> build(const Inputs &in) {
  std::map<std::string, std::string> files;
  std::string md = "# Run report\n\nDataset: " + std::string(to_string(in.dataset)) + "\n\n";

  // Task metrics.
  md += "## Task metrics\n\n";
  if (in.eval && !in.eval->empty()) {
    const auto s = eval::aggregate(*in.eval);
    files["metrics.csv"] = "Acc,Fmt,Len,Rep\n" + num(s.acc) + "," + num(s.fmt) + "," + num(s.len) +
                           "," + num(s.rep) + "\n";
    md += "Evaluated items: " + std::to_string(s.n) + ". Acc is a percentage.\n\n";
    std::string table = "| Run | Acc | Fmt | Len | Rep |\n|---|---|---|---|---|\n";
    table += "| this run | " + num(100.0 * s.acc, 2) + " | " + num(s.fmt, 2) + " | " +
             num(s.len, 2) + " | " + num(s.rep, 2) + " |\n";
    for (const auto &r : reference_rows()) {
      if (r.dataset != in.dataset) continue;
      table += "| reference: " + std::string(r.model) + " " + std::string(r.method) + " | " +
               num(r.acc, 2) + " | " + opt_num(r.fmt) + " | " + opt_num(r.len) + " | " +
               opt_num(r.rep) + " |\n";
    }
    files["metrics.md"] = table;
    md += table + "\n";
  } else {
    md += "Evaluate stage not run; task metrics omitted.\n\n";
  }

  // Filter attrition.
  if (in.outcomes) {
    std::string csv = "stage,candidates,questions_with_survivor\n";
    md += "## Filter ablation\n\n| Stage | Candidates | Questions with survivor |\n|---|---|---|\n";
    for (std::size_t st = 0; st < kAblationStages.size(); ++st) {
      std::size_t count = 0;
      std::set<std::string> questions;
      for (const auto &o : *in.outcomes) {
        if (!survives(o, st)) continue;
        ++count;
        questions.insert(o.question_id);
      }
      csv += std::string(kAblationStages[st]) + "," + std::to_string(count) + "," +
             std::to_string(questions.size()) + "\n";
      md += "| " + std::string(kAblationStages[st]) + " | " + std::to_string(count) + " | " +
            std::to_string(questions.size()) + " |\n";
    }
    files["ablation.csv"] = csv;
    md += "\n";
  }

  // Judge scores.
  md += "## Judge scores\n\n";
  if (!in.judge || in.judge->empty()) {
    md += "Judge stage not run; judge section omitted.\n";
    files["report.md"] = md;
    return files;
  }

  std::string judge_csv =
      "target,scored,unscored,coherence,relevance,logical_consistency,completeness,average\n";
  md += "| Target | Scored | Unscored | Coherence | Relevance | Logical consistency | Completeness | "
        "Average |\n|---|---|---|---|---|---|---|---|\n";
  for (const std::string target : {"eval", "candidate"}) {
    std::size_t scored = 0, unscored = 0;
    std::array<double, 5> sums{};
    for (const auto &row : *in.judge) {
      if (row.target != target) continue;
      if (!row.scores) {
        ++unscored;
        continue;
      }
      ++scored;
      sums[0] += row.scores->coherence;
      sums[1] += row.scores->relevance;
      sums[2] += row.scores->logical_consistency;
      sums[3] += row.scores->completeness;
      sums[4] += row.scores->average;
    }
    if (scored + unscored == 0) continue;
    std::string line = target + "," + std::to_string(scored) + "," + std::to_string(unscored);
    std::string md_line = "| " + target + " | " + std::to_string(scored) + " | " +
                          std::to_string(unscored);
    for (double sum : sums) {
      const double mean = scored ? sum / static_cast<double>(scored) : 0.0;
      line += "," + num(mean);
      md_line += " | " + num(mean, 2);
    }
    judge_csv += line + "\n";
    md += md_line + " |\n";
  }
  files["judge.csv"] = judge_csv;
  md += "\n";

  std::vector<HistRow> hist_rows;
  {
    HistRow eval_row{"eval", "-", {}};
    for (const auto &row : *in.judge)
      if (row.target == "eval" && row.scores)
        eval_row.scores.push_back({row.question_id, row.scores->average});
    if (!eval_row.scores.empty()) hist_rows.push_back(std::move(eval_row));
  }
  if (in.outcomes) {
    std::map<std::tuple<std::string, int, int>, double> cand_scores;
    for (const auto &row : *in.judge)
      if (row.target == "candidate" && row.scores)
        cand_scores[{row.question_id, row.branch_index, row.sample_index}] = row.scores->average;
    if (!cand_scores.empty()) {
      for (std::size_t st = 0; st < kAblationStages.size(); ++st) {
        HistRow r{"candidates", std::string(kAblationStages[st]), {}};
        for (const auto &o : *in.outcomes) {
          if (!survives(o, st)) continue;
          auto it = cand_scores.find({o.question_id, o.branch_index, o.sample_index});
          if (it != cand_scores.end()) r.scores.push_back({o.question_id, it->second});
        }
        hist_rows.push_back(std::move(r));
      }
    }
  }

  std::string hist_csv = "source,stage,mode,n_outputs,n_questions,bin_0_2,bin_2_4,bin_4_6,bin_6_8,bin_8_10\n";
  md += "## Score histograms\n\nAverage judge score per output, binned in 2-point intervals.\n\n";
  md += "| Source | Stage | Mode | 0-2 | 2-4 | 4-6 | 6-8 | 8-10 |\n|---|---|---|---|---|---|---|---|\n";
  for (const auto &r : hist_rows) {
    std::set<std::string> questions;
    for (const auto &s : r.scores) questions.insert(s.question_id);
    for (auto mode : {HistogramMode::PerOutput, HistogramMode::PerQuestionAny}) {
      const auto h = eval::histogram(r.scores, mode);
      std::string line = r.source + "," + r.stage + "," + std::string(to_string(mode)) + "," +
                         std::to_string(r.scores.size()) + "," + std::to_string(questions.size());
      std::string md_line = "| " + r.source + " | " + r.stage + " | " + std::string(to_string(mode));
      for (double v : h.values) {
        line += "," + num(v);
        md_line += " | " + num(v, 2);
      }
      hist_csv += line + "\n";
      md += md_line + " |\n";
      const std::string title = r.source + " " + r.stage + " (" + std::string(to_string(mode)) + ")";
      const std::string stage_slug = r.stage == "-" ? "" : "_" + slug(r.stage);
      files["hist_" + r.source + stage_slug + "_" + std::string(to_string(mode)) + ".svg"] =
          render_svg(h, title);
    }
  }
  files["histograms.csv"] = hist_csv;
  files["report.md"] = md;
  return files;
}

}  // namespace reasonmine::report
