#include "reasonmine/serialize.hpp"

#include <sstream>

namespace reasonmine {

namespace {

template <class E, class Parse>
E parse_enum(const json &j, Parse parse, const char *what) {
  const auto s = j.get<std::string>();
  if (auto v = parse(s)) return *v;
  throw std::invalid_argument(std::string("unknown ") + what + ": " + s);
}

}  // namespace

void to_json(json &j, const Choice &c) { j = json{{"letter", c.letter}, {"text", c.text}}; }

void from_json(const json &j, Choice &c) {
  j.at("letter").get_to(c.letter);
  j.at("text").get_to(c.text);
}

void to_json(json &j, const QAInstance &q) {
  j = json{{"id", q.id},
           {"question", q.question},
           {"answer", q.answer},
           {"dataset", to_string(q.dataset)}};
  if (q.choices) j["choices"] = *q.choices;
}

void from_json(const json &j, QAInstance &q) {
  j.at("id").get_to(q.id);
  j.at("question").get_to(q.question);
  j.at("answer").get_to(q.answer);
  q.dataset = parse_enum<Dataset>(j.at("dataset"), parse_dataset, "dataset");
  if (auto it = j.find("choices"); it != j.end() && !it->is_null())
    q.choices = it->get<std::vector<Choice>>();
  else
    q.choices.reset();
}

void to_json(json &j, const SamplingConfig &c) {
  j = json{{"branch_k", c.branch_k},
           {"samples_per_branch", c.samples_per_branch},
           {"top_p", c.top_p},
           {"top_k", c.top_k},
           {"temperature", c.temperature},
           {"max_new_tokens", c.max_new_tokens},
           {"seed", c.seed ? json(*c.seed) : json(nullptr)}};
}

void from_json(const json &j, SamplingConfig &c) {
  j.at("branch_k").get_to(c.branch_k);
  j.at("samples_per_branch").get_to(c.samples_per_branch);
  j.at("top_p").get_to(c.top_p);
  j.at("top_k").get_to(c.top_k);
  j.at("temperature").get_to(c.temperature);
  j.at("max_new_tokens").get_to(c.max_new_tokens);
  if (auto it = j.find("seed"); it != j.end() && !it->is_null())
    c.seed = it->get<std::int64_t>();
  else
    c.seed.reset();
}

void to_json(json &j, const Candidate &c) {
  j = json{{"question_id", c.question_id},
           {"branch_index", c.branch_index},
           {"sample_index", c.sample_index},
           {"branch_token", c.branch_token},
           {"text", c.text},
           {"tokens", c.tokens},
           {"token_logprobs", c.token_logprobs},
           {"finish_reason", to_string(c.finish_reason)}};
}

void from_json(const json &j, Candidate &c) {
  j.at("question_id").get_to(c.question_id);
  j.at("branch_index").get_to(c.branch_index);
  j.at("sample_index").get_to(c.sample_index);
  j.at("branch_token").get_to(c.branch_token);
  j.at("text").get_to(c.text);
  j.at("tokens").get_to(c.tokens);
  j.at("token_logprobs").get_to(c.token_logprobs);
  c.finish_reason = parse_enum<FinishReason>(j.at("finish_reason"), parse_finish_reason,
                                             "finish_reason");
}

void to_json(json &j, const FilterOutcome &o) {
  j = json{{"question_id", o.question_id},
           {"branch_index", o.branch_index},
           {"sample_index", o.sample_index},
           {"token_count", o.token_count},
           {"pattern_pass", o.pattern_pass},
           {"length_pass", o.length_pass},
           {"rep2", o.rep2},
           {"rep2_pass", o.rep2_pass},
           {"perplexity", o.perplexity},
           {"ppl_pass", o.ppl_pass},
           {"selected", o.selected}};
}

void from_json(const json &j, FilterOutcome &o) {
  j.at("question_id").get_to(o.question_id);
  j.at("branch_index").get_to(o.branch_index);
  j.at("sample_index").get_to(o.sample_index);
  j.at("token_count").get_to(o.token_count);
  j.at("pattern_pass").get_to(o.pattern_pass);
  j.at("length_pass").get_to(o.length_pass);
  j.at("rep2").get_to(o.rep2);
  j.at("rep2_pass").get_to(o.rep2_pass);
  j.at("perplexity").get_to(o.perplexity);
  j.at("ppl_pass").get_to(o.ppl_pass);
  j.at("selected").get_to(o.selected);
}

void to_json(json &j, const TrainingRecord &r) {
  j = json{{"kind", to_string(r.kind)},
           {"question_id", r.question_id},
           {"text", r.text},
           {"reasoning", r.reasoning},
           {"answer", r.answer}};
}

void from_json(const json &j, TrainingRecord &r) {
  r.kind = parse_enum<RecordKind>(j.at("kind"), parse_record_kind, "record kind");
  j.at("question_id").get_to(r.question_id);
  j.at("text").get_to(r.text);
  j.at("reasoning").get_to(r.reasoning);
  j.at("answer").get_to(r.answer);
}

void to_json(json &j, const JudgeScores &s) {
  j = json{{"coherence", s.coherence},
           {"relevance", s.relevance},
           {"logical_consistency", s.logical_consistency},
           {"completeness", s.completeness},
           {"average", s.average}};
}

void from_json(const json &j, JudgeScores &s) {
  j.at("coherence").get_to(s.coherence);
  j.at("relevance").get_to(s.relevance);
  j.at("logical_consistency").get_to(s.logical_consistency);
  j.at("completeness").get_to(s.completeness);
  j.at("average").get_to(s.average);
}

void to_json(json &j, const Histogram &h) {
  j = json{{"bin_edges", Histogram::bin_edges},
           {"values", h.values},
           {"mode", to_string(h.mode)}};
}

void from_json(const json &j, Histogram &h) {
  j.at("values").get_to(h.values);
  h.mode = parse_enum<HistogramMode>(j.at("mode"), parse_histogram_mode, "histogram mode");
}

std::vector<json> read_jsonl(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw JsonlError("cannot open " + path.string());
  std::vector<json> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      rows.push_back(json::parse(line));
    } catch (const json::parse_error &e) {
      throw JsonlError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return rows;
}

void write_jsonl(const std::filesystem::path &path, const std::vector<json> &rows) {
  std::string out;
  for (const auto &row : rows) {
    out += row.dump(-1, ' ', false, json::error_handler_t::replace);
    out += '\n';
  }
  write_file(path, out);
}

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path &path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // Write to a sibling temp file and rename so readers never see partial artifacts.
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace reasonmine
