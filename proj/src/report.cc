#include "kgbench/report.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "kgbench/error.h"
#include "kgbench/matchers.h"

namespace kgbench {
namespace {

using nlohmann::json;

constexpr std::string_view kCellsHeader =
    "matcher,task,source,target,kind,outcome,trivial,arity,confidence";

std::string_view kind_name(std::optional<EntityKind> kind) {
  return kind ? to_string(*kind) : std::string_view("mixed");
}

void csv_field(std::string& out, std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) {
    out.append(field);
    return;
  }
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

// RFC 4180 records; quoted fields may span lines.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string>& fields) {
    fields.clear();
    int c = in_.get();
    if (c == EOF) return false;
    ++line_;
    std::string field;
    bool quoted = false;
    while (true) {
      if (quoted) {
        if (c == EOF) throw ParseError("unterminated quoted field", line_);
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
          }
        } else {
          field.push_back(static_cast<char>(c));
        }
      } else if (c == '"' && field.empty()) {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else if (c == '\n' || c == EOF) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        fields.push_back(std::move(field));
        return true;
      } else {
        field.push_back(static_cast<char>(c));
      }
      c = in_.get();
    }
  }

  std::size_t line() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
};

json counts_json(const Counts& c, std::size_t produced) {
  const Metrics m = metrics_from_counts(c);
  return {{"tp", c.tp},         {"fp", c.fp},          {"fn", c.fn},
          {"ignored", c.ignored}, {"Size", produced}, {"Prec.", m.precision},
          {"F-m.", m.f_measure}, {"Rec.", m.recall}};
}

json metrics_json(const Metrics& m) {
  return {{"Prec.", m.precision}, {"F-m.", m.f_measure}, {"Rec.", m.recall}};
}

bool same_json(const json& a, const json& b, double tolerance, const std::string& where,
               std::vector<std::string>& problems) {
  if (a.is_number() && b.is_number()) {
    if (std::fabs(a.get<double>() - b.get<double>()) <= tolerance) return true;
    problems.push_back(where + ": stored " + a.dump() + ", recomputed " + b.dump());
    return false;
  }
  if (a.type() != b.type()) {
    problems.push_back(where + ": stored " + a.dump() + ", recomputed " + b.dump());
    return false;
  }
  if (a.is_object()) {
    bool ok = true;
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) {
        problems.push_back(where + "/" + it.key() + ": not recomputable");
        ok = false;
        continue;
      }
      ok &= same_json(it.value(), b.at(it.key()), tolerance, where + "/" + it.key(), problems);
    }
    for (auto it = b.begin(); it != b.end(); ++it) {
      if (!a.contains(it.key())) {
        problems.push_back(where + "/" + it.key() + ": missing from bundle");
        ok = false;
      }
    }
    return ok;
  }
  if (a.is_array()) {
    if (a.size() != b.size()) {
      problems.push_back(where + ": " + std::to_string(a.size()) + " entries, recomputed " +
                         std::to_string(b.size()));
      return false;
    }
    bool ok = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ok &= same_json(a[i], b[i], tolerance, where + "/" + std::to_string(i), problems);
    }
    return ok;
  }
  if (a != b) {
    problems.push_back(where + ": stored " + a.dump() + ", recomputed " + b.dump());
    return false;
  }
  return true;
}

void write_file(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out.flush()) throw StorageError("write failed: " + path.string());
}

}  // namespace

bool cell_less(const EvaluatedCell& a, const EvaluatedCell& b) {
  if (a.matcher != b.matcher) return a.matcher < b.matcher;
  if (a.task != b.task) return a.task < b.task;
  if (a.source != b.source) return a.source < b.source;
  if (a.target != b.target) return a.target < b.target;
  return to_string(a.outcome) < to_string(b.outcome);
}

std::string_view to_string(Semantics semantics) {
  return semantics == Semantics::k2018 ? "2018" : "2019";
}

std::optional<Semantics> parse_semantics(std::string_view text) {
  if (text == "2018") return Semantics::k2018;
  if (text == "2019") return Semantics::k2019;
  return std::nullopt;
}

std::vector<EvaluatedCell> evaluate_task(std::string_view matcher, std::string_view task,
                                         const Alignment& produced,
                                         const GoldStandard& gold,
                                         const KnowledgeGraph& source,
                                         const KnowledgeGraph& target,
                                         const EvaluationSettings& settings) {
  Alignment alignment = produced;
  canonicalize(alignment);
  const KindOf kind_of = kinds_from_graphs(source, target);
  const Evaluation evaluation =
      settings.semantics == Semantics::k2019
          ? evaluate_partial_1to1(alignment, gold, kind_of, settings.fp_side)
          : evaluate_with_negatives(alignment, gold, kind_of);
  const ArityAnalysis arity = classify_arity(alignment);

  auto trivial = [&](const Correspondence& c) {
    if (!source.find(c.source.str()) || !target.find(c.target.str())) return false;
    return is_trivial(c, source, target);
  };

  std::vector<EvaluatedCell> cells;
  cells.reserve(alignment.size() + evaluation.missed.size());
  for (std::size_t i = 0; i < alignment.cells.size(); ++i) {
    const auto& c = alignment.cells[i];
    cells.push_back({std::string(matcher), std::string(task), c.source, c.target,
                     kind_of(c.source, c.target), evaluation.outcomes[i], trivial(c),
                     arity.per_cell[i], c.confidence});
  }
  for (std::size_t g : evaluation.missed) {
    const auto& c = gold.positives[g];
    cells.push_back({std::string(matcher), std::string(task), c.source, c.target,
                     kind_of(c.source, c.target), Outcome::kFalseNegative, trivial(c),
                     std::nullopt, std::nullopt});
  }
  std::sort(cells.begin(), cells.end(), cell_less);
  return cells;
}

std::vector<TaskSummary> summarize(
    std::span<const EvaluatedCell> cells,
    std::span<const std::pair<std::string, std::string>> tasks) {
  std::map<std::pair<std::string, std::string>, std::size_t> slot;
  std::vector<TaskSummary> out;
  out.reserve(tasks.size());
  for (const auto& [matcher, task] : tasks) {
    if (!slot.emplace(std::pair(matcher, task), out.size()).second) {
      throw InvalidArgument("task listed twice: " + matcher + " " + task);
    }
    TaskSummary s;
    s.matcher = matcher;
    s.task = task;
    out.push_back(std::move(s));
  }
  for (const auto& cell : cells) {
    auto it = slot.find({cell.matcher, cell.task});
    if (it == slot.end()) {
      throw InvalidArgument("cell for unlisted task: " + cell.matcher + " " + cell.task);
    }
    TaskSummary& s = out[it->second];
    s.counts.add(cell.kind, cell.outcome);
    if (cell.outcome == Outcome::kFalseNegative) continue;
    ++s.produced;
    if (cell.kind) ++s.produced_by_kind[static_cast<std::size_t>(*cell.kind)];
    if (cell.arity) ++s.arity[static_cast<std::size_t>(*cell.arity)];
  }
  return out;
}

json build_aggregates(std::span<const TaskSummary> input) {
  std::vector<const TaskSummary*> summaries;
  for (const auto& s : input) summaries.push_back(&s);
  std::sort(summaries.begin(), summaries.end(), [](const auto* a, const auto* b) {
    return std::tie(a->matcher, a->task) < std::tie(b->matcher, b->task);
  });

  json tasks = json::array();
  json arity = json::array();
  std::map<std::string, std::vector<const TaskSummary*>> by_matcher;
  for (const auto* s : summaries) {
    by_matcher[s->matcher].push_back(s);
    json t = {{"matcher", s->matcher}, {"task", s->task}, {"empty", s->empty_alignment()}};
    for (EntityKind kind : kAllKinds) {
      t[std::string(to_string(kind))] =
          counts_json(s->counts[kind], s->produced_by_kind[static_cast<std::size_t>(kind)]);
    }
    t["overall"] = counts_json(s->counts.overall, s->produced);
    tasks.push_back(std::move(t));
    json a = {{"matcher", s->matcher}, {"task", s->task}};
    for (ArityClass c : kAllArities) {
      a[std::string(to_string(c))] = s->arity[static_cast<std::size_t>(c)];
    }
    arity.push_back(std::move(a));
  }

  json matchers = json::object();
  for (const auto& [name, list] : by_matcher) {
    json m;
    auto aggregate = [&](const std::string& category, auto&& counts_of, auto&& produced_of) {
      std::vector<TaskScore> scores;
      for (const auto* s : list) {
        scores.push_back({counts_of(*s), produced_of(*s), s->empty_alignment()});
      }
      const Metrics global = aggregate_tasks(scores, true);
      const Metrics completed = aggregate_tasks(scores, false);
      m[category] = {{"Size", completed.size},
                     {"global", metrics_json(global)},
                     {"completed", metrics_json(completed)}};
      return completed.tasks_completed;
    };
    for (EntityKind kind : kAllKinds) {
      const auto k = static_cast<std::size_t>(kind);
      aggregate(
          std::string(to_string(kind)), [&](const TaskSummary& s) { return s.counts[kind]; },
          [&](const TaskSummary& s) { return s.produced_by_kind[k]; });
    }
    m["# tasks"] = aggregate(
        "overall", [](const TaskSummary& s) { return s.counts.overall; },
        [](const TaskSummary& s) { return s.produced; });
    matchers[name] = std::move(m);
  }

  return {{"aggregation",
           {{"across_tasks", "macro"},
            {"within_task", "micro"},
            {"f_measure", "harmonic mean of averaged precision and recall"}}},
          {"arity", std::move(arity)},
          {"matchers", std::move(matchers)},
          {"tasks", std::move(tasks)}};
}

std::string cells_csv(std::span<const EvaluatedCell> cells) {
  std::string out(kCellsHeader);
  out.push_back('\n');
  for (const auto& c : cells) {
    csv_field(out, c.matcher);
    out.push_back(',');
    csv_field(out, c.task);
    out.push_back(',');
    csv_field(out, c.source.str());
    out.push_back(',');
    csv_field(out, c.target.str());
    out.push_back(',');
    out.append(kind_name(c.kind));
    out.push_back(',');
    out.append(to_string(c.outcome));
    out.append(c.trivial ? ",true," : ",false,");
    if (c.arity) out.append(to_string(*c.arity));
    out.push_back(',');
    if (c.confidence) out.append(format_double(*c.confidence));
    out.push_back('\n');
  }
  return out;
}

std::vector<EvaluatedCell> parse_cells_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open " + path.string());
  CsvReader reader(in);
  std::vector<std::string> f;
  if (!reader.next(f)) throw ParseError("empty cell table");
  std::string header;
  for (std::size_t i = 0; i < f.size(); ++i) header += (i ? "," : "") + f[i];
  if (header != kCellsHeader) throw ParseError("unexpected header", 1, header);

  std::vector<EvaluatedCell> cells;
  while (reader.next(f)) {
    if (f.size() == 1 && f[0].empty()) continue;
    const auto line = reader.line();
    if (f.size() != 9) throw ParseError("expected 9 fields", line);
    EvaluatedCell c;
    c.matcher = f[0];
    c.task = f[1];
    c.source = Iri(f[2]);
    c.target = Iri(f[3]);
    if (f[4] != "mixed") {
      c.kind = parse_entity_kind(f[4]);
      if (!c.kind) throw ParseError("unknown kind '" + f[4] + "'", line);
    }
    const auto outcome = parse_outcome(f[5]);
    if (!outcome) throw ParseError("unknown outcome '" + f[5] + "'", line);
    c.outcome = *outcome;
    if (f[6] != "true" && f[6] != "false") throw ParseError("bad trivial flag", line);
    c.trivial = f[6] == "true";
    if (!f[7].empty()) {
      c.arity = parse_arity(f[7]);
      if (!c.arity) throw ParseError("unknown arity '" + f[7] + "'", line);
    }
    if (!f[8].empty()) {
      try {
        c.confidence = std::stod(f[8]);
      } catch (const std::exception&) {
        throw ParseError("bad confidence '" + f[8] + "'", line);
      }
    }
    cells.push_back(std::move(c));
  }
  return cells;
}

std::string aggregates_text(const json& aggregates) { return aggregates.dump(2) + "\n"; }

void emit_dashboard(const std::filesystem::path& dir, std::span<const EvaluatedCell> cells,
                    const json& aggregates, const json& manifest) {
  const json& matchers = aggregates.at("matchers");
  std::set<std::string> missing;
  for (const auto& c : cells) {
    if (!matchers.contains(c.matcher)) missing.insert(c.matcher);
  }
  if (!missing.empty()) {
    throw InvalidArgument("bundle inconsistent: no aggregate for matcher " + *missing.begin());
  }
  std::vector<EvaluatedCell> sorted(cells.begin(), cells.end());
  std::sort(sorted.begin(), sorted.end(), cell_less);

  std::filesystem::create_directories(dir);
  write_file(dir / "cells.csv", cells_csv(sorted));
  write_file(dir / "aggregates.json", aggregates_text(aggregates));
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  spdlog::info("report bundle written to {} ({} cells)", dir.string(), sorted.size());
}

std::vector<std::string> verify_bundle(const std::filesystem::path& dir, double tolerance) {
  std::vector<std::string> problems;
  for (const char* name : {"cells.csv", "aggregates.json", "manifest.json"}) {
    if (!std::filesystem::exists(dir / name)) problems.push_back(std::string(name) + " missing");
  }
  if (!problems.empty()) return problems;

  std::ifstream in(dir / "aggregates.json");
  json stored;
  try {
    stored = json::parse(in);
  } catch (const json::exception& e) {
    return {std::string("aggregates.json: ") + e.what()};
  }
  std::vector<std::pair<std::string, std::string>> tasks;
  for (const auto& t : stored.at("tasks")) {
    tasks.emplace_back(t.at("matcher").get<std::string>(), t.at("task").get<std::string>());
  }
  const auto cells = parse_cells_csv(dir / "cells.csv");
  if (!std::is_sorted(cells.begin(), cells.end(), cell_less)) {
    problems.push_back("cells.csv is not in canonical order");
  }
  const json recomputed = build_aggregates(summarize(cells, tasks));
  same_json(stored, recomputed, tolerance, "aggregates", problems);
  return problems;
}

}  // namespace kgbench
