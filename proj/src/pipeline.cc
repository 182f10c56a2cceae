#include "kgbench/pipeline.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <thread>

#include "digest.h"
#include "kgbench/error.h"
#include "kgbench/goldgen.h"

namespace kgbench {
namespace {

using nlohmann::json;

std::string stem_of(const std::filesystem::path& p) {
  // "a.nt.gz" -> "a"
  std::filesystem::path s = p.filename();
  while (s.has_extension()) s = s.stem();
  return s.string();
}

struct TaskOutput {
  std::vector<EvaluatedCell> cells;
  std::vector<SampleItem> samples;
};

TaskOutput run_task(const RunConfig& config, const TaskSpec& task,
                    const ExtractionConfig& extraction) {
  spdlog::info("task {}: loading graphs", task.id);
  const KnowledgeGraph source = load_graph(task.source, task.source_id, extraction);
  const KnowledgeGraph target = load_graph(task.target, task.target_id, extraction);
  const GoldStandard gold = load_gold(task.gold, task.negatives,
                                      config.settings.semantics == Semantics::k2019);

  std::vector<std::pair<std::string, Alignment>> alignments;
  for (const auto& m : config.matchers) {
    alignments.emplace_back(m.name, match_by_label(source, target, m.options));
  }
  for (const auto& e : config.alignments) {
    if (e.task != task.id) continue;
    auto parsed = parse_alignment(e.file);
    if (parsed.duplicates) {
      spdlog::warn("{}: {} duplicate cells dropped", e.file.string(), parsed.duplicates);
    }
    alignments.emplace_back(e.matcher, std::move(parsed.alignment));
  }
  // A matcher with no file for this task produced an empty alignment.
  for (const auto& e : config.alignments) {
    const bool present = std::any_of(alignments.begin(), alignments.end(),
                                     [&](const auto& a) { return a.first == e.matcher; });
    if (!present) alignments.emplace_back(e.matcher, Alignment{});
  }

  TaskOutput out;
  for (auto& [matcher, alignment] : alignments) {
    canonicalize(alignment);
    spdlog::info("task {}: {} produced {} cells", task.id, matcher, alignment.size());
    auto cells = evaluate_task(matcher, task.id, alignment, gold, source, target,
                               config.settings);
    out.cells.insert(out.cells.end(), std::make_move_iterator(cells.begin()),
                     std::make_move_iterator(cells.end()));
    if (config.sample_size > 0 && !alignment.empty()) {
      auto items = sample(alignment, config.sample_size, config.seed, matcher, task.id);
      out.samples.insert(out.samples.end(), items.begin(), items.end());
    }
  }
  return out;
}

}  // namespace

std::vector<MatcherSpec> default_matchers() {
  return {{"baselineAltLabel", {true, false}}, {"baselineLabel", {false, false}}};
}

RunConfig RunConfig::from_json(const json& doc) {
  RunConfig c;
  for (const auto& t : doc.at("tasks")) {
    TaskSpec task;
    task.id = t.at("id").get<std::string>();
    task.source = t.at("source").get<std::string>();
    task.target = t.at("target").get<std::string>();
    task.gold = t.at("gold").get<std::string>();
    if (t.contains("negatives") && !t.at("negatives").is_null()) {
      task.negatives = t.at("negatives").get<std::string>();
    }
    task.source_id = t.value("source_id", stem_of(task.source));
    task.target_id = t.value("target_id", stem_of(task.target));
    c.tasks.push_back(std::move(task));
  }
  if (doc.contains("matchers")) {
    for (const auto& m : doc.at("matchers")) {
      c.matchers.push_back({m.at("name").get<std::string>(),
                            {m.value("alt_labels", false), m.value("unique_only", false)}});
    }
  } else {
    c.matchers = default_matchers();
  }
  if (doc.contains("alignments")) {
    for (const auto& a : doc.at("alignments")) {
      c.alignments.push_back({a.at("matcher").get<std::string>(),
                              a.at("task").get<std::string>(),
                              a.at("file").get<std::string>()});
    }
  }
  const auto semantics = parse_semantics(doc.value("semantics", "2019"));
  if (!semantics) throw InvalidArgument("semantics must be 2018 or 2019");
  c.settings.semantics = *semantics;
  const std::string side = doc.value("fp_side", "both");
  if (side != "both" && side != "source") throw InvalidArgument("fp_side must be both or source");
  c.settings.fp_side = side == "both" ? FalsePositiveSide::kBoth : FalsePositiveSide::kSourceOnly;
  c.seed = doc.value("seed", std::uint64_t{42});
  c.sample_size = doc.value("sample_size", std::size_t{50});
  if (doc.contains("extraction")) c.extraction = doc.at("extraction").get<std::string>();
  c.output = doc.value("output", "run");
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open run config " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

json RunConfig::to_json() const {
  json tasks_json = json::array();
  for (const auto& t : tasks) {
    json j = {{"id", t.id},         {"source", t.source.string()},
              {"target", t.target.string()}, {"gold", t.gold.string()},
              {"source_id", t.source_id}, {"target_id", t.target_id}};
    if (t.negatives) j["negatives"] = t.negatives->string();
    tasks_json.push_back(std::move(j));
  }
  json matchers_json = json::array();
  for (const auto& m : matchers) {
    matchers_json.push_back({{"name", m.name},
                             {"alt_labels", m.options.use_alt_labels},
                             {"unique_only", m.options.unique_only}});
  }
  json alignments_json = json::array();
  for (const auto& a : alignments) {
    alignments_json.push_back({{"matcher", a.matcher}, {"task", a.task}, {"file", a.file.string()}});
  }
  json doc = {{"tasks", std::move(tasks_json)},
              {"matchers", std::move(matchers_json)},
              {"alignments", std::move(alignments_json)},
              {"semantics", to_string(settings.semantics)},
              {"fp_side", settings.fp_side == FalsePositiveSide::kBoth ? "both" : "source"},
              {"seed", seed},
              {"sample_size", sample_size},
              {"output", output.string()}};
  if (extraction) doc["extraction"] = extraction->string();
  return doc;
}

std::vector<std::filesystem::path> RunConfig::inputs() const {
  std::vector<std::filesystem::path> paths;
  for (const auto& t : tasks) {
    paths.push_back(t.source);
    paths.push_back(t.target);
    paths.push_back(t.gold);
    if (t.negatives) paths.push_back(*t.negatives);
  }
  for (const auto& a : alignments) paths.push_back(a.file);
  if (extraction) paths.push_back(*extraction);
  return paths;
}

void RunConfig::validate() const {
  if (tasks.empty()) throw InvalidArgument("run config lists no tasks");
  std::set<std::string> ids;
  for (const auto& t : tasks) {
    if (!ids.insert(t.id).second) throw InvalidArgument("duplicate task id " + t.id);
  }
  std::set<std::string> names;
  for (const auto& m : matchers) {
    if (!names.insert(m.name).second) throw InvalidArgument("duplicate matcher " + m.name);
  }
  for (const auto& a : alignments) {
    if (names.contains(a.matcher)) {
      throw InvalidArgument("alignment matcher " + a.matcher + " clashes with a baseline");
    }
    if (!ids.contains(a.task)) throw InvalidArgument("alignment for unknown task " + a.task);
  }
  for (const auto& p : inputs()) {
    if (!std::filesystem::exists(p)) throw NotFound("input not found: " + p.string());
  }
}

RunResult run_pipeline(const RunConfig& config, unsigned jobs) {
  config.validate();
  const ExtractionConfig extraction =
      config.extraction ? ExtractionConfig::load(*config.extraction) : ExtractionConfig{};

  std::vector<TaskOutput> outputs(config.tasks.size());
  std::vector<std::exception_ptr> errors(config.tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < config.tasks.size();) {
      try {
        outputs[i] = run_task(config, config.tasks[i], extraction);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned threads =
      std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(config.tasks.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  RunResult result;
  for (auto& o : outputs) {
    result.cells.insert(result.cells.end(), std::make_move_iterator(o.cells.begin()),
                        std::make_move_iterator(o.cells.end()));
    result.samples.insert(result.samples.end(), o.samples.begin(), o.samples.end());
  }
  std::sort(result.cells.begin(), result.cells.end(), cell_less);
  std::stable_sort(result.samples.begin(), result.samples.end(),
                   [](const SampleItem& a, const SampleItem& b) {
                     return std::tie(a.matcher, a.task) < std::tie(b.matcher, b.task);
                   });

  std::set<std::string> matcher_names;
  for (const auto& m : config.matchers) matcher_names.insert(m.name);
  for (const auto& a : config.alignments) matcher_names.insert(a.matcher);
  std::vector<std::pair<std::string, std::string>> tasks;
  for (const auto& m : matcher_names) {
    for (const auto& t : config.tasks) tasks.emplace_back(m, t.id);
  }
  result.aggregates = build_aggregates(summarize(result.cells, tasks));

  json digests = json::object();
  for (const auto& p : config.inputs()) digests[p.string()] = sha256_file(p);
  result.manifest = {{"tool", "kgbench"},
                     {"version", "0.1.0"},
                     {"created", utc_timestamp()},
                     {"seed", config.seed},
                     {"config", config.to_json()},
                     {"inputs", std::move(digests)}};

  emit_dashboard(config.output, result.cells, result.aggregates, result.manifest);
  if (config.sample_size > 0) write_sample(config.output / "samples.jsonl", result.samples);
  return result;
}

}  // namespace kgbench
