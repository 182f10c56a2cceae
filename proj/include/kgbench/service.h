#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "kgbench/graph.h"
#include "kgbench/sampling.h"

namespace httplib {
class Server;
}

namespace kgbench {

// One line of judgments.log.
struct JudgmentRecord {
  std::string session;
  Judgment judgment;
};

// Append-only JSONL log. Each append is a single write followed by fsync; a
// failed append is rolled back to the previous length and raises
// StorageError.
class JudgmentLog {
 public:
  explicit JudgmentLog(std::filesystem::path path);
  ~JudgmentLog();
  JudgmentLog(const JudgmentLog&) = delete;
  JudgmentLog& operator=(const JudgmentLog&) = delete;

  void append(const JudgmentRecord& record);
  const std::filesystem::path& path() const { return path_; }

  // Records in file order. A truncated last line (crash mid-write) is ignored.
  static std::vector<JudgmentRecord> replay(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

struct EntityCard {
  std::string iri;
  std::string graph;
  std::optional<EntityKind> kind;  // nullopt when the graph lacks the entity
  std::vector<std::string> labels;
  std::vector<std::string> alt_labels;
  std::vector<Fact> facts;  // at most 25
};

EntityCard entity_card(const KnowledgeGraph* graph, const std::string& graph_id,
                       const Iri& iri, std::size_t max_facts = 25);

struct TaskCard {
  std::size_t index = 0;
  std::size_t total = 0;
  SampleItem item;
  EntityCard source;
  EntityCard target;
};

struct Tally {
  std::size_t same = 0;
  std::size_t different = 0;
  std::size_t unsure = 0;

  void add(Verdict v, long delta = 1);
};

struct Acknowledgment {
  bool revision = false;
  std::size_t revisions = 0;  // revisions in this session so far
  Tally tally;
  std::optional<PrecisionEstimate> estimate;
};

struct SummaryRow {
  SampleItem item;
  std::map<std::string, Verdict> verdicts;  // by annotator
};

struct Summary {
  std::optional<PrecisionEstimate> estimate;  // nullopt: no decisive judgment
  Tally tally;
  std::map<std::string, Tally> by_annotator;
  std::vector<SummaryRow> items;
};

struct SessionSpec {
  std::string id;
  std::vector<SampleItem> sample;
  std::shared_ptr<const KnowledgeGraph> source;
  std::shared_ptr<const KnowledgeGraph> target;
  std::optional<std::filesystem::path> bundle;  // report bundle directory
};

// Sessions over samples, with judgments persisted to `<data_dir>/judgments.log`.
// Opening replays the log; tallies are a fold over it. Reads run concurrently,
// writes are serialized.
class AnnotationService {
 public:
  explicit AnnotationService(const std::filesystem::path& data_dir);

  // Judgments already in the log for this session id are applied.
  void add_session(SessionSpec spec);
  bool has_session(const std::string& id) const;

  // Lowest-index item the annotator has not judged, or nullopt when done.
  // Throws NotFound for an unknown session.
  std::optional<TaskCard> next_task(const std::string& session,
                                    const std::string& annotator) const;

  // Throws NotFound (unknown session), InvalidArgument (foreign item) or
  // StorageError (log write failed; state unchanged).
  Acknowledgment submit_judgment(const std::string& session, Judgment judgment);

  Summary results_summary(const std::string& session) const;

  // cells.csv, aggregates.json and manifest.json of the session's bundle.
  std::optional<std::filesystem::path> bundle(const std::string& session) const;

  const std::filesystem::path& log_path() const { return log_.path(); }

 private:
  struct Session {
    SessionSpec spec;
    std::map<std::string, std::size_t> index;  // item id -> position
    // (item position, annotator) -> effective verdict
    std::map<std::pair<std::size_t, std::string>, Verdict> verdicts;
    Tally tally;
    std::size_t revisions = 0;
  };

  // Returns true when the judgment replaced an earlier verdict.
  static bool apply(Session& s, std::size_t position, const Judgment& j);
  const Session& find(const std::string& id) const;

  mutable std::shared_mutex mutex_;
  std::mutex write_mutex_;
  JudgmentLog log_;
  std::vector<JudgmentRecord> backlog_;  // log records for sessions not yet added
  std::map<std::string, Session> sessions_;
};

nlohmann::json to_json(const SampleItem& item);
nlohmann::json to_json(const PrecisionEstimate& estimate);
nlohmann::json to_json(const EntityCard& card);
nlohmann::json to_json(const TaskCard& card);
nlohmann::json to_json(const Acknowledgment& ack);
nlohmann::json to_json(const Summary& summary);

// GET  /sessions/{id}/next?annotator=A
// POST /sessions/{id}/judgments   {"item_id", "verdict", "annotator"[, "timestamp"]}
// GET  /sessions/{id}/summary
// GET  /sessions/{id}/dashboard   aggregates + manifest + cells.csv text
// GET  /sessions/{id}/dashboard/{cells.csv|aggregates.json|manifest.json}
void register_routes(httplib::Server& server, AnnotationService& service);

// Session list for `serve`: a JSON array of
// {"id", "sample", "source_graph", "target_graph"[, "bundle"]}; graph paths
// are N-Triples files whose ids are taken from the file stem.
std::vector<SessionSpec> load_session_specs(const std::filesystem::path& path);

}  // namespace kgbench
