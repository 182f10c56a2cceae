#include "kgbench/service.h"

#include <fcntl.h>
#include <httplib.h>
#include <spdlog/spdlog.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "kgbench/error.h"

namespace kgbench {
namespace {

using nlohmann::json;

std::filesystem::path prepare_log(const std::filesystem::path& data_dir) {
  std::error_code ec;
  std::filesystem::create_directories(data_dir, ec);
  if (ec) throw StorageError("cannot create " + data_dir.string() + ": " + ec.message());
  return data_dir / "judgments.log";
}

json record_json(const JudgmentRecord& r) {
  return {{"session", r.session},
          {"item_id", r.judgment.item_id},
          {"verdict", to_string(r.judgment.verdict)},
          {"annotator", r.judgment.annotator},
          {"timestamp", r.judgment.timestamp}};
}

json tally_json(const Tally& t) {
  return {{"same", t.same}, {"different", t.different}, {"unsure", t.unsure}};
}

std::optional<PrecisionEstimate> estimate_of(const Tally& t) {
  if (t.same + t.different == 0) return std::nullopt;
  return estimate_precision(t.same, t.different, t.unsure);
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message,
                bool retriable = false) {
  send_json(res, status, {{"error", message}, {"retriable", retriable}});
}

// Maps library errors to HTTP statuses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const NotFound& e) {
    send_error(res, 404, e.what());
  } catch (const StorageError& e) {
    send_error(res, 503, e.what(), true);
  } catch (const InvalidArgument& e) {
    send_error(res, 400, e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, std::string("malformed request: ") + e.what());
  } catch (const std::exception& e) {
    spdlog::error("request failed: {}", e.what());
    send_error(res, 500, e.what());
  }
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

JudgmentLog::JudgmentLog(std::filesystem::path path) : path_(std::move(path)) {
  fd_ = ::open(path_.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw StorageError("cannot open " + path_.string() + ": " + std::strerror(errno));
  }
}

JudgmentLog::~JudgmentLog() {
  if (fd_ >= 0) ::close(fd_);
}

void JudgmentLog::append(const JudgmentRecord& record) {
  const std::string line = record_json(record).dump() + "\n";
  struct stat st {};
  const off_t before = ::fstat(fd_, &st) == 0 ? st.st_size : -1;
  auto fail = [&](const char* what) {
    const int err = errno;
    if (before >= 0 && S_ISREG(st.st_mode)) {
      if (::ftruncate(fd_, before) != 0) spdlog::error("rollback of {} failed", path_.string());
    }
    throw StorageError(std::string(what) + " " + path_.string() + ": " + std::strerror(err));
  };
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail("write to");
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fsync(fd_) != 0 && errno != EINVAL) fail("fsync of");
}

std::vector<JudgmentRecord> JudgmentLog::replay(const std::filesystem::path& path) {
  std::vector<JudgmentRecord> out;
  if (!std::filesystem::is_regular_file(path)) return out;
  std::ifstream in(path, std::ios::binary);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json r = json::parse(line);
      JudgmentRecord rec;
      rec.session = r.at("session").get<std::string>();
      rec.judgment.item_id = r.at("item_id").get<std::string>();
      const auto verdict = parse_verdict(r.at("verdict").get<std::string>());
      if (!verdict) throw InvalidArgument("unknown verdict");
      rec.judgment.verdict = *verdict;
      rec.judgment.annotator = r.at("annotator").get<std::string>();
      rec.judgment.timestamp = r.value("timestamp", "");
      out.push_back(std::move(rec));
    } catch (const std::exception& e) {
      spdlog::warn("{}:{}: skipping unreadable judgment record ({})", path.string(), line_no,
                   e.what());
    }
  }
  return out;
}

EntityCard entity_card(const KnowledgeGraph* graph, const std::string& graph_id,
                       const Iri& iri, std::size_t max_facts) {
  EntityCard card;
  card.iri = iri.str();
  card.graph = graph_id;
  if (!graph) return card;
  const auto id = graph->find(iri.str());
  if (!id) return card;
  const Entity& e = graph->entity(*id);
  card.kind = e.kind;
  card.labels = e.labels;
  card.alt_labels = e.alt_labels;
  const std::size_t n = std::min(max_facts, e.facts.size());
  card.facts.assign(e.facts.begin(), e.facts.begin() + static_cast<std::ptrdiff_t>(n));
  return card;
}

void Tally::add(Verdict v, long delta) {
  std::size_t* slot = v == Verdict::kSame        ? &same
                      : v == Verdict::kDifferent ? &different
                                                 : &unsure;
  *slot = static_cast<std::size_t>(static_cast<long>(*slot) + delta);
}

AnnotationService::AnnotationService(const std::filesystem::path& data_dir)
    : log_(prepare_log(data_dir)) {
  backlog_ = JudgmentLog::replay(log_.path());
  spdlog::info("judgment log {}: {} records", log_.path().string(), backlog_.size());
}

void AnnotationService::add_session(SessionSpec spec) {
  Session s;
  for (std::size_t i = 0; i < spec.sample.size(); ++i) {
    if (!s.index.emplace(spec.sample[i].id, i).second) {
      throw InvalidArgument("duplicate item id " + spec.sample[i].id + " in session " + spec.id);
    }
  }
  const std::string id = spec.id;
  s.spec = std::move(spec);

  std::unique_lock lock(mutex_);
  if (sessions_.contains(id)) throw InvalidArgument("session " + id + " already exists");
  std::size_t replayed = 0;
  for (const auto& r : backlog_) {
    if (r.session != id) continue;
    auto it = s.index.find(r.judgment.item_id);
    if (it == s.index.end()) {
      spdlog::warn("session {}: log names unknown item {}", id, r.judgment.item_id);
      continue;
    }
    apply(s, it->second, r.judgment);
    ++replayed;
  }
  std::erase_if(backlog_, [&](const JudgmentRecord& r) { return r.session == id; });
  if (replayed) spdlog::info("session {}: replayed {} judgments", id, replayed);
  sessions_.emplace(id, std::move(s));
}

bool AnnotationService::has_session(const std::string& id) const {
  std::shared_lock lock(mutex_);
  return sessions_.contains(id);
}

const AnnotationService::Session& AnnotationService::find(const std::string& id) const {
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("unknown session " + id);
  return it->second;
}

bool AnnotationService::apply(Session& s, std::size_t position, const Judgment& j) {
  auto [it, inserted] = s.verdicts.try_emplace({position, j.annotator}, j.verdict);
  if (!inserted) {
    s.tally.add(it->second, -1);
    it->second = j.verdict;
    ++s.revisions;
  }
  s.tally.add(j.verdict);
  return !inserted;
}

std::optional<TaskCard> AnnotationService::next_task(const std::string& session,
                                                     const std::string& annotator) const {
  std::shared_lock lock(mutex_);
  const Session& s = find(session);
  const auto& sample = s.spec.sample;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (s.verdicts.contains({i, annotator})) continue;
    TaskCard card;
    card.index = i;
    card.total = sample.size();
    card.item = sample[i];
    const auto* src = s.spec.source.get();
    const auto* tgt = s.spec.target.get();
    card.source = entity_card(src, src ? src->id() : "", sample[i].correspondence.source);
    card.target = entity_card(tgt, tgt ? tgt->id() : "", sample[i].correspondence.target);
    return card;
  }
  return std::nullopt;
}

Acknowledgment AnnotationService::submit_judgment(const std::string& session,
                                                  Judgment judgment) {
  if (judgment.timestamp.empty()) judgment.timestamp = utc_timestamp();
  std::lock_guard writer(write_mutex_);
  std::size_t position = 0;
  {
    std::shared_lock lock(mutex_);
    const Session& s = find(session);
    auto it = s.index.find(judgment.item_id);
    if (it == s.index.end()) {
      throw InvalidArgument("item " + judgment.item_id + " does not belong to session " +
                            session);
    }
    position = it->second;
  }
  // Durable first: a failed append leaves the in-memory state untouched.
  log_.append({session, judgment});

  std::unique_lock lock(mutex_);
  Session& s = sessions_.at(session);
  Acknowledgment ack;
  ack.revision = apply(s, position, judgment);
  ack.revisions = s.revisions;
  ack.tally = s.tally;
  ack.estimate = estimate_of(s.tally);
  return ack;
}

Summary AnnotationService::results_summary(const std::string& session) const {
  std::shared_lock lock(mutex_);
  const Session& s = find(session);
  Summary out;
  out.tally = s.tally;
  out.estimate = estimate_of(s.tally);
  out.items.reserve(s.spec.sample.size());
  for (const auto& item : s.spec.sample) out.items.push_back({item, {}});
  for (const auto& [key, verdict] : s.verdicts) {
    out.items[key.first].verdicts[key.second] = verdict;
    out.by_annotator[key.second].add(verdict);
  }
  return out;
}

std::optional<std::filesystem::path> AnnotationService::bundle(
    const std::string& session) const {
  std::shared_lock lock(mutex_);
  return find(session).spec.bundle;
}

json to_json(const SampleItem& item) {
  return {{"id", item.id},
          {"matcher", item.matcher},
          {"task", item.task},
          {"correspondence",
           {{"source", item.correspondence.source.str()},
            {"target", item.correspondence.target.str()},
            {"relation", to_string(item.correspondence.relation)},
            {"confidence", item.correspondence.confidence}}}};
}

json to_json(const PrecisionEstimate& e) {
  return {{"point", e.point},
          {"interval", {e.interval.first, e.interval.second}},
          {"n_judged", e.n_judged},
          {"n_unsure", e.n_unsure}};
}

json to_json(const EntityCard& card) {
  json facts = json::array();
  for (const auto& f : card.facts) facts.push_back({{"property", f.predicate}, {"value", f.value}});
  return {{"iri", card.iri},
          {"graph", card.graph},
          {"kind", card.kind ? json(to_string(*card.kind)) : json(nullptr)},
          {"labels", card.labels},
          {"alt_labels", card.alt_labels},
          {"facts", std::move(facts)}};
}

json to_json(const TaskCard& card) {
  return {{"done", false},
          {"index", card.index},
          {"total", card.total},
          {"item", to_json(card.item)},
          {"source", to_json(card.source)},
          {"target", to_json(card.target)}};
}

json to_json(const Acknowledgment& ack) {
  return {{"revision", ack.revision},
          {"revisions", ack.revisions},
          {"tally", tally_json(ack.tally)},
          {"estimate", ack.estimate ? to_json(*ack.estimate) : json(nullptr)}};
}

json to_json(const Summary& summary) {
  json items = json::array();
  for (const auto& row : summary.items) {
    json verdicts = json::object();
    for (const auto& [annotator, v] : row.verdicts) verdicts[annotator] = to_string(v);
    items.push_back({{"item", to_json(row.item)}, {"verdicts", std::move(verdicts)}});
  }
  json annotators = json::object();
  for (const auto& [name, t] : summary.by_annotator) annotators[name] = tally_json(t);
  json out = {{"estimate", summary.estimate ? to_json(*summary.estimate) : json(nullptr)},
              {"tally", tally_json(summary.tally)},
              {"annotators", std::move(annotators)},
              {"items", std::move(items)}};
  if (!summary.estimate) out["message"] = "no decisive judgments";
  return out;
}

void register_routes(httplib::Server& server, AnnotationService& service) {
  server.Get(R"(/sessions/([^/]+)/next)",
             [&service](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 const std::string annotator = req.get_param_value("annotator");
                 if (annotator.empty()) throw InvalidArgument("annotator parameter required");
                 const auto card = service.next_task(req.matches[1], annotator);
                 send_json(res, 200, card ? to_json(*card) : json{{"done", true}});
               });
             });

  server.Post(R"(/sessions/([^/]+)/judgments)",
              [&service](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  const json body = json::parse(req.body);
                  Judgment j;
                  j.item_id = body.at("item_id").get<std::string>();
                  const auto verdict = parse_verdict(body.at("verdict").get<std::string>());
                  if (!verdict) throw InvalidArgument("verdict must be same, different or unsure");
                  j.verdict = *verdict;
                  j.annotator = body.at("annotator").get<std::string>();
                  if (j.annotator.empty()) throw InvalidArgument("annotator must not be empty");
                  j.timestamp = body.value("timestamp", "");
                  send_json(res, 200, to_json(service.submit_judgment(req.matches[1], j)));
                });
              });

  server.Get(R"(/sessions/([^/]+)/summary)",
             [&service](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 send_json(res, 200, to_json(service.results_summary(req.matches[1])));
               });
             });

  server.Get(R"(/sessions/([^/]+)/dashboard)",
             [&service](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 const auto dir = service.bundle(req.matches[1]);
                 if (!dir) throw NotFound("session has no report bundle");
                 send_json(res, 200,
                           {{"aggregates", json::parse(read_text(*dir / "aggregates.json"))},
                            {"manifest", json::parse(read_text(*dir / "manifest.json"))},
                            {"cells_csv", read_text(*dir / "cells.csv")}});
               });
             });

  server.Get(R"(/sessions/([^/]+)/dashboard/(cells\.csv|aggregates\.json|manifest\.json))",
             [&service](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 const auto dir = service.bundle(req.matches[1]);
                 if (!dir) throw NotFound("session has no report bundle");
                 const std::string name = req.matches[2];
                 res.set_content(read_text(*dir / name),
                                 name.ends_with(".csv") ? "text/csv" : "application/json");
               });
             });
}

std::vector<SessionSpec> load_session_specs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  std::map<std::string, std::shared_ptr<const KnowledgeGraph>> graphs;
  auto graph = [&](const std::string& file) {
    auto& slot = graphs[file];
    if (!slot) {
      slot = std::make_shared<const KnowledgeGraph>(
          load_graph(file, std::filesystem::path(file).stem().string()));
    }
    return slot;
  };
  std::vector<SessionSpec> specs;
  for (const auto& s : doc) {
    SessionSpec spec;
    spec.id = s.at("id").get<std::string>();
    spec.sample = read_sample(s.at("sample").get<std::string>());
    if (s.contains("source_graph")) spec.source = graph(s.at("source_graph").get<std::string>());
    if (s.contains("target_graph")) spec.target = graph(s.at("target_graph").get<std::string>());
    if (s.contains("bundle")) spec.bundle = s.at("bundle").get<std::string>();
    specs.push_back(std::move(spec));
  }
  return specs;
}

}  // namespace kgbench
