#include "kgbench/sampling.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>

#include "digest.h"

namespace kgbench {
namespace {

using nlohmann::json;

double two_sided_z(double confidence) {
  static const boost::math::normal standard;
  return boost::math::quantile(standard, 1.0 - (1.0 - confidence) / 2.0);
}

template <typename Fn>
void read_jsonl(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw ParseError(e.what(), line_no, line);
    } catch (const Error& e) {
      throw ParseError(e.what(), line_no, line);
    }
  }
}

void write_lines(const std::filesystem::path& path, const std::vector<json>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw StorageError("cannot write " + path.string());
  for (const auto& r : records) out << r.dump() << '\n';
  if (!out.flush()) throw StorageError("write failed: " + path.string());
}

}  // namespace

std::string item_id(std::string_view matcher, std::string_view task, const Iri& source,
                    const Iri& target) {
  std::string key;
  key.reserve(matcher.size() + task.size() + source.str().size() + target.str().size() + 3);
  key.append(matcher).append(1, '\t').append(task).append(1, '\t');
  key.append(source.str()).append(1, '\t').append(target.str());
  return sha256_hex(key).substr(0, 16);
}

std::vector<SampleItem> sample(const Alignment& alignment, std::size_t n,
                               std::uint64_t seed, std::string_view matcher,
                               std::string_view task) {
  if (n == 0) throw InvalidArgument("sample size must be at least 1");
  if (alignment.empty()) {
    spdlog::warn("sampling an empty alignment ({} {})", matcher, task);
    return {};
  }
  std::vector<const Correspondence*> cells;
  cells.reserve(alignment.size());
  for (const auto& c : alignment.cells) cells.push_back(&c);
  std::sort(cells.begin(), cells.end(),
            [](const auto* a, const auto* b) { return pair_less(*a, *b); });
  cells.erase(std::unique(cells.begin(), cells.end(),
                          [](const auto* a, const auto* b) {
                            return a->source == b->source && a->target == b->target;
                          }),
              cells.end());

  // Partial Fisher-Yates: position i receives a uniform pick from [i, size).
  std::mt19937_64 engine(seed);
  const std::size_t take = std::min(n, cells.size());
  std::vector<SampleItem> items;
  items.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const auto j = i + bounded_draw(engine, cells.size() - i);
    std::swap(cells[i], cells[j]);
    const Correspondence& c = *cells[i];
    items.push_back({item_id(matcher, task, c.source, c.target), c, std::string(task),
                     std::string(matcher)});
  }
  return items;
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kSame: return "same";
    case Verdict::kDifferent: return "different";
    case Verdict::kUnsure: return "unsure";
  }
  return "unsure";
}

std::optional<Verdict> parse_verdict(std::string_view text) {
  if (text == "same") return Verdict::kSame;
  if (text == "different") return Verdict::kDifferent;
  if (text == "unsure") return Verdict::kUnsure;
  return std::nullopt;
}

double max_error(std::size_t n, double confidence) {
  if (n == 0) throw InvalidArgument("max_error needs n >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw InvalidArgument("confidence must lie in (0, 1)");
  }
  return two_sided_z(confidence) * std::sqrt(0.25 / static_cast<double>(n));
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t n,
                                          double confidence) {
  if (successes > n) throw InvalidArgument("successes exceed trials");
  if (n == 0) return {0.0, 1.0};
  const double z = two_sided_z(confidence);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  // Clamp rounding noise at the ends; exact bounds at p = 0 and p = 1.
  double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
  double hi = successes == n ? 1.0 : std::min(1.0, centre + half);
  return {std::min(lo, p), std::max(hi, p)};
}

PrecisionEstimate estimate_precision(std::size_t same, std::size_t different,
                                     std::size_t unsure, double confidence) {
  const std::size_t decisive = same + different;
  if (decisive == 0) throw NoDecisiveJudgments();
  PrecisionEstimate e;
  e.point = static_cast<double>(same) / static_cast<double>(decisive);
  e.interval = wilson_interval(same, decisive, confidence);
  e.n_judged = decisive;
  e.n_unsure = unsure;
  return e;
}

PrecisionEstimate estimate_precision(std::span<const Judgment> judgments,
                                     double confidence) {
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& j : judgments) ++counts[static_cast<int>(j.verdict)];
  return estimate_precision(counts[0], counts[1], counts[2], confidence);
}

void write_sample(const std::filesystem::path& path, std::span<const SampleItem> items) {
  std::vector<json> records;
  records.reserve(items.size());
  for (const auto& item : items) {
    records.push_back({{"id", item.id},
                       {"matcher", item.matcher},
                       {"task", item.task},
                       {"source", item.correspondence.source.str()},
                       {"target", item.correspondence.target.str()},
                       {"confidence", item.correspondence.confidence}});
  }
  write_lines(path, records);
}

std::vector<SampleItem> read_sample(const std::filesystem::path& path) {
  std::vector<SampleItem> items;
  read_jsonl(path, [&](const json& r) {
    SampleItem item;
    item.id = r.at("id").get<std::string>();
    item.matcher = r.value("matcher", "");
    item.task = r.value("task", "");
    item.correspondence = Correspondence(Iri(r.at("source").get<std::string>()),
                                         Iri(r.at("target").get<std::string>()),
                                         r.value("confidence", 1.0));
    items.push_back(std::move(item));
  });
  return items;
}

void write_judgments(const std::filesystem::path& path,
                     std::span<const Judgment> judgments) {
  std::vector<json> records;
  records.reserve(judgments.size());
  for (const auto& j : judgments) {
    records.push_back({{"item_id", j.item_id},
                       {"verdict", to_string(j.verdict)},
                       {"annotator", j.annotator},
                       {"timestamp", j.timestamp}});
  }
  write_lines(path, records);
}

std::vector<Judgment> read_judgments(const std::filesystem::path& path) {
  std::vector<Judgment> out;
  read_jsonl(path, [&](const json& r) {
    Judgment j;
    j.item_id = r.at("item_id").get<std::string>();
    const auto verdict = parse_verdict(r.at("verdict").get<std::string>());
    if (!verdict) throw InvalidArgument("unknown verdict");
    j.verdict = *verdict;
    j.annotator = r.value("annotator", "");
    j.timestamp = r.value("timestamp", "");
    out.push_back(std::move(j));
  });
  return out;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace kgbench
