#include <httplib.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

#include "digest.h"
#include "kgbench/error.h"
#include "kgbench/goldgen.h"
#include "kgbench/kappa.h"
#include "kgbench/pipeline.h"
#include "kgbench/service.h"

namespace kgbench {
namespace {

using nlohmann::json;

void setup_logging() {
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::stderr_color_mt("kgbench");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("%^%l%$: %v");
    const char* level = std::getenv("KGBENCH_LOG");
    spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
  });
}

// Splits "key=value"; throws a CLI validation error otherwise.
std::pair<std::string, std::string> key_value(const std::string& arg, const char* flag) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw CLI::ValidationError(flag, "expected key=value, got '" + arg + "'");
  }
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

std::string pair_stem(const WikiPair& p) { return p.first + "__" + p.second; }

void write_gold_files(const std::filesystem::path& dir,
                      const std::map<WikiPair, GoldStandard>& gold, std::ostream& out) {
  std::filesystem::create_directories(dir);
  for (const auto& [pair, g] : gold) {
    Alignment a{pair.first, pair.second, g.positives};
    const auto stem = dir / pair_stem(pair);
    write_alignment(stem.string() + ".tsv", a);
    if (!g.negatives.empty()) write_negatives(stem.string() + ".negatives.tsv", g.negatives);
    if (!g.derived.empty()) {
      write_alignment(stem.string() + ".derived.tsv", Alignment{pair.first, pair.second, g.derived});
    }
    out << pair.first << '\t' << pair.second << '\t' << g.positives.size() << " positives\t"
        << g.negatives.size() << " negatives\t" << g.derived.size() << " derived\n";
  }
}

unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  setup_logging();
  CLI::App app{"Knowledge-graph matching benchmark harness", "kgbench"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "kgbench 0.1.0");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse an N-Triples file and report graph statistics");
  std::string ingest_input, ingest_id, ingest_config, ingest_out;
  bool ingest_lenient = false;
  ingest->add_option("--input", ingest_input, "N-Triples file (plain or gzip)")
      ->required()->check(CLI::ExistingFile);
  ingest->add_option("--id", ingest_id, "Graph id (default: file stem)");
  ingest->add_option("--config", ingest_config, "Extraction config")->check(CLI::ExistingFile);
  ingest->add_flag("--lenient", ingest_lenient, "Skip malformed lines instead of failing");
  ingest->add_option("--out", ingest_out, "Write statistics JSON here instead of stdout");

  // match
  auto* match = app.add_subcommand("match", "Run a label baseline on a graph pair");
  std::string match_source, match_target, match_out, match_config;
  bool alt_labels = false, unique_only = false, match_lenient = false;
  match->add_option("--source", match_source)->required()->check(CLI::ExistingFile);
  match->add_option("--target", match_target)->required()->check(CLI::ExistingFile);
  match->add_option("--out", match_out, "Alignment file (.tsv or XML)")->required();
  match->add_option("--config", match_config, "Extraction config")->check(CLI::ExistingFile);
  match->add_flag("--alt-labels", alt_labels, "Also use alternative labels (baselineAltLabel)");
  match->add_flag("--unique-only", unique_only, "Only labels carried by one entity per side");
  match->add_flag("--lenient", match_lenient, "Skip malformed lines");

  // extract-gold
  auto* extract = app.add_subcommand("extract-gold", "Build gold standards from a page dump or crowd votes");
  std::string pages_file, crowd_file, gold_dir;
  std::vector<std::string> target_wikis, redirect_files, bases;
  std::size_t max_depth = kDefaultRedirectDepth;
  auto* pages_opt = extract->add_option("--pages", pages_file, "Page dump (JSON lines)")
                        ->check(CLI::ExistingFile);
  auto* crowd_opt = extract->add_option("--crowd", crowd_file, "Crowd task TSV")
                        ->check(CLI::ExistingFile);
  pages_opt->excludes(crowd_opt);
  extract->add_option("--target-wiki", target_wikis, "Wiki that links may point to (repeatable)");
  extract->add_option("--redirects", redirect_files, "wiki=redirects.tsv (repeatable)");
  extract->add_option("--base", bases, "wiki=base IRI (repeatable)");
  extract->add_option("--max-depth", max_depth, "Redirect chain limit")->check(CLI::PositiveNumber);
  extract->add_option("--out-dir", gold_dir, "Output directory")->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score alignments against a partial gold standard");
  std::string eval_alignment, eval_gold, eval_negatives, eval_out, eval_config,
      semantics = "2019", fp_side = "both", eval_matcher = "matcher", eval_task;
  std::vector<std::string> eval_graphs;
  unsigned jobs = default_jobs();
  evaluate->add_option("--config", eval_config, "Run config (task list); writes the full bundle")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--alignment", eval_alignment)->check(CLI::ExistingFile);
  evaluate->add_option("--gold", eval_gold)->check(CLI::ExistingFile);
  evaluate->add_option("--negatives", eval_negatives)->check(CLI::ExistingFile);
  evaluate->add_option("--graphs", eval_graphs, "Source and target N-Triples files")
      ->expected(2)->check(CLI::ExistingFile);
  evaluate->add_option("--semantics", semantics)->check(CLI::IsMember({"2018", "2019"}));
  evaluate->add_option("--fp-side", fp_side)->check(CLI::IsMember({"both", "source"}));
  evaluate->add_option("--matcher", eval_matcher, "Matcher name for the report");
  evaluate->add_option("--task", eval_task, "Task id for the report (default: graph ids)");
  evaluate->add_option("--out", eval_out, "Report directory");
  evaluate->add_option("--jobs", jobs, "Parallel tasks")->check(CLI::PositiveNumber);

  // arity
  auto* arity = app.add_subcommand("arity", "Arity analysis of an alignment");
  std::string arity_alignment;
  arity->add_option("--alignment", arity_alignment)->required()->check(CLI::ExistingFile);

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "Draw a reproducible sample of correspondences");
  std::string sample_alignment, sample_out, sample_matcher, sample_task;
  std::size_t sample_n = 50;
  std::uint64_t seed = 42;
  sample_cmd->add_option("--alignment", sample_alignment)->required()->check(CLI::ExistingFile);
  sample_cmd->add_option("-n", sample_n, "Sample size")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", seed);
  sample_cmd->add_option("--out", sample_out)->required();
  sample_cmd->add_option("--matcher", sample_matcher);
  sample_cmd->add_option("--task", sample_task);

  // kappa
  auto* kappa = app.add_subcommand("kappa", "Fleiss' kappa of a ratings matrix");
  std::string ratings;
  kappa->add_option("--ratings", ratings)->required()->check(CLI::ExistingFile);

  // report
  auto* report = app.add_subcommand("report", "Run the whole pipeline, or verify a bundle");
  std::string report_config, verify_dir;
  auto* rc = report->add_option("--config", report_config)->check(CLI::ExistingFile);
  auto* rv = report->add_option("--verify", verify_dir, "Bundle directory to check")
                 ->check(CLI::ExistingDirectory);
  rc->excludes(rv);
  report->add_option("--jobs", jobs, "Parallel tasks")->check(CLI::PositiveNumber);

  // serve
  auto* serve = app.add_subcommand("serve", "Serve annotation sessions over HTTP");
  std::string sessions_file, data_dir = "annotations", host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--sessions", sessions_file, "Session list (JSON)")
      ->required()->check(CLI::ExistingFile);
  serve->add_option("--data-dir", data_dir, "Directory holding judgments.log");
  serve->add_option("--host", host);
  serve->add_option("--port", port, "0 picks a free port");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::Success&) {
    out << "kgbench 0.1.0\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "kgbench: " << e.what() << '\n';
    return 2;
  }

  auto usage = [&](const std::string& message) {
    err << "kgbench: " << message << '\n';
    return 2;
  };

  try {
    if (*ingest) {
      const ExtractionConfig config =
          ingest_config.empty() ? ExtractionConfig{} : ExtractionConfig::load(ingest_config);
      LoadStats stats;
      const std::string id = ingest_id.empty()
                                 ? std::filesystem::path(ingest_input).stem().string()
                                 : ingest_id;
      const KnowledgeGraph g = load_graph(
          ingest_input, id, config, ingest_lenient ? ParseMode::kLenient : ParseMode::kStrict,
          &stats);
      json conflicts = json::array();
      for (const auto& c : g.conflicts()) conflicts.push_back(c.iri);
      const json doc = {{"id", g.id()},
                        {"triples", g.triple_count()},
                        {"entities", g.size()},
                        {"class", g.count(EntityKind::kClass)},
                        {"property", g.count(EntityKind::kProperty)},
                        {"instance", g.count(EntityKind::kInstance)},
                        {"skipped_lines", stats.skipped_lines},
                        {"compressed", stats.compressed},
                        {"kind_conflicts", std::move(conflicts)}};
      if (ingest_out.empty()) {
        out << doc.dump(2) << '\n';
      } else {
        std::ofstream f(ingest_out);
        f << doc.dump(2) << '\n';
        if (!f) throw StorageError("cannot write " + ingest_out);
      }
      return 0;
    }

    if (*match) {
      const ExtractionConfig config =
          match_config.empty() ? ExtractionConfig{} : ExtractionConfig::load(match_config);
      const ParseMode mode = match_lenient ? ParseMode::kLenient : ParseMode::kStrict;
      const KnowledgeGraph s = load_graph(
          match_source, std::filesystem::path(match_source).stem().string(), config, mode);
      const KnowledgeGraph t = load_graph(
          match_target, std::filesystem::path(match_target).stem().string(), config, mode);
      const Alignment a = match_by_label(s, t, {alt_labels, unique_only});
      write_alignment(match_out, a);
      out << a.size() << " correspondences written to " << match_out << '\n';
      return 0;
    }

    if (*extract) {
      if (pages_file.empty() == crowd_file.empty()) {
        return usage("extract-gold needs exactly one of --pages or --crowd");
      }
      std::map<WikiPair, GoldStandard> gold;
      if (!pages_file.empty()) {
        if (target_wikis.empty()) return usage("--pages needs at least one --target-wiki");
        const auto pages = load_page_dump(pages_file);
        const auto extraction = extract_link_candidates(
            pages, std::set<std::string>(target_wikis.begin(), target_wikis.end()));
        for (const auto& d : extraction.diagnostics) {
          err << "unparseable links: " << d.page.wiki << ':' << d.page.title << ' '
              << d.unparseable_links << '\n';
        }
        MapRedirectResolver resolver;
        resolver.add_pages(pages);
        for (const auto& r : redirect_files) {
          const auto [wiki, file] = key_value(r, "--redirects");
          if (!std::filesystem::exists(file)) return usage("file not found: " + file);
          resolver.load_tsv(wiki, file);
        }
        const auto resolved = resolve_redirects(extraction.links, resolver, max_depth);
        for (const auto& d : resolved.dropped) {
          err << "dropped " << d.link.source.title << " -> " << d.link.target.wiki << ':'
              << d.link.target.title << " (" << d.reason << ")\n";
        }
        IriScheme iris;
        for (const auto& b : bases) {
          const auto [wiki, base] = key_value(b, "--base");
          iris.set_base(wiki, base);
        }
        gold = enforce_functional_injective(resolved.links, iris);
      } else {
        const auto tasks = load_crowd_tasks(crowd_file);
        auto aggregate = aggregate_crowd(tasks);
        for (const auto& id : aggregate.rejected) err << "rejected task " << id << '\n';
        apply_triangles(aggregate.gold, close_triangles(aggregate.gold));
        gold = std::move(aggregate.gold);
      }
      write_gold_files(gold_dir, gold, out);
      return 0;
    }

    if (*evaluate) {
      if (!eval_config.empty()) {
        RunConfig config = RunConfig::load(eval_config);
        if (!eval_out.empty()) config.output = eval_out;
        run_pipeline(config, jobs);
        out << "report bundle written to " << config.output.string() << '\n';
        return 0;
      }
      if (eval_alignment.empty() || eval_gold.empty() || eval_graphs.size() != 2 ||
          eval_out.empty()) {
        return usage("evaluate needs --config, or --alignment, --gold, --graphs and --out");
      }
      const auto sem = *parse_semantics(semantics);
      const KnowledgeGraph s =
          load_graph(eval_graphs[0], std::filesystem::path(eval_graphs[0]).stem().string());
      const KnowledgeGraph t =
          load_graph(eval_graphs[1], std::filesystem::path(eval_graphs[1]).stem().string());
      std::optional<std::filesystem::path> negatives;
      if (!eval_negatives.empty()) negatives = eval_negatives;
      const GoldStandard gold = load_gold(eval_gold, negatives, sem == Semantics::k2019);
      auto parsed = parse_alignment(eval_alignment);
      if (parsed.duplicates) err << parsed.duplicates << " duplicate cells dropped\n";
      const std::string task = eval_task.empty() ? s.id() + "-" + t.id() : eval_task;
      EvaluationSettings settings{
          sem, fp_side == "both" ? FalsePositiveSide::kBoth : FalsePositiveSide::kSourceOnly};
      const auto cells =
          evaluate_task(eval_matcher, task, parsed.alignment, gold, s, t, settings);
      const std::vector<std::pair<std::string, std::string>> tasks{{eval_matcher, task}};
      const json aggregates = build_aggregates(summarize(cells, tasks));
      json inputs = json::object();
      for (const auto& p : {eval_alignment, eval_gold, eval_graphs[0], eval_graphs[1]}) {
        inputs[p] = sha256_file(p);
      }
      const json manifest = {{"tool", "kgbench"},
                             {"version", "0.1.0"},
                             {"created", utc_timestamp()},
                             {"semantics", semantics},
                             {"fp_side", fp_side},
                             {"inputs", std::move(inputs)}};
      emit_dashboard(eval_out, cells, aggregates, manifest);
      const auto& overall = aggregates["tasks"][0]["overall"];
      out << "tp=" << overall["tp"] << " fp=" << overall["fp"] << " fn=" << overall["fn"]
          << " ignored=" << overall["ignored"] << " P=" << overall["Prec."].get<double>()
          << " R=" << overall["Rec."].get<double>() << " F=" << overall["F-m."].get<double>()
          << '\n';
      return 0;
    }

    if (*arity) {
      const auto parsed = parse_alignment(arity_alignment);
      const auto analysis = classify_arity(parsed.alignment);
      for (ArityClass c : kAllArities) out << to_string(c) << '\t' << analysis[c] << '\n';
      return 0;
    }

    if (*sample_cmd) {
      const auto parsed = parse_alignment(sample_alignment);
      const std::string task =
          sample_task.empty()
              ? parsed.alignment.source_graph + "-" + parsed.alignment.target_graph
              : sample_task;
      const auto items = sample(parsed.alignment, sample_n, seed, sample_matcher, task);
      write_sample(sample_out, items);
      out << items.size() << " items written to " << sample_out << '\n';
      return 0;
    }

    if (*kappa) {
      const auto result = fleiss_kappa(RatingsMatrix::load(ratings));
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6f", result.kappa);
      out << buf << '\t' << to_string(result.band) << '\n';
      return 0;
    }

    if (*report) {
      if (!verify_dir.empty()) {
        const auto problems = verify_bundle(verify_dir);
        for (const auto& p : problems) err << p << '\n';
        out << (problems.empty() ? "bundle verified\n" : "bundle inconsistent\n");
        return problems.empty() ? 0 : 1;
      }
      if (report_config.empty()) return usage("report needs --config or --verify");
      const RunConfig config = RunConfig::load(report_config);
      run_pipeline(config, jobs);
      out << "report bundle written to " << config.output.string() << '\n';
      return 0;
    }

    if (*serve) {
      AnnotationService service(data_dir);
      for (auto& spec : load_session_specs(sessions_file)) service.add_session(std::move(spec));
      httplib::Server server;
      register_routes(server, service);
      int bound = port;
      if (port == 0) {
        bound = server.bind_to_any_port(host);
      } else if (!server.bind_to_port(host, port)) {
        bound = -1;
      }
      if (bound < 0) {
        err << "kgbench: cannot bind " << host << ':' << port << '\n';
        return 1;
      }
      out << "listening on " << host << ':' << bound << std::endl;
      server.listen_after_bind();
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    err << "kgbench: " << e.what() << '\n';
    return 2;
  } catch (const NotFound& e) {
    err << "kgbench: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "kgbench: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace kgbench
