#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "kgbench/error.h"
#include "kgbench/eval.h"
#include "kgbench/goldgen.h"
#include "kgbench/kappa.h"
#include "kgbench/matchers.h"
#include "kgbench/pipeline.h"
#include "kgbench/sampling.h"

namespace py = pybind11;
using namespace kgbench;

namespace {

using Pair = std::pair<std::string, std::string>;

Alignment to_alignment(const std::vector<Pair>& pairs) {
  Alignment a;
  for (const auto& [s, t] : pairs) a.cells.emplace_back(Iri(s), Iri(t));
  return a;
}

std::vector<Pair> to_pairs(const Alignment& a) {
  std::vector<Pair> out;
  out.reserve(a.size());
  for (const auto& c : a.cells) out.emplace_back(c.source.str(), c.target.str());
  return out;
}

py::dict counts_dict(const Counts& c) {
  py::dict d;
  d["tp"] = c.tp;
  d["fp"] = c.fp;
  d["fn"] = c.fn;
  d["ignored"] = c.ignored;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Label matching, scoring and sampling for knowledge graph alignments.";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base);
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base);
  py::register_exception<NotFound>(m, "NotFound", base);
  py::register_exception<StorageError>(m, "StorageError", base);

  m.def("normalize_label", [](std::string_view s) { return normalize_label(s).str(); },
        py::arg("label"));

  py::class_<KnowledgeGraph>(m, "Graph")
      .def_property_readonly("id", &KnowledgeGraph::id)
      .def("__len__", &KnowledgeGraph::size)
      .def("count", [](const KnowledgeGraph& g, std::string_view kind) {
        const auto k = parse_entity_kind(kind);
        if (!k) throw InvalidArgument("unknown entity kind: " + std::string(kind));
        return g.count(*k);
      })
      .def_property_readonly("triples", &KnowledgeGraph::triple_count);

  m.def("load_graph",
        [](const std::filesystem::path& path, std::string id) {
          py::gil_scoped_release release;
          return load_graph(path, std::move(id));
        },
        py::arg("path"), py::arg("graph_id"));

  m.def("match",
        [](const KnowledgeGraph& s, const KnowledgeGraph& t, bool alt, bool unique) {
          py::gil_scoped_release release;
          return to_pairs(match_by_label(s, t, {alt, unique}));
        },
        py::arg("source"), py::arg("target"), py::arg("use_alt_labels") = false,
        py::arg("unique_only") = false);

  m.def("parse_alignment", [](const std::filesystem::path& path) {
    std::vector<std::tuple<std::string, std::string, double>> out;
    for (const auto& c : parse_alignment(path).alignment.cells) {
      out.emplace_back(c.source.str(), c.target.str(), c.confidence);
    }
    return out;
  });

  m.def("evaluate",
        [](const std::vector<Pair>& alignment, const std::vector<Pair>& gold,
           std::string_view fp_side) {
          GoldStandard g;
          g.positives = to_alignment(gold).cells;
          std::sort(g.positives.begin(), g.positives.end(), pair_less);
          g.one_to_one = true;
          FalsePositiveSide side;
          if (fp_side == "both") side = FalsePositiveSide::kBoth;
          else if (fp_side == "source") side = FalsePositiveSide::kSourceOnly;
          else throw InvalidArgument("fp_side must be 'both' or 'source'");
          const auto e = evaluate_partial_1to1(to_alignment(alignment), g, no_kinds(), side);
          const auto metrics = metrics_from_counts(e.counts.overall);
          py::dict d = counts_dict(e.counts.overall);
          py::list outcomes;
          for (Outcome o : e.outcomes) outcomes.append(std::string(to_string(o)));
          d["outcomes"] = outcomes;
          d["precision"] = metrics.precision;
          d["recall"] = metrics.recall;
          d["f_measure"] = metrics.f_measure;
          return d;
        },
        py::arg("alignment"), py::arg("gold"), py::arg("fp_side") = "both");

  m.def("classify_arity", [](const std::vector<Pair>& pairs) {
    std::vector<std::string> out;
    for (ArityClass a : classify_arity(to_alignment(pairs)).per_cell) {
      out.emplace_back(to_string(a));
    }
    return out;
  });

  m.def("max_error", &max_error, py::arg("n"), py::arg("confidence") = 0.95);
  m.def("wilson_interval", &wilson_interval, py::arg("successes"), py::arg("n"),
        py::arg("confidence") = 0.95);

  m.def("fleiss_kappa", [](std::vector<std::vector<std::size_t>> rows) {
    const auto r = fleiss_kappa(RatingsMatrix(std::move(rows)));
    return py::make_tuple(r.kappa, std::string(to_string(r.band)));
  });

  m.def("sample",
        [](const std::vector<Pair>& pairs, std::size_t n, std::uint64_t seed,
           std::string_view matcher, std::string_view task) {
          py::list out;
          for (const auto& item : sample(to_alignment(pairs), n, seed, matcher, task)) {
            py::dict d;
            d["id"] = item.id;
            d["source"] = item.correspondence.source.str();
            d["target"] = item.correspondence.target.str();
            d["matcher"] = item.matcher;
            d["task"] = item.task;
            out.append(d);
          }
          return out;
        },
        py::arg("pairs"), py::arg("n"), py::arg("seed"), py::arg("matcher") = "",
        py::arg("task") = "");

  // Same as the command-line tool; returns (exit code, stdout, stderr).
  m.def("run_cli", [](std::vector<std::string> args) {
    args.insert(args.begin(), "kgbench");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code;
    {
      py::gil_scoped_release release;
      code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  });
}
