#include "kgbench/graph.h"

#include <gtest/gtest.h>

#include <random>

#include "fixtures.h"
#include "kgbench/error.h"

namespace kgbench {
namespace {

const Iri kType{std::string(vocab::kRdfType)};
const Iri kLabel{std::string(vocab::kRdfsLabel)};
const Iri kAlt{std::string(vocab::kSkosAltLabel)};

EntityKind kind_of(const KnowledgeGraph& g, std::string_view iri) {
  const auto id = g.find(iri);
  EXPECT_TRUE(id) << iri;
  return g.entity(*id).kind;
}

TEST(BuildGraph, RdfPropertyMarksProperty) {
  const std::vector<Triple> triples = {
      {Iri("http://x/p"), kType, Iri(std::string(vocab::kRdfProperty))}};
  const auto g = build_graph("g", triples);
  EXPECT_EQ(kind_of(g, "http://x/p"), EntityKind::kProperty);
  EXPECT_EQ(g.size(), 1u);  // the marker itself is not an entity
}

TEST(BuildGraph, TypingObjectBecomesClass) {
  const std::vector<Triple> triples = {{Iri("http://x/a"), kType, Iri("http://x/C")}};
  const auto g = build_graph("g", triples);
  EXPECT_EQ(kind_of(g, "http://x/C"), EntityKind::kClass);
  EXPECT_EQ(kind_of(g, "http://x/a"), EntityKind::kInstance);
}

TEST(BuildGraph, FallbackLabelFromLocalName) {
  const std::vector<Triple> triples = {
      {Iri("http://x/Kathryn_Janeway"), Iri("http://x/rank"), Literal("Captain")}};
  const auto g = build_graph("g", triples);
  const Entity& e = g.entity(*g.find("http://x/Kathryn_Janeway"));
  ASSERT_EQ(e.labels.size(), 1u);
  EXPECT_EQ(e.labels[0], "Kathryn Janeway");
  EXPECT_TRUE(e.fallback_label);
  EXPECT_EQ(local_name_label("http://x/onto#has_part"), "has part");
}

TEST(BuildGraph, LabelsAndAltLabelsCollected) {
  const std::vector<Triple> triples = {
      {Iri("http://x/a"), kLabel, Literal("Kathryn Janeway", "en")},
      {Iri("http://x/a"), kAlt, Literal("Catarina")},
      {Iri("http://x/a"), kAlt, Literal("Catarina")},
      {Iri("http://x/a"), kAlt, Literal("Janeway")}};
  const auto g = build_graph("g", triples);
  const Entity& e = g.entity(*g.find("http://x/a"));
  EXPECT_EQ(e.labels, std::vector<std::string>{"Kathryn Janeway"});
  EXPECT_EQ(e.alt_labels, (std::vector<std::string>{"Catarina", "Janeway"}));
  EXPECT_FALSE(e.fallback_label);
}

TEST(BuildGraph, ConflictResolvedPropertyOverClass) {
  const std::vector<Triple> triples = {
      {Iri("http://x/z"), kType, Iri(std::string(vocab::kOwlClass))},
      {Iri("http://x/z"), kType, Iri(std::string(vocab::kRdfProperty))}};
  const auto g = build_graph("g", triples);
  EXPECT_EQ(kind_of(g, "http://x/z"), EntityKind::kProperty);
  ASSERT_EQ(g.conflicts().size(), 1u);
  EXPECT_EQ(g.conflicts()[0].iri, "http://x/z");
}

TEST(BuildGraph, ExplicitPropertyAsTypingObjectStaysProperty) {
  const std::vector<Triple> triples = {
      {Iri("http://x/p"), kType, Iri(std::string(vocab::kRdfProperty))},
      {Iri("http://x/a"), kType, Iri("http://x/p")}};
  const auto g = build_graph("g", triples);
  EXPECT_EQ(kind_of(g, "http://x/p"), EntityKind::kProperty);
}

TEST(BuildGraph, FactsCappedPerEntity) {
  std::vector<Triple> triples;
  for (int i = 0; i < 40; ++i) {
    triples.push_back({Iri("http://x/a"), Iri("http://x/p" + std::to_string(i)), Literal("v")});
  }
  const auto g = build_graph("g", triples);
  EXPECT_EQ(g.entity(*g.find("http://x/a")).facts.size(), 25u);
  EXPECT_EQ(g.triple_count(), 40u);
}

TEST(BuildGraph, CustomConfigPredicates) {
  testing::TempDir dir;
  testing::write_text(dir / "x.cfg",
                      "# custom\nlabel_predicate = http://x/name\n"
                      "class_marker = http://x/Category\nmax_facts_per_entity = 2\n");
  const auto config = ExtractionConfig::load(dir / "x.cfg");
  EXPECT_EQ(config.label_predicate, "http://x/name");
  EXPECT_EQ(config.class_markers, std::vector<std::string>{"http://x/Category"});
  const std::vector<Triple> triples = {
      {Iri("http://x/a"), Iri("http://x/name"), Literal("Alpha")},
      {Iri("http://x/k"), kType, Iri("http://x/Category")}};
  const auto g = build_graph("g", triples, config);
  EXPECT_EQ(g.entity(*g.find("http://x/a")).labels, std::vector<std::string>{"Alpha"});
  EXPECT_EQ(kind_of(g, "http://x/k"), EntityKind::kClass);
}

TEST(BuildGraph, ConfigRejectsUnknownKey) {
  testing::TempDir dir;
  testing::write_text(dir / "x.cfg", "colour = blue\n");
  EXPECT_THROW(ExtractionConfig::load(dir / "x.cfg"), ParseError);
}

TEST(LoadGraph, StreamsFileAndCountsSkippedLines) {
  testing::TempDir dir;
  testing::write_text(dir / "g.nt",
                      "<http://x/a> <http://www.w3.org/2000/01/rdf-schema#label> \"A\" .\n"
                      "broken line\n");
  LoadStats stats;
  const auto g = load_graph(dir / "g.nt", "g", {}, ParseMode::kLenient, &stats);
  EXPECT_EQ(g.size(), 1u);
  EXPECT_EQ(stats.skipped_lines, 1u);
  EXPECT_THROW(load_graph(dir / "g.nt", "g"), ParseError);
}

// Partition and typing-object invariants over random triple sets.
TEST(BuildGraph, KindPartitionProperty) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> node(0, 30), shape(0, 5);
  for (int round = 0; round < 200; ++round) {
    std::vector<Triple> triples;
    std::set<std::string> typing_objects, typed_property;
    for (int i = 0; i < 60; ++i) {
      const Iri s("http://x/n" + std::to_string(node(rng)));
      const Iri o("http://x/n" + std::to_string(node(rng)));
      switch (shape(rng)) {
        case 0:
          triples.push_back({s, kType, o});
          typing_objects.insert(o.str());
          break;
        case 1:
          triples.push_back({s, kType, Iri(std::string(vocab::kRdfProperty))});
          typed_property.insert(s.str());
          break;
        case 2: triples.push_back({s, kType, Iri(std::string(vocab::kOwlClass))}); break;
        case 3: triples.push_back({s, kLabel, Literal("L" + std::to_string(node(rng)))}); break;
        default: triples.push_back({s, Iri("http://x/rel"), o});
      }
    }
    const auto g = build_graph("g", triples);
    std::size_t sum = 0;
    for (EntityKind k : kAllKinds) sum += g.count(k);
    ASSERT_EQ(sum, g.size());
    for (const auto& iri : typing_objects) {
      const auto expected =
          typed_property.contains(iri) ? EntityKind::kProperty : EntityKind::kClass;
      ASSERT_EQ(kind_of(g, iri), expected) << iri;
    }
    for (const Entity& e : g.entities()) ASSERT_FALSE(e.labels.empty());
  }
}

}  // namespace
}  // namespace kgbench
