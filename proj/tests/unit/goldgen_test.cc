#include "kgbench/goldgen.h"

#include <gtest/gtest.h>

#include <random>

#include "fixtures.h"
#include "kgbench/error.h"
#include "kgbench/eval.h"

namespace kgbench {
namespace {

const std::filesystem::path kData = KGBENCH_TEST_DATA;

InterwikiLink link(const std::string& s, const std::string& t, const std::string& sw = "a",
                   const std::string& tw = "b") {
  return {{sw, s}, {tw, t}, "External links"};
}

TEST(GoldFixture, TwelvePageDumpYieldsThreePairs) {
  const auto pages = load_page_dump(kData / "goldgen" / "pages.jsonl");
  ASSERT_EQ(pages.size(), 12u);
  const auto extraction = extract_link_candidates(pages, {"memorybeta"});
  ASSERT_EQ(extraction.diagnostics.size(), 1u);
  EXPECT_EQ(extraction.diagnostics[0].page.title, "Quark");
  MapRedirectResolver resolver;
  resolver.add_pages(pages);
  EXPECT_EQ(resolver.size(), 4u);
  const auto resolved = resolve_redirects(extraction.links, resolver);
  ASSERT_EQ(resolved.dropped.size(), 1u);
  EXPECT_EQ(resolved.dropped[0].link.source.title, "Worf");
  const auto gold = enforce_functional_injective(resolved.links, IriScheme());
  ASSERT_EQ(gold.size(), 1u);
  const GoldStandard& g = gold.at({"memoryalpha", "memorybeta"});
  EXPECT_NO_THROW(g.validate());

  const auto expected = parse_alignment(kData / "goldgen" / "expected_gold.tsv").alignment;
  ASSERT_EQ(g.positives.size(), 3u);
  ASSERT_EQ(expected.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(g.positives[i].source, expected.cells[i].source);
    EXPECT_EQ(g.positives[i].target, expected.cells[i].target);
  }
}

TEST(LinkSections, HeaderMatch) {
  EXPECT_TRUE(is_link_section("External links"));
  EXPECT_TRUE(is_link_section("Weblinks"));
  EXPECT_TRUE(is_link_section("LINKS"));
  EXPECT_FALSE(is_link_section("Appearances"));
}

TEST(LinkSections, OwnWikiLinksIgnored) {
  std::vector<WikiPage> pages = {
      {"memorybeta", "Worf", std::nullopt, {{"Links", "[[memorybeta:Worf]]"}}}};
  EXPECT_TRUE(extract_link_candidates(pages, {"memorybeta"}).links.empty());
}

TEST(ResolveRedirects, ChainCycleAndDepth) {
  MapRedirectResolver r;
  r.add("b", "A", "B");
  r.add("b", "B", "C");
  r.add("b", "X", "Y");
  r.add("b", "Y", "X");
  const std::vector<InterwikiLink> links = {link("1", "a"), link("2", "X"), link("3", "Z")};
  const auto out = resolve_redirects(links, r);
  ASSERT_EQ(out.links.size(), 2u);
  EXPECT_EQ(out.links[0].target.title, "C");
  EXPECT_EQ(out.links[1].target.title, "Z");
  ASSERT_EQ(out.dropped.size(), 1u);
  EXPECT_NE(out.dropped[0].reason.find("cycle"), std::string::npos);
  EXPECT_EQ(resolve_redirects(links, r, 1).dropped.size(), 2u);
}

TEST(ResolveRedirects, LoadTsv) {
  testing::TempDir dir;
  testing::write_text(dir / "r.tsv", "# from to\nCatarina\tJaneway\n");
  MapRedirectResolver r;
  r.load_tsv("b", dir / "r.tsv");
  EXPECT_EQ(r.lookup("b", "catarina"), "Janeway");
  testing::write_text(dir / "bad.tsv", "only-one-field\n");
  EXPECT_THROW(r.load_tsv("b", dir / "bad.tsv"), ParseError);
}

TEST(FunctionalInjective, DropsBothViolations) {
  const std::vector<InterwikiLink> links = {link("S", "T1"), link("S", "T2"), link("P", "Q"),
                                            link("P2", "Q"), link("K", "K"), link("K", "K")};
  const auto gold = enforce_functional_injective(links, IriScheme("http://{wiki}"));
  const auto& g = gold.at({"a", "b"});
  ASSERT_EQ(g.positives.size(), 1u);
  EXPECT_EQ(g.positives[0].source.str(), "http://a/K");
  EXPECT_TRUE(g.one_to_one);
}

TEST(FunctionalInjective, OutputAlwaysOneToOne) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> node(0, 15), size(0, 60);
  for (int round = 0; round < 500; ++round) {
    std::vector<InterwikiLink> links;
    for (int i = size(rng); i > 0; --i) {
      links.push_back(link("s" + std::to_string(node(rng)), "t" + std::to_string(node(rng))));
    }
    for (const auto& [pair, g] : enforce_functional_injective(links, IriScheme())) {
      ASSERT_NO_THROW(g.validate());
      Alignment a{pair.first, pair.second, g.positives};
      const auto arity = classify_arity(a);
      ASSERT_EQ(arity[ArityClass::kOneOne], a.size());
    }
  }
}

TEST(IriScheme, BasesAndEscaping) {
  IriScheme iris;
  EXPECT_EQ(iris.page_iri("memorybeta", "kathryn janeway").str(),
            "http://dbkwik.webdatacommons.org/memorybeta/resource/Kathryn_janeway");
  iris.set_base("x", "http://x.org/r/");
  EXPECT_EQ(iris.page_iri("x", "A \"quoted\" {b}").str(), "http://x.org/r/A_%22quoted%22_%7Bb%7D");
}

TEST(PageDump, RejectsBadRecords) {
  testing::TempDir dir;
  testing::write_text(dir / "a.jsonl", "{\"wiki\":\"w\",\"title\":\"T\"}\n{not json\n");
  try {
    load_page_dump(dir / "a.jsonl");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  testing::write_text(dir / "b.jsonl",
                      "{\"wiki\":\"w\",\"title\":\"t\"}\n{\"wiki\":\"w\",\"title\":\"T\"}\n");
  EXPECT_THROW(load_page_dump(dir / "b.jsonl"), ParseError);
  testing::write_text(dir / "c.jsonl",
                      "{\"wiki\":\"w\",\"title\":\"T\",\"redirect\":\"U\",\"sections\":[{}]}\n");
  EXPECT_THROW(load_page_dump(dir / "c.jsonl"), ParseError);
  EXPECT_THROW(load_page_dump(dir / "missing.jsonl"), NotFound);
}

CrowdTask crowd(std::string id, std::string source, std::vector<std::string> votes,
                std::string target_wiki = "b") {
  CrowdTask t{std::move(id), "a", Iri(std::move(source)), std::move(target_wiki), {}};
  for (const auto& v : votes) {
    if (v.empty()) t.responses.emplace_back(std::nullopt);
    else t.responses.emplace_back(Iri(v));
  }
  return t;
}

TEST(CrowdAggregation, MajorityRules) {
  const std::vector<CrowdTask> tasks = {
      crowd("1", "http://a/x", {"http://b/x", "http://b/x", "http://b/x", "", ""}),
      crowd("2", "http://a/y", {"", "", "", "http://b/y", "http://b/z"}),
      crowd("3", "http://a/z", {"http://b/1", "http://b/1", "http://b/2", "http://b/2", ""}),
      crowd("4", "http://a/w", {"http://b/w", "http://b/w", "http://b/w", "http://b/w"})};
  const auto agg = aggregate_crowd(tasks);
  EXPECT_EQ(agg.rejected, std::vector<std::string>{"4"});
  const auto& g = agg.gold.at({"a", "b"});
  ASSERT_EQ(g.positives.size(), 1u);
  EXPECT_EQ(g.positives[0].target.str(), "http://b/x");
  ASSERT_EQ(g.negatives.size(), 1u);
  EXPECT_EQ(g.negatives[0].entity.str(), "http://a/y");
  EXPECT_EQ(g.negatives[0].counterpart_graph, "b");
  EXPECT_FALSE(g.one_to_one);
}

TEST(CrowdAggregation, ConflictingVerdictsDropped) {
  const std::vector<CrowdTask> tasks = {
      crowd("1", "http://a/x", {"http://b/x", "http://b/x", "http://b/x", "", ""}),
      crowd("2", "http://a/x", {"", "", "", "", "http://b/x"})};
  const auto& g = aggregate_crowd(tasks).gold.at({"a", "b"});
  EXPECT_TRUE(g.positives.empty());
  EXPECT_TRUE(g.negatives.empty());
}

TEST(CrowdAggregation, LoadTsv) {
  testing::TempDir dir;
  testing::write_text(dir / "c.tsv",
                      "t1\ta\thttp://a/x\tb\thttp://b/x\thttp://b/x\thttp://b/x\tno-match\t"
                      "no-match\nt2\ta\thttp://a/y\tb\tno-match\n");
  const auto tasks = load_crowd_tasks(dir / "c.tsv");
  ASSERT_EQ(tasks.size(), 2u);
  EXPECT_EQ(tasks[0].responses.size(), 5u);
  EXPECT_FALSE(tasks[0].responses[3].has_value());
  EXPECT_EQ(aggregate_crowd(tasks).rejected, std::vector<std::string>{"t2"});
}

TEST(Triangles, ClosureAddsDerivedPairs) {
  std::map<WikiPair, GoldStandard> gold;
  gold[{"a", "b"}].positives = {Correspondence(Iri("http://a/1"), Iri("http://b/1"))};
  gold[{"a", "c"}].positives = {Correspondence(Iri("http://a/1"), Iri("http://c/1"))};
  const auto closure = close_triangles(gold);
  ASSERT_EQ(closure.size(), 1u);
  const auto& cells = closure.at({"b", "c"});
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0].source.str(), "http://b/1");
  EXPECT_EQ(cells[0].target.str(), "http://c/1");
  apply_triangles(gold, closure);
  EXPECT_EQ(gold.at({"b", "c"}).derived.size(), 1u);
  apply_triangles(gold, closure);  // idempotent
  EXPECT_EQ(gold.at({"b", "c"}).positives.size(), 1u);
  EXPECT_EQ(gold.at({"b", "c"}).derived.size(), 1u);
}

TEST(LoadGold, PositivesAndNegatives) {
  testing::TempDir dir;
  testing::write_text(dir / "g.tsv", "http://a/2\thttp://b/2\nhttp://a/1\thttp://b/1\n");
  testing::write_text(dir / "n.tsv", "http://a/3\tb\tnegative\nhttp://a/3\tb\n");
  const auto g = load_gold(dir / "g.tsv", dir / "n.tsv", true);
  ASSERT_EQ(g.positives.size(), 2u);
  EXPECT_EQ(g.positives[0].source.str(), "http://a/1");
  EXPECT_EQ(g.negatives.size(), 1u);
  testing::write_text(dir / "bad.tsv", "http://a/1\thttp://b/1\nhttp://a/1\thttp://b/2\n");
  EXPECT_THROW(load_gold(dir / "bad.tsv", std::nullopt, true), InvalidArgument);
  EXPECT_NO_THROW(load_gold(dir / "bad.tsv", std::nullopt, false));

  write_negatives(dir / "out.tsv", g.negatives);
  EXPECT_EQ(testing::read_text(dir / "out.tsv"), "http://a/3\tb\tnegative\n");
}

}  // namespace
}  // namespace kgbench
