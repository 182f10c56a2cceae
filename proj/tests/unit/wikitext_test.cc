#include "kgbench/wikitext.h"

#include <gtest/gtest.h>

namespace kgbench {
namespace {

const std::set<std::string> kBeta{"memorybeta"};

TEST(SplitSections, LeadAndHeadings) {
  const auto s = split_sections("intro\n== Biography ==\nbody\n=== External links ===\n* x\n");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].header, "");
  EXPECT_EQ(s[0].body, "intro\n");
  EXPECT_EQ(s[1].header, "Biography");
  EXPECT_EQ(s[2].header, "External links");
  EXPECT_EQ(s[2].body, "* x\n");
}

TEST(SplitSections, UnbalancedHeadingUsesShorterRun) {
  const auto s = split_sections("== Links ===\nx");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].header, "Links =");
}

TEST(SplitSections, NotHeadings) {
  const auto s = split_sections("a == b ==\n====\n");
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].header, "");
}

TEST(CanonicalTitle, Rules) {
  EXPECT_EQ(canonical_title("kathryn_Janeway"), "Kathryn Janeway");
  EXPECT_EQ(canonical_title("  Data_(android)#Early_life "), "Data (android)");
  EXPECT_EQ(canonical_title("Odo%20%28mirror%29"), "Odo (mirror)");
  EXPECT_EQ(canonical_title("élan"), "élan");  // only ASCII first letters change
  EXPECT_EQ(canonical_title(canonical_title("x__y%5F")), canonical_title("x__y%5F"));
}

TEST(ScanInterwikiLinks, WikilinkForms) {
  const auto scan = scan_interwiki_links(
      "[[memorybeta:Worf]] [[MemoryBeta:Spock|the Vulcan]] [[w:c:memorybeta:Odo|Odo]] "
      "[[:memorybeta:Quark]] [[wikipedia:Worf]] [[Worf]]",
      kBeta);
  ASSERT_EQ(scan.links.size(), 4u);
  EXPECT_EQ(scan.links[0].title, "Worf");
  EXPECT_EQ(scan.links[1].wiki, "memorybeta");
  EXPECT_EQ(scan.links[1].title, "Spock");
  EXPECT_EQ(scan.links[2].title, "Odo");
  EXPECT_EQ(scan.links[3].title, "Quark");
  EXPECT_EQ(scan.unparseable, 0u);
}

TEST(ScanInterwikiLinks, ExternalUrlForms) {
  const auto scan = scan_interwiki_links(
      "[https://memorybeta.fandom.com/wiki/Data_(android) Data] "
      "[http://en.memorybeta.wikia.com/wiki/Worf?action=view Worf] "
      "[https://other.fandom.com/wiki/X X] [https://example.org/wiki/Y Y]",
      kBeta);
  ASSERT_EQ(scan.links.size(), 2u);
  EXPECT_EQ(scan.links[0].title, "Data (android)");
  EXPECT_EQ(scan.links[1].title, "Worf");
}

TEST(ScanInterwikiLinks, UnparseableTokensCounted) {
  const auto scan = scan_interwiki_links(
      "[[memorybeta:]]\n[[memorybeta:Open\n[https://memorybeta.fandom.com/ home]\n"
      "[[wikipedia:]]",
      kBeta);
  EXPECT_TRUE(scan.links.empty());
  EXPECT_EQ(scan.unparseable, 3u);
}

}  // namespace
}  // namespace kgbench
