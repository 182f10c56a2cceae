// Streaming memory probe: counts live heap bytes through a replaced global
// operator new so the peak during a parse can be compared across file sizes.
#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <new>

#include "fixtures.h"
#include "kgbench/rdf.h"

namespace {

std::atomic<std::size_t> g_live{0};
std::atomic<std::size_t> g_peak{0};

void* counted_alloc(std::size_t size) {
  void* p = std::malloc(size + 16);
  if (!p) throw std::bad_alloc();
  *static_cast<std::size_t*>(p) = size;
  const std::size_t now = g_live.fetch_add(size) + size;
  std::size_t peak = g_peak.load();
  while (now > peak && !g_peak.compare_exchange_weak(peak, now)) {
  }
  return static_cast<char*>(p) + 16;
}

void counted_free(void* p) noexcept {
  if (!p) return;
  char* base = static_cast<char*>(p) - 16;
  g_live.fetch_sub(*reinterpret_cast<std::size_t*>(base));
  std::free(base);
}

}  // namespace

void* operator new(std::size_t size) { return counted_alloc(size); }
void* operator new[](std::size_t size) { return counted_alloc(size); }
void operator delete(void* p) noexcept { counted_free(p); }
void operator delete[](void* p) noexcept { counted_free(p); }
void operator delete(void* p, std::size_t) noexcept { counted_free(p); }
void operator delete[](void* p, std::size_t) noexcept { counted_free(p); }

namespace kgbench {
namespace {

void write_lines(const std::filesystem::path& path, std::size_t n) {
  std::ofstream out(path);
  for (std::size_t i = 0; i < n; ++i) {
    out << "<http://x/e" << i << "> <http://www.w3.org/2000/01/rdf-schema#label> \"Entity "
        << i << "\"@en .\n";
  }
}

// Peak live heap bytes above the baseline while streaming the whole file.
std::size_t parse_peak(const std::filesystem::path& path, std::size_t* count) {
  const std::size_t baseline = g_live.load();
  g_peak.store(baseline);
  {
    auto reader = NTriplesReader::open(path, ParseMode::kStrict);
    std::size_t n = 0;
    while (reader.next()) ++n;
    *count = n;
  }
  return g_peak.load() - baseline;
}

TEST(NTriplesMemory, PeakIndependentOfLineCount) {
  testing::TempDir dir;
  write_lines(dir / "small.nt", 10'000);
  write_lines(dir / "large.nt", 1'000'000);
  std::size_t small_n = 0, large_n = 0;
  const std::size_t small_peak = parse_peak(dir / "small.nt", &small_n);
  const std::size_t large_peak = parse_peak(dir / "large.nt", &large_n);
  EXPECT_EQ(small_n, 10'000u);
  EXPECT_EQ(large_n, 1'000'000u);
  // Longer numbers in the large file make some lines a few bytes longer.
  EXPECT_LE(large_peak, small_peak + 1024) << "small " << small_peak << " large " << large_peak;
}

}  // namespace
}  // namespace kgbench
