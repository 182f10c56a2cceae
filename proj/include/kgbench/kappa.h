#pragma once

#include <cstddef>
#include <filesystem>
#include <string_view>
#include <vector>

#include "kgbench/error.h"

namespace kgbench {

// N subjects x k categories; counts[i][j] = raters who put subject i into
// category j. Every row sums to the same rater count n.
class RatingsMatrix {
 public:
  // Throws InvalidArgument unless N >= 1, k >= 2, n >= 2 and rows are equal-sum.
  explicit RatingsMatrix(std::vector<std::vector<std::size_t>> counts);

  // One subject per line, tab- or space-separated counts; '#' comments.
  static RatingsMatrix load(const std::filesystem::path& path);

  std::size_t subjects() const { return counts_.size(); }
  std::size_t raters() const { return raters_; }
  std::size_t categories() const { return counts_.front().size(); }
  std::size_t at(std::size_t subject, std::size_t category) const {
    return counts_[subject][category];
  }

 private:
  std::vector<std::vector<std::size_t>> counts_;
  std::size_t raters_ = 0;
};

// Landis & Koch scale.
enum class AgreementBand { kPoor, kSlight, kFair, kModerate, kSubstantial, kAlmostPerfect };

std::string_view to_string(AgreementBand band);
AgreementBand agreement_band(double kappa);

struct KappaResult {
  double kappa;
  AgreementBand band;
};

// Raised when expected agreement is 1 (a single category used throughout).
class DegenerateKappa : public Error {
 public:
  DegenerateKappa() : Error("degenerate: no category variance") {}
};

KappaResult fleiss_kappa(const RatingsMatrix& m);

}  // namespace kgbench
