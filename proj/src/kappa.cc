#include "kgbench/kappa.h"

#include <fstream>
#include <sstream>
#include <string>

namespace kgbench {

RatingsMatrix::RatingsMatrix(std::vector<std::vector<std::size_t>> counts)
    : counts_(std::move(counts)) {
  if (counts_.empty()) throw InvalidArgument("ratings matrix has no subjects");
  const std::size_t k = counts_.front().size();
  if (k < 2) throw InvalidArgument("ratings matrix needs at least 2 categories");
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i].size() != k) {
      throw InvalidArgument("row " + std::to_string(i + 1) + " has " +
                            std::to_string(counts_[i].size()) + " categories, expected " +
                            std::to_string(k));
    }
    std::size_t sum = 0;
    for (auto c : counts_[i]) sum += c;
    if (i == 0) raters_ = sum;
    if (sum != raters_) {
      throw InvalidArgument("row " + std::to_string(i + 1) + " sums to " +
                            std::to_string(sum) + ", expected " + std::to_string(raters_));
    }
  }
  if (raters_ < 2) throw InvalidArgument("ratings matrix needs at least 2 raters");
}

RatingsMatrix RatingsMatrix::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open ratings " + path.string());
  std::vector<std::vector<std::size_t>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::vector<std::size_t> row;
    std::string field;
    while (fields >> field) {
      std::size_t pos = 0;
      unsigned long value = 0;
      try {
        value = std::stoul(field, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != field.size() || field[0] == '-') {
        throw ParseError("rating counts must be non-negative integers", line_no, line);
      }
      row.push_back(value);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  return RatingsMatrix(std::move(rows));
}

std::string_view to_string(AgreementBand band) {
  switch (band) {
    case AgreementBand::kPoor: return "poor";
    case AgreementBand::kSlight: return "slight";
    case AgreementBand::kFair: return "fair";
    case AgreementBand::kModerate: return "moderate";
    case AgreementBand::kSubstantial: return "substantial";
    case AgreementBand::kAlmostPerfect: return "almost perfect";
  }
  return "poor";
}

AgreementBand agreement_band(double kappa) {
  if (kappa <= 0.0) return AgreementBand::kPoor;
  if (kappa <= 0.20) return AgreementBand::kSlight;
  if (kappa <= 0.40) return AgreementBand::kFair;
  if (kappa <= 0.60) return AgreementBand::kModerate;
  if (kappa <= 0.80) return AgreementBand::kSubstantial;
  return AgreementBand::kAlmostPerfect;
}

KappaResult fleiss_kappa(const RatingsMatrix& m) {
  const std::size_t N = m.subjects();
  const std::size_t k = m.categories();
  const auto n = static_cast<double>(m.raters());

  double p_bar = 0.0;
  std::vector<double> column(k, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    double squares = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const auto c = static_cast<double>(m.at(i, j));
      squares += c * c;
      column[j] += c;
    }
    p_bar += (squares - n) / (n * (n - 1.0));
  }
  p_bar /= static_cast<double>(N);

  double p_e = 0.0;
  for (double c : column) {
    const double p = c / (static_cast<double>(N) * n);
    p_e += p * p;
  }
  if (p_e >= 1.0) throw DegenerateKappa();
  const double kappa = (p_bar - p_e) / (1.0 - p_e);
  return {kappa, agreement_band(kappa)};
}

}  // namespace kgbench
