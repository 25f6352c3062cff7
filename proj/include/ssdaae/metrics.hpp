#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ssdaae {

// Challenge ranking operating points.
inline constexpr std::array<double, 4> kSensitivityTargets{0.82, 0.89, 0.95, 0.99};

struct ScoredSet {
  std::vector<double> scores;  // predicted P(malignant)
  std::vector<int> labels;     // 1 = malignant, 0 = benign
  std::vector<std::string> ids;
  std::string split;
  std::string checkpoint;

  std::size_t size() const { return scores.size(); }
  std::size_t positives() const;
  std::size_t negatives() const { return size() - positives(); }
};

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  bool operator==(const Confusion&) const = default;
};

// Predicts malignant iff score >= threshold.
Confusion confusion(const ScoredSet& set, double threshold);

struct OperatingPoint {
  double target = 0.0;
  double threshold = 0.0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  bool operator==(const OperatingPoint&) const = default;
};

// Largest threshold (among distinct scores and 0) whose sensitivity reaches
// `target`, with the sensitivity and specificity realised there.
OperatingPoint specificity_at_sensitivity(const ScoredSet& set, double target);

// Trapezoidal ROC area; ties contribute one half, so this equals the
// Mann-Whitney statistic. Computed in integer arithmetic and divided once.
double roc_auc(const ScoredSet& set);

struct MetricsReport {
  std::vector<OperatingPoint> rows;
  double auc = 0.0;
  std::string split;
  std::string checkpoint;

  // Row for a given target; throws ContractError if absent.
  const OperatingPoint& at(double target) const;
};

MetricsReport make_report(const ScoredSet& set,
                          std::span<const double> targets = kSensitivityTargets);
// Re-evaluates `set` at thresholds fixed by an earlier report (e.g. chosen on validation).
MetricsReport apply_thresholds(const MetricsReport& chosen, const ScoredSet& set);

// CSV header: target,threshold,sensitivity,specificity
void write_metrics_csv(const std::filesystem::path& path, const MetricsReport& report);
// CSV header: id,score,label
void write_scores_csv(const std::filesystem::path& path, const ScoredSet& set);

// Shortest decimal that reads back to the same double.
std::string format_number(double v);

}  // namespace ssdaae
