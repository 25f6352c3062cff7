#include "ssdaae/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>

#include "ssdaae/errors.hpp"

namespace ssdaae {
namespace {

void require_both_classes(const ScoredSet& set, const char* who) {
  if (set.scores.size() != set.labels.size()) {
    throw ContractError(std::string(who) + ": scores and labels differ in length");
  }
  if (set.positives() == 0) throw ContractError(std::string(who) + ": no positive examples");
  if (set.negatives() == 0) throw ContractError(std::string(who) + ": no negative examples");
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::size_t ScoredSet::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
}

Confusion confusion(const ScoredSet& set, double threshold) {
  if (set.scores.empty()) throw ContractError("confusion: empty scored set");
  if (set.scores.size() != set.labels.size()) throw ContractError("confusion: length mismatch");
  Confusion c;
  for (std::size_t i = 0; i < set.scores.size(); ++i) {
    const bool predicted = set.scores[i] >= threshold;
    if (set.labels[i] == 1) {
      (predicted ? c.tp : c.fn)++;
    } else {
      (predicted ? c.fp : c.tn)++;
    }
  }
  return c;
}

OperatingPoint specificity_at_sensitivity(const ScoredSet& set, double target) {
  if (!(target > 0.0 && target <= 1.0)) throw ContractError("sensitivity target must lie in (0, 1]");
  require_both_classes(set, "specificity_at_sensitivity");

  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < set.size(); ++i) (set.labels[i] == 1 ? pos : neg).push_back(set.scores[i]);
  std::sort(pos.begin(), pos.end(), std::greater<>());
  std::sort(neg.begin(), neg.end());
  const double p = static_cast<double>(pos.size());
  const double n = static_cast<double>(neg.size());

  // Fewest true positives meeting the target, using the same division as the
  // reported sensitivity so the comparison cannot drift.
  std::size_t k = 1;
  while (k < pos.size() && !(static_cast<double>(k) / p >= target)) ++k;
  const double threshold = pos[k - 1];

  const auto tp = static_cast<std::size_t>(
      std::upper_bound(pos.begin(), pos.end(), threshold, std::greater<>()) - pos.begin());
  const auto tn = static_cast<std::size_t>(std::lower_bound(neg.begin(), neg.end(), threshold) - neg.begin());
  return {target, threshold, static_cast<double>(tp) / p, static_cast<double>(tn) / n};
}

double roc_auc(const ScoredSet& set) {
  require_both_classes(set, "roc_auc");
  std::vector<std::size_t> order(set.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return set.scores[a] > set.scores[b]; });

  // Sweep thresholds from high to low; each block of tied scores moves the
  // curve diagonally. Twice the area, scaled by P*N, is an integer.
  std::uint64_t twice_area = 0, tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::uint64_t dtp = 0, dfp = 0;
    const double s = set.scores[order[i]];
    for (; i < order.size() && set.scores[order[i]] == s; ++i) (set.labels[order[i]] == 1 ? dtp : dfp)++;
    twice_area += dfp * (2 * tp + dtp);
    tp += dtp;
    fp += dfp;
  }
  return static_cast<double>(twice_area) / (2.0 * static_cast<double>(tp) * static_cast<double>(fp));
}

const OperatingPoint& MetricsReport::at(double target) const {
  for (const auto& row : rows) {
    if (row.target == target) return row;
  }
  throw ContractError("no report row for sensitivity target " + std::to_string(target));
}

MetricsReport make_report(const ScoredSet& set, std::span<const double> targets) {
  MetricsReport report;
  report.split = set.split;
  report.checkpoint = set.checkpoint;
  for (double t : targets) report.rows.push_back(specificity_at_sensitivity(set, t));
  report.auc = roc_auc(set);
  return report;
}

MetricsReport apply_thresholds(const MetricsReport& chosen, const ScoredSet& set) {
  require_both_classes(set, "apply_thresholds");
  MetricsReport report;
  report.split = set.split;
  report.checkpoint = set.checkpoint;
  const double p = static_cast<double>(set.positives());
  const double n = static_cast<double>(set.negatives());
  for (const auto& row : chosen.rows) {
    const Confusion c = confusion(set, row.threshold);
    report.rows.push_back({row.target, row.threshold, static_cast<double>(c.tp) / p,
                           static_cast<double>(c.tn) / n});
  }
  report.auc = roc_auc(set);
  return report;
}

void write_metrics_csv(const std::filesystem::path& path, const MetricsReport& report) {
  auto out = open_csv(path);
  out << "target,threshold,sensitivity,specificity\n";
  for (const auto& r : report.rows) {
    out << format_number(r.target) << ',' << format_number(r.threshold) << ',' << format_number(r.sensitivity)
        << ',' << format_number(r.specificity) << '\n';
  }
}

void write_scores_csv(const std::filesystem::path& path, const ScoredSet& set) {
  auto out = open_csv(path);
  out << "id,score,label\n";
  for (std::size_t i = 0; i < set.size(); ++i) {
    out << (i < set.ids.size() ? set.ids[i] : std::to_string(i)) << ',' << format_number(set.scores[i]) << ','
        << set.labels[i] << '\n';
  }
}

}  // namespace ssdaae
