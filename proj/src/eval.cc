#include "redsum/eval.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/students_t.hpp>
#include <spdlog/spdlog.h>

#include "redsum/parallel.h"

namespace redsum {

EvalReport evaluate_rouge(std::span<const Document> corpus, std::span<const SelectionResult> selections,
                          std::size_t threads) {
  if (corpus.size() != selections.size()) throw std::invalid_argument("corpus/selection count mismatch");
  std::vector<RougeSuite> scores(corpus.size());
  std::vector<char> has_ref(corpus.size(), 0);
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    if (!corpus[i].abstract) return;
    has_ref[i] = 1;
    scores[i] = rouge_suite(corpus[i], selections[i].chosen);
  });

  EvalReport report;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!has_ref[i]) {
      spdlog::warn("document '{}' has no reference, skipped", corpus[i].id);
      ++report.skipped;
      continue;
    }
    report.per_document.push_back({corpus[i].id, scores[i]});
    report.r1 += scores[i].r1.f1;
    report.r2 += scores[i].r2.f1;
    report.rl += scores[i].rl.f1;
  }
  if (!report.per_document.empty()) {
    const auto n = static_cast<double>(report.per_document.size());
    report.r1 /= n;
    report.r2 /= n;
    report.rl /= n;
  }
  return report;
}

double precision_at_k(std::span<const std::size_t> selection, std::span<const std::size_t> labels, std::size_t k) {
  if (k == 0 || k > selection.size())
    throw std::invalid_argument("precision_at_k: k=" + std::to_string(k) + " outside 1.." +
                                std::to_string(selection.size()));
  std::size_t hit = 0;
  for (std::size_t i = 0; i < k; ++i)
    if (std::find(labels.begin(), labels.end(), selection[i]) != labels.end()) ++hit;
  return static_cast<double>(hit) / static_cast<double>(k);
}

std::vector<double> mean_precision_at_k(std::span<const Document> corpus,
                                        std::span<const SelectionResult> selections, std::size_t l) {
  if (corpus.size() != selections.size()) throw std::invalid_argument("corpus/selection count mismatch");
  std::vector<double> out(l, 0.0);
  for (std::size_t k = 1; k <= l; ++k) {
    double total = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (!corpus[i].oracle_labels || selections[i].chosen.size() < k) continue;
      total += precision_at_k(selections[i].chosen, *corpus[i].oracle_labels, k);
      ++n;
    }
    out[k - 1] = n ? total / static_cast<double>(n) : 0.0;
  }
  return out;
}

std::size_t PositionBuckets::bucket(std::size_t position) const {
  auto it = std::upper_bound(lower.begin(), lower.end(), position);
  if (it == lower.begin()) throw std::invalid_argument("position below the first bucket");
  return static_cast<std::size_t>(it - lower.begin()) - 1;
}

std::vector<std::string> PositionBuckets::labels() const {
  std::vector<std::string> out;
  for (std::size_t b = 0; b < lower.size(); ++b) {
    if (b + 1 == lower.size()) {
      out.push_back(std::to_string(lower[b]) + "+");
    } else if (lower[b + 1] == lower[b] + 1) {
      out.push_back(std::to_string(lower[b]));
    } else {
      out.push_back(std::to_string(lower[b]) + "-" + std::to_string(lower[b + 1] - 1));
    }
  }
  return out;
}

std::vector<double> position_histogram(std::span<const SelectionResult> selections, const PositionBuckets& buckets) {
  std::vector<double> hist(buckets.lower.size(), 0.0);
  std::size_t total = 0;
  for (const auto& s : selections)
    for (auto i : s.chosen) {
      hist[buckets.bucket(i)] += 1.0;
      ++total;
    }
  if (total == 0) throw std::invalid_argument("position histogram of empty selections");
  for (auto& h : hist) h /= static_cast<double>(total);
  return hist;
}

double paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired_t_test: length mismatch");
  if (a.size() < 2) throw std::invalid_argument("paired_t_test: need at least two pairs");
  const auto n = static_cast<double>(a.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
  mean /= n;
  double ss = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ss += (a[i] - b[i] - mean) * (a[i] - b[i] - mean);
  const double var = ss / (n - 1.0);
  if (var == 0.0) return mean == 0.0 ? 1.0 : 0.0;
  const double t = mean / std::sqrt(var / n);
  boost::math::students_t dist(n - 1.0);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

double as_percent(double fraction) { return std::round(fraction * 10000.0) / 100.0; }

nlohmann::json report_json(const EvalReport& report) {
  nlohmann::json j;
  j["documents"] = report.per_document.size();
  j["skipped"] = report.skipped;
  j["rouge_1"] = as_percent(report.r1);
  j["rouge_2"] = as_percent(report.r2);
  j["rouge_l"] = as_percent(report.rl);
  return j;
}

}  // namespace redsum
