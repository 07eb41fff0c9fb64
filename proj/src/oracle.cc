#include "redsum/oracle.h"

#include <algorithm>
#include <stdexcept>

#include "redsum/numeric.h"

namespace redsum {

double summary_measure(const Document& doc, std::span<const std::size_t> selected, GainMeasure m) {
  if (!doc.abstract) throw DataError("document '" + doc.id + "' has no reference");
  if (selected.empty()) return 0.0;
  return measure(rouge_suite(doc, selected), m);
}

double step_gain(const Document& doc, std::size_t candidate, std::span<const std::size_t> selected,
                 GainMeasure m) {
  if (std::find(selected.begin(), selected.end(), candidate) != selected.end())
    throw std::invalid_argument("candidate already selected");
  std::vector<std::size_t> with(selected.begin(), selected.end());
  with.push_back(candidate);
  return summary_measure(doc, with, m) - summary_measure(doc, selected, m);
}

std::vector<double> step_gains(const Document& doc, std::span<const std::size_t> candidates,
                               std::span<const std::size_t> selected, GainMeasure m) {
  const double base = summary_measure(doc, selected, m);
  std::vector<std::size_t> with(selected.begin(), selected.end());
  with.push_back(0);
  std::vector<double> out;
  out.reserve(candidates.size());
  for (auto c : candidates) {
    with.back() = c;
    out.push_back(summary_measure(doc, with, m) - base);
  }
  return out;
}

std::vector<std::size_t> greedy_oracle_labels(const Document& doc, std::size_t l, GainMeasure m) {
  if (!doc.abstract) throw DataError("document '" + doc.id + "' has no reference");
  if (l == 0) throw std::invalid_argument("l must be >= 1");
  std::vector<std::size_t> selected;
  std::vector<char> used(doc.size(), 0);
  while (selected.size() < l) {
    std::vector<std::size_t> cands;
    for (std::size_t i = 0; i < doc.size(); ++i)
      if (!used[i]) cands.push_back(i);
    if (cands.empty()) break;
    const auto gains = step_gains(doc, cands, selected, m);
    const std::size_t best = argmax(gains);
    if (!(gains[best] > 0.0)) break;
    selected.push_back(cands[best]);
    used[cands[best]] = 1;
  }
  return selected;
}

std::vector<double> target_distribution(std::span<const double> gains, double tau) {
  if (gains.empty()) throw std::invalid_argument("target distribution over no candidates");
  if (!(tau > 0.0)) throw std::invalid_argument("temperature must be positive");
  auto scaled = minmax_normalize(gains);
  for (auto& g : scaled) g *= tau;
  return softmax(scaled);
}

}  // namespace redsum
