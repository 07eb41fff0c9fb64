#include "redsum/rouge.h"

#include <algorithm>
#include <stdexcept>

namespace redsum {

RougeScore RougeScore::from_counts(std::size_t overlap, std::size_t cand_total, std::size_t ref_total) {
  RougeScore s;
  if (cand_total == 0 || ref_total == 0) return s;
  s.precision = static_cast<double>(overlap) / static_cast<double>(cand_total);
  s.recall = static_cast<double>(overlap) / static_cast<double>(ref_total);
  if (s.precision + s.recall > 0.0) s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  return s;
}

NgramCounts ngram_counts(std::span<const std::string> tokens, std::size_t n) {
  if (n == 0) throw std::invalid_argument("n-gram order must be >= 1");
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    ++counts[Ngram(tokens.begin() + i, tokens.begin() + i + n)];
  return counts;
}

RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   std::size_t n) {
  const auto cand = ngram_counts(candidate, n);
  const auto ref = ngram_counts(reference, n);
  std::size_t cand_total = candidate.size() >= n ? candidate.size() - n + 1 : 0;
  std::size_t ref_total = reference.size() >= n ? reference.size() - n + 1 : 0;
  std::size_t overlap = 0;
  for (const auto& [gram, c] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(c, it->second);
  }
  return RougeScore::from_counts(overlap, cand_total, ref_total);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  // two-row DP over b
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference) {
  return RougeScore::from_counts(lcs_length(candidate, reference), candidate.size(), reference.size());
}

RougeSuite rouge_suite(std::span<const std::string> candidate, std::span<const std::string> reference) {
  return {rouge_n(candidate, reference, 1), rouge_n(candidate, reference, 2),
          rouge_l(candidate, reference)};
}

Tokens flatten(const Document& doc, std::span<const std::size_t> chosen) {
  std::vector<std::size_t> order(chosen.begin(), chosen.end());
  std::sort(order.begin(), order.end());
  Tokens out;
  for (auto i : order) {
    if (i >= doc.size()) throw std::out_of_range("sentence index out of range");
    const auto& t = doc.sentences[i].tokens;
    out.insert(out.end(), t.begin(), t.end());
  }
  return out;
}

Tokens flatten(std::span<const Sentence> sentences) {
  Tokens out;
  for (const auto& s : sentences) out.insert(out.end(), s.tokens.begin(), s.tokens.end());
  return out;
}

RougeSuite rouge_suite(const Document& doc, std::span<const std::size_t> chosen) {
  if (!doc.abstract) throw DataError("document '" + doc.id + "' has no reference");
  return rouge_suite(flatten(doc, chosen), flatten(*doc.abstract));
}

GainMeasure parse_gain_measure(const std::string& name) {
  if (name == "mean12") return GainMeasure::kMeanR1R2;
  if (name == "r1") return GainMeasure::kRouge1;
  if (name == "r2") return GainMeasure::kRouge2;
  if (name == "rl") return GainMeasure::kRougeL;
  throw std::invalid_argument("unknown gain measure '" + name + "'");
}

std::string to_string(GainMeasure m) {
  switch (m) {
    case GainMeasure::kMeanR1R2: return "mean12";
    case GainMeasure::kRouge1: return "r1";
    case GainMeasure::kRouge2: return "r2";
    case GainMeasure::kRougeL: return "rl";
  }
  return "?";
}

double measure(const RougeSuite& s, GainMeasure m) {
  switch (m) {
    case GainMeasure::kMeanR1R2: return 0.5 * (s.r1.f1 + s.r2.f1);
    case GainMeasure::kRouge1: return s.r1.f1;
    case GainMeasure::kRouge2: return s.r2.f1;
    case GainMeasure::kRougeL: return s.rl.f1;
  }
  return 0.0;
}

}  // namespace redsum
