#ifndef REDSUM_ROUGE_H_
#define REDSUM_ROUGE_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "redsum/corpus.h"

namespace redsum {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static RougeScore from_counts(std::size_t overlap, std::size_t cand_total, std::size_t ref_total);
};

struct RougeSuite {
  RougeScore r1, r2, rl;
};

using Ngram = std::vector<std::string>;
using NgramCounts = std::map<Ngram, std::size_t>;

NgramCounts ngram_counts(std::span<const std::string> tokens, std::size_t n);

/// ROUGE-N with clipped multiset overlap.
RougeScore rouge_n(std::span<const std::string> candidate, std::span<const std::string> reference,
                   std::size_t n);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// Whole-summary ROUGE-L: one LCS over the concatenated token sequences.
RougeScore rouge_l(std::span<const std::string> candidate, std::span<const std::string> reference);

RougeSuite rouge_suite(std::span<const std::string> candidate, std::span<const std::string> reference);

/// Concatenated tokens of the chosen sentences, in document order.
Tokens flatten(const Document& doc, std::span<const std::size_t> chosen);
Tokens flatten(std::span<const Sentence> sentences);

/// Scores a sentence subset of `doc` against its abstract. Throws if the
/// document has no abstract.
RougeSuite rouge_suite(const Document& doc, std::span<const std::size_t> chosen);

/// Which ROUGE F1 the oracle gain M(.) uses.
enum class GainMeasure { kMeanR1R2, kRouge1, kRouge2, kRougeL };

GainMeasure parse_gain_measure(const std::string& name);
std::string to_string(GainMeasure m);

double measure(const RougeSuite& s, GainMeasure m);

}  // namespace redsum

#endif  // REDSUM_ROUGE_H_
