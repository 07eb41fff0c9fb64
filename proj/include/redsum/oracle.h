#ifndef REDSUM_ORACLE_H_
#define REDSUM_ORACLE_H_

#include <cstddef>
#include <span>
#include <vector>

#include "redsum/corpus.h"
#include "redsum/rouge.h"

namespace redsum {

/// M(selected; abstract). Zero for an empty selection.
double summary_measure(const Document& doc, std::span<const std::size_t> selected,
                       GainMeasure m = GainMeasure::kMeanR1R2);

/// Relative gain of adding `candidate` to `selected`:
/// M(selected + candidate) - M(selected).
double step_gain(const Document& doc, std::size_t candidate, std::span<const std::size_t> selected,
                 GainMeasure m = GainMeasure::kMeanR1R2);

/// step_gain for every candidate, in candidate order.
std::vector<double> step_gains(const Document& doc, std::span<const std::size_t> candidates,
                               std::span<const std::size_t> selected,
                               GainMeasure m = GainMeasure::kMeanR1R2);

/// Greedy pseudo labels in extraction order. Each step adds the sentence with
/// the largest strictly positive gain (lowest index on ties) until `l`
/// sentences are chosen or no sentence helps. Throws DataError without an
/// abstract.
std::vector<std::size_t> greedy_oracle_labels(const Document& doc, std::size_t l,
                                              GainMeasure m = GainMeasure::kMeanR1R2);

/// Q over the candidate set: min-max rescale of the gains, then a softmax
/// with temperature `tau`. All-equal gains give the uniform distribution.
std::vector<double> target_distribution(std::span<const double> gains, double tau);

}  // namespace redsum

#endif  // REDSUM_ORACLE_H_
