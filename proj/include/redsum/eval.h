#ifndef REDSUM_EVAL_H_
#define REDSUM_EVAL_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "redsum/corpus.h"
#include "redsum/rouge.h"
#include "redsum/select.h"

namespace redsum {

struct DocumentScore {
  std::string id;
  RougeSuite rouge;
};

/// Corpus means are fractions in [0, 1]; report_json renders percentages.
struct EvalReport {
  double r1 = 0.0, r2 = 0.0, rl = 0.0;
  std::vector<DocumentScore> per_document;
  std::size_t skipped = 0;  // documents without a reference
};

/// Scores `selections[i]` against `corpus[i]`'s abstract.
EvalReport evaluate_rouge(std::span<const Document> corpus, std::span<const SelectionResult> selections,
                          std::size_t threads = 1);

/// |first k selected within labels| / k. Throws when k is 0 or exceeds the selection.
double precision_at_k(std::span<const std::size_t> selection, std::span<const std::size_t> labels, std::size_t k);

/// Mean P@k for k = 1..l over labeled documents whose selection has at least k picks.
std::vector<double> mean_precision_at_k(std::span<const Document> corpus,
                                        std::span<const SelectionResult> selections, std::size_t l);

/// Position buckets given by ascending lower bounds; the default is
/// 0, 1, 2, 3, 4, 5-9, 10+.
struct PositionBuckets {
  std::vector<std::size_t> lower = {0, 1, 2, 3, 4, 5, 10};

  std::size_t bucket(std::size_t position) const;
  std::vector<std::string> labels() const;
};

/// Share of all selected indices falling in each bucket. Throws when nothing was selected.
std::vector<double> position_histogram(std::span<const SelectionResult> selections,
                                       const PositionBuckets& buckets = {});

/// Two-sided paired t-test on a - b. All-zero differences give 1.0; zero
/// variance with a nonzero mean gives 0.0.
double paired_t_test(std::span<const double> a, std::span<const double> b);

/// Value * 100 rounded to two decimals.
double as_percent(double fraction);

nlohmann::json report_json(const EvalReport& report);

}  // namespace redsum

#endif  // REDSUM_EVAL_H_
