#ifndef REDSUM_REDUNDANCY_H_
#define REDSUM_REDUNDANCY_H_

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "redsum/corpus.h"
#include "redsum/embed.h"

namespace redsum {

struct RawRedundancy {
  double unigram = 0.0;
  double bigram = 0.0;
  double trigram = 0.0;
  double sem = 0.0;       // max cosine to the selected set, in [-1, 1]
  double sem_norm = 0.0;  // min-max normalized sem, in [0, 1]
};

/// F_red: four one-hot blocks of length m, ordered [1-gram; 2-gram; 3-gram; sem].
struct BinnedFeatures {
  std::array<std::size_t, 4> bins{};
  std::size_t m = 0;

  std::size_t size() const { return 4 * m; }
  /// Position of each active entry within the 4m vector.
  std::array<std::size_t, 4> active() const;
  std::vector<double> dense() const;
};

/// Population over which the semantic feature is min-max normalized.
enum class SemNormScope { kStep, kDocument };
SemNormScope parse_sem_norm_scope(const std::string& name);
std::string to_string(SemNormScope s);

struct RedundancyConfig {
  std::size_t bins = 10;
  SemNormScope sem_scope = SemNormScope::kStep;
};

/// |distinct candidate n-grams found in any selected sentence| / |distinct
/// candidate n-grams|. Zero when nothing is selected or the candidate is
/// shorter than n.
double ngram_overlap_ratio(std::span<const std::string> candidate, const std::vector<Tokens>& selected,
                           std::size_t n);

/// Max cosine between the candidate and any selected vector; 0 for an empty selection.
double semantic_match(std::span<const double> candidate, std::span<const Vec> selected);

/// min(floor(v * m), m - 1); out-of-range v is clamped with a warning.
std::size_t bin_index(double v, std::size_t m);
std::vector<double> bin_onehot(double v, std::size_t m);

BinnedFeatures bin_features(const RawRedundancy& raw, std::size_t m);

/// Raw features of every candidate against `selected`. The semantic feature is
/// normalized across `candidates` (step scope) or across all sentence pairs of
/// the document (document scope). An empty selection yields all zeros.
std::vector<RawRedundancy> raw_redundancy(const Document& doc, std::span<const Vec> sentence_vecs,
                                          std::span<const std::size_t> selected,
                                          std::span<const std::size_t> candidates,
                                          SemNormScope scope = SemNormScope::kStep);

std::vector<BinnedFeatures> redundancy_features(const Document& doc, std::span<const Vec> sentence_vecs,
                                                std::span<const std::size_t> selected,
                                                std::span<const std::size_t> candidates,
                                                const RedundancyConfig& cfg);

}  // namespace redsum

#endif  // REDSUM_REDUNDANCY_H_
