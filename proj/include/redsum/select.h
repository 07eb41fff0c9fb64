#ifndef REDSUM_SELECT_H_
#define REDSUM_SELECT_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "redsum/corpus.h"
#include "redsum/embed.h"
#include "redsum/rankers.h"
#include "redsum/salience.h"

namespace redsum {

struct SelectionResult {
  std::vector<std::size_t> chosen;  // selection order
  std::vector<double> step_scores;  // winning score at each step, when the strategy has one
  std::size_t unpadded = 0;         // trigram blocking: picks made before padding
};

enum class Strategy { kLead, kTopk, kTriblk, kMmr, kCtx, kSeq };

Strategy parse_strategy(const std::string& name);
std::string to_string(Strategy s);

SelectionResult select_lead(const Document& doc, std::size_t l);

/// The l most salient sentences, highest first; ties go to the lower index.
SelectionResult select_topk(std::span<const double> salience, std::size_t l);

/// Walks the salience ranking and skips any sentence sharing a trigram with
/// what is already chosen. A short result is padded with the best skipped
/// sentences; `unpadded` marks where padding begins.
SelectionResult select_trigram_blocking(std::span<const double> salience, const Document& doc, std::size_t l);

/// Greedy argmax of lambda * salience - (1 - lambda) * max cosine to the
/// chosen set. The first pick is the most salient sentence.
SelectionResult select_mmr(std::span<const double> salience, std::span<const Vec> embeddings, double lambda,
                           std::size_t l);

/// First pick by salience, then argmax of the CTX ranker with redundancy
/// features recomputed against the growing selection.
SelectionResult select_ctx(const SalienceModel& salience, const CtxRanker& ranker, const CtxConfig& cfg,
                           const Document& doc, const DocEmbeddings& emb, std::size_t l);

/// Greedy eval-mode decoding with the SEQ ranker.
SelectionResult select_seq(SeqRanker& ranker, const Document& doc, const DocEmbeddings& emb, std::size_t l);

/// Shared trigram between two token sequences.
bool shares_trigram(std::span<const std::string> a, std::span<const std::string> b);

}  // namespace redsum

#endif  // REDSUM_SELECT_H_
