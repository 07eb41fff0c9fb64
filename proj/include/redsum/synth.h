#ifndef REDSUM_SYNTH_H_
#define REDSUM_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "redsum/corpus.h"

namespace redsum {

/// Synthetic redundancy corpus. Each document holds a salient sentence A drawn
/// from a small recurring vocabulary, a near-duplicate A' (A with a few words
/// swapped out), a complementary sentence B of one-off content words, and
/// distractors built from a recurring filler vocabulary. The reference is A + B.
/// Vocabularies do not depend on the seed, so corpora drawn with different
/// seeds share them.
struct SynthConfig {
  std::size_t docs = 500;
  std::uint64_t seed = 1;
  std::size_t sentence_len = 12;
  std::size_t dup_replacements = 3;
  std::size_t min_distractors = 3;
  std::size_t max_distractors = 5;
  std::string id_prefix = "synth";
};

/// Sentence roles recorded for analysis: positions of A, A' and B.
struct SynthRoles {
  std::size_t salient = 0;
  std::size_t duplicate = 0;
  std::size_t complement = 0;
};

struct SynthCorpus {
  std::vector<Document> documents;
  std::vector<SynthRoles> roles;
};

SynthCorpus make_synth_corpus(const SynthConfig& cfg);

/// Recovers roles from a synthetic document by matching against its abstract:
/// A and B are the sentences equal to the two reference sentences, A' is the
/// remaining sentence sharing the most tokens with A.
SynthRoles synth_roles(const Document& doc);

}  // namespace redsum

#endif  // REDSUM_SYNTH_H_
