#include "redsum/synth.h"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "redsum/numeric.h"

namespace redsum {

namespace {

constexpr std::uint64_t kVocabSeed = 0x7e57c0de;

struct Vocabulary {
  std::vector<std::string> salient, content, filler;
};

const Vocabulary& vocabulary() {
  static const Vocabulary vocab = [] {
    static const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z",
                                    "br", "tr", "st", "pl", "gr", "sh"};
    static const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};
    Rng rng(kVocabSeed);
    std::set<std::string> used;
    auto draw = [&](std::size_t n) {
      std::vector<std::string> out;
      while (out.size() < n) {
        std::string w;
        const std::size_t syl = 2 + rng.below(2);
        for (std::size_t s = 0; s < syl; ++s) {
          w += kOnsets[rng.below(std::size(kOnsets))];
          w += kVowels[rng.below(std::size(kVowels))];
        }
        if (used.insert(w).second) out.push_back(w);
      }
      return out;
    };
    Vocabulary v;
    v.salient = draw(40);
    v.filler = draw(60);
    v.content = draw(3000);
    return v;
  }();
  return vocab;
}

std::vector<std::string> draw_words(const std::vector<std::string>& pool, std::size_t n, Rng& rng) {
  std::vector<std::string> out;
  for (auto i : rng.sample(pool.size(), n)) out.push_back(pool[i]);
  return out;
}

std::string join(const std::vector<std::string>& words) {
  std::string s;
  for (const auto& w : words) s += (s.empty() ? "" : " ") + w;
  return s;
}

}  // namespace

SynthCorpus make_synth_corpus(const SynthConfig& cfg) {
  if (cfg.sentence_len < 4 || cfg.dup_replacements == 0 || cfg.dup_replacements >= cfg.sentence_len)
    throw std::invalid_argument("synth: sentence_len must be >= 4 and replacements in [1, len)");
  if (cfg.min_distractors > cfg.max_distractors) throw std::invalid_argument("synth: distractor range");
  const Vocabulary& vocab = vocabulary();
  Rng rng(cfg.seed);
  SynthCorpus out;
  for (std::size_t d = 0; d < cfg.docs; ++d) {
    const auto a = draw_words(vocab.salient, cfg.sentence_len, rng);
    auto dup = a;
    for (auto pos : rng.sample(cfg.sentence_len, cfg.dup_replacements))
      dup[pos] = vocab.content[rng.below(vocab.content.size())];
    const auto b = draw_words(vocab.content, cfg.sentence_len, rng);

    std::vector<std::string> sentences{join(a), join(dup), join(b)};
    const std::size_t distractors = cfg.min_distractors + rng.below(cfg.max_distractors - cfg.min_distractors + 1);
    for (std::size_t k = 0; k < distractors; ++k) {
      auto words = draw_words(vocab.filler, cfg.sentence_len - 2, rng);
      for (int c = 0; c < 2; ++c) words.push_back(vocab.content[rng.below(vocab.content.size())]);
      rng.shuffle(words);
      sentences.push_back(join(words));
    }

    // shuffle positions; slot[i] is the original role index placed at position i
    std::vector<std::size_t> slot(sentences.size());
    for (std::size_t i = 0; i < slot.size(); ++i) slot[i] = i;
    rng.shuffle(slot);
    std::vector<std::string> placed;
    SynthRoles roles;
    for (std::size_t i = 0; i < slot.size(); ++i) {
      placed.push_back(sentences[slot[i]]);
      if (slot[i] == 0) roles.salient = i;
      if (slot[i] == 1) roles.duplicate = i;
      if (slot[i] == 2) roles.complement = i;
    }
    std::vector<std::string> abstract{sentences[0], sentences[2]};
    CorpusConfig cc;
    out.documents.push_back(
        make_document(cfg.id_prefix + "-" + std::to_string(d), placed, abstract, std::nullopt, cc));
    out.roles.push_back(roles);
  }
  return out;
}

SynthRoles synth_roles(const Document& doc) {
  if (!doc.abstract || doc.abstract->size() != 2) throw DataError("not a synthetic document: '" + doc.id + "'");
  SynthRoles r;
  bool found_a = false, found_b = false;
  for (const auto& s : doc.sentences) {
    if (!found_a && s.tokens == (*doc.abstract)[0].tokens) {
      r.salient = s.index;
      found_a = true;
    } else if (!found_b && s.tokens == (*doc.abstract)[1].tokens) {
      r.complement = s.index;
      found_b = true;
    }
  }
  if (!found_a || !found_b) throw DataError("not a synthetic document: '" + doc.id + "'");
  const std::set<std::string> a_words((*doc.abstract)[0].tokens.begin(), (*doc.abstract)[0].tokens.end());
  std::size_t best = 0;
  bool any = false;
  for (const auto& s : doc.sentences) {
    if (s.index == r.salient || s.index == r.complement) continue;
    const auto shared = static_cast<std::size_t>(
        std::count_if(s.tokens.begin(), s.tokens.end(), [&](const std::string& t) { return a_words.count(t) > 0; }));
    if (!any || shared > best) {
      best = shared;
      r.duplicate = s.index;
      any = true;
    }
  }
  if (!any) throw DataError("not a synthetic document: '" + doc.id + "'");
  return r;
}

}  // namespace redsum
