// Shared fixtures and brute-force oracles for the unit and acceptance tests.
// Oracles here avoid the library's own helpers so agreement means something.
#ifndef REDSUM_TESTS_SUPPORT_H_
#define REDSUM_TESTS_SUPPORT_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "redsum/corpus.h"
#include "redsum/numeric.h"

namespace testsupport {

using redsum::Document;
using redsum::Rng;
using redsum::Tokens;

inline std::string word(std::size_t i) { return "w" + std::to_string(i); }

inline Tokens random_tokens(Rng& rng, std::size_t len, std::size_t vocab) {
  Tokens t;
  for (std::size_t i = 0; i < len; ++i) t.push_back(word(rng.below(vocab)));
  return t;
}

inline std::string join(const Tokens& t) {
  std::string s;
  for (const auto& w : t) s += (s.empty() ? "" : " ") + w;
  return s;
}

/// Random document over a small vocabulary. The abstract mixes fragments of
/// document sentences with fresh words so gains vary across sentences.
inline Document random_document(Rng& rng, std::size_t sentences, std::size_t max_len, std::size_t vocab,
                                bool with_abstract = true, const std::string& id = "doc") {
  std::vector<std::string> sents;
  std::vector<Tokens> toks;
  for (std::size_t i = 0; i < sentences; ++i) {
    toks.push_back(random_tokens(rng, 1 + rng.below(max_len), vocab));
    sents.push_back(join(toks.back()));
  }
  std::optional<std::vector<std::string>> abstract;
  if (with_abstract) {
    abstract.emplace();
    const std::size_t parts = 1 + rng.below(3);
    for (std::size_t p = 0; p < parts; ++p) {
      const Tokens& src = toks[rng.below(toks.size())];
      const std::size_t start = rng.below(src.size());
      const std::size_t len = 1 + rng.below(src.size() - start);
      Tokens frag(src.begin() + static_cast<std::ptrdiff_t>(start),
                  src.begin() + static_cast<std::ptrdiff_t>(start + len));
      for (const auto& w : random_tokens(rng, rng.below(3), vocab)) frag.push_back(w);
      abstract->push_back(join(frag));
    }
  }
  redsum::CorpusConfig cfg;
  cfg.max_tokens = 1 << 20;
  return redsum::make_document(id, sents, abstract, std::nullopt, cfg);
}

/// LCS by enumerating every subsequence of `a` and testing it against `b`.
inline std::size_t brute_lcs(const Tokens& a, const Tokens& b) {
  std::size_t best = 0;
  const std::size_t n = a.size();
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    Tokens sub;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) sub.push_back(a[i]);
    if (sub.size() <= best) continue;
    std::size_t j = 0;
    for (const auto& w : b)
      if (j < sub.size() && sub[j] == w) ++j;
    if (j == sub.size()) best = sub.size();
  }
  return best;
}

inline std::vector<Tokens> naive_ngrams(const Tokens& t, std::size_t n) {
  std::vector<Tokens> out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) out.emplace_back(t.begin() + i, t.begin() + i + n);
  return out;
}

/// ROUGE-N F1 with clipped counts, matching each reference n-gram at most once.
inline double naive_rouge_n_f1(const Tokens& cand, const Tokens& ref, std::size_t n) {
  auto c = naive_ngrams(cand, n);
  auto r = naive_ngrams(ref, n);
  if (c.empty() || r.empty()) return 0.0;
  std::vector<bool> used(r.size(), false);
  std::size_t overlap = 0;
  for (const auto& g : c)
    for (std::size_t j = 0; j < r.size(); ++j)
      if (!used[j] && r[j] == g) {
        used[j] = true;
        ++overlap;
        break;
      }
  if (overlap == 0) return 0.0;
  const double p = static_cast<double>(overlap) / static_cast<double>(c.size());
  const double rc = static_cast<double>(overlap) / static_cast<double>(r.size());
  return 2.0 * p * rc / (p + rc);
}

/// Mean of ROUGE-1 and ROUGE-2 F1 for `chosen` (any order) against the abstract.
inline double naive_measure(const Document& doc, std::vector<std::size_t> chosen) {
  std::sort(chosen.begin(), chosen.end());
  Tokens cand, ref;
  for (auto i : chosen) cand.insert(cand.end(), doc.sentences[i].tokens.begin(), doc.sentences[i].tokens.end());
  for (const auto& s : *doc.abstract) ref.insert(ref.end(), s.tokens.begin(), s.tokens.end());
  return 0.5 * (naive_rouge_n_f1(cand, ref, 1) + naive_rouge_n_f1(cand, ref, 2));
}

/// Fresh scratch directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("redsum-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

}  // namespace testsupport

#endif  // REDSUM_TESTS_SUPPORT_H_
