#include "redsum/redundancy.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "redsum/numeric.h"
#include "redsum/rouge.h"

namespace redsum {

namespace {

std::set<Ngram> ngram_set(std::span<const std::string> tokens, std::size_t n) {
  std::set<Ngram> out;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) out.emplace(tokens.begin() + i, tokens.begin() + i + n);
  return out;
}

double overlap(const std::set<Ngram>& cand, const std::set<Ngram>& pool) {
  if (cand.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& g : cand) hit += pool.count(g);
  return static_cast<double>(hit) / static_cast<double>(cand.size());
}

}  // namespace

std::array<std::size_t, 4> BinnedFeatures::active() const {
  return {bins[0], m + bins[1], 2 * m + bins[2], 3 * m + bins[3]};
}

std::vector<double> BinnedFeatures::dense() const {
  std::vector<double> out(size(), 0.0);
  for (auto i : active()) out[i] = 1.0;
  return out;
}

SemNormScope parse_sem_norm_scope(const std::string& name) {
  if (name == "step") return SemNormScope::kStep;
  if (name == "document") return SemNormScope::kDocument;
  throw std::invalid_argument("unknown sem_norm_scope '" + name + "'");
}

std::string to_string(SemNormScope s) { return s == SemNormScope::kStep ? "step" : "document"; }

double ngram_overlap_ratio(std::span<const std::string> candidate, const std::vector<Tokens>& selected,
                           std::size_t n) {
  if (n < 1 || n > 3) throw std::invalid_argument("n-gram overlap order must be 1, 2 or 3");
  if (selected.empty()) return 0.0;
  std::set<Ngram> pool;
  for (const auto& s : selected) pool.merge(ngram_set(s, n));
  return overlap(ngram_set(candidate, n), pool);
}

double semantic_match(std::span<const double> candidate, std::span<const Vec> selected) {
  if (selected.empty()) return 0.0;
  double best = -1.0;
  for (const auto& s : selected) best = std::max(best, cosine(candidate, s));
  return best;
}

std::size_t bin_index(double v, std::size_t m) {
  if (m < 2) throw std::invalid_argument("bin count must be >= 2");
  if (!(v >= 0.0 && v <= 1.0)) {
    spdlog::warn("feature value {} outside [0,1], clamped", v);
    v = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
  }
  return std::min(static_cast<std::size_t>(std::floor(v * static_cast<double>(m))), m - 1);
}

std::vector<double> bin_onehot(double v, std::size_t m) {
  std::vector<double> out(m, 0.0);
  out[bin_index(v, m)] = 1.0;
  return out;
}

BinnedFeatures bin_features(const RawRedundancy& raw, std::size_t m) {
  BinnedFeatures f;
  f.m = m;
  f.bins = {bin_index(raw.unigram, m), bin_index(raw.bigram, m), bin_index(raw.trigram, m),
            bin_index(raw.sem_norm, m)};
  return f;
}

std::vector<RawRedundancy> raw_redundancy(const Document& doc, std::span<const Vec> sentence_vecs,
                                          std::span<const std::size_t> selected,
                                          std::span<const std::size_t> candidates, SemNormScope scope) {
  if (sentence_vecs.size() != doc.size())
    throw std::invalid_argument("redundancy: embedding count does not match sentence count");
  std::vector<RawRedundancy> out(candidates.size());
  if (selected.empty()) return out;

  std::array<std::set<Ngram>, 3> pools;
  std::vector<Vec> sel_vecs;
  for (auto s : selected) {
    for (std::size_t n = 1; n <= 3; ++n) pools[n - 1].merge(ngram_set(doc.sentences.at(s).tokens, n));
    sel_vecs.push_back(sentence_vecs[s]);
  }
  std::vector<double> sems;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& toks = doc.sentences.at(candidates[i]).tokens;
    out[i].unigram = overlap(ngram_set(toks, 1), pools[0]);
    out[i].bigram = overlap(ngram_set(toks, 2), pools[1]);
    out[i].trigram = overlap(ngram_set(toks, 3), pools[2]);
    out[i].sem = semantic_match(sentence_vecs[candidates[i]], sel_vecs);
    sems.push_back(out[i].sem);
  }

  if (scope == SemNormScope::kStep) {
    const auto norm = minmax_normalize(sems);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].sem_norm = norm[i];
  } else {
    double lo = 1.0, hi = -1.0;
    for (std::size_t a = 0; a < doc.size(); ++a)
      for (std::size_t b = a + 1; b < doc.size(); ++b) {
        const double c = cosine(sentence_vecs[a], sentence_vecs[b]);
        lo = std::min(lo, c);
        hi = std::max(hi, c);
      }
    for (auto& r : out)
      r.sem_norm = hi > lo ? std::clamp((r.sem - lo) / (hi - lo), 0.0, 1.0) : 0.0;
  }
  return out;
}

std::vector<BinnedFeatures> redundancy_features(const Document& doc, std::span<const Vec> sentence_vecs,
                                                std::span<const std::size_t> selected,
                                                std::span<const std::size_t> candidates,
                                                const RedundancyConfig& cfg) {
  const auto raw = raw_redundancy(doc, sentence_vecs, selected, candidates, cfg.sem_scope);
  std::vector<BinnedFeatures> out;
  out.reserve(raw.size());
  for (const auto& r : raw) out.push_back(bin_features(r, cfg.bins));
  return out;
}

}  // namespace redsum
