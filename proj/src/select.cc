#include "redsum/select.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "redsum/numeric.h"

namespace redsum {

namespace {

void require_l(std::size_t l) {
  if (l == 0) throw std::invalid_argument("summary length l must be >= 1");
}

std::vector<std::size_t> salience_ranking(std::span<const double> salience) {
  std::vector<std::size_t> order(salience.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return salience[a] > salience[b]; });
  return order;
}

std::set<Ngram> trigrams(std::span<const std::string> t) {
  std::set<Ngram> out;
  for (std::size_t i = 0; i + 3 <= t.size(); ++i) out.emplace(t.begin() + i, t.begin() + i + 3);
  return out;
}

}  // namespace

Strategy parse_strategy(const std::string& name) {
  if (name == "lead") return Strategy::kLead;
  if (name == "topk") return Strategy::kTopk;
  if (name == "triblk") return Strategy::kTriblk;
  if (name == "mmr") return Strategy::kMmr;
  if (name == "ctx") return Strategy::kCtx;
  if (name == "seq") return Strategy::kSeq;
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kLead: return "lead";
    case Strategy::kTopk: return "topk";
    case Strategy::kTriblk: return "triblk";
    case Strategy::kMmr: return "mmr";
    case Strategy::kCtx: return "ctx";
    case Strategy::kSeq: return "seq";
  }
  return "?";
}

bool shares_trigram(std::span<const std::string> a, std::span<const std::string> b) {
  const auto ta = trigrams(a);
  for (std::size_t i = 0; i + 3 <= b.size(); ++i)
    if (ta.count(Ngram(b.begin() + i, b.begin() + i + 3))) return true;
  return false;
}

SelectionResult select_lead(const Document& doc, std::size_t l) {
  require_l(l);
  SelectionResult r;
  for (std::size_t i = 0; i < std::min(l, doc.size()); ++i) r.chosen.push_back(i);
  r.unpadded = r.chosen.size();
  return r;
}

SelectionResult select_topk(std::span<const double> salience, std::size_t l) {
  require_l(l);
  SelectionResult r;
  for (auto i : salience_ranking(salience)) {
    if (r.chosen.size() == l) break;
    r.chosen.push_back(i);
    r.step_scores.push_back(salience[i]);
  }
  r.unpadded = r.chosen.size();
  return r;
}

SelectionResult select_trigram_blocking(std::span<const double> salience, const Document& doc, std::size_t l) {
  require_l(l);
  if (salience.size() != doc.size()) throw std::invalid_argument("salience count != sentence count");
  SelectionResult r;
  std::set<Ngram> seen;
  std::vector<std::size_t> blocked;
  for (auto i : salience_ranking(salience)) {
    if (r.chosen.size() == l) break;
    const auto tri = trigrams(doc.sentences[i].tokens);
    const bool hit = std::any_of(tri.begin(), tri.end(), [&](const Ngram& g) { return seen.count(g) > 0; });
    if (hit) {
      blocked.push_back(i);
      continue;
    }
    seen.insert(tri.begin(), tri.end());
    r.chosen.push_back(i);
    r.step_scores.push_back(salience[i]);
  }
  r.unpadded = r.chosen.size();
  for (auto i : blocked) {
    if (r.chosen.size() == l) break;
    r.chosen.push_back(i);
    r.step_scores.push_back(salience[i]);
  }
  return r;
}

SelectionResult select_mmr(std::span<const double> salience, std::span<const Vec> embeddings, double lambda,
                           std::size_t l) {
  require_l(l);
  if (lambda < 0.0 || lambda > 1.0) throw std::invalid_argument("MMR lambda must lie in [0, 1]");
  if (salience.size() != embeddings.size()) throw std::invalid_argument("salience count != embedding count");
  SelectionResult r;
  if (salience.empty()) return r;
  const std::size_t first = argmax(salience);
  r.chosen.push_back(first);
  r.step_scores.push_back(salience[first]);
  std::vector<char> used(salience.size(), 0);
  used[first] = 1;
  std::vector<Vec> chosen_vecs{embeddings[first]};
  while (r.chosen.size() < std::min(l, salience.size())) {
    std::size_t best = salience.size();
    double best_score = 0.0;
    for (std::size_t i = 0; i < salience.size(); ++i) {
      if (used[i]) continue;
      double sim = -1.0;
      for (const auto& c : chosen_vecs) sim = std::max(sim, cosine(embeddings[i], c));
      const double s = lambda * salience[i] - (1.0 - lambda) * sim;
      if (best == salience.size() || s > best_score) {
        best = i;
        best_score = s;
      }
    }
    used[best] = 1;
    r.chosen.push_back(best);
    r.step_scores.push_back(best_score);
    chosen_vecs.push_back(embeddings[best]);
  }
  r.unpadded = r.chosen.size();
  return r;
}

SelectionResult select_ctx(const SalienceModel& salience, const CtxRanker& ranker, const CtxConfig& cfg,
                           const Document& doc, const DocEmbeddings& emb, std::size_t l) {
  require_l(l);
  if (ranker.bins() != cfg.bins)
    throw std::invalid_argument("ctx ranker has m=" + std::to_string(ranker.bins()) + " but config says m=" +
                                std::to_string(cfg.bins));
  if (salience.dim() != emb.dim())
    throw std::invalid_argument("salience model dim " + std::to_string(salience.dim()) +
                                " != embedding dim " + std::to_string(emb.dim()));
  const auto sal = salience_scores(emb, salience);
  SelectionResult r;
  const std::size_t first = argmax(sal);
  r.chosen.push_back(first);
  r.step_scores.push_back(sal[first]);
  while (r.chosen.size() < std::min(l, doc.size())) {
    const CtxStep step = make_ctx_step(doc, emb, sal, r.chosen, cfg);
    const auto scores = ranker.scores(step.salience, step.features);
    const std::size_t best = argmax(scores);
    r.chosen.push_back(step.candidates[best]);
    r.step_scores.push_back(scores[best]);
  }
  r.unpadded = r.chosen.size();
  return r;
}

SelectionResult select_seq(SeqRanker& ranker, const Document& doc, const DocEmbeddings& emb, std::size_t l) {
  require_l(l);
  if (ranker.dim() != emb.dim())
    throw std::invalid_argument("seq ranker dim " + std::to_string(ranker.dim()) + " != embedding dim " +
                                std::to_string(emb.dim()));
  SelectionResult r;
  std::vector<char> used(doc.size(), 0);
  while (r.chosen.size() < std::min(l, doc.size())) {
    std::vector<std::size_t> cands;
    for (std::size_t i = 0; i < doc.size(); ++i)
      if (!used[i]) cands.push_back(i);
    const auto scores = ranker.infer(emb, r.chosen, cands);
    const std::size_t best = argmax(scores);
    r.chosen.push_back(cands[best]);
    r.step_scores.push_back(scores[best]);
    used[cands[best]] = 1;
  }
  r.unpadded = r.chosen.size();
  return r;
}

}  // namespace redsum
