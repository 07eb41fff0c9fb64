#ifndef REDSUM_RANKERS_H_
#define REDSUM_RANKERS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "redsum/checkpoint.h"
#include "redsum/corpus.h"
#include "redsum/embed.h"
#include "redsum/grad.h"
#include "redsum/numeric.h"
#include "redsum/redundancy.h"
#include "redsum/rouge.h"
#include "redsum/salience.h"

namespace redsum {

/// Softmax over the remaining candidates. Throws on an empty candidate set.
std::vector<double> step_distribution(std::span<const double> scores);

/// KL(P || Q) with 0 log 0 = 0 and Q floored at 1e-12. Throws when the two
/// distributions have different support sizes.
double kl_loss(std::span<const double> p, std::span<const double> q);

/// KL(softmax(scores) || Q) recorded on the tape; `scores` is an n x 1 column.
grad::Var kl_loss(grad::Tape& tape, grad::Var scores, std::span<const double> q);

// ---------------------------------------------------------------------------
// Context-aware selection ranker: f = W_f tanh(F_sal * W_F F_red).

struct CtxConfig {
  std::size_t bins = 10;     // m
  std::size_t out_dim = 20;  // d
  double tau = 20.0;
  std::size_t max_sents = 3;  // l
  SemNormScope sem_scope = SemNormScope::kStep;
  GainMeasure gain = GainMeasure::kMeanR1R2;
};

class CtxRanker {
 public:
  static constexpr const char* kKind = "ctx";

  /// Zero-initialized W_F (d x 1 x 4m) and W_f (1 x d).
  CtxRanker(std::size_t bins, std::size_t out_dim);
  static CtxRanker random(std::size_t bins, std::size_t out_dim, std::uint64_t seed);

  std::size_t bins() const { return bins_; }
  std::size_t out_dim() const { return out_dim_; }
  std::vector<grad::Parameter*> parameters() { return {&w_big_, &w_out_}; }
  grad::Parameter& bilinear() { return w_big_; }
  grad::Parameter& output() { return w_out_; }
  const grad::Parameter& bilinear() const { return w_big_; }
  const grad::Parameter& output() const { return w_out_; }

  double score(double salience, const BinnedFeatures& features) const;
  std::vector<double> scores(std::span<const double> salience, std::span<const BinnedFeatures> features) const;
  /// Candidate scores as an n x 1 column on the tape.
  grad::Var scores(grad::Tape& tape, std::span<const double> salience, std::span<const BinnedFeatures> features);

  Checkpoint to_checkpoint(const CtxConfig& cfg, std::size_t embedding_dim) const;
  static CtxRanker from_checkpoint(const Checkpoint& ckpt, CtxConfig* cfg = nullptr);

 private:
  void check(const BinnedFeatures& f) const;

  std::size_t bins_;
  std::size_t out_dim_;
  grad::Parameter w_big_;  // W_F
  grad::Parameter w_out_;  // W_f
};

double ctx_score(double salience, const BinnedFeatures& features, const CtxRanker& ranker);

/// One selection step for the CTX ranker: the candidates with their salience
/// and redundancy features relative to `selected`.
struct CtxStep {
  std::vector<std::size_t> candidates;
  std::vector<double> salience;
  std::vector<BinnedFeatures> features;
};

CtxStep make_ctx_step(const Document& doc, const DocEmbeddings& emb, std::span<const double> doc_salience,
                      std::span<const std::size_t> selected, const CtxConfig& cfg);

struct CtxTraining {
  CtxRanker ranker;
  std::vector<double> epoch_losses;
};

/// Listwise KL training of the selection ranker with sampled label contexts.
/// The salience model is only read.
CtxTraining train_ctx(std::span<const Document> corpus, std::span<const DocEmbeddings> embeddings,
                      const SalienceModel& salience, const CtxConfig& cfg, const grad::TrainSchedule& schedule);

// ---------------------------------------------------------------------------
// Sequential decoder ranker.

struct SeqConfig {
  std::size_t attn_dim = 64;
  std::size_t hidden = 64;
  std::size_t layers = 1;
  double dropout = 0.1;
  double tau = 20.0;
  std::size_t max_sents = 3;
  double replace_prob = 0.2;
  GainMeasure gain = GainMeasure::kMeanR1R2;
};

class SeqRanker {
 public:
  static constexpr const char* kKind = "seq";

  /// All parameters zero.
  SeqRanker(std::size_t dim, const SeqConfig& cfg);
  static SeqRanker random(std::size_t dim, const SeqConfig& cfg, std::uint64_t seed);

  std::size_t dim() const { return dim_; }
  const SeqConfig& config() const { return cfg_; }
  std::vector<grad::Parameter*> parameters();
  grad::Parameter& param(const std::string& name);

  /// Decoder state h' (dim x 1). The query is the mean of `selected` (zero when
  /// empty); each layer attends over `encoder` rows, adds the query back and
  /// projects. `dropout` is null in eval mode.
  grad::Var decoder_state(grad::Tape& tape, std::span<const Vec> selected, std::span<const Vec> encoder,
                          Rng* dropout);

  /// o = W_o (o_l + o_g) per candidate, as an n x 1 column.
  grad::Var scores(grad::Tape& tape, grad::Var state, std::span<const Vec> candidates,
                   std::span<const double> doc_vec);

  /// Eval-mode scores of `candidates` after `selected`.
  std::vector<double> infer(const DocEmbeddings& emb, std::span<const std::size_t> selected,
                            std::span<const std::size_t> candidates);

  Checkpoint to_checkpoint() const;
  static SeqRanker from_checkpoint(const Checkpoint& ckpt);

 private:
  struct Layer {
    grad::Parameter query, key, value, proj;
  };

  std::size_t dim_;
  SeqConfig cfg_;
  std::vector<Layer> layers_;
  grad::Parameter w1_, w2_, w_ds_, w_o_;
};

struct SeqTraining {
  SeqRanker ranker;
  std::vector<double> epoch_losses;
};

/// Teacher-forced training over the oracle extraction order; each context
/// sentence is swapped for a random other sentence with probability
/// cfg.replace_prob, and the target gains are taken against that context.
SeqTraining train_seq(std::span<const Document> corpus, std::span<const DocEmbeddings> embeddings,
                      const SeqConfig& cfg, const grad::TrainSchedule& schedule);

/// Teacher-forcing contexts for one document: entry k is the (possibly
/// corrupted) context preceding the k-th oracle sentence.
std::vector<std::vector<std::size_t>> seq_contexts(const Document& doc, std::size_t max_sents,
                                                   double replace_prob, Rng& rng);

}  // namespace redsum

#endif  // REDSUM_RANKERS_H_
