#ifndef REDSUM_SALIENCE_H_
#define REDSUM_SALIENCE_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "redsum/checkpoint.h"
#include "redsum/corpus.h"
#include "redsum/embed.h"
#include "redsum/grad.h"

namespace redsum {

/// Bilinear document-sentence matcher: logit_i = h_D . W_ds . h_i, turned
/// into a per-document softmax over all L sentences.
class SalienceModel {
 public:
  static constexpr const char* kKind = "salience";

  /// Zero-initialized W_ds.
  explicit SalienceModel(std::size_t dim);
  /// W_ds ~ U(-1/sqrt(dim), 1/sqrt(dim)).
  static SalienceModel random(std::size_t dim, std::uint64_t seed);

  std::size_t dim() const { return dim_; }
  grad::Parameter& weights() { return w_ds_; }
  const grad::Parameter& weights() const { return w_ds_; }
  std::vector<grad::Parameter*> parameters() { return {&w_ds_}; }

  std::vector<double> logits(const DocEmbeddings& emb) const;

  /// Negative log-likelihood of the labeled sentences, recorded on `tape`.
  grad::Var nll(grad::Tape& tape, const DocEmbeddings& emb, std::span<const std::size_t> labels);

  Checkpoint to_checkpoint() const;
  static SalienceModel from_checkpoint(const Checkpoint& ckpt);

  std::string provider;  // embedding provider the model was trained with

 private:
  std::size_t dim_;
  grad::Parameter w_ds_;
};

/// F_sal: softmax of bilinear logits over every sentence of the document.
std::vector<double> salience_scores(std::span<const double> doc_vec, std::span<const Vec> sentences,
                                    const SalienceModel& model);
std::vector<double> salience_scores(const DocEmbeddings& emb, const SalienceModel& model);

struct SalienceTraining {
  SalienceModel model;
  double initial_loss = 0.0;
  std::vector<double> epoch_losses;  // mean per-document NLL, one per epoch
  double final_loss() const { return epoch_losses.empty() ? initial_loss : epoch_losses.back(); }
};

/// Mean per-document NLL of the labeled sentences.
double salience_loss(const SalienceModel& model, std::span<const Document> corpus,
                     std::span<const DocEmbeddings> embeddings);

/// Minimizes -sum log F_sal(labeled) with Adam. Throws DataError when a
/// document lacks labels.
SalienceTraining train_salience(std::span<const Document> corpus, std::span<const DocEmbeddings> embeddings,
                                const grad::TrainSchedule& schedule);
SalienceTraining train_salience(std::span<const Document> corpus, const EmbeddingProvider& provider,
                                const grad::TrainSchedule& schedule);

}  // namespace redsum

#endif  // REDSUM_SALIENCE_H_
