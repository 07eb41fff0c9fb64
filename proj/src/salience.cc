#include "redsum/salience.h"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "redsum/numeric.h"

namespace redsum {

namespace {

void check_dims(const SalienceModel& model, std::span<const double> doc_vec, std::span<const Vec> sents) {
  if (doc_vec.size() != model.dim())
    throw std::invalid_argument("salience: document vector dim " + std::to_string(doc_vec.size()) +
                                " != model dim " + std::to_string(model.dim()));
  for (const auto& s : sents)
    if (s.size() != model.dim()) throw std::invalid_argument("salience: sentence dim mismatch");
}

void require_labels(const Document& doc) {
  if (!doc.oracle_labels || doc.oracle_labels->empty())
    throw DataError("document '" + doc.id + "' has no oracle labels");
}

grad::Tensor stack_rows(std::span<const Vec> rows) {
  const std::size_t dim = rows.empty() ? 0 : rows.front().size();
  grad::Tensor t({rows.size(), dim});
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy(rows[i].begin(), rows[i].end(), t.values.begin() + static_cast<std::ptrdiff_t>(i * dim));
  return t;
}

}  // namespace

SalienceModel::SalienceModel(std::size_t dim) : dim_(dim), w_ds_("W_ds", grad::Tensor({dim, dim})) {
  if (dim == 0) throw std::invalid_argument("salience model dim must be positive");
}

SalienceModel SalienceModel::random(std::size_t dim, std::uint64_t seed) {
  SalienceModel m(dim);
  Rng rng(seed);
  const double r = 1.0 / std::sqrt(static_cast<double>(dim));
  for (auto& v : m.w_ds_.value.values) v = rng.uniform(-r, r);
  return m;
}

std::vector<double> SalienceModel::logits(const DocEmbeddings& emb) const {
  check_dims(*this, emb.document, emb.sentences);
  // u = h_D^T W_ds, then logit_i = u . h_i
  Vec u(dim_, 0.0);
  const auto& w = w_ds_.value.values;
  for (std::size_t r = 0; r < dim_; ++r) {
    const double hr = emb.document[r];
    if (hr == 0.0) continue;
    for (std::size_t c = 0; c < dim_; ++c) u[c] += hr * w[r * dim_ + c];
  }
  std::vector<double> out;
  out.reserve(emb.sentences.size());
  for (const auto& s : emb.sentences) out.push_back(std::inner_product(u.begin(), u.end(), s.begin(), 0.0));
  return out;
}

grad::Var SalienceModel::nll(grad::Tape& tape, const DocEmbeddings& emb, std::span<const std::size_t> labels) {
  check_dims(*this, emb.document, emb.sentences);
  auto hd = tape.constant(grad::Tensor::row(emb.document));
  auto sents_t = tape.constant(grad::Tensor(stack_rows(emb.sentences)));
  auto u = tape.matmul(hd, tape.param(w_ds_));                   // 1 x dim
  auto logits = tape.transpose(tape.matmul(u, tape.transpose(sents_t)));  // L x 1
  auto logp = tape.log_softmax(logits);
  return tape.scale(tape.sum(tape.index_select(logp, labels)), -1.0);
}

Checkpoint SalienceModel::to_checkpoint() const {
  Checkpoint c;
  c.kind = kKind;
  c.dim = dim_;
  c.add(w_ds_);
  c.config["provider"] = provider;
  return c;
}

SalienceModel SalienceModel::from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.kind != kKind) throw DataError("expected a salience checkpoint, got '" + ckpt.kind + "'");
  SalienceModel m(ckpt.dim);
  m.w_ds_.value = ckpt.tensor("W_ds", {ckpt.dim, ckpt.dim});
  m.w_ds_.zero_grad();
  m.provider = ckpt.config.value("provider", "");
  return m;
}

std::vector<double> salience_scores(std::span<const double> doc_vec, std::span<const Vec> sentences,
                                    const SalienceModel& model) {
  DocEmbeddings e{{sentences.begin(), sentences.end()}, {doc_vec.begin(), doc_vec.end()}};
  return salience_scores(e, model);
}

std::vector<double> salience_scores(const DocEmbeddings& emb, const SalienceModel& model) {
  return softmax(model.logits(emb));
}

double salience_loss(const SalienceModel& model, std::span<const Document> corpus,
                     std::span<const DocEmbeddings> embeddings) {
  if (corpus.size() != embeddings.size()) throw std::invalid_argument("corpus/embedding count mismatch");
  if (corpus.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    require_labels(corpus[d]);
    const auto p = salience_scores(embeddings[d], model);
    for (auto l : *corpus[d].oracle_labels) total -= std::log(p.at(l));
  }
  return total / static_cast<double>(corpus.size());
}

SalienceTraining train_salience(std::span<const Document> corpus, std::span<const DocEmbeddings> embeddings,
                                const grad::TrainSchedule& schedule) {
  if (corpus.size() != embeddings.size()) throw std::invalid_argument("corpus/embedding count mismatch");
  for (const auto& doc : corpus) require_labels(doc);
  if (corpus.empty()) throw DataError("empty training corpus");
  const std::size_t dim = embeddings.front().dim();

  SalienceTraining out{SalienceModel::random(dim, schedule.seed), 0.0, {}};
  out.initial_loss = salience_loss(out.model, corpus, embeddings);
  auto params = out.model.parameters();
  grad::OptimizerState opt;
  Rng rng(schedule.seed ^ 0x5a11e7ceULL);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < schedule.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0;
    for (auto d : order) {
      grad::zero_grad(params);
      grad::Tape tape;
      auto loss = out.model.nll(tape, embeddings[d], *corpus[d].oracle_labels);
      total += tape.value(loss).values[0];
      tape.backward(loss);
      grad::adam_step(opt, params, grad::lr_at(opt.step + 1, schedule.lr, schedule.warmup));
    }
    out.epoch_losses.push_back(total / static_cast<double>(corpus.size()));
    spdlog::info("salience epoch {}: mean nll {:.5f}", epoch + 1, out.epoch_losses.back());
  }
  return out;
}

SalienceTraining train_salience(std::span<const Document> corpus, const EmbeddingProvider& provider,
                                const grad::TrainSchedule& schedule) {
  std::vector<DocEmbeddings> embs;
  embs.reserve(corpus.size());
  for (const auto& doc : corpus) embs.push_back(provider.embed_document(doc));
  auto out = train_salience(corpus, embs, schedule);
  out.model.provider = provider.name();
  return out;
}

}  // namespace redsum
