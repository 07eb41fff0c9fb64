#include "redsum/rankers.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "redsum/oracle.h"

namespace redsum {

namespace {

constexpr double kQFloor = 1e-12;

void fill_uniform(grad::Parameter& p, Rng& rng, double r) {
  for (auto& v : p.value.values) v = rng.uniform(-r, r);
}

grad::Tensor stack_rows(std::span<const Vec> rows, std::size_t dim) {
  grad::Tensor t({rows.size(), dim});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != dim) throw std::invalid_argument("embedding dim mismatch");
    std::copy(rows[i].begin(), rows[i].end(), t.values.begin() + static_cast<std::ptrdiff_t>(i * dim));
  }
  return t;
}

std::vector<std::size_t> complement(std::size_t n, std::span<const std::size_t> taken) {
  std::vector<char> used(n, 0);
  for (auto t : taken) used.at(t) = 1;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (!used[i]) out.push_back(i);
  return out;
}

void require_training_doc(const Document& doc) {
  if (!doc.oracle_labels || doc.oracle_labels->empty())
    throw DataError("document '" + doc.id + "' has no oracle labels");
  if (!doc.abstract) throw DataError("document '" + doc.id + "' has no reference");
}

}  // namespace

std::vector<double> step_distribution(std::span<const double> scores) {
  if (scores.empty()) throw std::invalid_argument("step distribution over an empty candidate set");
  return softmax(scores);
}

double kl_loss(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw std::invalid_argument("kl_loss: support mismatch (" + std::to_string(p.size()) + " vs " +
                                std::to_string(q.size()) + ")");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    kl += p[i] * (std::log(p[i]) - std::log(std::max(q[i], kQFloor)));
  }
  return kl;
}

grad::Var kl_loss(grad::Tape& tape, grad::Var scores, std::span<const double> q) {
  const std::size_t rows = tape.value(scores).rows(), cols = tape.value(scores).cols();
  if (rows * cols != q.size())
    throw std::invalid_argument("kl_loss: support mismatch (" + std::to_string(rows * cols) + " vs " +
                                std::to_string(q.size()) + ")");
  std::vector<double> log_q(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) log_q[i] = std::log(std::max(q[i], kQFloor));
  auto log_p = tape.log_softmax(scores);
  auto p = tape.softmax(scores);
  auto diff = tape.sub(log_p, tape.constant(grad::Tensor({rows, cols}, std::move(log_q))));
  return tape.sum(tape.mul(p, diff));
}

// ---------------------------------------------------------------------------

CtxRanker::CtxRanker(std::size_t bins, std::size_t out_dim)
    : bins_(bins),
      out_dim_(out_dim),
      w_big_("W_F", grad::Tensor({out_dim, 1, 4 * bins})),
      w_out_("W_f", grad::Tensor({1, out_dim})) {
  if (bins < 2) throw std::invalid_argument("ctx ranker needs m >= 2 bins");
  if (out_dim == 0) throw std::invalid_argument("ctx ranker output dim must be positive");
}

CtxRanker CtxRanker::random(std::size_t bins, std::size_t out_dim, std::uint64_t seed) {
  CtxRanker r(bins, out_dim);
  Rng rng(seed);
  // four one-hot entries feed each output unit
  fill_uniform(r.w_big_, rng, 0.5);
  fill_uniform(r.w_out_, rng, 1.0 / std::sqrt(static_cast<double>(out_dim)));
  return r;
}

void CtxRanker::check(const BinnedFeatures& f) const {
  if (f.m != bins_)
    throw std::invalid_argument("ctx ranker expects m=" + std::to_string(bins_) + " bins, got " +
                                std::to_string(f.m));
}

double CtxRanker::score(double salience, const BinnedFeatures& features) const {
  check(features);
  const auto active = features.active();
  const std::size_t width = 4 * bins_;
  double out = 0.0;
  for (std::size_t j = 0; j < out_dim_; ++j) {
    double pre = 0.0;
    for (auto a : active) pre += w_big_.value.values[j * width + a];
    out += w_out_.value.values[j] * std::tanh(salience * pre);
  }
  return out;
}

std::vector<double> CtxRanker::scores(std::span<const double> salience,
                                      std::span<const BinnedFeatures> features) const {
  if (salience.size() != features.size()) throw std::invalid_argument("ctx scores: size mismatch");
  std::vector<double> out;
  out.reserve(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) out.push_back(score(salience[i], features[i]));
  return out;
}

grad::Var CtxRanker::scores(grad::Tape& tape, std::span<const double> salience,
                            std::span<const BinnedFeatures> features) {
  if (salience.size() != features.size() || features.empty())
    throw std::invalid_argument("ctx scores: size mismatch or no candidates");
  const std::size_t n = features.size();
  const std::size_t width = 4 * bins_;
  grad::Tensor fred({width, n});
  grad::Tensor sal({out_dim_, n});
  for (std::size_t i = 0; i < n; ++i) {
    check(features[i]);
    for (auto a : features[i].active()) fred.at(a, i) = 1.0;
    for (std::size_t j = 0; j < out_dim_; ++j) sal.at(j, i) = salience[i];
  }
  auto match = tape.matmul(tape.param(w_big_), tape.constant(std::move(fred)));  // d x n
  auto hidden = tape.tanh(tape.mul(tape.constant(std::move(sal)), match));
  return tape.transpose(tape.matmul(tape.param(w_out_), hidden));  // n x 1
}

Checkpoint CtxRanker::to_checkpoint(const CtxConfig& cfg, std::size_t embedding_dim) const {
  Checkpoint c;
  c.kind = kKind;
  c.dim = embedding_dim;
  c.add(w_big_);
  c.add(w_out_);
  c.config = {{"m", bins_},
              {"d", out_dim_},
              {"tau", cfg.tau},
              {"l", cfg.max_sents},
              {"sem_norm_scope", to_string(cfg.sem_scope)},
              {"gain", to_string(cfg.gain)}};
  return c;
}

CtxRanker CtxRanker::from_checkpoint(const Checkpoint& ckpt, CtxConfig* cfg) {
  if (ckpt.kind != kKind) throw DataError("expected a ctx checkpoint, got '" + ckpt.kind + "'");
  try {
    const auto m = ckpt.config.at("m").get<std::size_t>();
    const auto d = ckpt.config.at("d").get<std::size_t>();
    CtxRanker r(m, d);
    r.w_big_.value = ckpt.tensor("W_F", {d, 1, 4 * m});
    r.w_out_.value = ckpt.tensor("W_f", {1, d});
    r.w_big_.zero_grad();
    r.w_out_.zero_grad();
    if (cfg) {
      cfg->bins = m;
      cfg->out_dim = d;
      cfg->tau = ckpt.config.value("tau", cfg->tau);
      cfg->max_sents = ckpt.config.value("l", cfg->max_sents);
      cfg->sem_scope = parse_sem_norm_scope(ckpt.config.value("sem_norm_scope", std::string("step")));
      cfg->gain = parse_gain_measure(ckpt.config.value("gain", std::string("mean12")));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed ctx checkpoint config: ") + e.what());
  }
}

double ctx_score(double salience, const BinnedFeatures& features, const CtxRanker& ranker) {
  return ranker.score(salience, features);
}

CtxStep make_ctx_step(const Document& doc, const DocEmbeddings& emb, std::span<const double> doc_salience,
                      std::span<const std::size_t> selected, const CtxConfig& cfg) {
  if (doc_salience.size() != doc.size()) throw std::invalid_argument("salience count != sentence count");
  CtxStep step;
  step.candidates = complement(doc.size(), selected);
  for (auto c : step.candidates) step.salience.push_back(doc_salience[c]);
  step.features = redundancy_features(doc, emb.sentences, selected, step.candidates,
                                      {cfg.bins, cfg.sem_scope});
  return step;
}

CtxTraining train_ctx(std::span<const Document> corpus, std::span<const DocEmbeddings> embeddings,
                      const SalienceModel& salience, const CtxConfig& cfg, const grad::TrainSchedule& schedule) {
  if (corpus.size() != embeddings.size()) throw std::invalid_argument("corpus/embedding count mismatch");
  if (corpus.empty()) throw DataError("empty training corpus");
  if (cfg.max_sents == 0) throw std::invalid_argument("l must be >= 1");
  for (const auto& d : corpus) require_training_doc(d);

  std::vector<std::vector<double>> doc_salience;
  doc_salience.reserve(corpus.size());
  for (const auto& e : embeddings) doc_salience.push_back(salience_scores(e, salience));

  CtxTraining out{CtxRanker::random(cfg.bins, cfg.out_dim, schedule.seed), {}};
  auto params = out.ranker.parameters();
  grad::OptimizerState opt;
  Rng rng(schedule.seed ^ 0xc7c7c7c7ULL);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < schedule.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0;
    std::size_t counted = 0;
    for (auto d : order) {
      const Document& doc = corpus[d];
      const auto& labels = *doc.oracle_labels;
      const std::size_t usable = std::min(cfg.max_sents, labels.size());
      std::vector<std::size_t> context;
      if (usable >= 2) {
        const std::size_t k = 1 + rng.below(usable - 1);
        for (auto pick : rng.sample(labels.size(), k)) context.push_back(labels[pick]);
      }
      const CtxStep step = make_ctx_step(doc, embeddings[d], doc_salience[d], context, cfg);
      if (step.candidates.empty()) continue;
      const auto q = target_distribution(step_gains(doc, step.candidates, context, cfg.gain), cfg.tau);

      grad::zero_grad(params);
      grad::Tape tape;
      auto loss = kl_loss(tape, out.ranker.scores(tape, step.salience, step.features), q);
      total += tape.value(loss).values[0];
      ++counted;
      tape.backward(loss);
      grad::adam_step(opt, params, grad::lr_at(opt.step + 1, schedule.lr, schedule.warmup));
    }
    out.epoch_losses.push_back(counted ? total / static_cast<double>(counted) : 0.0);
    spdlog::info("ctx epoch {}: mean kl {:.5f}", epoch + 1, out.epoch_losses.back());
  }
  return out;
}

// ---------------------------------------------------------------------------

SeqRanker::SeqRanker(std::size_t dim, const SeqConfig& cfg)
    : dim_(dim),
      cfg_(cfg),
      w1_("W_1s", grad::Tensor({cfg.hidden, 2 * dim})),
      w2_("W_2s", grad::Tensor({1, cfg.hidden})),
      w_ds_("W_ds", grad::Tensor({dim, dim})),
      w_o_("W_o", grad::Tensor({1, 1})) {
  if (dim == 0 || cfg.attn_dim == 0 || cfg.hidden == 0 || cfg.layers == 0)
    throw std::invalid_argument("seq ranker dimensions must be positive");
  if (cfg.dropout < 0.0 || cfg.dropout >= 1.0) throw std::invalid_argument("dropout must lie in [0, 1)");
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const auto sfx = "_" + std::to_string(l);
    layers_.push_back({grad::Parameter("Wq" + sfx, grad::Tensor({cfg.attn_dim, dim})),
                       grad::Parameter("Wk" + sfx, grad::Tensor({dim, cfg.attn_dim})),
                       grad::Parameter("Wv" + sfx, grad::Tensor({dim, dim})),
                       grad::Parameter("Wp" + sfx, grad::Tensor({dim, dim}))});
  }
}

SeqRanker SeqRanker::random(std::size_t dim, const SeqConfig& cfg, std::uint64_t seed) {
  SeqRanker r(dim, cfg);
  Rng rng(seed);
  const double rd = 1.0 / std::sqrt(static_cast<double>(dim));
  for (auto& layer : r.layers_) {
    fill_uniform(layer.query, rng, rd);
    fill_uniform(layer.key, rng, 1.0 / std::sqrt(static_cast<double>(cfg.attn_dim)));
    fill_uniform(layer.value, rng, rd);
    fill_uniform(layer.proj, rng, rd);
  }
  fill_uniform(r.w1_, rng, 1.0 / std::sqrt(2.0 * static_cast<double>(dim)));
  fill_uniform(r.w2_, rng, 1.0 / std::sqrt(static_cast<double>(cfg.hidden)));
  fill_uniform(r.w_ds_, rng, rd);
  r.w_o_.value.values[0] = 1.0;
  return r;
}

std::vector<grad::Parameter*> SeqRanker::parameters() {
  std::vector<grad::Parameter*> out;
  for (auto& l : layers_) out.insert(out.end(), {&l.query, &l.key, &l.value, &l.proj});
  out.insert(out.end(), {&w1_, &w2_, &w_ds_, &w_o_});
  return out;
}

grad::Parameter& SeqRanker::param(const std::string& name) {
  for (auto* p : parameters())
    if (p->name == name) return *p;
  throw std::out_of_range("no seq parameter named '" + name + "'");
}

grad::Var SeqRanker::decoder_state(grad::Tape& tape, std::span<const Vec> selected, std::span<const Vec> encoder,
                                   Rng* dropout) {
  if (encoder.empty()) throw std::invalid_argument("decoder needs at least one encoder output");
  Vec query(dim_, 0.0);
  for (const auto& s : selected) {
    if (s.size() != dim_) throw std::invalid_argument("decoder: selected embedding dim mismatch");
    for (std::size_t i = 0; i < dim_; ++i) query[i] += s[i];
  }
  if (!selected.empty())
    for (auto& v : query) v /= static_cast<double>(selected.size());

  const grad::Tensor enc = stack_rows(encoder, dim_);  // L x dim
  auto enc_v = tape.constant(enc);
  auto enc_t = tape.transpose(enc_v);
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(cfg_.attn_dim));

  grad::Var q = tape.constant(grad::Tensor::column(query));
  for (auto& layer : layers_) {
    auto qp = tape.matmul(tape.param(layer.query), q);                     // attn x 1
    auto keys = tape.matmul(enc_v, tape.param(layer.key));                 // L x attn
    auto attn = tape.softmax(tape.scale(tape.matmul(keys, qp), inv_sqrt));  // L x 1
    auto context = tape.matmul(tape.param(layer.value), tape.matmul(enc_t, attn));
    auto h = tape.matmul(tape.param(layer.proj), tape.add(q, context));
    if (dropout && cfg_.dropout > 0.0) {
      grad::Tensor mask({dim_, 1});
      const double keep = 1.0 - cfg_.dropout;
      for (auto& m : mask.values) m = dropout->bernoulli(keep) ? 1.0 / keep : 0.0;
      h = tape.mul(h, tape.constant(std::move(mask)));
    }
    q = h;
  }
  return q;
}

grad::Var SeqRanker::scores(grad::Tape& tape, grad::Var state, std::span<const Vec> candidates,
                            std::span<const double> doc_vec) {
  if (candidates.empty()) throw std::invalid_argument("seq scores: no candidates");
  if (doc_vec.size() != dim_) throw std::invalid_argument("seq scores: document vector dim mismatch");
  if (tape.value(state).rows() != dim_) throw std::invalid_argument("seq scores: state dim mismatch");
  auto w1 = tape.param(w1_);
  auto w2 = tape.param(w2_);
  std::vector<grad::Var> local;
  local.reserve(candidates.size());
  for (const auto& c : candidates) {
    auto x = std::array{state, tape.constant(grad::Tensor::column(c))};
    local.push_back(tape.matmul(w2, tape.tanh(tape.matmul(w1, tape.concat(x)))));
  }
  auto o_local = tape.concat(local);  // n x 1
  auto cands = tape.constant(stack_rows(candidates, dim_));
  auto u = tape.matmul(tape.constant(grad::Tensor::row({doc_vec.begin(), doc_vec.end()})), tape.param(w_ds_));
  auto o_global = tape.tanh(tape.transpose(tape.matmul(u, tape.transpose(cands))));  // n x 1
  return tape.matmul(tape.add(o_local, o_global), tape.param(w_o_));
}

std::vector<double> SeqRanker::infer(const DocEmbeddings& emb, std::span<const std::size_t> selected,
                                     std::span<const std::size_t> candidates) {
  std::vector<Vec> sel, cand;
  for (auto s : selected) sel.push_back(emb.sentences.at(s));
  for (auto c : candidates) cand.push_back(emb.sentences.at(c));
  grad::Tape tape;
  auto state = decoder_state(tape, sel, emb.sentences, nullptr);
  return tape.value(scores(tape, state, cand, emb.document)).values;
}

Checkpoint SeqRanker::to_checkpoint() const {
  Checkpoint c;
  c.kind = kKind;
  c.dim = dim_;
  for (const auto& l : layers_)
    for (const auto* p : {&l.query, &l.key, &l.value, &l.proj}) c.add(*p);
  for (const auto* p : {&w1_, &w2_, &w_ds_, &w_o_}) c.add(*p);
  c.config = {{"attn_dim", cfg_.attn_dim}, {"hidden", cfg_.hidden},
              {"layers", cfg_.layers},     {"dropout", cfg_.dropout},
              {"tau", cfg_.tau},           {"l", cfg_.max_sents},
              {"replace_prob", cfg_.replace_prob}, {"gain", to_string(cfg_.gain)}};
  return c;
}

SeqRanker SeqRanker::from_checkpoint(const Checkpoint& ckpt) {
  if (ckpt.kind != kKind) throw DataError("expected a seq checkpoint, got '" + ckpt.kind + "'");
  SeqConfig cfg;
  try {
    cfg.attn_dim = ckpt.config.at("attn_dim").get<std::size_t>();
    cfg.hidden = ckpt.config.at("hidden").get<std::size_t>();
    cfg.layers = ckpt.config.at("layers").get<std::size_t>();
    cfg.dropout = ckpt.config.value("dropout", cfg.dropout);
    cfg.tau = ckpt.config.value("tau", cfg.tau);
    cfg.max_sents = ckpt.config.value("l", cfg.max_sents);
    cfg.replace_prob = ckpt.config.value("replace_prob", cfg.replace_prob);
    cfg.gain = parse_gain_measure(ckpt.config.value("gain", std::string("mean12")));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed seq checkpoint config: ") + e.what());
  }
  SeqRanker r(ckpt.dim, cfg);
  for (auto* p : r.parameters()) {
    p->value = ckpt.tensor(p->name, p->value.shape);
    p->zero_grad();
  }
  return r;
}

std::vector<std::vector<std::size_t>> seq_contexts(const Document& doc, std::size_t max_sents,
                                                   double replace_prob, Rng& rng) {
  require_training_doc(doc);
  const auto& labels = *doc.oracle_labels;
  const std::size_t steps = std::min(max_sents, labels.size());
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t k = 0; k < steps; ++k) {
    std::vector<std::size_t> ctx(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(k));
    for (std::size_t i = 0; i < ctx.size(); ++i) {
      if (!rng.bernoulli(replace_prob)) continue;
      std::vector<std::size_t> pool;
      for (std::size_t s = 0; s < doc.size(); ++s)
        if (std::find(ctx.begin(), ctx.end(), s) == ctx.end()) pool.push_back(s);
      if (!pool.empty()) ctx[i] = pool[rng.below(pool.size())];
    }
    out.push_back(std::move(ctx));
  }
  return out;
}

SeqTraining train_seq(std::span<const Document> corpus, std::span<const DocEmbeddings> embeddings,
                      const SeqConfig& cfg, const grad::TrainSchedule& schedule) {
  if (corpus.size() != embeddings.size()) throw std::invalid_argument("corpus/embedding count mismatch");
  if (corpus.empty()) throw DataError("empty training corpus");
  for (const auto& d : corpus) require_training_doc(d);

  SeqTraining out{SeqRanker::random(embeddings.front().dim(), cfg, schedule.seed), {}};
  auto params = out.ranker.parameters();
  grad::OptimizerState opt;
  Rng rng(schedule.seed ^ 0x5e95e95eULL);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < schedule.epochs; ++epoch) {
    rng.shuffle(order);
    double total = 0.0;
    for (auto d : order) {
      const Document& doc = corpus[d];
      const DocEmbeddings& emb = embeddings[d];
      grad::zero_grad(params);
      grad::Tape tape;
      std::vector<grad::Var> step_losses;
      for (const auto& ctx : seq_contexts(doc, cfg.max_sents, cfg.replace_prob, rng)) {
        const auto cands = complement(doc.size(), ctx);
        if (cands.empty()) continue;
        const auto q = target_distribution(step_gains(doc, cands, ctx, cfg.gain), cfg.tau);
        std::vector<Vec> sel, cand;
        for (auto s : ctx) sel.push_back(emb.sentences[s]);
        for (auto c : cands) cand.push_back(emb.sentences[c]);
        auto state = out.ranker.decoder_state(tape, sel, emb.sentences, &rng);
        step_losses.push_back(kl_loss(tape, out.ranker.scores(tape, state, cand, emb.document), q));
      }
      if (step_losses.empty()) continue;
      auto loss = tape.sum(tape.concat(step_losses));
      total += tape.value(loss).values[0];
      tape.backward(loss);
      grad::adam_step(opt, params, grad::lr_at(opt.step + 1, schedule.lr, schedule.warmup));
    }
    out.epoch_losses.push_back(total / static_cast<double>(corpus.size()));
    spdlog::info("seq epoch {}: mean kl {:.5f}", epoch + 1, out.epoch_losses.back());
  }
  return out;
}

}  // namespace redsum
