#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "redsum/oracle.h"
#include "redsum/rankers.h"
#include "redsum/synth.h"
#include "support.h"

using namespace redsum;
using doctest::Approx;

namespace {

Vec random_unit(Rng& rng, std::size_t dim) {
  Vec v(dim);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  l2_normalize(v);
  return v;
}

std::vector<double> random_distribution(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(0.01, 1.0);
  const double z = std::accumulate(v.begin(), v.end(), 0.0);
  for (auto& x : v) x /= z;
  return v;
}

void fill(grad::Parameter& p, Rng& rng, double scale) {
  for (auto& v : p.value.values) v = rng.uniform(-scale, scale);
}

struct SynthSetup {
  std::vector<Document> train, test;
  std::vector<DocEmbeddings> train_emb, test_emb;
};

SynthSetup synth_setup(std::size_t train_docs, std::size_t test_docs, std::size_t dim) {
  SynthSetup s;
  SynthConfig cfg;
  cfg.docs = train_docs;
  cfg.seed = 1;
  s.train = make_synth_corpus(cfg).documents;
  cfg.docs = test_docs;
  cfg.seed = 2;
  s.test = make_synth_corpus(cfg).documents;
  for (auto* corpus : {&s.train, &s.test})
    for (auto& d : *corpus) d.oracle_labels = greedy_oracle_labels(d, 3);
  HashedTfidfProvider provider(dim, DocumentFrequency(s.train));
  for (const auto& d : s.train) s.train_emb.push_back(provider.embed_document(d));
  for (const auto& d : s.test) s.test_emb.push_back(provider.embed_document(d));
  return s;
}

}  // namespace

TEST_CASE("step distribution and kl") {
  auto p = step_distribution(std::vector<double>{0.0, 1.0});
  CHECK(p[0] == Approx(0.2689).epsilon(1e-4));
  CHECK(p[1] == Approx(0.7311).epsilon(1e-4));
  CHECK(step_distribution(std::vector<double>{5.0}) == std::vector<double>{1.0});
  for (double v : step_distribution(std::vector<double>{2.0, 2.0, 2.0, 2.0})) CHECK(v == Approx(0.25));
  CHECK_THROWS_AS(step_distribution(std::vector<double>{}), std::invalid_argument);

  CHECK(kl_loss(std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.5}) == Approx(std::log(2.0)));
  CHECK(kl_loss(std::vector<double>{0.3, 0.7}, std::vector<double>{0.3, 0.7}) == Approx(0.0));
  CHECK_THROWS_AS(kl_loss(std::vector<double>{1.0}, std::vector<double>{0.5, 0.5}), std::invalid_argument);
  // Q is floored, so a zero target stays finite
  CHECK(std::isfinite(kl_loss(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.0})));

  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.below(8);
    std::vector<double> scores(n);
    for (auto& s : scores) s = rng.uniform(-5, 5);
    const auto q = random_distribution(rng, n);
    const double plain = kl_loss(step_distribution(scores), q);
    CHECK(plain >= -1e-12);
    grad::Tape tape;
    auto v = kl_loss(tape, tape.constant(grad::Tensor::column(scores)), q);
    CHECK(tape.value(v).values[0] == Approx(plain).epsilon(1e-9));
  }
}

TEST_CASE("ctx score") {
  CtxRanker zero(2, 3);
  BinnedFeatures f;
  f.m = 2;
  f.bins = {1, 0, 1, 1};
  CHECK(zero.score(0.7, f) == 0.0);

  CtxRanker ones(2, 1);
  std::fill(ones.bilinear().value.values.begin(), ones.bilinear().value.values.end(), 1.0);
  std::fill(ones.output().value.values.begin(), ones.output().value.values.end(), 1.0);
  for (double s : {0.0, 0.1, 0.25, 0.9}) CHECK(ctx_score(s, f, ones) == Approx(std::tanh(4.0 * s)));

  auto r = CtxRanker::random(2, 5, 4);
  CHECK(r.score(0.0, f) == 0.0);
  BinnedFeatures wrong;
  wrong.m = 3;
  CHECK_THROWS(r.score(0.5, wrong));

  // the tape path agrees with the plain path
  Rng rng(6);
  std::vector<double> sal;
  std::vector<BinnedFeatures> feats;
  for (int i = 0; i < 6; ++i) {
    sal.push_back(rng.uniform());
    BinnedFeatures g;
    g.m = 2;
    for (auto& b : g.bins) b = rng.below(2);
    feats.push_back(g);
  }
  auto plain = r.scores(sal, feats);
  grad::Tape tape;
  auto taped = tape.value(r.scores(tape, sal, feats)).values;
  REQUIRE(taped.size() == plain.size());
  for (std::size_t i = 0; i < plain.size(); ++i) CHECK(taped[i] == Approx(plain[i]).epsilon(1e-12));
}

TEST_CASE("ctx kl gradient matches finite differences") {
  Rng rng(44);
  for (int t = 0; t < 20; ++t) {
    auto doc = testsupport::random_document(rng, 3 + rng.below(5), 8, 10);
    DocEmbeddings emb;
    for (std::size_t i = 0; i < doc.size(); ++i) emb.sentences.push_back(random_unit(rng, 6));
    emb.document = document_vector(emb.sentences);
    std::vector<double> salience(doc.size());
    for (auto& s : salience) s = rng.uniform(0.05, 1.0);
    CtxConfig cfg;
    cfg.bins = 4;
    cfg.out_dim = 5;
    const std::vector<std::size_t> ctx{rng.below(doc.size())};
    auto step = make_ctx_step(doc, emb, salience, ctx, cfg);
    const auto q = random_distribution(rng, step.candidates.size());
    auto ranker = CtxRanker::random(cfg.bins, cfg.out_dim, 500 + t);
    grad::LossBuilder f = [&](grad::Tape& tape) {
      return kl_loss(tape, ranker.scores(tape, step.salience, step.features), q);
    };
    auto params = ranker.parameters();
    REQUIRE(grad::finite_diff_check(f, params) <= 1e-4);
  }
}

TEST_CASE("seq scores and decoder state") {
  SeqConfig cfg;
  cfg.attn_dim = 2;
  cfg.hidden = 2;
  SeqRanker zero(2, cfg);
  const std::vector<Vec> enc{{1, 0}, {0, 1}};
  {
    grad::Tape tape;
    auto state = zero.decoder_state(tape, {}, enc, nullptr);
    auto s = tape.value(zero.scores(tape, state, enc, Vec{0.6, 0.8})).values;
    CHECK(s == std::vector<double>{0.0, 0.0});
  }

  SUBCASE("hand-set projections") {
    SeqRanker r(2, cfg);
    for (const char* name : {"Wq_0", "Wk_0", "Wv_0", "Wp_0"}) {
      auto& p = r.param(name);
      p.value.at(0, 0) = 1.0;
      p.value.at(1, 1) = 1.0;
    }
    grad::Tape tape;
    const std::vector<Vec> sel{{1, 0}};
    auto state = tape.value(r.decoder_state(tape, sel, enc, nullptr)).values;
    // scores (1, 0) / sqrt(2) -> softmax weights a, 1 - a
    const double a = 1.0 / (1.0 + std::exp(-1.0 / std::sqrt(2.0)));
    CHECK(state[0] == Approx(1.0 + a));
    CHECK(state[1] == Approx(1.0 - a));
  }

  SUBCASE("identical encoder outputs pass through attention") {
    Rng rng(5);
    auto r = SeqRanker::random(3, cfg, 9);
    auto& wv = r.param("Wv_0");
    auto& wp = r.param("Wp_0");
    std::fill(wv.value.values.begin(), wv.value.values.end(), 0.0);
    std::fill(wp.value.values.begin(), wp.value.values.end(), 0.0);
    for (std::size_t i = 0; i < 3; ++i) wv.value.at(i, i) = wp.value.at(i, i) = 1.0;
    const Vec e = random_unit(rng, 3);
    const std::vector<Vec> same{e, e, e};
    for (int trial = 0; trial < 3; ++trial) {
      const std::vector<Vec> sel{random_unit(rng, 3)};
      grad::Tape tape;
      auto state = tape.value(r.decoder_state(tape, sel, same, nullptr)).values;
      for (std::size_t i = 0; i < 3; ++i) CHECK(state[i] == Approx(sel[0][i] + e[i]));
    }
  }

  SUBCASE("two candidates by hand") {
    SeqRanker r(2, cfg);
    auto& w1 = r.param("W_1s");  // 2 x 4
    w1.value.values = {0.5, -0.2, 0.1, 0.3, -0.4, 0.2, 0.6, -0.1};
    r.param("W_2s").value.values = {0.7, -1.1};
    r.param("W_ds").value.values = {0.3, 0.1, -0.2, 0.4};
    r.param("W_o").value.values = {1.5};
    const Vec h{0.2, -0.5}, hd{0.6, 0.8};
    const std::vector<Vec> cands{{1, 0}, {0.6, 0.8}};
    grad::Tape tape;
    auto state = tape.constant(grad::Tensor::column(h));
    auto got = tape.value(r.scores(tape, state, cands, hd)).values;
    for (std::size_t c = 0; c < 2; ++c) {
      const double x[4] = {h[0], h[1], cands[c][0], cands[c][1]};
      double ol = 0.0;
      for (std::size_t j = 0; j < 2; ++j) {
        double z = 0.0;
        for (std::size_t k = 0; k < 4; ++k) z += w1.value.values[j * 4 + k] * x[k];
        ol += r.param("W_2s").value.values[j] * std::tanh(z);
      }
      const auto& wds = r.param("W_ds").value.values;
      double bil = 0.0;
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t k = 0; k < 2; ++k) bil += hd[i] * wds[i * 2 + k] * cands[c][k];
      CHECK(got[c] == Approx(1.5 * (ol + std::tanh(bil))));
    }
    r.param("W_o").value.values = {0.0};
    grad::Tape t2;
    auto zeroed = t2.value(r.scores(t2, t2.constant(grad::Tensor::column(h)), cands, hd)).values;
    CHECK(zeroed == std::vector<double>{0.0, 0.0});
  }

  CHECK_THROWS(zero.param("nope"));
  grad::Tape tape;
  CHECK_THROWS(zero.decoder_state(tape, std::vector<Vec>{{1, 0, 0}}, enc, nullptr));
}

TEST_CASE("seq kl gradient matches finite differences") {
  Rng rng(77);
  SeqConfig cfg;
  cfg.attn_dim = 3;
  cfg.hidden = 4;
  for (int t = 0; t < 20; ++t) {
    cfg.layers = 1 + static_cast<std::size_t>(t % 2);
    auto r = SeqRanker::random(4, cfg, 900 + t);
    // wider attention and hidden weights so the decoder path carries gradient
    for (auto* p : r.parameters())
      if (p->name == "W_1s" || p->name.starts_with("Wq") || p->name.starts_with("Wk")) fill(*p, rng, 2.0);
    const std::size_t n = 3 + rng.below(4);
    std::vector<Vec> enc;
    for (std::size_t i = 0; i < n; ++i) enc.push_back(random_unit(rng, 4));
    const Vec hd = document_vector(enc);
    const std::vector<Vec> sel{enc[0]};
    const std::vector<Vec> cands(enc.begin() + 1, enc.end());
    const auto q = random_distribution(rng, cands.size());
    const std::uint64_t mask_seed = 31 + t;
    grad::LossBuilder f = [&](grad::Tape& tape) {
      Rng dropout(mask_seed);  // same mask on every evaluation
      auto state = r.decoder_state(tape, sel, enc, &dropout);
      return kl_loss(tape, r.scores(tape, state, cands, hd), q);
    };
    auto params = r.parameters();
    REQUIRE(grad::finite_diff_check(f, params, 1e-4) <= 1e-4);
  }
}

TEST_CASE("teacher forcing contexts") {
  auto doc = make_document("d", {"a", "b", "c", "d", "e"}, std::vector<std::string>{"a c e"},
                           std::vector<std::size_t>{2, 0, 4});
  Rng rng(1);
  auto clean = seq_contexts(doc, 3, 0.0, rng);
  REQUIRE(clean.size() == 3);
  CHECK(clean[0].empty());
  CHECK(clean[1] == std::vector<std::size_t>{2});
  CHECK(clean[2] == std::vector<std::size_t>{2, 0});
  CHECK(seq_contexts(doc, 2, 0.0, rng).size() == 2);

  for (int t = 0; t < 50; ++t) {
    auto noisy = seq_contexts(doc, 3, 1.0, rng);
    REQUIRE(noisy[2].size() == 2);
    CHECK(noisy[2][0] != noisy[2][1]);
    CHECK(noisy[1][0] != 2);
  }
  Document bare = doc;
  bare.oracle_labels.reset();
  CHECK_THROWS_AS(seq_contexts(bare, 3, 0.0, rng), DataError);
}

TEST_CASE("zero epochs return the initialization") {
  auto s = synth_setup(20, 1, 32);
  auto sal = SalienceModel::random(32, 1);
  grad::TrainSchedule schedule;
  schedule.epochs = 0;
  CtxConfig cfg;
  auto ctx = train_ctx(s.train, s.train_emb, sal, cfg, schedule);
  CHECK(ctx.ranker.bilinear().value.values == CtxRanker::random(cfg.bins, cfg.out_dim, 1).bilinear().value.values);
  SeqConfig scfg;
  auto seq = train_seq(s.train, s.train_emb, scfg, schedule);
  auto init = SeqRanker::random(32, scfg, 1);
  auto a = seq.ranker.parameters();
  auto b = init.parameters();
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i]->value.values == b[i]->value.values);
}

TEST_CASE("trained ctx demotes the near-duplicate") {
  auto s = synth_setup(500, 100, 256);
  grad::TrainSchedule schedule;
  auto sal = train_salience(s.train, s.train_emb, schedule).model;
  CtxConfig cfg;
  cfg.max_sents = 2;
  auto ranker = train_ctx(s.train, s.train_emb, sal, cfg, schedule).ranker;
  CHECK(train_ctx(s.train, s.train_emb, sal, cfg, schedule).ranker.output().value.values ==
        ranker.output().value.values);

  std::size_t wins = 0;
  for (std::size_t d = 0; d < s.test.size(); ++d) {
    const auto roles = synth_roles(s.test[d]);
    const auto doc_sal = salience_scores(s.test_emb[d], sal);
    const std::vector<std::size_t> ctx{roles.salient};
    auto step = make_ctx_step(s.test[d], s.test_emb[d], doc_sal, ctx, cfg);
    const auto p = step_distribution(ranker.scores(step.salience, step.features));
    double pb = 0.0, pdup = 0.0;
    for (std::size_t i = 0; i < step.candidates.size(); ++i) {
      if (step.candidates[i] == roles.complement) pb = p[i];
      if (step.candidates[i] == roles.duplicate) pdup = p[i];
    }
    if (pb > pdup) ++wins;
  }
  MESSAGE("P(B) > P(A') in " << wins << " of " << s.test.size());
  CHECK(wins >= 90);
}

TEST_CASE("seq training loss falls over epochs") {
  auto s = synth_setup(60, 1, 32);
  SeqConfig cfg;
  cfg.attn_dim = 16;
  cfg.hidden = 16;
  std::size_t falls = 0;
  const std::size_t runs = 20;
  for (std::size_t seed = 1; seed <= runs; ++seed) {
    grad::TrainSchedule schedule;
    schedule.epochs = 5;
    schedule.seed = seed;
    auto r = train_seq(s.train, s.train_emb, cfg, schedule);
    if (r.epoch_losses.back() < r.epoch_losses.front()) ++falls;
  }
  MESSAGE("loss fell in " << falls << " of " << runs << " runs");
  CHECK(static_cast<double>(falls) >= 0.95 * static_cast<double>(runs));
}
