#include <doctest.h>

#include <set>
#include <stdexcept>

#include "redsum/oracle.h"
#include "redsum/select.h"
#include "redsum/synth.h"
#include "support.h"

using namespace redsum;

namespace {

void check_valid(const SelectionResult& r, std::size_t l, std::size_t n) {
  REQUIRE(r.chosen.size() == std::min(l, n));
  REQUIRE(std::set<std::size_t>(r.chosen.begin(), r.chosen.end()).size() == r.chosen.size());
  for (auto i : r.chosen) REQUIRE(i < n);
}

Vec random_unit(Rng& rng, std::size_t dim) {
  Vec v(dim);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  l2_normalize(v);
  return v;
}

}  // namespace

TEST_CASE("strategy names") {
  for (auto s : {Strategy::kLead, Strategy::kTopk, Strategy::kTriblk, Strategy::kMmr, Strategy::kCtx, Strategy::kSeq})
    CHECK(parse_strategy(to_string(s)) == s);
  CHECK_THROWS_AS(parse_strategy("oracle"), std::invalid_argument);
}

TEST_CASE("lead and topk") {
  auto doc = make_document("d", {"a", "b", "c", "d"}, std::nullopt, std::nullopt);
  CHECK(select_lead(doc, 3).chosen == std::vector<std::size_t>{0, 1, 2});
  CHECK(select_lead(doc, 9).chosen.size() == 4);
  const std::vector<double> sal{0.1, 0.5, 0.4};
  CHECK(select_topk(sal, 2).chosen == std::vector<std::size_t>{1, 2});
  CHECK(select_topk(std::vector<double>{0.3, 0.3, 0.4}, 2).chosen == std::vector<std::size_t>{2, 0});
  CHECK_THROWS(select_topk(sal, 0));
}

TEST_CASE("trigram blocking") {
  auto doc = make_document("d", {"the cat sat on the mat", "a cat sat on a rug", "dogs bark loudly", "the cat sat"},
                           std::nullopt, std::nullopt);
  const std::vector<double> sal{0.4, 0.3, 0.1, 0.2};
  auto r = select_trigram_blocking(sal, doc, 3);
  // sentence 1 repeats "cat sat on" and sentence 3 repeats "the cat sat"; padding follows salience
  CHECK(r.chosen == std::vector<std::size_t>{0, 2, 1});
  CHECK(r.unpadded == 2);
  CHECK(shares_trigram(doc.sentences[0].tokens, doc.sentences[3].tokens));
  CHECK_FALSE(shares_trigram(doc.sentences[0].tokens, doc.sentences[2].tokens));

  auto r2 = select_trigram_blocking(sal, doc, 2);
  CHECK(r2.chosen == std::vector<std::size_t>{0, 2});
  CHECK(r2.unpadded == 2);
}

TEST_CASE("mmr") {
  const std::vector<double> sal{0.9, 0.85, 0.3};
  const std::vector<Vec> emb{{1, 0}, {1, 0}, {0, 1}};
  CHECK(select_mmr(sal, emb, 0.5, 2).chosen == std::vector<std::size_t>{0, 2});
  CHECK(select_mmr(sal, emb, 1.0, 2).chosen == std::vector<std::size_t>{0, 1});
  CHECK_THROWS_AS(select_mmr(sal, emb, 1.5, 2), std::invalid_argument);

  Rng rng(12);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + rng.below(12);
    std::vector<double> s(n);
    std::vector<Vec> e;
    for (auto& x : s) x = rng.uniform();
    for (std::size_t i = 0; i < n; ++i) e.push_back(random_unit(rng, 4));
    const std::size_t l = 1 + rng.below(4);
    REQUIRE(select_mmr(s, e, 1.0, l).chosen == select_topk(s, l).chosen);
  }
}

TEST_CASE("selection invariants and shared first pick") {
  Rng rng(19);
  auto sal_model = SalienceModel::random(16, 3);
  auto ctx = CtxRanker::random(10, 5, 3);
  SeqConfig scfg;
  scfg.attn_dim = 8;
  scfg.hidden = 8;
  auto seq = SeqRanker::random(16, scfg, 3);
  CtxConfig ccfg;
  for (int t = 0; t < 100; ++t) {
    auto doc = testsupport::random_document(rng, 1 + rng.below(10), 10, 15);
    DocEmbeddings emb;
    for (std::size_t i = 0; i < doc.size(); ++i) emb.sentences.push_back(random_unit(rng, 16));
    emb.document = document_vector(emb.sentences);
    const auto sal = salience_scores(emb, sal_model);
    const std::size_t l = 1 + rng.below(4);
    const std::size_t n = doc.size();

    auto topk = select_topk(sal, l);
    auto tri = select_trigram_blocking(sal, doc, l);
    auto mmr = select_mmr(sal, emb.sentences, 0.6, l);
    auto c = select_ctx(sal_model, ctx, ccfg, doc, emb, l);
    auto s = select_seq(seq, doc, emb, l);
    for (const auto* r : {&topk, &tri, &mmr, &c, &s}) check_valid(*r, l, n);
    check_valid(select_lead(doc, l), l, n);

    REQUIRE(tri.chosen[0] == topk.chosen[0]);
    REQUIRE(mmr.chosen[0] == topk.chosen[0]);
    REQUIRE(c.chosen[0] == topk.chosen[0]);

    // no two unpadded picks share a trigram
    for (std::size_t a = 0; a < tri.unpadded; ++a)
      for (std::size_t b = a + 1; b < tri.unpadded; ++b)
        REQUIRE_FALSE(shares_trigram(doc.sentences[tri.chosen[a]].tokens, doc.sentences[tri.chosen[b]].tokens));
  }
}

TEST_CASE("seq decoding") {
  SeqConfig cfg;
  cfg.attn_dim = 4;
  cfg.hidden = 4;
  SeqRanker zero(3, cfg);
  auto doc = make_document("d", {"a b", "c d", "e f"}, std::nullopt, std::nullopt);
  DocEmbeddings emb;
  emb.sentences = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  emb.document = document_vector(emb.sentences);
  CHECK(select_seq(zero, doc, emb, 1).chosen == std::vector<std::size_t>{0});

  auto r = SeqRanker::random(3, cfg, 5);
  CHECK(select_seq(r, doc, emb, 3).chosen == select_seq(r, doc, emb, 3).chosen);
}

TEST_CASE("trained seq beats random picks on step gain") {
  SynthConfig sc;
  sc.docs = 120;
  auto train = make_synth_corpus(sc).documents;
  sc.docs = 40;
  sc.seed = 2;
  auto test = make_synth_corpus(sc).documents;
  for (auto& d : train) d.oracle_labels = greedy_oracle_labels(d, 3);
  HashedTfidfProvider provider(64, DocumentFrequency(train));
  std::vector<DocEmbeddings> train_emb, test_emb;
  for (const auto& d : train) train_emb.push_back(provider.embed_document(d));
  for (const auto& d : test) test_emb.push_back(provider.embed_document(d));

  SeqConfig cfg;
  cfg.attn_dim = 32;
  cfg.hidden = 32;
  cfg.max_sents = 2;
  grad::TrainSchedule schedule;
  schedule.epochs = 4;
  schedule.lr = 0.02;
  schedule.warmup = 50;
  auto ranker = train_seq(train, train_emb, cfg, schedule).ranker;

  Rng rng(4);
  double model_gain = 0.0, random_gain = 0.0;
  for (std::size_t d = 0; d < test.size(); ++d) {
    auto picks = select_seq(ranker, test[d], test_emb[d], 2).chosen;
    model_gain += summary_measure(test[d], picks);
    for (int rep = 0; rep < 10; ++rep) random_gain += summary_measure(test[d], rng.sample(test[d].size(), 2)) / 10.0;
  }
  MESSAGE("seq " << model_gain / test.size() << " random " << random_gain / test.size());
  CHECK(model_gain >= random_gain);
}
