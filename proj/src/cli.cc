#include "redsum/cli.h"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "redsum/checkpoint.h"
#include "redsum/corpus.h"
#include "redsum/embed.h"
#include "redsum/eval.h"
#include "redsum/oracle.h"
#include "redsum/parallel.h"
#include "redsum/rankers.h"
#include "redsum/salience.h"
#include "redsum/select.h"
#include "redsum/synth.h"

namespace redsum::cli {

namespace {

using nlohmann::json;

struct Globals {
  std::size_t threads = default_threads();
  std::uint64_t seed = 1;
  std::string log_level = "info";
  std::size_t max_tokens = 512;
};

struct EmbedOpts {
  std::string embeddings;  // precomputed JSONL; empty means the hashed provider
  std::size_t dim = HashedTfidfProvider::kDefaultDim;
  std::string stats_corpus;
};

struct CorpusEmbeddings {
  std::vector<DocEmbeddings> docs;
  std::string provider;
  std::size_t dim = 0;
};

void add_embed_opts(CLI::App* cmd, EmbedOpts& o) {
  cmd->add_option("--embeddings", o.embeddings, "Precomputed embedding JSONL")->check(CLI::ExistingFile);
  cmd->add_option("--dim", o.dim, "Hashed TF-IDF dimension")->check(CLI::Range(8, 1 << 20));
  cmd->add_option("--stats-corpus", o.stats_corpus, "Corpus supplying document frequencies (default: input)")
      ->check(CLI::ExistingFile);
}

void add_schedule_opts(CLI::App* cmd, grad::TrainSchedule& s) {
  cmd->add_option("--epochs", s.epochs, "Training epochs")->check(CLI::Range(1, 1000));
  cmd->add_option("--lr", s.lr, "Initial learning rate")->check(CLI::PositiveNumber);
  cmd->add_option("--warmup", s.warmup, "Warmup steps")->check(CLI::Range(1, 1 << 30));
}

std::vector<Document> load_corpus(const std::string& path, const Globals& g) {
  CorpusConfig cfg;
  cfg.max_tokens = g.max_tokens;
  auto parsed = read_corpus(path, cfg);
  if (!parsed.errors.empty())
    spdlog::warn("{}: {} malformed record(s), first at line {}", path, parsed.errors.size(),
                 parsed.errors.front().line);
  if (parsed.documents.empty()) throw DataError("no usable documents in '" + path + "'");
  spdlog::info("{}: {} documents", path, parsed.documents.size());
  return std::move(parsed.documents);
}

CorpusEmbeddings embed_corpus(const std::vector<Document>& corpus, const EmbedOpts& o, const Globals& g) {
  CorpusEmbeddings out;
  std::unique_ptr<EmbeddingProvider> provider;
  if (!o.embeddings.empty()) {
    auto store = load_embeddings(o.embeddings);
    validate_embeddings(store, corpus);
    provider = std::make_unique<PrecomputedProvider>(std::move(store));
  } else {
    DocumentFrequency df = o.stats_corpus.empty() ? DocumentFrequency(corpus)
                                                  : DocumentFrequency(load_corpus(o.stats_corpus, g));
    provider = std::make_unique<HashedTfidfProvider>(o.dim, std::move(df));
  }
  out.provider = provider->name();
  out.dim = provider->dim();
  out.docs.resize(corpus.size());
  parallel_for(corpus.size(), g.threads, [&](std::size_t i) { out.docs[i] = provider->embed_document(corpus[i]); });
  return out;
}

void check_dim(const std::string& what, std::size_t ckpt_dim, const CorpusEmbeddings& emb) {
  if (ckpt_dim != emb.dim)
    throw DataError(what + " checkpoint expects dim " + std::to_string(ckpt_dim) + " but embeddings have dim " +
                    std::to_string(emb.dim));
}

void check_provider(const std::string& what, const std::string& recorded, const CorpusEmbeddings& emb) {
  if (!recorded.empty() && recorded != emb.provider)
    spdlog::warn("{} checkpoint was trained with '{}' embeddings, now using '{}'", what, recorded, emb.provider);
}

SalienceModel load_salience(const std::string& path, const CorpusEmbeddings& emb) {
  auto model = SalienceModel::from_checkpoint(load_checkpoint(path, SalienceModel::kKind));
  check_dim("salience", model.dim(), emb);
  check_provider("salience", model.provider, emb);
  return model;
}

/// Fills missing labels from abstracts so training can run on unlabeled input.
void ensure_labels(std::vector<Document>& corpus, std::size_t l, GainMeasure gain, const Globals& g) {
  std::size_t filled = 0;
  for (const auto& d : corpus)
    if (!d.oracle_labels && d.abstract) ++filled;
  if (filled == 0) return;
  spdlog::info("labeling {} document(s) without oracle labels", filled);
  parallel_for(corpus.size(), g.threads, [&](std::size_t i) {
    if (!corpus[i].oracle_labels && corpus[i].abstract) corpus[i].oracle_labels = greedy_oracle_labels(corpus[i], l, gain);
  });
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

json defaults_header() {
  return {{"l", 3},   {"tau", 20.0}, {"m", 10},          {"d", 20},
          {"epochs", 2}, {"lr", 2e-3}, {"warmup", 100}, {"adam", {{"beta1", 0.9}, {"beta2", 0.999}, {"eps", 1e-8}}},
          {"mmr_lambda", 0.6}, {"gain", "mean12"}, {"sem_norm_scope", "step"}};
}

/// Reads summarize output and aligns it with `corpus` by document id.
std::vector<SelectionResult> load_summaries(const std::string& path, const std::vector<Document>& corpus) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open summaries '" + path + "'");
  std::map<std::string, std::vector<std::size_t>> by_id;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      by_id[j.at("id").get<std::string>()] = j.at("selected").get<std::vector<std::size_t>>();
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  std::vector<SelectionResult> out;
  for (const auto& d : corpus) {
    auto it = by_id.find(d.id);
    if (it == by_id.end()) throw DataError("summaries '" + path + "' lack document '" + d.id + "'");
    for (auto i : it->second)
      if (i >= d.size()) throw DataError("summary for '" + d.id + "' selects sentence " + std::to_string(i) +
                                         " of " + std::to_string(d.size()));
    SelectionResult r;
    r.chosen = it->second;
    r.unpadded = r.chosen.size();
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string corpus, out;
};

void cmd_ingest(const IngestArgs& a, const Globals& g) {
  CorpusConfig cfg;
  cfg.max_tokens = g.max_tokens;
  auto parsed = read_corpus(a.corpus, cfg);
  for (const auto& e : parsed.errors) spdlog::warn("{}:{}: {}", a.corpus, e.line, e.message);
  write_corpus(a.out, parsed.documents);
  std::cout << json{{"documents", parsed.documents.size()},
                    {"errors", parsed.errors.size()},
                    {"skipped_empty", parsed.skipped_empty}}.dump()
            << '\n';
  if (parsed.documents.empty()) throw DataError("no usable documents in '" + a.corpus + "'");
}

struct LabelArgs {
  std::string corpus, out, gain = "mean12";
  std::size_t max_sents = 3;
};

void cmd_label(const LabelArgs& a, const Globals& g) {
  const GainMeasure gain = parse_gain_measure(a.gain);
  auto corpus = load_corpus(a.corpus, g);
  std::size_t missing = 0;
  for (const auto& d : corpus)
    if (!d.abstract) ++missing;
  if (missing) throw DataError(std::to_string(missing) + " document(s) lack an abstract; cannot label");
  parallel_for(corpus.size(), g.threads,
               [&](std::size_t i) { corpus[i].oracle_labels = greedy_oracle_labels(corpus[i], a.max_sents, gain); });
  write_corpus(a.out, corpus);
}

struct EmbedArgs {
  std::string corpus, out;
  EmbedOpts embed;
};

void cmd_embed(const EmbedArgs& a, const Globals& g) {
  auto corpus = load_corpus(a.corpus, g);
  auto emb = embed_corpus(corpus, a.embed, g);
  std::vector<std::vector<Vec>> vecs;
  for (auto& d : emb.docs) vecs.push_back(std::move(d.sentences));
  write_embeddings(a.out, corpus, vecs);
}

struct TrainSalienceArgs {
  std::string corpus, out;
  std::size_t max_sents = 3;
  EmbedOpts embed;
  grad::TrainSchedule schedule;
};

void cmd_train_salience(TrainSalienceArgs a, const Globals& g) {
  a.schedule.seed = g.seed;
  auto corpus = load_corpus(a.corpus, g);
  ensure_labels(corpus, a.max_sents, GainMeasure::kMeanR1R2, g);
  auto emb = embed_corpus(corpus, a.embed, g);
  auto result = train_salience(corpus, emb.docs, a.schedule);
  result.model.provider = emb.provider;
  spdlog::info("salience NLL {:.4f} -> {:.4f}", result.initial_loss, result.final_loss());
  auto ckpt = result.model.to_checkpoint();
  ckpt.config["epochs"] = a.schedule.epochs;
  ckpt.config["lr"] = a.schedule.lr;
  ckpt.config["warmup"] = a.schedule.warmup;
  ckpt.config["seed"] = a.schedule.seed;
  save_checkpoint(a.out, ckpt);
}

struct TrainCtxArgs {
  std::string corpus, salience, out, sem_norm = "step", gain = "mean12";
  CtxConfig cfg;
  EmbedOpts embed;
  grad::TrainSchedule schedule;
};

void cmd_train_ctx(TrainCtxArgs a, const Globals& g) {
  a.schedule.seed = g.seed;
  a.cfg.sem_scope = parse_sem_norm_scope(a.sem_norm);
  a.cfg.gain = parse_gain_measure(a.gain);
  auto corpus = load_corpus(a.corpus, g);
  auto emb = embed_corpus(corpus, a.embed, g);
  const auto salience = load_salience(a.salience, emb);
  ensure_labels(corpus, a.cfg.max_sents, a.cfg.gain, g);
  auto result = train_ctx(corpus, emb.docs, salience, a.cfg, a.schedule);
  if (!result.epoch_losses.empty()) spdlog::info("ctx KL after training {:.4f}", result.epoch_losses.back());
  auto ckpt = result.ranker.to_checkpoint(a.cfg, emb.dim);
  ckpt.config["provider"] = emb.provider;
  ckpt.config["seed"] = a.schedule.seed;
  save_checkpoint(a.out, ckpt);
}

struct TrainSeqArgs {
  std::string corpus, out, gain = "mean12";
  SeqConfig cfg;
  EmbedOpts embed;
  grad::TrainSchedule schedule;
};

void cmd_train_seq(TrainSeqArgs a, const Globals& g) {
  a.schedule.seed = g.seed;
  a.cfg.gain = parse_gain_measure(a.gain);
  auto corpus = load_corpus(a.corpus, g);
  ensure_labels(corpus, a.cfg.max_sents, a.cfg.gain, g);
  auto emb = embed_corpus(corpus, a.embed, g);
  auto result = train_seq(corpus, emb.docs, a.cfg, a.schedule);
  if (!result.epoch_losses.empty()) spdlog::info("seq KL after training {:.4f}", result.epoch_losses.back());
  auto ckpt = result.ranker.to_checkpoint();
  ckpt.config["provider"] = emb.provider;
  ckpt.config["seed"] = a.schedule.seed;
  save_checkpoint(a.out, ckpt);
}

struct SummarizeArgs {
  std::string strategy, corpus, out, salience, ctx, seq;
  std::size_t l = 3;
  double lambda = 0.6;
  EmbedOpts embed;
};

void cmd_summarize(const SummarizeArgs& a, const Globals& g) {
  const Strategy strategy = parse_strategy(a.strategy);
  const bool needs_salience = strategy == Strategy::kTopk || strategy == Strategy::kTriblk ||
                              strategy == Strategy::kMmr || strategy == Strategy::kCtx;
  if (needs_salience && a.salience.empty())
    throw CLI::ValidationError("--salience", "strategy '" + a.strategy + "' needs a salience checkpoint");
  if (strategy == Strategy::kCtx && a.ctx.empty())
    throw CLI::ValidationError("--ctx", "strategy 'ctx' needs a ctx checkpoint");
  if (strategy == Strategy::kSeq && a.seq.empty())
    throw CLI::ValidationError("--seq", "strategy 'seq' needs a seq checkpoint");

  // load checkpoints before the corpus so incompatibilities fail fast
  std::optional<Checkpoint> sal_ckpt, ctx_ckpt, seq_ckpt;
  if (needs_salience) sal_ckpt = load_checkpoint(a.salience, SalienceModel::kKind);
  if (strategy == Strategy::kCtx) ctx_ckpt = load_checkpoint(a.ctx, CtxRanker::kKind);
  if (strategy == Strategy::kSeq) seq_ckpt = load_checkpoint(a.seq, SeqRanker::kKind);
  if (sal_ckpt && ctx_ckpt && sal_ckpt->dim != ctx_ckpt->dim)
    throw DataError("salience and ctx checkpoints disagree on dim");

  auto corpus = load_corpus(a.corpus, g);
  CorpusEmbeddings emb;
  if (strategy != Strategy::kLead) emb = embed_corpus(corpus, a.embed, g);

  std::optional<SalienceModel> sal;
  if (sal_ckpt) {
    check_dim("salience", sal_ckpt->dim, emb);
    sal = SalienceModel::from_checkpoint(*sal_ckpt);
    check_provider("salience", sal->provider, emb);
  }
  CtxConfig ctx_cfg;
  std::optional<CtxRanker> ctx;
  if (ctx_ckpt) {
    check_dim("ctx", ctx_ckpt->dim, emb);
    ctx = CtxRanker::from_checkpoint(*ctx_ckpt, &ctx_cfg);
  }
  std::optional<SeqRanker> seq;
  if (seq_ckpt) {
    check_dim("seq", seq_ckpt->dim, emb);
    seq = SeqRanker::from_checkpoint(*seq_ckpt);
  }

  std::vector<SelectionResult> results(corpus.size());
  parallel_for(corpus.size(), strategy == Strategy::kSeq ? 1 : g.threads, [&](std::size_t i) {
    const Document& doc = corpus[i];
    switch (strategy) {
      case Strategy::kLead:
        results[i] = select_lead(doc, a.l);
        break;
      case Strategy::kTopk:
        results[i] = select_topk(salience_scores(emb.docs[i], *sal), a.l);
        break;
      case Strategy::kTriblk:
        results[i] = select_trigram_blocking(salience_scores(emb.docs[i], *sal), doc, a.l);
        break;
      case Strategy::kMmr:
        results[i] = select_mmr(salience_scores(emb.docs[i], *sal), emb.docs[i].sentences, a.lambda, a.l);
        break;
      case Strategy::kCtx:
        results[i] = select_ctx(*sal, *ctx, ctx_cfg, doc, emb.docs[i], a.l);
        break;
      case Strategy::kSeq:
        results[i] = select_seq(*seq, doc, emb.docs[i], a.l);
        break;
    }
  });

  std::ofstream out(a.out);
  if (!out) throw DataError("cannot write '" + a.out + "'");
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    json summary = json::array();
    for (auto s : results[i].chosen) summary.push_back(corpus[i].sentences[s].text);
    out << json{{"id", corpus[i].id}, {"selected", results[i].chosen}, {"summary", std::move(summary)}}.dump()
        << '\n';
  }
}

struct EvaluateArgs {
  std::string corpus, summaries, out, csv, baseline;
  std::size_t l = 3;
};

void cmd_evaluate(const EvaluateArgs& a, const Globals& g) {
  auto corpus = load_corpus(a.corpus, g);
  const auto selections = load_summaries(a.summaries, corpus);
  const auto report = evaluate_rouge(corpus, selections, g.threads);
  json j = report_json(report);
  j["defaults"] = defaults_header();
  j["summaries"] = a.summaries;
  j["p_at_k"] = mean_precision_at_k(corpus, selections, a.l);
  const PositionBuckets buckets;
  const auto hist = position_histogram(selections, buckets);
  json pos = json::object();
  for (std::size_t b = 0; b < hist.size(); ++b) pos[buckets.labels()[b]] = hist[b];
  j["position_histogram"] = std::move(pos);

  if (!a.baseline.empty()) {
    const auto base = load_summaries(a.baseline, corpus);
    const auto base_report = evaluate_rouge(corpus, base, g.threads);
    if (base_report.per_document.size() < 2) throw DataError("significance test needs at least two documents");
    auto column = [](const EvalReport& r, auto get) {
      std::vector<double> v;
      for (const auto& d : r.per_document) v.push_back(get(d.rouge));
      return v;
    };
    auto r1 = [](const RougeSuite& s) { return s.r1.f1; };
    auto r2 = [](const RougeSuite& s) { return s.r2.f1; };
    auto rl = [](const RougeSuite& s) { return s.rl.f1; };
    j["baseline"] = {
        {"summaries", a.baseline},
        {"rouge_1", as_percent(base_report.r1)},
        {"rouge_2", as_percent(base_report.r2)},
        {"rouge_l", as_percent(base_report.rl)},
        {"p_value",
         {{"rouge_1", paired_t_test(column(report, r1), column(base_report, r1))},
          {"rouge_2", paired_t_test(column(report, r2), column(base_report, r2))},
          {"rouge_l", paired_t_test(column(report, rl), column(base_report, rl))}}}};
  }

  if (!a.csv.empty()) {
    std::ofstream csv(a.csv);
    if (!csv) throw DataError("cannot write '" + a.csv + "'");
    csv << "id,rouge_1,rouge_2,rouge_l\n";
    for (const auto& d : report.per_document)
      csv << d.id << ',' << d.rouge.r1.f1 << ',' << d.rouge.r2.f1 << ',' << d.rouge.rl.f1 << '\n';
  }
  if (a.out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json_file(a.out, j);
  }
}

struct AnalyzeArgs {
  std::string corpus, pk_out, positions_out;
  std::vector<std::string> summaries;  // path or name=path
  std::size_t l = 3;
};

void cmd_analyze(const AnalyzeArgs& a, const Globals& g) {
  auto corpus = load_corpus(a.corpus, g);
  std::size_t labeled = 0;
  for (const auto& d : corpus)
    if (d.oracle_labels) ++labeled;
  if (labeled == 0) spdlog::warn("no document carries oracle labels; P@k will be zero");
  std::ofstream pk(a.pk_out);
  if (!pk) throw DataError("cannot write '" + a.pk_out + "'");
  std::ofstream pos(a.positions_out);
  if (!pos) throw DataError("cannot write '" + a.positions_out + "'");
  const PositionBuckets buckets;
  pk << "system";
  for (std::size_t k = 1; k <= a.l; ++k) pk << ",p_at_" << k;
  pk << '\n';
  pos << "system";
  for (const auto& label : buckets.labels()) pos << ',' << label;
  pos << '\n';
  for (const auto& spec : a.summaries) {
    const auto eq = spec.find('=');
    const std::string name = eq == std::string::npos ? spec : spec.substr(0, eq);
    const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    const auto selections = load_summaries(path, corpus);
    pk << name;
    for (double v : mean_precision_at_k(corpus, selections, a.l)) pk << ',' << v;
    pk << '\n';
    pos << name;
    for (double v : position_histogram(selections, buckets)) pos << ',' << v;
    pos << '\n';
  }
}

struct SynthArgs {
  std::string out, id_prefix = "synth";
  std::size_t docs = 500;
};

void cmd_synth(const SynthArgs& a, const Globals& g) {
  SynthConfig cfg;
  cfg.docs = a.docs;
  cfg.seed = g.seed;
  cfg.id_prefix = a.id_prefix;
  write_corpus(a.out, make_synth_corpus(cfg).documents);
}

int run_app(std::vector<std::string> args) {
  CLI::App app{"Redundancy-aware extractive summarization", "redsum"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--threads", g.threads, "Worker threads (default: REDSUM_THREADS or all cores)")
      ->check(CLI::Range(1, 1024));
  app.add_option("--seed", g.seed, "Seed for every random choice");
  app.add_option("--log-level", g.log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  app.add_option("--max-tokens", g.max_tokens, "Per-document token budget")->check(CLI::Range(1, 1 << 30));

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Parse, truncate and rewrite a corpus");
  c_ingest->add_option("--corpus", ingest.corpus)->required()->check(CLI::ExistingFile);
  c_ingest->add_option("--out", ingest.out)->required();

  LabelArgs label;
  auto* c_label = app.add_subcommand("label", "Attach greedy oracle labels");
  c_label->add_option("--corpus", label.corpus)->required()->check(CLI::ExistingFile);
  c_label->add_option("--out", label.out)->required();
  c_label->add_option("--max-sents", label.max_sents)->check(CLI::Range(1, 100));
  c_label->add_option("--gain", label.gain)->check(CLI::IsMember({"mean12", "r1", "r2", "rl"}));

  EmbedArgs embed;
  auto* c_embed = app.add_subcommand("embed", "Write hashed TF-IDF sentence embeddings");
  c_embed->add_option("--corpus", embed.corpus)->required()->check(CLI::ExistingFile);
  c_embed->add_option("--out", embed.out)->required();
  c_embed->add_option("--dim", embed.embed.dim)->check(CLI::Range(8, 1 << 20));
  c_embed->add_option("--stats-corpus", embed.embed.stats_corpus)->check(CLI::ExistingFile);

  TrainSalienceArgs tsal;
  auto* c_tsal = app.add_subcommand("train-salience", "Train the bilinear salience model");
  c_tsal->add_option("--corpus", tsal.corpus)->required()->check(CLI::ExistingFile);
  c_tsal->add_option("--out", tsal.out)->required();
  c_tsal->add_option("--max-sents", tsal.max_sents, "Label length when labels are missing")->check(CLI::Range(1, 100));
  add_embed_opts(c_tsal, tsal.embed);
  add_schedule_opts(c_tsal, tsal.schedule);

  TrainCtxArgs tctx;
  auto* c_tctx = app.add_subcommand("train-ctx", "Train the context-aware selection ranker");
  c_tctx->add_option("--corpus", tctx.corpus)->required()->check(CLI::ExistingFile);
  c_tctx->add_option("--salience", tctx.salience)->required()->check(CLI::ExistingFile);
  c_tctx->add_option("--out", tctx.out)->required();
  c_tctx->add_option("--bins,-m", tctx.cfg.bins)->check(CLI::Range(1, 1000));
  c_tctx->add_option("--out-dim,-d", tctx.cfg.out_dim)->check(CLI::Range(1, 10000));
  c_tctx->add_option("--tau", tctx.cfg.tau)->check(CLI::PositiveNumber);
  c_tctx->add_option("--max-sents,--l", tctx.cfg.max_sents)->check(CLI::Range(1, 100));
  c_tctx->add_option("--sem-norm", tctx.sem_norm)->check(CLI::IsMember({"step", "document"}));
  c_tctx->add_option("--gain", tctx.gain)->check(CLI::IsMember({"mean12", "r1", "r2", "rl"}));
  add_embed_opts(c_tctx, tctx.embed);
  add_schedule_opts(c_tctx, tctx.schedule);

  TrainSeqArgs tseq;
  auto* c_tseq = app.add_subcommand("train-seq", "Train the sequential decoder ranker");
  c_tseq->add_option("--corpus", tseq.corpus)->required()->check(CLI::ExistingFile);
  c_tseq->add_option("--out", tseq.out)->required();
  c_tseq->add_option("--attn-dim", tseq.cfg.attn_dim)->check(CLI::Range(1, 4096));
  c_tseq->add_option("--hidden", tseq.cfg.hidden)->check(CLI::Range(1, 4096));
  c_tseq->add_option("--layers", tseq.cfg.layers)->check(CLI::Range(1, 16));
  c_tseq->add_option("--dropout", tseq.cfg.dropout)->check(CLI::Range(0.0, 0.99));
  c_tseq->add_option("--tau", tseq.cfg.tau)->check(CLI::PositiveNumber);
  c_tseq->add_option("--max-sents,--l", tseq.cfg.max_sents)->check(CLI::Range(1, 100));
  c_tseq->add_option("--replace-prob", tseq.cfg.replace_prob)->check(CLI::Range(0.0, 1.0));
  c_tseq->add_option("--gain", tseq.gain)->check(CLI::IsMember({"mean12", "r1", "r2", "rl"}));
  add_embed_opts(c_tseq, tseq.embed);
  add_schedule_opts(c_tseq, tseq.schedule);

  SummarizeArgs sum;
  auto* c_sum = app.add_subcommand("summarize", "Select sentences with one strategy");
  c_sum->add_option("--strategy", sum.strategy)
      ->required()
      ->check(CLI::IsMember({"lead", "topk", "triblk", "mmr", "ctx", "seq"}));
  c_sum->add_option("--corpus", sum.corpus)->required()->check(CLI::ExistingFile);
  c_sum->add_option("--out", sum.out)->required();
  c_sum->add_option("--salience", sum.salience)->check(CLI::ExistingFile);
  c_sum->add_option("--ctx", sum.ctx)->check(CLI::ExistingFile);
  c_sum->add_option("--seq", sum.seq)->check(CLI::ExistingFile);
  c_sum->add_option("--l", sum.l)->check(CLI::Range(1, 100));
  c_sum->add_option("--lambda", sum.lambda)->check(CLI::Range(0.0, 1.0));
  add_embed_opts(c_sum, sum.embed);

  EvaluateArgs ev;
  auto* c_ev = app.add_subcommand("evaluate", "ROUGE report for a summaries file");
  c_ev->add_option("--corpus", ev.corpus)->required()->check(CLI::ExistingFile);
  c_ev->add_option("--summaries", ev.summaries)->required()->check(CLI::ExistingFile);
  c_ev->add_option("--out", ev.out, "JSON report (default: stdout)");
  c_ev->add_option("--csv", ev.csv, "Per-document scores");
  c_ev->add_option("--baseline", ev.baseline, "Summaries to test against")->check(CLI::ExistingFile);
  c_ev->add_option("--l", ev.l)->check(CLI::Range(1, 100));

  AnalyzeArgs an;
  auto* c_an = app.add_subcommand("analyze", "P@k and position tables as CSV");
  c_an->add_option("--corpus", an.corpus)->required()->check(CLI::ExistingFile);
  c_an->add_option("--summaries", an.summaries, "Summaries file, optionally name=path")->required();
  c_an->add_option("--pk-out", an.pk_out)->required();
  c_an->add_option("--positions-out", an.positions_out)->required();
  c_an->add_option("--l", an.l)->check(CLI::Range(1, 100));

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth", "Generate the synthetic redundancy corpus");
  c_syn->add_option("--out", syn.out)->required();
  c_syn->add_option("--docs", syn.docs)->check(CLI::Range(1, 10000000));
  c_syn->add_option("--id-prefix", syn.id_prefix);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  spdlog::set_level(spdlog::level::from_str(g.log_level));
  try {
    if (*c_ingest) cmd_ingest(ingest, g);
    if (*c_label) cmd_label(label, g);
    if (*c_embed) cmd_embed(embed, g);
    if (*c_tsal) cmd_train_salience(tsal, g);
    if (*c_tctx) cmd_train_ctx(tctx, g);
    if (*c_tseq) cmd_train_seq(tseq, g);
    if (*c_sum) cmd_summarize(sum, g);
    if (*c_ev) cmd_evaluate(ev, g);
    if (*c_an) cmd_analyze(an, g);
    if (*c_syn) cmd_synth(syn, g);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  } catch (const std::invalid_argument& e) {
    spdlog::error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitData;
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args) { return run_app(args); }

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_app(std::move(args));
}

}  // namespace redsum::cli
