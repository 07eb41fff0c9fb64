#include "redsum/embed.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <stdexcept>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace redsum {

namespace {

constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
constexpr std::uint64_t kBucketSeed = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kSignSeed = 0x84222325cbf29ce4ULL;

std::uint64_t fnv1a(const std::string& s, std::uint64_t h) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  // final avalanche so low bits are usable as a bucket
  h ^= h >> 33;
  h *= 0xff51afd7ed558ccdULL;
  h ^= h >> 33;
  return h;
}

}  // namespace

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void l2_normalize(Vec& v) {
  const double n = l2_norm(v);
  if (n > 0.0)
    for (auto& x : v) x /= n;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("cosine: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::clamp(dot, -1.0, 1.0);
}

Vec document_vector(std::span<const Vec> sentences) {
  if (sentences.empty()) throw std::invalid_argument("document vector of zero sentences");
  Vec mean(sentences.front().size(), 0.0);
  for (const auto& s : sentences) {
    if (s.size() != mean.size()) throw std::invalid_argument("document vector: dimension mismatch");
    for (std::size_t i = 0; i < s.size(); ++i) mean[i] += s[i];
  }
  for (auto& x : mean) x /= static_cast<double>(sentences.size());
  l2_normalize(mean);
  return mean;
}

DocumentFrequency::DocumentFrequency(std::span<const Document> corpus) : num_docs_(corpus.size()) {
  for (const auto& doc : corpus) {
    std::unordered_set<std::string> seen;
    for (const auto& s : doc.sentences)
      for (const auto& t : s.tokens) seen.insert(t);
    for (const auto& t : seen) ++df_[t];
  }
}

double DocumentFrequency::idf(const std::string& term) const {
  auto it = df_.find(term);
  const double df = it == df_.end() ? 0.0 : static_cast<double>(it->second);
  return std::log((1.0 + static_cast<double>(num_docs_)) / (1.0 + df)) + 1.0;
}

std::vector<Vec> hash_tfidf_embed(const Document& doc, std::size_t dim, const DocumentFrequency& stats) {
  if (dim < 8) throw std::invalid_argument("embedding dim must be >= 8");
  std::vector<Vec> out;
  out.reserve(doc.size());
  for (const auto& s : doc.sentences) {
    std::map<std::string, double> tf;
    for (const auto& t : s.tokens) tf[t] += 1.0;
    Vec v(dim, 0.0);
    for (const auto& [term, count] : tf) {
      const std::size_t bucket = fnv1a(term, kBucketSeed) % dim;
      const double sign = (fnv1a(term, kSignSeed) >> 63) ? -1.0 : 1.0;
      v[bucket] += sign * count * stats.idf(term);
    }
    if (l2_norm(v) == 0.0) {
      // every weight cancelled in a collision; fall back to the first token's bucket
      v[fnv1a(s.tokens.front(), kBucketSeed) % dim] = 1.0;
    }
    l2_normalize(v);
    out.push_back(std::move(v));
  }
  return out;
}

DocEmbeddings EmbeddingProvider::embed_document(const Document& doc) const {
  DocEmbeddings e;
  e.sentences = embed(doc);
  e.document = document_vector(e.sentences);
  return e;
}

HashedTfidfProvider::HashedTfidfProvider(std::size_t dim, DocumentFrequency stats)
    : dim_(dim), stats_(std::move(stats)) {
  if (dim_ < 8) throw std::invalid_argument("embedding dim must be >= 8");
}

std::vector<Vec> HashedTfidfProvider::embed(const Document& doc) const {
  return hash_tfidf_embed(doc, dim_, stats_);
}

EmbeddingStore parse_embeddings(std::istream& in) {
  EmbeddingStore store;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "embeddings line " + std::to_string(lineno) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("dim") ||
        !j["dim"].is_number_unsigned() || !j.contains("vectors") || !j["vectors"].is_array())
      throw DataError(where + "expected {\"id\", \"dim\", \"vectors\"}");
    const auto id = j["id"].get<std::string>();
    const auto dim = j["dim"].get<std::size_t>();
    if (dim == 0) throw DataError(where + "dim must be positive");
    if (store.dim == 0) store.dim = dim;
    if (dim != store.dim)
      throw DataError(where + "dimension " + std::to_string(dim) + " differs from " +
                      std::to_string(store.dim) + " (document '" + id + "')");
    std::vector<Vec> vecs;
    for (const auto& row : j["vectors"]) {
      if (!row.is_array() || row.size() != dim)
        throw DataError(where + "vector length does not match dim in document '" + id + "'");
      Vec v;
      v.reserve(dim);
      for (const auto& x : row) {
        if (!x.is_number()) throw DataError(where + "non-numeric vector entry");
        v.push_back(x.get<double>());
        if (!std::isfinite(v.back())) throw DataError(where + "non-finite vector entry");
      }
      l2_normalize(v);
      vecs.push_back(std::move(v));
    }
    if (!store.vectors.emplace(id, std::move(vecs)).second)
      throw DataError(where + "duplicate document id '" + id + "'");
  }
  return store;
}

EmbeddingStore load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings '" + path + "'");
  return parse_embeddings(in);
}

void validate_embeddings(const EmbeddingStore& store, std::span<const Document> corpus) {
  for (const auto& doc : corpus) {
    auto it = store.vectors.find(doc.id);
    if (it == store.vectors.end()) throw DataError("no embeddings for document '" + doc.id + "'");
    if (it->second.size() != doc.size())
      throw DataError("document '" + doc.id + "' has " + std::to_string(doc.size()) +
                      " sentences but " + std::to_string(it->second.size()) + " embeddings");
  }
}

void write_embeddings(std::ostream& out, std::span<const Document> corpus,
                      std::span<const std::vector<Vec>> vectors) {
  if (corpus.size() != vectors.size()) throw std::invalid_argument("write_embeddings: size mismatch");
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    nlohmann::json j;
    j["id"] = corpus[i].id;
    j["dim"] = vectors[i].empty() ? 0 : vectors[i].front().size();
    j["vectors"] = vectors[i];
    out << j.dump() << '\n';
  }
}

void write_embeddings(const std::string& path, std::span<const Document> corpus,
                      std::span<const std::vector<Vec>> vectors) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_embeddings(out, corpus, vectors);
}

std::vector<Vec> PrecomputedProvider::embed(const Document& doc) const {
  auto it = store_.vectors.find(doc.id);
  if (it == store_.vectors.end()) throw DataError("no embeddings for document '" + doc.id + "'");
  if (it->second.size() != doc.size())
    throw DataError("document '" + doc.id + "' has " + std::to_string(doc.size()) +
                    " sentences but " + std::to_string(it->second.size()) + " embeddings");
  return it->second;
}

}  // namespace redsum
