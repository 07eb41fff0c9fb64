#ifndef REDSUM_EMBED_H_
#define REDSUM_EMBED_H_

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "redsum/corpus.h"

namespace redsum {

using Vec = std::vector<double>;

/// Sentence vectors (h_s) and the pooled document vector (h_D) of one document.
struct DocEmbeddings {
  std::vector<Vec> sentences;
  Vec document;

  std::size_t dim() const { return document.size(); }
};

double l2_norm(std::span<const double> v);
/// Scales to unit length; a zero vector is left unchanged.
void l2_normalize(Vec& v);

/// Dot product of unit vectors, clamped to [-1, 1]. Throws on dim mismatch.
double cosine(std::span<const double> a, std::span<const double> b);

/// Normalized arithmetic mean. Throws on an empty list.
Vec document_vector(std::span<const Vec> sentences);

/// Document frequencies over a reference corpus, with smoothed idf
/// ln((1 + N) / (1 + df)) + 1.
class DocumentFrequency {
 public:
  DocumentFrequency() = default;
  explicit DocumentFrequency(std::span<const Document> corpus);

  double idf(const std::string& term) const;
  std::size_t num_documents() const { return num_docs_; }

 private:
  std::size_t num_docs_ = 0;
  std::unordered_map<std::string, std::size_t> df_;
};

/// Signed feature hashing of per-sentence tf-idf weights into `dim` buckets,
/// each row L2-normalized.
std::vector<Vec> hash_tfidf_embed(const Document& doc, std::size_t dim, const DocumentFrequency& stats);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<Vec> embed(const Document& doc) const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;

  DocEmbeddings embed_document(const Document& doc) const;
};

class HashedTfidfProvider : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDefaultDim = 256;

  HashedTfidfProvider(std::size_t dim, DocumentFrequency stats);

  std::vector<Vec> embed(const Document& doc) const override;
  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "hashed-tfidf"; }

 private:
  std::size_t dim_;
  DocumentFrequency stats_;
};

/// Embeddings keyed by document id, as stored in the embedding JSONL:
///   {"id": str, "dim": int, "vectors": [[float...]...]}
struct EmbeddingStore {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<Vec>> vectors;
};

/// Reads and re-normalizes stored vectors. Throws DataError with the line
/// number on a malformed line, or on inconsistent dims.
EmbeddingStore load_embeddings(const std::string& path);
EmbeddingStore parse_embeddings(std::istream& in);

/// Checks that every corpus document is present with a matching sentence count.
void validate_embeddings(const EmbeddingStore& store, std::span<const Document> corpus);

void write_embeddings(std::ostream& out, std::span<const Document> corpus,
                      std::span<const std::vector<Vec>> vectors);
void write_embeddings(const std::string& path, std::span<const Document> corpus,
                      std::span<const std::vector<Vec>> vectors);

class PrecomputedProvider : public EmbeddingProvider {
 public:
  explicit PrecomputedProvider(EmbeddingStore store) : store_(std::move(store)) {}

  std::vector<Vec> embed(const Document& doc) const override;
  std::size_t dim() const override { return store_.dim; }
  std::string name() const override { return "precomputed"; }

 private:
  EmbeddingStore store_;
};

}  // namespace redsum

#endif  // REDSUM_EMBED_H_
