#ifndef REDSUM_CORPUS_H_
#define REDSUM_CORPUS_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace redsum {

using Tokens = std::vector<std::string>;

/// Raised for malformed inputs (corpus records, embedding files, checkpoints).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Sentence {
  std::size_t index = 0;
  std::string text;
  Tokens tokens;
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  std::optional<std::vector<Sentence>> abstract;
  // Oracle labels in extraction order; treat as a set unless order matters.
  std::optional<std::vector<std::size_t>> oracle_labels;

  std::size_t size() const { return sentences.size(); }
  std::size_t token_count() const;
};

struct CorpusConfig {
  std::size_t max_tokens = 512;
  std::size_t max_summary_sentences = 3;
  bool lowercase = true;
};

/// Lowercases (optionally) and splits on whitespace; every ASCII punctuation
/// character becomes its own token. Bytes >= 0x80 are word characters so
/// UTF-8 sequences stay intact.
Tokens tokenize(std::string_view text, bool lowercase = true);

/// Keeps the longest sentence prefix within max_tokens, but never fewer than
/// one sentence. Labels pointing past the kept prefix are dropped.
Document truncate_document(const Document& doc, std::size_t max_tokens);

/// Builds a document from raw sentence strings: tokenizes, drops sentences
/// with no tokens, renumbers indices contiguously and remaps labels.
/// Throws DataError if a label is out of range.
Document make_document(std::string id, const std::vector<std::string>& sentences,
                       const std::optional<std::vector<std::string>>& abstract,
                       const std::optional<std::vector<std::size_t>>& labels,
                       const CorpusConfig& cfg = {});

struct RecordError {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct ParseResult {
  std::vector<Document> documents;
  std::vector<RecordError> errors;
  std::size_t skipped_empty = 0;
};

/// Parses the corpus JSONL schema:
///   {"id": str, "sentences": [str...], "abstract": [str...]?, "labels": [int...]?}
/// Malformed lines are reported and skipped; blank lines are ignored.
ParseResult parse_corpus(std::istream& in, const CorpusConfig& cfg = {});
ParseResult read_corpus(const std::string& path, const CorpusConfig& cfg = {});

std::string serialize_document(const Document& doc);
void write_corpus(std::ostream& out, const std::vector<Document>& docs);
void write_corpus(const std::string& path, const std::vector<Document>& docs);

}  // namespace redsum

#endif  // REDSUM_CORPUS_H_
