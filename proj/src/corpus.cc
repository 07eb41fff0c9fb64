#include "redsum/corpus.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

namespace redsum {

namespace {

using nlohmann::json;

bool is_word_byte(unsigned char c) { return c >= 0x80 || std::isalnum(c); }

std::vector<std::string> string_list(const json& j, const char* field) {
  if (!j.is_array()) throw DataError(std::string("field '") + field + "' must be an array");
  std::vector<std::string> out;
  out.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_string()) throw DataError(std::string("field '") + field + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::vector<Sentence> to_sentences(const std::vector<std::string>& texts, bool lowercase) {
  std::vector<Sentence> out;
  for (const auto& t : texts) {
    Tokens toks = tokenize(t, lowercase);
    if (toks.empty()) continue;
    out.push_back({out.size(), t, std::move(toks)});
  }
  return out;
}

}  // namespace

std::size_t Document::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.tokens.size();
  return n;
}

Tokens tokenize(std::string_view text, bool lowercase) {
  Tokens out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      cur.push_back(lowercase ? static_cast<char>(std::tolower(c)) : ch);
    } else if (std::isspace(c) || std::iscntrl(c)) {
      flush();
    } else {
      flush();
      out.emplace_back(1, ch);
    }
  }
  flush();
  return out;
}

Document truncate_document(const Document& doc, std::size_t max_tokens) {
  if (max_tokens == 0) throw std::invalid_argument("max_tokens must be positive");
  Document out = doc;
  std::size_t used = 0;
  std::size_t keep = 0;
  for (const auto& s : doc.sentences) {
    if (used + s.tokens.size() > max_tokens) break;
    used += s.tokens.size();
    ++keep;
  }
  keep = std::max<std::size_t>(keep, std::min<std::size_t>(1, doc.sentences.size()));
  out.sentences.resize(keep);
  if (out.oracle_labels) {
    std::vector<std::size_t> kept;
    for (auto l : *out.oracle_labels)
      if (l < keep) kept.push_back(l);
    out.oracle_labels = std::move(kept);
  }
  return out;
}

Document make_document(std::string id, const std::vector<std::string>& sentences,
                       const std::optional<std::vector<std::string>>& abstract,
                       const std::optional<std::vector<std::size_t>>& labels,
                       const CorpusConfig& cfg) {
  Document doc;
  doc.id = std::move(id);
  // original position -> new index, or npos when the sentence is dropped
  std::vector<std::size_t> remap(sentences.size(), std::string::npos);
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    Tokens toks = tokenize(sentences[i], cfg.lowercase);
    if (toks.empty()) continue;
    remap[i] = doc.sentences.size();
    doc.sentences.push_back({doc.sentences.size(), sentences[i], std::move(toks)});
  }
  if (abstract) doc.abstract = to_sentences(*abstract, cfg.lowercase);
  if (labels) {
    std::vector<std::size_t> mapped;
    for (auto l : *labels) {
      if (l >= sentences.size())
        throw DataError("label " + std::to_string(l) + " out of range for document '" + doc.id + "'");
      if (remap[l] != std::string::npos) mapped.push_back(remap[l]);
    }
    doc.oracle_labels = std::move(mapped);
  }
  return truncate_document(doc, cfg.max_tokens);
}

ParseResult parse_corpus(std::istream& in, const CorpusConfig& cfg) {
  ParseResult result;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      if (!j.is_object()) throw DataError("record is not an object");
      if (!j.contains("id") || !j["id"].is_string()) throw DataError("missing string field 'id'");
      if (!j.contains("sentences")) throw DataError("missing field 'sentences'");
      auto sents = string_list(j["sentences"], "sentences");
      std::optional<std::vector<std::string>> abstract;
      if (j.contains("abstract") && !j["abstract"].is_null())
        abstract = string_list(j["abstract"], "abstract");
      std::optional<std::vector<std::size_t>> labels;
      if (j.contains("labels") && !j["labels"].is_null()) {
        if (!j["labels"].is_array()) throw DataError("field 'labels' must be an array");
        labels.emplace();
        for (const auto& e : j["labels"]) {
          if (!e.is_number_integer() || e.get<long long>() < 0)
            throw DataError("labels must be non-negative integers");
          labels->push_back(e.get<std::size_t>());
        }
      }
      Document doc = make_document(j["id"].get<std::string>(), sents, abstract, labels, cfg);
      if (doc.sentences.empty()) {
        spdlog::warn("line {}: document '{}' has no non-empty sentences, skipped", lineno, doc.id);
        ++result.skipped_empty;
        continue;
      }
      result.documents.push_back(std::move(doc));
    } catch (const std::exception& e) {
      spdlog::warn("line {}: {}", lineno, e.what());
      result.errors.push_back({lineno, e.what()});
    }
  }
  return result;
}

ParseResult read_corpus(const std::string& path, const CorpusConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus '" + path + "'");
  return parse_corpus(in, cfg);
}

std::string serialize_document(const Document& doc) {
  json j;
  j["id"] = doc.id;
  json sents = json::array();
  for (const auto& s : doc.sentences) sents.push_back(s.text);
  j["sentences"] = std::move(sents);
  if (doc.abstract) {
    json abs = json::array();
    for (const auto& s : *doc.abstract) abs.push_back(s.text);
    j["abstract"] = std::move(abs);
  }
  if (doc.oracle_labels) j["labels"] = *doc.oracle_labels;
  return j.dump();
}

void write_corpus(std::ostream& out, const std::vector<Document>& docs) {
  for (const auto& d : docs) out << serialize_document(d) << '\n';
}

void write_corpus(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_corpus(out, docs);
}

}  // namespace redsum
