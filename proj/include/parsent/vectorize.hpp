#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "parsent/error.hpp"
#include "parsent/matrix.hpp"
#include "parsent/preprocess.hpp"

namespace parsent {

/// Term <-> contiguous index bijection. Index 0 is the most frequent term.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Rebuilds from an ordered term list (e.g. when loading a saved model).
  static Vocabulary from_terms(std::vector<std::string> terms, std::size_t min_count = 1) {
    Vocabulary v;
    v.min_count_ = min_count;
    v.index_to_term_ = std::move(terms);
    for (std::size_t i = 0; i < v.index_to_term_.size(); ++i)
      if (!v.term_to_index_.emplace(v.index_to_term_[i], i).second)
        throw FormatError("duplicate vocabulary term '" + v.index_to_term_[i] + "'");
    return v;
  }

  std::size_t size() const noexcept { return index_to_term_.size(); }
  std::size_t min_count() const noexcept { return min_count_; }
  const std::vector<std::string>& terms() const noexcept { return index_to_term_; }
  const std::string& term(std::size_t i) const { return index_to_term_.at(i); }

  std::optional<std::size_t> index_of(const std::string& term) const {
    auto it = term_to_index_.find(term);
    if (it == term_to_index_.end()) return std::nullopt;
    return it->second;
  }

 private:
  std::unordered_map<std::string, std::size_t> term_to_index_;
  std::vector<std::string> index_to_term_;
  std::size_t min_count_ = 1;
};

/// Keeps tokens seen at least `min_count` times; indices by descending
/// frequency, ties broken lexicographically.
inline Vocabulary build_vocabulary(const std::vector<TokenList>& corpus, std::size_t min_count = 1) {
  if (corpus.empty()) throw EmptyVocabulary("corpus is empty");
  if (min_count < 1) throw ConfigError("min_count must be >= 1");
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : corpus)
    for (const auto& t : doc) ++counts[t];
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [term, n] : counts)
    if (n >= min_count) kept.emplace_back(term, n);
  if (kept.empty())
    throw EmptyVocabulary("no token occurs at least " + std::to_string(min_count) + " times");
  std::stable_sort(kept.begin(), kept.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> terms;
  terms.reserve(kept.size());
  for (auto& [term, n] : kept) terms.push_back(std::move(term));
  return Vocabulary::from_terms(std::move(terms), min_count);
}

struct SparseEntry {
  std::size_t index;
  std::size_t count;
  bool operator==(const SparseEntry&) const = default;
};

/// Sorted by index; only nonzero counts stored.
using SparseVector = std::vector<SparseEntry>;

inline SparseVector bow_vector(const TokenList& tokens, const Vocabulary& vocab) {
  std::map<std::size_t, std::size_t> counts;
  for (const auto& t : tokens)
    if (auto idx = vocab.index_of(t)) ++counts[*idx];
  SparseVector v;
  v.reserve(counts.size());
  for (auto [i, n] : counts) v.push_back({i, n});
  return v;
}

struct DocumentTermMatrix {
  std::vector<SparseVector> rows;
  std::size_t num_terms = 0;

  std::size_t num_docs() const noexcept { return rows.size(); }

  Matrix<double> to_dense() const {
    Matrix<double> m(rows.size(), num_terms);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (auto [i, n] : rows[r]) m(r, i) = static_cast<double>(n);
    return m;
  }
};

inline DocumentTermMatrix build_dtm(const std::vector<TokenList>& corpus, const Vocabulary& vocab) {
  DocumentTermMatrix dtm;
  dtm.num_terms = vocab.size();
  dtm.rows.reserve(corpus.size());
  for (const auto& doc : corpus) dtm.rows.push_back(bow_vector(doc, vocab));
  return dtm;
}

// ---------------------------------------------------------------------------
// Static token embeddings

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::size_t dim, std::unordered_map<std::string, std::vector<double>> vectors)
      : dim_(dim), vectors_(std::move(vectors)), unknown_(dim, 0.0), pad_(dim, 0.0) {
    if (dim_ == 0) throw FormatError("embedding dimension must be positive");
    for (const auto& [tok, v] : vectors_)
      if (v.size() != dim_)
        throw DimensionMismatch("vector for '" + tok + "' has length " + std::to_string(v.size()));
    if (!vectors_.empty()) {
      // Sum in lexicographic token order so the mean is independent of hash order.
      std::vector<const std::string*> keys;
      for (const auto& [tok, v] : vectors_) keys.push_back(&tok);
      std::sort(keys.begin(), keys.end(), [](auto* a, auto* b) { return *a < *b; });
      for (auto* k : keys) {
        const auto& v = vectors_.at(*k);
        for (std::size_t i = 0; i < dim_; ++i) unknown_[i] += v[i];
      }
      for (auto& x : unknown_) x /= static_cast<double>(vectors_.size());
    }
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  bool contains(const std::string& token) const { return vectors_.contains(token); }
  const std::vector<double>& unknown_vector() const noexcept { return unknown_; }
  const std::vector<double>& pad_vector() const noexcept { return pad_; }

  const std::vector<double>& lookup(const std::string& token) const {
    auto it = vectors_.find(token);
    return it == vectors_.end() ? unknown_ : it->second;
  }

 private:
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
  std::vector<double> unknown_;
  std::vector<double> pad_;
};

namespace detail {

inline double parse_double(std::string_view s, const std::string& where) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError(where + ": bad number '" + std::string(s) + "'");
  return v;
}

inline std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && line[i] == ' ') ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ') ++j;
    if (j > i) parts.push_back(line.substr(i, j - i));
    i = j;
  }
  return parts;
}

}  // namespace detail

/// word2vec text format: header `<count> <dim>`, then `<token> <f1> ... <fdim>`.
inline EmbeddingTable read_embedding_table(std::istream& in, const std::string& source = "<embeddings>") {
  const auto lines = detail::read_lines(in, source);
  if (lines.empty()) throw FormatError(source + ": missing header");
  const auto header = detail::split_spaces(lines[0]);
  if (header.size() != 2) throw FormatError(source + ":1: header must be '<count> <dim>'");
  std::size_t count = 0, dim = 0;
  for (auto [field, out] : {std::pair{header[0], &count}, std::pair{header[1], &dim}}) {
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), *out);
    if (ec != std::errc() || ptr != field.data() + field.size())
      throw FormatError(source + ":1: bad header field '" + std::string(field) + "'");
  }
  if (dim == 0) throw FormatError(source + ":1: dimension must be positive");
  std::unordered_map<std::string, std::vector<double>> vectors;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    const std::string where = source + ":" + std::to_string(ln + 1);
    const auto parts = detail::split_spaces(lines[ln]);
    if (parts.empty()) continue;
    if (parts.size() < 2) throw FormatError(where + ": row has no values");
    if (parts.size() - 1 != dim)
      throw DimensionMismatch(where + ": expected " + std::to_string(dim) + " values, got " +
                              std::to_string(parts.size() - 1));
    std::vector<double> v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = detail::parse_double(parts[i + 1], where);
    if (!vectors.emplace(std::string(parts[0]), std::move(v)).second)
      throw FormatError(where + ": duplicate token '" + std::string(parts[0]) + "'");
  }
  if (vectors.size() != count)
    throw FormatError(source + ": header declares " + std::to_string(count) + " rows, found " +
                      std::to_string(vectors.size()));
  return EmbeddingTable(dim, std::move(vectors));
}

inline EmbeddingTable load_embedding_table(const std::string& path) {
  auto in = detail::open_input(path);
  return read_embedding_table(in, path);
}

/// Fixed-length padded embedding sequences, [batch][max_len][dim].
template <typename Real = double>
struct SequenceBatch {
  std::size_t max_len = 0;
  std::size_t dim = 0;
  std::vector<Matrix<Real>> items;   // each max_len x dim
  std::vector<std::size_t> lengths;  // clamped to max_len
  std::vector<std::size_t> labels;

  std::size_t size() const noexcept { return items.size(); }

  SequenceBatch subset(const std::vector<std::size_t>& idx) const {
    SequenceBatch out{max_len, dim, {}, {}, {}};
    for (auto i : idx) {
      out.items.push_back(items[i]);
      out.lengths.push_back(lengths[i]);
      if (!labels.empty()) out.labels.push_back(labels[i]);
    }
    return out;
  }
};

/// Truncates to `max_len`, maps OOV tokens to the unknown vector and
/// right-pads with the (zero) pad vector. `labels` may be empty.
template <typename Real = double>
SequenceBatch<Real> encode_sequences(const std::vector<TokenList>& docs,
                                     const std::vector<std::size_t>& labels,
                                     const EmbeddingTable& table, std::size_t max_len) {
  if (max_len < 1) throw ConfigError("max_len must be >= 1");
  if (!labels.empty() && labels.size() != docs.size())
    throw LengthMismatch("labels and documents differ in length");
  SequenceBatch<Real> batch{max_len, table.dim(), {}, {}, labels};
  batch.items.reserve(docs.size());
  for (const auto& doc : docs) {
    Matrix<Real> m(max_len, table.dim());
    const std::size_t len = std::min(doc.size(), max_len);
    for (std::size_t t = 0; t < len; ++t) {
      const auto& v = table.lookup(doc[t]);
      for (std::size_t i = 0; i < table.dim(); ++i) m(t, i) = static_cast<Real>(v[i]);
    }
    batch.items.push_back(std::move(m));
    batch.lengths.push_back(len);
  }
  return batch;
}

}  // namespace parsent
