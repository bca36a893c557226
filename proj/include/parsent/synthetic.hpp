#pragma once

// Synthetic labeled corpus with a matching embedding table. Each class owns
// a pool of tokens whose embeddings cluster around a class centroid; a shared
// pool of noise tokens is common to all classes.

#include <charconv>
#include <cstdint>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "parsent/dataset.hpp"
#include "parsent/rng.hpp"
#include "parsent/vectorize.hpp"

namespace parsent {

struct SyntheticSpec {
  std::vector<std::string> class_names{"negative", "neutral", "positive"};
  std::size_t num_docs = 600;
  std::size_t dim = 20;
  std::size_t class_pool = 1000;  // tokens owned by each class
  std::size_t shared_pool = 200;  // tokens drawn by every class
  double class_token_share = 0.75;
  std::size_t min_len = 8;
  std::size_t max_len = 14;
  double centroid_scale = 1.0;    // per-dimension std of class centroids
  double token_noise = 0.5;       // per-dimension std around the centroid
  std::uint64_t seed = 7;
};

struct SyntheticCorpus {
  std::vector<RawDocument> documents;
  std::vector<std::string> tokens;  // embedding rows in file order
  std::vector<std::vector<double>> vectors;

  EmbeddingTable table() const {
    std::unordered_map<std::string, std::vector<double>> map;
    for (std::size_t i = 0; i < tokens.size(); ++i) map.emplace(tokens[i], vectors[i]);
    return EmbeddingTable(vectors.empty() ? 0 : vectors.front().size(), std::move(map));
  }
};

inline std::string class_token(std::size_t cls, std::size_t k) {
  return "c" + std::to_string(cls) + "w" + std::to_string(k);
}
inline std::string shared_token(std::size_t k) { return "s" + std::to_string(k); }

/// Documents are assigned classes round-robin, so class sizes differ by at
/// most one.
inline SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.class_names.empty() || spec.dim == 0 || spec.class_pool == 0 || spec.min_len == 0 ||
      spec.max_len < spec.min_len)
    throw ConfigError("invalid synthetic corpus spec");
  Rng rng(spec.seed);
  SyntheticCorpus out;
  const std::size_t C = spec.class_names.size();

  for (std::size_t c = 0; c < C; ++c) {
    std::vector<double> centroid(spec.dim);
    for (auto& v : centroid) v = spec.centroid_scale * rng.normal();
    for (std::size_t k = 0; k < spec.class_pool; ++k) {
      std::vector<double> v(spec.dim);
      for (std::size_t i = 0; i < spec.dim; ++i) v[i] = centroid[i] + spec.token_noise * rng.normal();
      out.tokens.push_back(class_token(c, k));
      out.vectors.push_back(std::move(v));
    }
  }
  for (std::size_t k = 0; k < spec.shared_pool; ++k) {
    std::vector<double> v(spec.dim);
    for (auto& x : v) x = spec.centroid_scale * rng.normal();
    out.tokens.push_back(shared_token(k));
    out.vectors.push_back(std::move(v));
  }

  for (std::size_t d = 0; d < spec.num_docs; ++d) {
    const std::size_t c = d % C;
    const std::size_t len = spec.min_len + static_cast<std::size_t>(rng.below(spec.max_len - spec.min_len + 1));
    std::string text;
    for (std::size_t t = 0; t < len; ++t) {
      const bool own = spec.shared_pool == 0 || rng.uniform() < spec.class_token_share;
      const std::string tok = own ? class_token(c, static_cast<std::size_t>(rng.below(spec.class_pool)))
                                  : shared_token(static_cast<std::size_t>(rng.below(spec.shared_pool)));
      if (!text.empty()) text.push_back(' ');
      text += tok;
    }
    out.documents.push_back({std::move(text), spec.class_names[c]});
  }
  return out;
}

/// word2vec text format with round-trip precision.
inline void write_embedding_table(std::ostream& out, const std::vector<std::string>& tokens,
                                  const std::vector<std::vector<double>>& vectors) {
  const std::size_t dim = vectors.empty() ? 0 : vectors.front().size();
  out << tokens.size() << ' ' << dim << '\n';
  char buf[64];
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    out << tokens[i];
    for (double v : vectors[i]) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(end - buf));
    }
    out << '\n';
  }
}

}  // namespace parsent
