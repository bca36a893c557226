#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "parsent/rng.hpp"
#include "parsent/vectorize.hpp"

using namespace parsent;

namespace {

std::vector<TokenList> random_corpus(Rng& rng, std::size_t docs, std::size_t alphabet) {
  std::vector<TokenList> corpus(docs);
  for (auto& d : corpus) {
    const auto n = rng.below(8);
    for (std::uint64_t i = 0; i < n; ++i) d.push_back("t" + std::to_string(rng.below(alphabet)));
  }
  return corpus;
}

std::map<std::size_t, std::size_t> as_map(const SparseVector& v) {
  std::map<std::size_t, std::size_t> m;
  for (const auto& e : v) m[e.index] = e.count;
  return m;
}

}  // namespace

TEST(Vocabulary, FrequencyOrder) {
  const auto v = build_vocabulary({{"a", "b", "a"}});
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(*v.index_of("a"), 0u);
  EXPECT_EQ(*v.index_of("b"), 1u);
}

TEST(Vocabulary, MinCountCanExcludeEverything) {
  EXPECT_THROW(build_vocabulary({{"a"}}, 2), EmptyVocabulary);
  EXPECT_THROW(build_vocabulary({}), EmptyVocabulary);
}

TEST(Vocabulary, LexicographicTiebreak) {
  const auto v = build_vocabulary({{"z", "m", "a", "m"}});
  EXPECT_EQ(v.terms(), (std::vector<std::string>{"m", "a", "z"}));
}

TEST(Vocabulary, MinCountFilters) {
  const auto v = build_vocabulary({{"a", "a", "b"}, {"c", "a", "b"}}, 2);
  EXPECT_EQ(v.terms(), (std::vector<std::string>{"a", "b"}));
  EXPECT_FALSE(v.index_of("c").has_value());
}

TEST(Vocabulary, RoundTripOnRandomCorpora) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto corpus = random_corpus(rng, 20, 30);
    corpus.push_back({"t0"});
    const auto v = build_vocabulary(corpus);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_EQ(*v.index_of(v.term(i)), i);
    std::map<std::string, std::size_t> freq;
    for (const auto& d : corpus)
      for (const auto& t : d) ++freq[t];
    EXPECT_EQ(v.size(), freq.size());
    for (std::size_t i = 1; i < v.size(); ++i) {
      const auto a = freq[v.term(i - 1)], b = freq[v.term(i)];
      EXPECT_TRUE(a > b || (a == b && v.term(i - 1) < v.term(i)));
    }
  }
}

TEST(Bow, Examples) {
  const auto v = Vocabulary::from_terms({"a", "b"});
  EXPECT_EQ(as_map(bow_vector({"a", "a", "b"}, v)), (std::map<std::size_t, std::size_t>{{0, 2}, {1, 1}}));
  EXPECT_TRUE(bow_vector({}, v).empty());
  EXPECT_TRUE(bow_vector({"z"}, Vocabulary::from_terms({"a"})).empty());
}

TEST(Bow, MatchesNaiveCounting) {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto corpus = random_corpus(rng, 30, 25);
    const auto vocab = build_vocabulary(random_corpus(rng, 10, 25), 1);
    const auto dtm = build_dtm(corpus, vocab);
    ASSERT_EQ(dtm.rows.size(), corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      std::map<std::size_t, std::size_t> naive;
      std::size_t in_vocab = 0;
      for (const auto& t : corpus[i])
        if (auto idx = vocab.index_of(t)) ++naive[*idx], ++in_vocab;
      EXPECT_EQ(as_map(dtm.rows[i]), naive);
      EXPECT_EQ(as_map(bow_vector(corpus[i], vocab)), naive);
      std::size_t sum = 0;
      for (const auto& e : dtm.rows[i]) {
        EXPECT_GE(e.count, 1u);
        EXPECT_LT(e.index, vocab.size());
        sum += e.count;
      }
      EXPECT_EQ(sum, in_vocab);
    }
  }
}

TEST(Dtm, PermutingCorpusPermutesRows) {
  const auto v = Vocabulary::from_terms({"a", "b", "c"});
  const std::vector<TokenList> corpus = {{"a"}, {"b", "b"}, {"c", "a"}};
  const std::vector<TokenList> permuted = {corpus[2], corpus[0], corpus[1]};
  const auto x = build_dtm(corpus, v), y = build_dtm(permuted, v);
  EXPECT_EQ(as_map(y.rows[0]), as_map(x.rows[2]));
  EXPECT_EQ(as_map(y.rows[1]), as_map(x.rows[0]));
  EXPECT_EQ(as_map(y.rows[2]), as_map(x.rows[1]));
}

TEST(Dtm, EmptyDocsGiveZeroRows) {
  const auto d = build_dtm({{}, {}}, Vocabulary::from_terms({"a"})).to_dense();
  EXPECT_EQ(d.rows(), 2u);
  EXPECT_EQ(d.cols(), 1u);
  EXPECT_EQ(d(0, 0), 0.0);
  EXPECT_EQ(d(1, 0), 0.0);
}

TEST(Embeddings, HappyPath) {
  std::istringstream in("2 3\nخوب 1 2 3\nبد -1 0.5 1e-3\n");
  const auto t = read_embedding_table(in);
  EXPECT_EQ(t.dim(), 3u);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.lookup("بد")[2], 1e-3);
  EXPECT_EQ(t.pad_vector(), std::vector<double>(3, 0.0));
}

TEST(Embeddings, ShortRowIsDimensionMismatch) {
  std::istringstream in("1 3\na 1 2\n");
  EXPECT_THROW(read_embedding_table(in), DimensionMismatch);
}

TEST(Embeddings, FormatErrors) {
  for (const char* text : {"", "x 3\n", "1\n", "2 2\na 1 2\n", "1 2\na 1 zz\n", "2 1\na 1\na 2\n", "1 0\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(read_embedding_table(in), FormatError) << text;
  }
}

TEST(Embeddings, UnknownIsMean) {
  std::istringstream in("2 2\na 1 0\nb 0 1\n");
  const auto t = read_embedding_table(in);
  EXPECT_EQ(t.unknown_vector(), (std::vector<double>{0.5, 0.5}));
  EXPECT_EQ(t.lookup("zzz"), t.unknown_vector());
}

TEST(Encode, PaddingTruncationAndOov) {
  EmbeddingTable t(2, {{"a", {1, 2}}, {"b", {3, 4}}});
  const auto batch = encode_sequences<double>({{"a", "b", "q"}, {"a", "a", "a", "a", "a", "a", "b"}}, {0, 1}, t, 5);
  EXPECT_EQ(batch.lengths, (std::vector<std::size_t>{3, 5}));
  const auto& x = batch.items[0];
  EXPECT_EQ(x(0, 0), 1.0);
  EXPECT_EQ(x(1, 1), 4.0);
  EXPECT_EQ(x(2, 0), 2.0);  // OOV -> mean of (1,2) and (3,4)
  EXPECT_EQ(x(2, 1), 3.0);
  for (std::size_t r = 3; r < 5; ++r) EXPECT_EQ(x(r, 0) + x(r, 1), 0.0);
  EXPECT_EQ(batch.items[1](4, 0), 1.0);  // "b" at position 6 was truncated
}

TEST(Encode, ReadBackIsBitExact) {
  Rng rng(9);
  std::unordered_map<std::string, std::vector<double>> vecs;
  for (int i = 0; i < 10; ++i) vecs["w" + std::to_string(i)] = {rng.normal(), rng.normal(), rng.normal()};
  EmbeddingTable t(3, vecs);
  const auto docs = std::vector<TokenList>{{"w1", "w5", "w9", "w0"}};
  const auto batch = encode_sequences<double>(docs, {}, t, 6);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(batch.items[0](i, k), vecs[docs[0][i]][k]);
}

TEST(Encode, MaxLenZeroIsConfigError) {
  EmbeddingTable t(1, {{"a", {1}}});
  EXPECT_THROW(encode_sequences<double>({{"a"}}, {}, t, 0), ConfigError);
}
