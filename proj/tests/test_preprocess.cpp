#include <gtest/gtest.h>

#include <sstream>

#include "parsent/dataset.hpp"
#include "parsent/experiment.hpp"
#include "parsent/preprocess.hpp"
#include "parsent/rng.hpp"
#include "test_support.hpp"

using namespace parsent;
using testing_support::fixture;

namespace {

const std::string kZwnj = "‌";

PreprocessConfig only(std::initializer_list<PreprocessStep> steps) {
  PreprocessConfig cfg;
  cfg.steps_enabled = steps;
  return cfg;
}

// Random strings mixing Persian, Arabic variants, digits, markup and repeats.
std::string random_text(Rng& rng) {
  static const std::vector<std::string> pieces = {
      "خ", "و", "ب", "ي", "ك", "ی", "ک", "ـ", "٤", "۵", " ", "  ", "a", "b", "<b>", "</i>",
      "http://x.y/z", "www.q.com", "😂", "❤️", "!", "،", kZwnj, "ة", "ىٰ", "\xEF\xBB\xB3", "<", ">", "é"};
  std::string s;
  const auto n = rng.below(25);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto& p = pieces[rng.below(pieces.size())];
    const auto reps = rng.below(4) + 1;
    for (std::uint64_t r = 0; r < reps; ++r) s += p;
  }
  return s;
}

}  // namespace

TEST(NormalizeChars, CanonicalPersianIsUnchanged) { EXPECT_EQ(normalize_chars("سیاسی"), "سیاسی"); }

TEST(NormalizeChars, ArabicYehAndKaf) {
  EXPECT_EQ(normalize_chars("علي"), "علی");
  EXPECT_EQ(normalize_chars("كتاب"), "کتاب");
  EXPECT_EQ(normalize_chars("ى"), "ی");
}

TEST(NormalizeChars, ArabicIndicDigits) {
  EXPECT_EQ(normalize_chars("٤٥"), "۴۵");
  EXPECT_EQ(normalize_chars("٠١٢٣٤٥٦٧٨٩"), "۰۱۲۳۴۵۶۷۸۹");
}

TEST(NormalizeChars, TatweelAndPresentationForms) {
  EXPECT_EQ(normalize_chars("ســلام"), "سلام");
  EXPECT_EQ(normalize_chars("ﻱﻙﻫ"), "یکه");
}

TEST(StripHtmlUrls, Examples) {
  EXPECT_EQ(strip_html_urls("hi <b>x</b>"), "hi x");
  EXPECT_EQ(strip_html_urls("see https://t.co/abc now"), "see  now");
  EXPECT_EQ(strip_html_urls("no markup here"), "no markup here");
  EXPECT_EQ(strip_html_urls("go www.example.com/a?b=1 ok"), "go  ok");
}

TEST(StripHtmlUrls, NestedRemnantsReachFixpoint) {
  const auto once = strip_html_urls("<<b>i>x");
  EXPECT_EQ(strip_html_urls(once), once);
}

TEST(CollapseRepeats, Examples) {
  EXPECT_EQ(collapse_repeats("خوووووب"), "خوب");
  EXPECT_EQ(collapse_repeats("خوب"), "خوب");
  EXPECT_EQ(collapse_repeats("aaab bb"), "ab bb");
}

TEST(CollapseRepeats, DoubledLettersAndSpacesSurvive) {
  EXPECT_EQ(collapse_repeats("aabb"), "aabb");
  EXPECT_EQ(collapse_repeats("a   b"), "a   b");
}

TEST(CollapseRepeats, OperatesOnGraphemes) {
  // e + combining acute is one cluster; three of them collapse to one.
  EXPECT_EQ(collapse_repeats("ééé"), "é");
  EXPECT_EQ(collapse_repeats("😂😂😂😂"), "😂");
}

TEST(ReplaceEmojis, Examples) {
  const std::map<std::string, std::string> map = {{"😂", "خنده"}};
  EXPECT_EQ(replace_emojis("خوب 😂", map), "خوب خنده");
  EXPECT_EQ(replace_emojis("خوب", map), "خوب");
  EXPECT_EQ(replace_emojis("🐍", {}), "");
}

TEST(ReplaceEmojis, AdjacentEmojisAreSeparated) {
  const std::map<std::string, std::string> map = {{"😂", "خنده"}, {"❤️", "قلب"}};
  EXPECT_EQ(replace_emojis("😂❤️😂", map), "خنده قلب خنده");
  EXPECT_EQ(replace_emojis("a😂b", map), "a خنده b");
}

TEST(Tokenize, Examples) {
  EXPECT_EQ(tokenize("فردا روز انتخاباته"), (TokenList{"فردا", "روز", "انتخاباته"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_EQ(tokenize("#ارز #دلار"), (TokenList{"ارز", "دلار"}));
}

TEST(Tokenize, ZwnjKeptInsideTrimmedAtEdges) {
  const std::string word = "می" + kZwnj + "روم";
  EXPECT_EQ(tokenize(word), TokenList{word});
  EXPECT_EQ(tokenize(kZwnj + "خوب" + kZwnj), TokenList{"خوب"});
  EXPECT_TRUE(tokenize(kZwnj).empty());
}

TEST(Tokenize, PersianPunctuationSplits) {
  EXPECT_EQ(tokenize("الف،ب؟ج؛د"), (TokenList{"الف", "ب", "ج", "د"}));
  EXPECT_EQ(tokenize("a_b-c"), (TokenList{"a_b", "c"}));
}

TEST(RemoveStopwords, Examples) {
  const std::unordered_set<std::string> sw = {"از"};
  EXPECT_EQ(remove_stopwords({"از", "ایران"}, sw), TokenList{"ایران"});
  EXPECT_EQ(remove_stopwords({"ایران"}, {}), TokenList{"ایران"});
  EXPECT_TRUE(remove_stopwords({"از", "از"}, sw).empty());
}

TEST(Stem, Examples) {
  const std::vector<StemRule> rules = {{"ها", ""}};
  EXPECT_EQ(stem("کتابها", rules), "کتاب");
  EXPECT_EQ(stem("کتاب", rules), "کتاب");
  EXPECT_EQ(stem("ها", rules), "ها");
}

TEST(Stem, LongestSuffixFirst) {
  std::vector<StemRule> rules = {{"ها", ""}, {"های", ""}, {kZwnj + "های", ""}};
  sort_stem_rules(rules);
  EXPECT_EQ(rules.front().suffix, kZwnj + "های");
  EXPECT_EQ(stem("کتاب" + kZwnj + "های", rules), "کتاب");
  EXPECT_EQ(stem("کشورهای", rules), "کشور");
}

TEST(Stem, AppliesAtMostOneRule) {
  const std::vector<StemRule> rules = {{"ها", ""}};
  EXPECT_EQ(stem("هاها", rules), "ها");
}

TEST(EditDistance, SmallCases) {
  EXPECT_EQ(edit_distance(U"", U""), 0u);
  EXPECT_EQ(edit_distance(U"abc", U""), 3u);
  EXPECT_EQ(edit_distance(U"kitten", U"sitting"), 3u);
  EXPECT_EQ(edit_distance(U"خوبب", U"خوب"), 1u);
}

TEST(CorrectSpelling, Examples) {
  const std::unordered_set<std::string> dict = {"خوب"};
  EXPECT_EQ(correct_spelling("خوب", dict), "خوب");
  EXPECT_EQ(correct_spelling("خاو", dict), "خاو");
  EXPECT_EQ(correct_spelling("خوبب", dict), "خوب");
}

TEST(CorrectSpelling, AmbiguousCandidatesLeaveTokenAlone) {
  EXPECT_EQ(correct_spelling("cat", {"bat", "hat"}), "cat");
  EXPECT_EQ(correct_spelling("cat", {"bat", "dog"}), "bat");
}

TEST(Preprocess, Examples) {
  PreprocessConfig cfg;
  cfg.emoji_map = {{"😂", "خنده"}};
  EXPECT_EQ(preprocess({"خوووووب 😂", "x"}, cfg), (TokenList{"خوب", "خنده"}));
  EXPECT_TRUE(preprocess({"", "x"}, cfg).empty());
  EXPECT_EQ(preprocess({"a b", "x"}, only({})), (TokenList{"a", "b"}));
}

TEST(Preprocess, StepsCanBeDisabledIndividually) {
  PreprocessConfig cfg = only({PreprocessStep::NormalizeChars});
  cfg.emoji_map = {{"😂", "خنده"}};
  EXPECT_EQ(preprocess({"خوووب 😂 علي", "x"}, cfg), (TokenList{"خوووب", "😂", "علی"}));
}

TEST(Preprocess, DuplicateStepIsAConfigError) {
  auto cfg = only({PreprocessStep::Stem, PreprocessStep::Stem});
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Preprocess, GoldenFixtureCorpus) {
  const auto cfg = load_preprocess_config(testing_support::fixture_resources());
  const auto ds = load_dataset(fixture("corpus.csv"));
  EXPECT_EQ(preprocess_lines(ds.documents, cfg), testing_support::slurp(fixture("corpus.golden")));
}

TEST(Preprocess, GoldenOutputIsAFixpoint) {
  const auto cfg = load_preprocess_config(testing_support::fixture_resources());
  const auto golden = testing_support::slurp(fixture("corpus.golden"));
  std::istringstream in(golden);
  std::vector<RawDocument> docs;
  for (std::string line; std::getline(in, line);) docs.push_back({line, "_"});
  EXPECT_EQ(preprocess_lines(docs, cfg), golden);
}

TEST(Preprocess, PropertiesOnRandomText) {
  Rng rng(11);
  PreprocessConfig cfg;
  cfg.emoji_map = {{"😂", "خنده"}};
  cfg.stopwords = {"و"};
  cfg.stem_rules = {{"ب", ""}};
  for (int i = 0; i < 2000; ++i) {
    const auto s = random_text(rng);
    ASSERT_TRUE(utf8::is_valid(s));
    EXPECT_EQ(normalize_chars(normalize_chars(s)), normalize_chars(s)) << s;
    EXPECT_EQ(collapse_repeats(collapse_repeats(s)), collapse_repeats(s)) << s;
    EXPECT_EQ(strip_html_urls(strip_html_urls(s)), strip_html_urls(s)) << s;
    const auto tokens = preprocess({s, "x"}, cfg);
    EXPECT_EQ(tokens, preprocess({s, "x"}, cfg));
    for (const auto& t : tokens) {
      EXPECT_FALSE(t.empty());
      for (char32_t cp : utf8::decode(t)) EXPECT_FALSE(utf8::is_whitespace(cp)) << s;
    }
    const auto raw = tokenize(s);
    const auto kept = remove_stopwords(raw, cfg.stopwords);
    EXPECT_LE(kept.size(), raw.size());
    std::size_t j = 0;
    for (const auto& t : kept) {
      while (j < raw.size() && raw[j] != t) ++j;
      ASSERT_LT(j, raw.size());
      ++j;
    }
  }
}

TEST(Resources, StopwordCommentsIgnored) {
  std::istringstream in("# comment\nاز\n\n  و  \n");
  const auto sw = read_stopwords(in);
  EXPECT_EQ(sw.size(), 2u);
  EXPECT_TRUE(sw.contains("و"));
}

TEST(Resources, StemRulesSortedOnLoad) {
  std::istringstream in("ها\t\nهای\t\n");
  const auto rules = read_stem_rules(in);
  ASSERT_EQ(rules.size(), 2u);
  EXPECT_EQ(rules[0].suffix, "های");
}

TEST(Resources, MalformedTsvIsFormatError) {
  std::istringstream no_tab("😂 خنده\n");
  EXPECT_THROW(read_emoji_map(no_tab), FormatError);
  std::istringstream empty_value("😂\t\n");
  EXPECT_THROW(read_emoji_map(empty_value), FormatError);
}

TEST(Resources, InvalidUtf8IsFormatError) {
  std::istringstream in("ok\n\xC3\x28\n");
  EXPECT_THROW(read_stopwords(in), FormatError);
}

TEST(Resources, BomAndCrlfStripped) {
  std::istringstream in("\xEF\xBB\xBFاز\r\nو\r\n");
  const auto sw = read_stopwords(in);
  EXPECT_TRUE(sw.contains("از"));
  EXPECT_TRUE(sw.contains("و"));
}

TEST(Resources, MissingFileIsConfigError) {
  ResourcePaths p;
  p.stopwords = "/nonexistent/stopwords.txt";
  EXPECT_THROW(load_preprocess_config(p), ConfigError);
}

TEST(Resources, ShippedDefaultsLoad) {
  const auto cfg = load_preprocess_config(resources_in(PARSENT_DATA));
  EXPECT_GT(cfg.stopwords.size(), 20u);
  EXPECT_GT(cfg.emoji_map.size(), 10u);
  EXPECT_FALSE(cfg.stem_rules.empty());
  EXPECT_NO_THROW(cfg.validate());
}
