#pragma once

// Tweet text cleaning: character normalization, markup/URL stripping, emoji
// replacement, repeat collapsing, tokenization, stopword removal, suffix
// stemming and conservative spell correction.

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "parsent/error.hpp"
#include "parsent/utf8.hpp"

namespace parsent {

struct RawDocument {
  std::string text;
  std::string label;
};

using TokenList = std::vector<std::string>;

enum class PreprocessStep {
  NormalizeChars,
  StripHtmlUrls,
  ReplaceEmojis,
  CollapseRepeats,
  RemoveStopwords,
  Stem,
  CorrectSpelling,
};

inline constexpr std::array<PreprocessStep, 7> kAllSteps = {
    PreprocessStep::NormalizeChars,  PreprocessStep::StripHtmlUrls,
    PreprocessStep::ReplaceEmojis,   PreprocessStep::CollapseRepeats,
    PreprocessStep::RemoveStopwords, PreprocessStep::Stem,
    PreprocessStep::CorrectSpelling,
};

inline std::string_view step_name(PreprocessStep s) {
  switch (s) {
    case PreprocessStep::NormalizeChars: return "normalize_chars";
    case PreprocessStep::StripHtmlUrls: return "strip_html_urls";
    case PreprocessStep::ReplaceEmojis: return "replace_emojis";
    case PreprocessStep::CollapseRepeats: return "collapse_repeats";
    case PreprocessStep::RemoveStopwords: return "remove_stopwords";
    case PreprocessStep::Stem: return "stem";
    case PreprocessStep::CorrectSpelling: return "correct_spelling";
  }
  return "";
}

inline PreprocessStep parse_step(std::string_view name) {
  for (auto s : kAllSteps)
    if (step_name(s) == name) return s;
  throw ConfigError("unknown preprocessing step '" + std::string(name) + "'");
}

struct StemRule {
  std::string suffix;
  std::string replacement;
};

/// Immutable after validate(); safe to share across threads.
struct PreprocessConfig {
  std::unordered_set<std::string> stopwords;
  std::map<std::string, std::string> emoji_map;
  std::vector<StemRule> stem_rules;  // kept longest-suffix-first
  std::optional<std::unordered_set<std::string>> dictionary;
  std::vector<PreprocessStep> steps_enabled{kAllSteps.begin(), kAllSteps.end()};

  bool enabled(PreprocessStep s) const {
    return std::find(steps_enabled.begin(), steps_enabled.end(), s) != steps_enabled.end();
  }

  void validate() const {
    std::set<PreprocessStep> seen;
    for (auto s : steps_enabled)
      if (!seen.insert(s).second)
        throw ConfigError("step '" + std::string(step_name(s)) + "' listed twice");
    for (const auto& [emoji, text] : emoji_map) {
      if (utf8::graphemes(utf8::decode(emoji)).size() != 1)
        throw ConfigError("emoji map key '" + emoji + "' is not a single grapheme");
    }
  }
};

/// Orders rules longest suffix first (codepoint length); equal lengths keep
/// their file order.
inline void sort_stem_rules(std::vector<StemRule>& rules) {
  std::stable_sort(rules.begin(), rules.end(), [](const StemRule& a, const StemRule& b) {
    return utf8::length(a.suffix) > utf8::length(b.suffix);
  });
}

// ---------------------------------------------------------------------------
// Character normalization

namespace detail {

inline char32_t canonical_char(char32_t cp) {
  switch (cp) {
    case 0x064A: case 0x0649:                        // Arabic yeh, alef maksura
    case 0xFEEF: case 0xFEF0: case 0xFEF1: case 0xFEF2: case 0xFEF3: case 0xFEF4:
    case 0xFBFC: case 0xFBFD: case 0xFBFE: case 0xFBFF:
      return 0x06CC;                                 // Farsi yeh
    case 0x0643:                                     // Arabic kaf
    case 0xFED9: case 0xFEDA: case 0xFEDB: case 0xFEDC:
    case 0xFB8E: case 0xFB8F: case 0xFB90: case 0xFB91:
      return 0x06A9;                                 // keheh
    case 0xFEE9: case 0xFEEA: case 0xFEEB: case 0xFEEC:
      return 0x0647;                                 // heh
    default:
      break;
  }
  if (cp >= 0x0660 && cp <= 0x0669) return cp - 0x0660 + 0x06F0;
  return cp;
}

}  // namespace detail

/// Maps Arabic code points to their Persian forms, folds Arabic-Indic digits
/// into the extended (Persian) digit family and drops tatweel.
inline std::string normalize_chars(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : utf8::decode(text)) {
    if (cp == 0x0640) continue;  // tatweel
    utf8::append(out, detail::canonical_char(cp));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Markup and URLs

/// Removes `<...>` tags and http(s):// or www. URLs. Repeats until nothing
/// changes so that text revealed by one removal is also cleaned.
inline std::string strip_html_urls(std::string_view text) {
  static const std::regex tag_re("<[^<>]*>");
  static const std::regex url_re(R"((https?://|www\.)[^\s]*)", std::regex::icase);
  std::string cur(text);
  for (;;) {
    std::string next = std::regex_replace(cur, tag_re, "");
    next = std::regex_replace(next, url_re, "");
    if (next == cur) return cur;
    cur = std::move(next);
  }
}

// ---------------------------------------------------------------------------
// Emojis

namespace detail {

inline std::string squeeze_spaces(std::u32string_view cps) {
  std::string out;
  bool pending = false;
  for (char32_t cp : cps) {
    if (utf8::is_whitespace(cp)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(' ');
    pending = false;
    utf8::append(out, cp);
  }
  return out;
}

inline bool is_emoji_cluster(const std::u32string& cluster) {
  char32_t base = cluster.front();
  if (base >= 0x1F1E6 && base <= 0x1F1FF) return true;
  if (utf8::is_emoji(base)) return true;
  // keycap sequences and stray selectors/joiners
  return base == 0xFE0F || base == utf8::kZwj ||
         std::find(cluster.begin(), cluster.end(), char32_t{0x20E3}) != cluster.end();
}

}  // namespace detail

/// Replaces each mapped emoji by its text (space separated) and removes
/// unmapped ones. Whitespace runs in the result are squeezed to one space
/// and trimmed.
inline std::string replace_emojis(std::string_view text,
                                  const std::map<std::string, std::string>& emoji_map) {
  std::u32string out;
  for (const auto& cluster : utf8::graphemes(utf8::decode(text))) {
    const std::string key = utf8::encode(cluster);
    auto it = emoji_map.find(key);
    if (it == emoji_map.end()) {
      std::u32string bare;
      for (char32_t cp : cluster)
        if (cp != 0xFE0F) bare.push_back(cp);
      if (!bare.empty()) it = emoji_map.find(utf8::encode(bare));
    }
    if (it != emoji_map.end()) {
      out.push_back(U' ');
      out += utf8::decode(it->second);
      out.push_back(U' ');
    } else if (detail::is_emoji_cluster(cluster)) {
      out.push_back(U' ');
    } else {
      out += cluster;
    }
  }
  return detail::squeeze_spaces(out);
}

// ---------------------------------------------------------------------------
// Repeated characters

/// Reduces any run of three or more identical non-space graphemes to one.
/// Doubled letters survive.
inline std::string collapse_repeats(std::string_view text) {
  const auto clusters = utf8::graphemes(utf8::decode(text));
  std::u32string out;
  std::size_t i = 0;
  while (i < clusters.size()) {
    std::size_t j = i + 1;
    while (j < clusters.size() && clusters[j] == clusters[i]) ++j;
    const bool space = clusters[i].size() == 1 && utf8::is_whitespace(clusters[i][0]);
    const std::size_t keep = (!space && j - i >= 3) ? 1 : j - i;
    for (std::size_t k = 0; k < keep; ++k) out += clusters[i];
    i = j;
  }
  return utf8::encode(out);
}

// ---------------------------------------------------------------------------
// Tokenization

/// Splits on whitespace and punctuation. ZWNJ stays inside tokens (but is
/// trimmed from token edges); '#' is a separator so hashtag bodies survive.
inline TokenList tokenize(std::string_view text) {
  TokenList tokens;
  std::u32string cur;
  auto flush = [&] {
    std::size_t b = 0, e = cur.size();
    while (b < e && cur[b] == utf8::kZwnj) ++b;
    while (e > b && cur[e - 1] == utf8::kZwnj) --e;
    if (e > b) tokens.push_back(utf8::encode(std::u32string_view(cur).substr(b, e - b)));
    cur.clear();
  };
  for (char32_t cp : utf8::decode(text)) {
    if (utf8::is_whitespace(cp) || utf8::is_punctuation(cp) || cp < 0x20 || cp == 0x7F) {
      flush();
    } else {
      cur.push_back(cp);
    }
  }
  flush();
  return tokens;
}

inline TokenList remove_stopwords(const TokenList& tokens,
                                  const std::unordered_set<std::string>& stopwords) {
  TokenList out;
  out.reserve(tokens.size());
  for (const auto& t : tokens)
    if (!stopwords.contains(t)) out.push_back(t);
  return out;
}

/// Applies the first matching suffix rule whose result is non-empty.
/// `rules` must already be sorted longest-suffix-first.
inline std::string stem(const std::string& token, const std::vector<StemRule>& rules) {
  for (const auto& rule : rules) {
    if (rule.suffix.empty() || !token.ends_with(rule.suffix)) continue;
    std::string result = token.substr(0, token.size() - rule.suffix.size()) + rule.replacement;
    if (result.empty()) continue;
    return result;
  }
  return token;
}

/// Levenshtein distance over code points.
inline std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// Returns the unique dictionary word at edit distance 1, else the token.
inline std::string correct_spelling(const std::string& token,
                                    const std::unordered_set<std::string>& dictionary) {
  if (dictionary.contains(token)) return token;
  const auto t = utf8::decode(token);
  const std::string* match = nullptr;
  for (const auto& word : dictionary) {
    const auto w = utf8::decode(word);
    const auto diff = w.size() > t.size() ? w.size() - t.size() : t.size() - w.size();
    if (diff > 1 || edit_distance(t, w) != 1) continue;
    if (match) return token;  // ambiguous
    match = &word;
  }
  return match ? *match : token;
}

/// Full cleaning pipeline. Enabled steps always run in the fixed order
/// normalize, strip, emojis, collapse, tokenize, stopwords, stem, spell;
/// tokenization always runs.
inline TokenList preprocess(const RawDocument& doc, const PreprocessConfig& cfg) {
  std::string text = doc.text;
  if (cfg.enabled(PreprocessStep::NormalizeChars)) text = normalize_chars(text);
  if (cfg.enabled(PreprocessStep::StripHtmlUrls)) text = strip_html_urls(text);
  if (cfg.enabled(PreprocessStep::ReplaceEmojis)) text = replace_emojis(text, cfg.emoji_map);
  if (cfg.enabled(PreprocessStep::CollapseRepeats)) text = collapse_repeats(text);
  TokenList tokens = tokenize(text);
  if (cfg.enabled(PreprocessStep::RemoveStopwords))
    tokens = remove_stopwords(tokens, cfg.stopwords);
  if (cfg.enabled(PreprocessStep::Stem))
    for (auto& t : tokens) t = stem(t, cfg.stem_rules);
  if (cfg.enabled(PreprocessStep::CorrectSpelling) && cfg.dictionary)
    for (auto& t : tokens) t = correct_spelling(t, *cfg.dictionary);
  return tokens;
}

// ---------------------------------------------------------------------------
// Resource files

namespace detail {

inline std::vector<std::string> read_lines(std::istream& in, const std::string& source) {
  std::vector<std::string> lines;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (!utf8::is_valid(line))
      throw FormatError(source + ":" + std::to_string(lineno) + ": invalid UTF-8");
    lines.push_back(std::move(line));
  }
  return lines;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return in;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::pair<std::string, std::string>> read_tsv_pairs(
    std::istream& in, const std::string& source, bool allow_empty_value) {
  std::vector<std::pair<std::string, std::string>> rows;
  std::size_t lineno = 0;
  for (const auto& line : read_lines(in, source)) {
    ++lineno;
    if (trim(line).empty() || line == "#" || line.starts_with("# ")) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos)
      throw FormatError(source + ":" + std::to_string(lineno) + ": expected two tab-separated fields");
    std::string key = line.substr(0, tab), value = line.substr(tab + 1);
    if (key.empty() || (!allow_empty_value && value.empty()))
      throw FormatError(source + ":" + std::to_string(lineno) + ": empty field");
    rows.emplace_back(std::move(key), std::move(value));
  }
  return rows;
}

}  // namespace detail

/// One token per line; blank and '#'-prefixed lines are skipped.
inline std::unordered_set<std::string> read_stopwords(std::istream& in,
                                                      const std::string& source = "<stopwords>") {
  std::unordered_set<std::string> words;
  for (const auto& line : detail::read_lines(in, source)) {
    auto w = detail::trim(line);
    if (w.empty() || w.front() == '#') continue;
    words.insert(std::move(w));
  }
  return words;
}

inline std::map<std::string, std::string> read_emoji_map(std::istream& in,
                                                         const std::string& source = "<emoji>") {
  std::map<std::string, std::string> map;
  for (auto& [k, v] : detail::read_tsv_pairs(in, source, false)) map[k] = v;
  return map;
}

inline std::vector<StemRule> read_stem_rules(std::istream& in,
                                             const std::string& source = "<stem rules>") {
  std::vector<StemRule> rules;
  for (auto& [k, v] : detail::read_tsv_pairs(in, source, true)) rules.push_back({k, v});
  sort_stem_rules(rules);
  return rules;
}

inline std::unordered_set<std::string> read_dictionary(std::istream& in,
                                                       const std::string& source = "<dictionary>") {
  std::unordered_set<std::string> words;
  for (const auto& line : detail::read_lines(in, source)) {
    auto w = detail::trim(line);
    if (!w.empty()) words.insert(std::move(w));
  }
  return words;
}

struct ResourcePaths {
  std::string stopwords;
  std::string emoji_map;
  std::string stem_rules;
  std::string dictionary;  // optional; empty disables spell correction
};

inline PreprocessConfig load_preprocess_config(const ResourcePaths& paths) {
  PreprocessConfig cfg;
  if (!paths.stopwords.empty()) {
    auto in = detail::open_input(paths.stopwords);
    cfg.stopwords = read_stopwords(in, paths.stopwords);
  }
  if (!paths.emoji_map.empty()) {
    auto in = detail::open_input(paths.emoji_map);
    cfg.emoji_map = read_emoji_map(in, paths.emoji_map);
  }
  if (!paths.stem_rules.empty()) {
    auto in = detail::open_input(paths.stem_rules);
    cfg.stem_rules = read_stem_rules(in, paths.stem_rules);
  }
  if (!paths.dictionary.empty()) {
    auto in = detail::open_input(paths.dictionary);
    cfg.dictionary = read_dictionary(in, paths.dictionary);
  }
  cfg.validate();
  return cfg;
}

}  // namespace parsent
