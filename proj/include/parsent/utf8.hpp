#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace parsent::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;
inline constexpr char32_t kZwnj = 0x200C;
inline constexpr char32_t kZwj = 0x200D;

namespace detail {

inline bool is_continuation(unsigned char b) { return (b & 0xC0) == 0x80; }

// Decodes one codepoint starting at s[i]; advances i. Returns kReplacement and
// consumes one byte on malformed input.
inline char32_t decode_one(std::string_view s, std::size_t& i, bool& ok) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  ok = true;
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  char32_t cp = 0;
  char32_t min = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2, cp = b0 & 0x1F, min = 0x80;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3, cp = b0 & 0x0F, min = 0x800;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4, cp = b0 & 0x07, min = 0x10000;
  } else {
    ok = false;
    ++i;
    return kReplacement;
  }
  if (i + len > s.size()) {
    ok = false;
    ++i;
    return kReplacement;
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if (!is_continuation(b)) {
      ok = false;
      ++i;
      return kReplacement;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    ok = false;
    ++i;
    return kReplacement;
  }
  i += len;
  return cp;
}

}  // namespace detail

inline bool is_valid(std::string_view s) {
  std::size_t i = 0;
  bool ok = true;
  while (i < s.size()) {
    detail::decode_one(s, i, ok);
    if (!ok) return false;
  }
  return true;
}

inline std::u32string decode(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  bool ok = true;
  while (i < s.size()) out.push_back(detail::decode_one(s, i, ok));
  return out;
}

inline void append(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string encode(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size() * 2);
  for (char32_t cp : cps) append(out, cp);
  return out;
}

inline bool is_whitespace(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000: case 0xFEFF:
      return true;
    default:
      return (cp >= 0x2000 && cp <= 0x200B);
  }
}

/// ASCII punctuation (minus '_') plus the Arabic-script and general
/// punctuation blocks that show up in Persian text.
inline bool is_punctuation(char32_t cp) {
  if (cp < 0x80) {
    return cp != '_' && ((cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
                         (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E));
  }
  switch (cp) {
    case 0x00A1: case 0x00A7: case 0x00AB: case 0x00B6: case 0x00B7:
    case 0x00BB: case 0x00BF:
    case 0x060C: case 0x060D: case 0x061B: case 0x061E: case 0x061F:
    case 0x066A: case 0x066B: case 0x066C: case 0x066D: case 0x06D4:
    case 0xFD3E: case 0xFD3F:
      return true;
    default:
      break;
  }
  return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
         (cp >= 0x3001 && cp <= 0x3003) || (cp >= 0xFE50 && cp <= 0xFE6B) ||
         (cp >= 0xFF01 && cp <= 0xFF0F);
}

/// Codepoints that extend the preceding character into one visual unit.
inline bool is_extender(char32_t cp) {
  return (cp >= 0x0300 && cp <= 0x036F) ||    // combining diacritics
         (cp >= 0x0610 && cp <= 0x061A) ||    // Arabic marks
         (cp >= 0x064B && cp <= 0x065F) ||    // harakat
         cp == 0x0670 ||
         (cp >= 0x06D6 && cp <= 0x06DC) || (cp >= 0x06DF && cp <= 0x06E4) ||
         (cp >= 0x06E7 && cp <= 0x06E8) || (cp >= 0x06EA && cp <= 0x06ED) ||
         (cp >= 0xFE00 && cp <= 0xFE0F) ||    // variation selectors
         (cp >= 0x1F3FB && cp <= 0x1F3FF) ||  // skin tones
         (cp >= 0xE0020 && cp <= 0xE007F) ||  // tag sequences
         cp == 0x20E3;                        // keycap
}

inline bool is_emoji(char32_t cp) {
  return (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF) ||
         (cp >= 0x2B00 && cp <= 0x2BFF) || (cp >= 0x2300 && cp <= 0x23FF) ||
         (cp >= 0x2190 && cp <= 0x21FF) || cp == 0x00A9 || cp == 0x00AE ||
         cp == 0x203C || cp == 0x2049 || cp == 0x2122 || cp == 0x2139 ||
         cp == 0x3030 || cp == 0x303D || cp == 0x3297 || cp == 0x3299;
}

/// Splits codepoints into simplified extended grapheme clusters: a base
/// codepoint, any extenders, and ZWJ-joined continuations.
inline std::vector<std::u32string> graphemes(std::u32string_view cps) {
  std::vector<std::u32string> out;
  std::size_t i = 0;
  while (i < cps.size()) {
    std::u32string cluster(1, cps[i++]);
    for (;;) {
      if (i < cps.size() && is_extender(cps[i])) {
        cluster.push_back(cps[i++]);
      } else if (i + 1 < cps.size() && cps[i] == kZwj && is_emoji(cluster.front()) &&
                 is_emoji(cps[i + 1])) {
        cluster.push_back(cps[i++]);
        cluster.push_back(cps[i++]);
      } else if (i < cps.size() && cps[i] >= 0x1F1E6 && cps[i] <= 0x1F1FF &&
                 cluster.size() == 1 && cluster.front() >= 0x1F1E6 &&
                 cluster.front() <= 0x1F1FF) {
        cluster.push_back(cps[i++]);  // regional-indicator flag pair
      } else {
        break;
      }
    }
    out.push_back(std::move(cluster));
  }
  return out;
}

inline std::size_t length(std::string_view s) { return decode(s).size(); }

}  // namespace parsent::utf8
