#include "seedforge/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstring>

namespace seedforge::text {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

// Fold one Unicode codepoint to an ASCII approximation for matching.
// Covers the dash/quote families and Latin-1 Supplement / Latin Extended-A
// letters; anything else passes through untouched.
std::string fold_codepoint(char32_t cp) {
  // Dash family -> space (so hyphen variants collapse like ASCII '-').
  switch (cp) {
    case 0x2010: case 0x2011: case 0x2012: case 0x2013:
    case 0x2014: case 0x2015: case 0x2212:
      return " ";
    case 0x2018: case 0x2019: case 0x201A: case 0x2032:
      return "'";
    case 0x201C: case 0x201D: case 0x201E: case 0x2033:
      return "\"";
    case 0x2026:
      return "...";
    case 0x00A0:
      return " ";
    default:
      break;
  }
  struct Range {
    char32_t lo, hi;
    const char* map;
  };
  // Latin-1 Supplement letters (0xC0..0xFF), '?' marks pass-through.
  static const char* kLatin1 =
      "aaaaaaaceeeeiiiidnooooo?ouuuuyps"   // 0xC0..0xDF (lowered)
      "aaaaaaaceeeeiiiidnooooo?ouuuuypy";  // 0xE0..0xFF
  if (cp >= 0xC0 && cp <= 0xFF) {
    char c = kLatin1[cp - 0xC0];
    if (c != '?') return std::string(1, c);
    return std::string();  // multiplication/division signs: drop
  }
  if (cp >= 0x100 && cp <= 0x17F) {
    // Latin Extended-A: base letter cycle per block.
    static const Range kRanges[] = {
        {0x100, 0x105, "a"}, {0x106, 0x10D, "c"}, {0x10E, 0x111, "d"},
        {0x112, 0x11B, "e"}, {0x11C, 0x123, "g"}, {0x124, 0x127, "h"},
        {0x128, 0x131, "i"}, {0x132, 0x133, "ij"}, {0x134, 0x135, "j"},
        {0x136, 0x138, "k"}, {0x139, 0x142, "l"}, {0x143, 0x14B, "n"},
        {0x14C, 0x151, "o"}, {0x152, 0x153, "oe"}, {0x154, 0x159, "r"},
        {0x15A, 0x161, "s"}, {0x162, 0x167, "t"}, {0x168, 0x173, "u"},
        {0x174, 0x175, "w"}, {0x176, 0x178, "y"}, {0x179, 0x17E, "z"},
        {0x17F, 0x17F, "s"},
    };
    for (const auto& r : kRanges) {
      if (cp >= r.lo && cp <= r.hi) return r.map;
    }
  }
  // Unknown: re-encode as UTF-8 unchanged.
  std::string out;
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
  return out;
}

// Decode one UTF-8 codepoint at s[i]; advances i. Invalid bytes are
// consumed one at a time and returned verbatim.
char32_t next_codepoint(std::string_view s, std::size_t& i) {
  unsigned char c = static_cast<unsigned char>(s[i]);
  if (c < 0x80) {
    ++i;
    return c;
  }
  int extra = 0;
  char32_t cp = 0;
  if ((c & 0xE0) == 0xC0) {
    extra = 1;
    cp = c & 0x1F;
  } else if ((c & 0xF0) == 0xE0) {
    extra = 2;
    cp = c & 0x0F;
  } else if ((c & 0xF8) == 0xF0) {
    extra = 3;
    cp = c & 0x07;
  } else {
    ++i;
    return c;
  }
  if (i + extra >= s.size()) {
    ++i;
    return c;
  }
  char32_t out = cp;
  for (int k = 1; k <= extra; ++k) {
    unsigned char cc = static_cast<unsigned char>(s[i + k]);
    if ((cc & 0xC0) != 0x80) {
      ++i;
      return c;
    }
    out = (out << 6) | (cc & 0x3F);
  }
  i += extra + 1;
  return out;
}

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_ws = false;
  for (char ch : s) {
    if (is_space(static_cast<unsigned char>(ch))) {
      in_ws = true;
      continue;
    }
    if (in_ws && !out.empty()) out.push_back(' ');
    in_ws = false;
    out.push_back(ch);
  }
  return out;
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

bool iequals_ascii(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

std::string entity_key(std::string_view surface) {
  return ascii_lower(collapse_whitespace(trim(surface)));
}

std::vector<std::string> normalize_tokens(std::string_view raw) {
  // Pass 1: Unicode fold.
  std::string folded;
  folded.reserve(raw.size());
  std::size_t i = 0;
  while (i < raw.size()) {
    char32_t cp = next_codepoint(raw, i);
    folded += fold_codepoint(cp);
  }
  // Pass 2: lowercase, punctuation to spaces.
  for (char& ch : folded) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (c < 0x80) {
      if (std::isalnum(c)) {
        ch = static_cast<char>(std::tolower(c));
      } else if (!std::isspace(c)) {
        ch = ' ';
      }
    }
  }
  // Pass 3: tokenize, drop articles.
  std::vector<std::string> tokens;
  std::size_t b = 0;
  while (b < folded.size()) {
    while (b < folded.size() && is_space(static_cast<unsigned char>(folded[b]))) ++b;
    std::size_t e = b;
    while (e < folded.size() && !is_space(static_cast<unsigned char>(folded[e]))) ++e;
    if (e > b) {
      std::string tok = folded.substr(b, e - b);
      if (tok != "a" && tok != "an" && tok != "the") tokens.push_back(std::move(tok));
    }
    b = e;
  }
  return tokens;
}

std::string normalize_for_match(std::string_view raw) {
  std::string out;
  for (const auto& tok : normalize_tokens(raw)) {
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

bool token_subsequence(const std::vector<std::string>& hay,
                       const std::vector<std::string>& needle) {
  if (needle.empty()) return false;
  if (needle.size() > hay.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    bool all = true;
    for (std::size_t j = 0; j < needle.size(); ++j) {
      if (hay[i + j] != needle[j]) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

bool is_word_byte(unsigned char c) {
  return c >= 0x80 || c == '_' || std::isalnum(c) != 0;
}

CasePattern classify_case(std::string_view span) {
  bool any_letter = false, all_upper = true, all_lower = true, title = true;
  bool word_start = true;
  for (std::size_t i = 0; i < span.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(span[i]);
    if (c >= 0x80) {
      // Non-ASCII letters keep the pattern ambiguous; treat as mixed.
      return CasePattern::mixed;
    }
    if (std::isspace(c)) {
      word_start = true;
      continue;
    }
    if (std::isalpha(c)) {
      any_letter = true;
      bool upper = std::isupper(c) != 0;
      all_upper = all_upper && upper;
      all_lower = all_lower && !upper;
      if (word_start ? !upper : upper) title = false;
    }
    word_start = false;
  }
  if (!any_letter) return CasePattern::mixed;
  if (all_upper) return CasePattern::upper;
  if (all_lower) return CasePattern::lower;
  if (title) return CasePattern::title;
  return CasePattern::mixed;
}

std::string apply_case_pattern(CasePattern pattern, std::string_view replacement) {
  std::string out(replacement);
  switch (pattern) {
    case CasePattern::upper:
      for (char& ch : out) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      break;
    case CasePattern::lower:
      for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      break;
    case CasePattern::title: {
      bool word_start = true;
      for (char& ch : out) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
          word_start = true;
          continue;
        }
        if (std::isalpha(c)) {
          ch = static_cast<char>(word_start ? std::toupper(c) : std::tolower(c));
        }
        word_start = false;
      }
      break;
    }
    case CasePattern::mixed:
      break;
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (char ch : data) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view data) {
  return fnv1a64(data, 0xcbf29ce484222325ULL);
}

std::string to_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) return "0";
  return std::string(buf.data(), ptr);
}

}  // namespace seedforge::text
