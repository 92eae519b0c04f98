#include "engage/text.hpp"

#include <array>
#include <cctype>
#include <utility>

namespace engage::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// Composition table: base ASCII letter + combining mark -> precomposed.
// Marks: U+0300 grave, U+0301 acute, U+0303 tilde, U+0308 diaeresis.
char32_t compose(char32_t base, char32_t mark) {
  struct Entry {
    char32_t base, mark, out;
  };
  static constexpr std::array<Entry, 28> table{{
      {U'a', 0x0301, U'á'}, {U'e', 0x0301, U'é'}, {U'i', 0x0301, U'í'},
      {U'o', 0x0301, U'ó'}, {U'u', 0x0301, U'ú'}, {U'A', 0x0301, U'Á'},
      {U'E', 0x0301, U'É'}, {U'I', 0x0301, U'Í'}, {U'O', 0x0301, U'Ó'},
      {U'U', 0x0301, U'Ú'}, {U'a', 0x0300, U'à'}, {U'e', 0x0300, U'è'},
      {U'i', 0x0300, U'ì'}, {U'o', 0x0300, U'ò'}, {U'u', 0x0300, U'ù'},
      {U'A', 0x0300, U'À'}, {U'E', 0x0300, U'È'}, {U'I', 0x0300, U'Ì'},
      {U'O', 0x0300, U'Ò'}, {U'U', 0x0300, U'Ù'}, {U'n', 0x0303, U'ñ'},
      {U'N', 0x0303, U'Ñ'}, {U'a', 0x0303, U'ã'}, {U'o', 0x0303, U'õ'},
      {U'u', 0x0308, U'ü'}, {U'U', 0x0308, U'Ü'}, {U'i', 0x0308, U'ï'},
      {U'I', 0x0308, U'Ï'},
  }};
  for (const auto& e : table) {
    if (e.base == base && e.mark == mark) return e.out;
  }
  return 0;
}

// Precomposed Latin letter -> folded ASCII base (lowercase). Returns 0 when
// the codepoint is not in the table.
char32_t fold_letter(char32_t c) {
  struct Entry {
    char32_t in;
    char32_t out;
  };
  static constexpr std::array<Entry, 40> table{{
      {U'á', U'a'}, {U'é', U'e'}, {U'í', U'i'}, {U'ó', U'o'}, {U'ú', U'u'},
      {U'Á', U'a'}, {U'É', U'e'}, {U'Í', U'i'}, {U'Ó', U'o'}, {U'Ú', U'u'},
      {U'à', U'a'}, {U'è', U'e'}, {U'ì', U'i'}, {U'ò', U'o'}, {U'ù', U'u'},
      {U'À', U'a'}, {U'È', U'e'}, {U'Ì', U'i'}, {U'Ò', U'o'}, {U'Ù', U'u'},
      {U'ä', U'a'}, {U'ë', U'e'}, {U'ï', U'i'}, {U'ö', U'o'}, {U'ü', U'u'},
      {U'Ä', U'a'}, {U'Ë', U'e'}, {U'Ï', U'i'}, {U'Ö', U'o'}, {U'Ü', U'u'},
      {U'ñ', U'n'}, {U'Ñ', U'n'}, {U'ã', U'a'}, {U'õ', U'o'}, {U'Ã', U'a'},
      {U'Õ', U'o'}, {U'ç', U'c'}, {U'Ç', U'c'}, {U'â', U'a'}, {U'ê', U'e'},
  }};
  for (const auto& e : table) {
    if (e.in == c) return e.out;
  }
  return 0;
}

bool is_combining_mark(char32_t c) { return c >= 0x0300 && c <= 0x036F; }

}  // namespace

std::vector<char32_t> decode_utf8(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    unsigned char b = static_cast<unsigned char>(s[i]);
    char32_t cp = 0;
    size_t len = 0;
    if (b < 0x80) {
      cp = b;
      len = 1;
    } else if ((b & 0xE0) == 0xC0) {
      cp = b & 0x1F;
      len = 2;
    } else if ((b & 0xF0) == 0xE0) {
      cp = b & 0x0F;
      len = 3;
    } else if ((b & 0xF8) == 0xF0) {
      cp = b & 0x07;
      len = 4;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + len > s.size()) {
      out.push_back(kReplacement);
      break;
    }
    bool ok = true;
    for (size_t k = 1; k < len; ++k) {
      unsigned char c = static_cast<unsigned char>(s[i + k]);
      if ((c & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (c & 0x3F);
    }
    if (!ok) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) {
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
  return out;
}

std::string normalize(std::string_view s) {
  auto cps = decode_utf8(s);
  std::vector<char32_t> out;
  out.reserve(cps.size());
  for (char32_t cp : cps) {
    if (!out.empty() && is_combining_mark(cp)) {
      if (char32_t composed = compose(out.back(), cp)) {
        out.back() = composed;
        continue;
      }
    }
    out.push_back(cp);
  }
  return encode_utf8(out);
}

std::string fold(std::string_view s) {
  auto cps = decode_utf8(normalize(s));
  std::vector<char32_t> out;
  out.reserve(cps.size());
  for (char32_t cp : cps) {
    if (is_combining_mark(cp)) continue;
    if (cp < 0x80) {
      out.push_back(static_cast<char32_t>(
          std::tolower(static_cast<unsigned char>(cp))));
    } else if (char32_t f = fold_letter(cp)) {
      out.push_back(f);
    } else {
      out.push_back(cp);
    }
  }
  return encode_utf8(out);
}

std::vector<std::string> tokenize_folded(std::string_view folded) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : folded) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c >= 0x80) {
      cur.push_back(ch);
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

bool is_blank(std::string_view s) {
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string strip_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
  }
  return out;
}

}  // namespace engage::text
