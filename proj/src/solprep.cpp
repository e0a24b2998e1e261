#include "hymo/solprep.hpp"

#include <array>
#include <cctype>
#include <cstdlib>
#include <optional>

namespace hymo {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_hex_digit(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

// Operators matched longest-first. Single characters fall through to the
// one-byte rule.
constexpr std::array<std::string_view, 23> kOperators = {
    "<<=", ">>=", "+=", "-=", "*=", "/=", "%=", "==", "!=", "<=", ">=", "&&",
    "||",  "<<",  ">>", "**", "++", "--", "->", "=>", "&=", "|=", "^=",
};

constexpr std::string_view kStrPlaceholder = "<STR>";

// Consumes a quoted literal starting at `i` (source[i] is the quote).
// Returns the index one past the closing quote, or past the last character
// that still belongs to the literal when it is unterminated. A raw newline
// ends an unterminated literal (it stays outside the literal).
size_t scan_string(std::string_view s, size_t i) {
  const char quote = s[i];
  ++i;
  while (i < s.size()) {
    char c = s[i];
    if (c == '\\' && i + 1 < s.size()) {
      i += 2;
      continue;
    }
    if (c == quote) return i + 1;
    if (c == '\n') return i;
    ++i;
  }
  return i;
}

std::optional<int> parse_component(std::string_view s) {
  if (s.empty() || s.size() > 9) return std::nullopt;
  int v = 0;
  for (char c : s) {
    if (!is_digit(c)) return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

std::optional<Version> parse_version(std::string_view s) {
  std::array<std::string_view, 3> parts = {"", "", "0"};
  size_t start = 0, idx = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '.') {
      if (idx >= 3) return std::nullopt;
      parts[idx++] = s.substr(start, i - start);
      start = i + 1;
    }
  }
  if (idx < 2) return std::nullopt;
  auto maj = parse_component(parts[0]);
  auto min = parse_component(parts[1]);
  auto pat = parse_component(parts[2]);
  if (!maj || !min || !pat) return std::nullopt;
  return Version{*maj, *min, *pat};
}

}  // namespace

const char* pragma_kind_name(PragmaKind k) {
  switch (k) {
    case PragmaKind::exact: return "exact";
    case PragmaKind::caret: return "caret";
    case PragmaKind::range: return "range";
    case PragmaKind::none_found: return "none-found";
  }
  return "?";
}

std::string clean_source(std::string_view source, std::vector<std::string>* warnings) {
  std::string out;
  out.reserve(source.size());
  bool pending_space = false;

  auto emit = [&](char c) {
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(c);
  };

  size_t i = 0;
  while (i < source.size()) {
    char c = source[i];
    if (c == '/' && i + 1 < source.size() && source[i + 1] == '/') {
      i += 2;
      while (i < source.size() && source[i] != '\n') ++i;
      continue;  // the newline itself is handled as whitespace
    }
    if (c == '/' && i + 1 < source.size() && source[i + 1] == '*') {
      size_t end = source.find("*/", i + 2);
      if (end == std::string_view::npos) {
        if (warnings) warnings->push_back("unterminated block comment; stripped to end of input");
        i = source.size();
      } else {
        i = end + 2;
      }
      continue;
    }
    if (c == '"' || c == '\'') {
      size_t end = scan_string(source, i);
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.append(source.substr(i, end - i));  // literal contents kept verbatim
      i = end;
      continue;
    }
    if (is_space(c)) {
      pending_space = true;
      ++i;
      continue;
    }
    emit(c);
    ++i;
  }
  return out;
}

TokenSequence tokenize(std::string_view cleaned, std::string origin_id) {
  TokenSequence seq;
  seq.origin_id = std::move(origin_id);
  size_t i = 0;
  const size_t n = cleaned.size();
  while (i < n) {
    char c = cleaned[i];
    if (is_space(c)) {
      ++i;
      continue;
    }
    if (c == '"' || c == '\'') {
      i = scan_string(cleaned, i);
      seq.tokens.emplace_back(kStrPlaceholder);
      continue;
    }
    // The placeholder itself must survive a re-tokenize round trip.
    if (c == '<' && cleaned.substr(i, kStrPlaceholder.size()) == kStrPlaceholder) {
      seq.tokens.emplace_back(kStrPlaceholder);
      i += kStrPlaceholder.size();
      continue;
    }
    if (is_ident_start(c)) {
      size_t start = i;
      while (i < n && is_ident_char(cleaned[i])) ++i;
      seq.tokens.emplace_back(cleaned.substr(start, i - start));
      continue;
    }
    if (is_digit(c)) {
      size_t start = i;
      if (c == '0' && i + 1 < n && (cleaned[i + 1] == 'x' || cleaned[i + 1] == 'X')) {
        i += 2;
        while (i < n && (is_hex_digit(cleaned[i]) || cleaned[i] == '_')) ++i;
      } else {
        while (i < n && (is_digit(cleaned[i]) || cleaned[i] == '_')) ++i;
        if (i + 1 < n && cleaned[i] == '.' && is_digit(cleaned[i + 1])) {
          ++i;
          while (i < n && (is_digit(cleaned[i]) || cleaned[i] == '_')) ++i;
        }
        if (i < n && (cleaned[i] == 'e' || cleaned[i] == 'E')) {
          size_t j = i + 1;
          if (j < n && (cleaned[j] == '+' || cleaned[j] == '-')) ++j;
          if (j < n && is_digit(cleaned[j])) {
            i = j;
            while (i < n && is_digit(cleaned[i])) ++i;
          }
        }
      }
      seq.tokens.emplace_back(cleaned.substr(start, i - start));
      continue;
    }
    bool matched = false;
    for (std::string_view op : kOperators) {
      if (cleaned.substr(i, op.size()) == op) {
        seq.tokens.emplace_back(op);
        i += op.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    seq.tokens.emplace_back(1, c);
    ++i;
  }
  return seq;
}

PragmaSpec extract_pragma(std::string_view source, std::vector<std::string>* warnings) {
  PragmaSpec spec;
  const std::string cleaned = clean_source(source);

  TokenSequence toks = tokenize(cleaned);
  const auto& t = toks.tokens;
  size_t at = t.size();
  for (size_t i = 0; i + 1 < t.size(); ++i) {
    if (t[i] == "pragma" && t[i + 1] == "solidity") {
      at = i;
      break;
    }
  }
  if (at == t.size()) return spec;  // none found

  // Reassemble the directive text up to the terminating semicolon.
  size_t end = at;
  while (end < t.size() && t[end] != ";") ++end;
  std::string raw;
  for (size_t i = at; i < end; ++i) {
    if (!raw.empty()) raw.push_back(' ');
    raw += t[i];
  }
  raw.push_back(';');
  spec.raw = raw;

  // Comparator clauses between "solidity" and ";". Operator tokens come out
  // of the tokenizer separately from the version literals.
  Version lower{0, 0, 0};
  int clauses = 0;
  bool saw_caret = false, saw_relational = false, malformed = false;
  size_t i = at + 2;
  while (i < end) {
    std::string op;
    while (i < end && (t[i] == "^" || t[i] == "~" || t[i] == ">" || t[i] == "<" || t[i] == ">=" ||
                       t[i] == "<=" || t[i] == "=")) {
      op = t[i];
      ++i;
    }
    if (i >= end) {
      if (!op.empty()) malformed = true;
      break;
    }
    // A version literal tokenizes as NUM . NUM [. NUM] — stitch it back.
    std::string lit = t[i++];
    while (i + 1 < end && t[i] == ".") {
      lit += ".";
      lit += t[i + 1];
      i += 2;
    }
    auto v = parse_version(lit);
    if (!v) {
      malformed = true;
      break;
    }
    ++clauses;
    if (op == "^" || op == "~") saw_caret = true;
    if (op == ">" || op == ">=" || op == "<" || op == "<=") saw_relational = true;
    if (op.empty() || op == "=" || op == "^" || op == "~" || op == ">=") {
      lower = std::max(lower, *v);
    } else if (op == ">") {
      lower = std::max(lower, Version{v->major, v->minor, v->patch + 1});
    }
    // < and <= only cap the range; they never raise the lower bound.
  }

  if (malformed || clauses == 0) {
    if (warnings) warnings->push_back("malformed pragma version in: " + raw);
    spec.raw = raw;
    spec.constraint_kind = PragmaKind::none_found;
    spec.lower_bound = Version{0, 0, 0};
    return spec;
  }

  spec.lower_bound = lower;
  if (clauses > 1 || saw_relational)
    spec.constraint_kind = PragmaKind::range;
  else if (saw_caret)
    spec.constraint_kind = PragmaKind::caret;
  else
    spec.constraint_kind = PragmaKind::exact;
  return spec;
}

}  // namespace hymo
