#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hymo/semver.hpp"

namespace hymo {

// Tokenized cleaned source, input modality #1.
struct TokenSequence {
  std::vector<std::string> tokens;
  std::string origin_id;
};

enum class PragmaKind { exact, caret, range, none_found };

const char* pragma_kind_name(PragmaKind k);

struct PragmaSpec {
  std::string raw;  // the directive text as found, empty when absent
  Version lower_bound;
  PragmaKind constraint_kind = PragmaKind::none_found;
};

// Removes line and block comments (string literals are left intact) and
// collapses every whitespace run to a single space. An unterminated block
// comment strips to end of input and appends a note to `warnings`.
// Idempotent.
std::string clean_source(std::string_view source, std::vector<std::string>* warnings = nullptr);

// Splits cleaned source into identifiers/keywords, number literals, the
// <STR> placeholder for string literals, and operators/punctuation.
// Multi-character operators are matched longest-first. Total: unknown bytes
// come through as single-character tokens.
TokenSequence tokenize(std::string_view cleaned, std::string origin_id = "");

// Parses the first `pragma solidity ...;` directive. The lower bound is the
// minimal version admitted by the constraint; absent or malformed directives
// give none_found with lower bound 0.0.0.
PragmaSpec extract_pragma(std::string_view source, std::vector<std::string>* warnings = nullptr);

}  // namespace hymo
