#include "hymo/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hymo/arithsem.hpp"
#include "hymo/evmdis.hpp"
#include "hymo/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace hymo {

namespace {

std::string read_file_or_throw(const fs::path& p, size_t line_no) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw std::runtime_error("manifest line " + std::to_string(line_no) +
                             ": cannot read referenced file " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string sanitize_stem(const std::string& id, size_t index) {
  std::string stem;
  for (char c : id)
    stem.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ? c : '_');
  if (stem.empty()) stem = "sample";
  return stem + "_" + std::to_string(index);
}

}  // namespace

std::vector<ContractSample> load_manifest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open manifest: " + path);
  const fs::path base = fs::path(path).parent_path();

  std::vector<ContractSample> samples;
  std::set<std::string> seen_ids;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error("manifest line " + std::to_string(line_no) +
                               ": invalid JSON: " + e.what());
    }
    if (!obj.contains("id") || !obj["id"].is_string())
      throw std::runtime_error("manifest line " + std::to_string(line_no) + ": missing string id");
    if (!obj.contains("label") || !obj["label"].is_number_integer())
      throw std::runtime_error("manifest line " + std::to_string(line_no) +
                               ": missing integer label");

    ContractSample s;
    s.id = obj["id"].get<std::string>();
    s.label = obj["label"].get<int>();
    if (s.label != 0 && s.label != 1)
      throw std::runtime_error("manifest line " + std::to_string(line_no) + ": label " +
                               std::to_string(s.label) + " outside {0,1} for id " + s.id);
    if (!seen_ids.insert(s.id).second)
      throw std::runtime_error("manifest line " + std::to_string(line_no) + ": duplicate id " +
                               s.id);

    bool any = false;
    if (obj.contains("source_path")) {
      s.source_text = read_file_or_throw(base / obj["source_path"].get<std::string>(), line_no);
      any = true;
    }
    if (obj.contains("bytecode_path")) {
      std::string hex = read_file_or_throw(base / obj["bytecode_path"].get<std::string>(), line_no);
      while (!hex.empty() && std::isspace(static_cast<unsigned char>(hex.back()))) hex.pop_back();
      try {
        parse_hex(hex);  // enforce the even-length hex invariant at load time
      } catch (const std::exception& e) {
        throw std::runtime_error("manifest line " + std::to_string(line_no) + ": bad bytecode: " +
                                 e.what());
      }
      s.bytecode_hex = hex;
      any = true;
    }
    if (obj.contains("opcode_path")) {
      s.opcode_text = read_file_or_throw(base / obj["opcode_path"].get<std::string>(), line_no);
      any = true;
    }
    if (!any)
      throw std::runtime_error("manifest line " + std::to_string(line_no) +
                               ": need at least one of source_path/bytecode_path/opcode_path");
    samples.push_back(std::move(s));
  }
  return samples;
}

std::string save_manifest(const std::vector<ContractSample>& samples, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path base(dir);
  std::ofstream manifest(base / "manifest.jsonl", std::ios::binary | std::ios::trunc);
  if (!manifest) throw std::runtime_error("cannot write manifest in " + dir);

  for (size_t i = 0; i < samples.size(); ++i) {
    const ContractSample& s = samples[i];
    const std::string stem = sanitize_stem(s.id, i);
    json obj;
    obj["id"] = s.id;
    obj["label"] = s.label;
    if (!s.source_text.empty()) {
      std::ofstream(base / (stem + ".sol"), std::ios::binary) << s.source_text;
      obj["source_path"] = stem + ".sol";
    }
    if (s.bytecode_hex) {
      std::ofstream(base / (stem + ".hex"), std::ios::binary) << *s.bytecode_hex;
      obj["bytecode_path"] = stem + ".hex";
    }
    if (s.opcode_text) {
      std::ofstream(base / (stem + ".opcodes"), std::ios::binary) << *s.opcode_text;
      obj["opcode_path"] = stem + ".opcodes";
    }
    manifest << obj.dump() << "\n";
  }
  return (base / "manifest.jsonl").string();
}

DatasetSplit stratified_split(const std::vector<ContractSample>& samples, double test_fraction,
                              std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw std::invalid_argument("test_fraction must be in (0,1), got " +
                                std::to_string(test_fraction));

  std::vector<size_t> by_class[2];
  for (size_t i = 0; i < samples.size(); ++i) {
    int label = samples[i].label;
    if (label != 0 && label != 1)
      throw std::invalid_argument("label outside {0,1} for id " + samples[i].id);
    by_class[label].push_back(i);
  }
  if (by_class[0].empty() || by_class[1].empty())
    throw std::invalid_argument("stratified split needs at least one sample of each class");

  Rng rng(seed);
  std::vector<bool> in_test(samples.size(), false);
  for (int label = 0; label < 2; ++label) {
    auto& idx = by_class[label];
    for (size_t i = idx.size(); i > 1; --i)  // Fisher-Yates
      std::swap(idx[i - 1], idx[rng.next_below(i)]);
    auto take = static_cast<size_t>(std::llround(test_fraction * static_cast<double>(idx.size())));
    take = std::min(take, idx.size());
    for (size_t i = 0; i < take; ++i) in_test[idx[i]] = true;
  }

  DatasetSplit split;
  split.seed = seed;
  split.test_fraction = test_fraction;
  for (size_t i = 0; i < samples.size(); ++i)
    (in_test[i] ? split.test : split.train).push_back(samples[i]);
  return split;
}

namespace {

struct OpTraits {
  ArithKind kind;
  const char* name;   // id fragment
  const char* symbol; // Solidity operator
  const char* mnemonic_unsigned;
  const char* mnemonic_signed;
};

constexpr OpTraits kOps[] = {
    {ArithKind::add, "add", "+", "ADD", "ADD"},
    {ArithKind::sub, "sub", "-", "SUB", "SUB"},
    {ArithKind::mul, "mul", "*", "MUL", "MUL"},
    {ArithKind::div, "div", "/", "DIV", "SDIV"},
    {ArithKind::mod, "mod", "%", "MOD", "SMOD"},
};

const char* kContractNames[] = {"Token", "Vault", "Ledger", "Market", "Escrow", "Registry"};
const char* kFunctionNames[] = {"settle", "apply", "compute", "update", "combine", "tally"};
const char* kPragmas[] = {"^0.4.24", "^0.4.19", "0.4.26", "^0.5.0", ">=0.4.21 <0.6.0"};

std::string min_literal(int width) {
  switch (width) {
    case 8: return "-128";
    case 16: return "-32768";
    default: return "-2147483648";
  }
}

std::string max_literal(int width) {
  switch (width) {
    case 8: return "127";
    case 16: return "32767";
    default: return "2147483647";
  }
}

std::string guard_line(const OpTraits& op, bool is_signed, int width, std::uint64_t style) {
  const char* verb = (style % 2 == 0) ? "require" : "assert";
  const std::string v(verb);
  const std::string lo = min_literal(width), hi = max_literal(width);
  switch (op.kind) {
    case ArithKind::add:
      if (is_signed)
        return v + "((y >= 0 && x <= " + hi + " - y) || (y < 0 && x >= " + lo + " - y));";
      return v + "(x + y >= x);";
    case ArithKind::sub:
      if (is_signed)
        return v + "((y <= 0 && x <= " + hi + " + y) || (y > 0 && x >= " + lo + " + y));";
      return v + "(x >= y);";
    case ArithKind::mul:
      if (is_signed)
        return v + "(y == 0 || (x * y / y == x && !(x == " + lo + " && y == -1)));";
      return v + "(y == 0 || x * y / y == x);";
    case ArithKind::div:
      if (is_signed)
        return v + "(y != 0 && !(x == " + lo + " && y == -1));";
      return v + "(y != 0);";
    case ArithKind::mod: return v + (is_signed ? "(y != 0);" : "(y > 0);");
  }
  return v + "(true);";
}

std::string push_for_width(int width) {
  return width == 8 ? "PUSH1" : width == 16 ? "PUSH2" : "PUSH4";
}

// Mnemonic stream for the arithmetic core. Guarded variants carry the
// comparison + JUMPI + REVERT shape a require() compiles to; narrow results
// are masked (AND) or sign-extended unless the source widened to 256 bits.
std::string render_opcodes(const OpTraits& op, bool is_signed, int width, bool guarded,
                           bool widened, Rng& rng) {
  std::vector<std::string> v = {"PUSH1", "PUSH1", "MSTORE",  // memory prelude
                                "PUSH1", "CALLDATALOAD", "PUSH1", "CALLDATALOAD"};
  const std::uint64_t noise = rng.next_below(4);
  for (std::uint64_t i = 0; i < noise; ++i) {
    v.push_back("DUP1");
    v.push_back("POP");
  }
  if (guarded) {
    const char* lt = is_signed ? "SLT" : "LT";
    const char* div = is_signed ? "SDIV" : "DIV";
    switch (op.kind) {
      case ArithKind::add:
        v.insert(v.end(), {"DUP2", "DUP2", "ADD", "DUP3", lt, "ISZERO", "PUSH2", "JUMPI",
                           "PUSH1", "DUP1", "REVERT", "JUMPDEST"});
        break;
      case ArithKind::sub:
        v.insert(v.end(), {"DUP1", "DUP3", lt, "ISZERO", "PUSH2", "JUMPI", "PUSH1", "DUP1",
                           "REVERT", "JUMPDEST"});
        break;
      case ArithKind::mul:
        v.insert(v.end(), {"DUP2", "ISZERO", "DUP3", "DUP3", "MUL", "DUP3", div, "DUP4", "EQ",
                           "OR", "PUSH2", "JUMPI", "PUSH1", "DUP1", "REVERT", "JUMPDEST"});
        break;
      case ArithKind::div:
      case ArithKind::mod:
        v.insert(v.end(),
                 {"DUP1", "ISZERO", "PUSH2", "JUMPI", "PUSH1", "DUP1", "REVERT", "JUMPDEST"});
        break;
    }
  }
  v.push_back(is_signed ? op.mnemonic_signed : op.mnemonic_unsigned);
  if (!widened) {
    if (is_signed) {
      v.push_back("PUSH1");
      v.push_back("SIGNEXTEND");
    } else {
      v.push_back(push_for_width(width));
      v.push_back("AND");
    }
  }
  v.insert(v.end(), {"SWAP1", "POP", "PUSH1", "MSTORE", "PUSH1", "PUSH1", "RETURN"});

  std::string out;
  for (const auto& m : v) {
    if (!out.empty()) out.push_back(' ');
    out += m;
  }
  return out;
}

ContractSample make_synth_sample(Rng& rng, int index, bool vulnerable) {
  const OpTraits& op = kOps[rng.next_below(std::size(kOps))];
  const int width = std::array{8, 16, 32}[rng.next_below(3)];
  const bool is_signed = rng.next_below(3) == 0;  // signed variants of every operator

  // Immune samples either guard the operation or widen to 256 bits. Widening
  // neutralizes add/mul always and sub only for signed types; it cannot fix
  // division or modulo by zero.
  const bool can_widen = op.kind == ArithKind::add || op.kind == ArithKind::mul ||
                         (op.kind == ArithKind::sub && is_signed);
  const bool widened = !vulnerable && can_widen && rng.next_below(3) == 0;
  const bool guarded = !vulnerable && !widened;

  if (vulnerable) {
    // The unguarded operation must be out-of-bounds-reachable at this width.
    ArithOp probe{op.kind, is_signed, width, Version{0, 4, 24}};
    if (!find_violation(probe).has_value())
      throw std::logic_error("synth template has no reachable violation: " +
                             std::string(op.name));
  }

  const std::string wide_type = is_signed ? "int256" : "uint256";
  const std::string type_name =
      std::string(is_signed ? "int" : "uint") + std::to_string(width);
  const std::string contract =
      std::string(kContractNames[rng.next_below(std::size(kContractNames))]) +
      std::to_string(index);
  const std::string fname = kFunctionNames[rng.next_below(std::size(kFunctionNames))];
  const std::string pragma = kPragmas[rng.next_below(std::size(kPragmas))];
  const bool with_state = rng.next_below(2) == 0;
  const std::uint64_t fee = rng.next_below(90) + 1;
  const std::uint64_t guard_style = rng.next_below(2);

  std::string ret_type = widened ? wide_type : type_name;
  std::string expr = widened
                         ? wide_type + "(x) " + std::string(op.symbol) + " " + wide_type + "(y)"
                         : "x " + std::string(op.symbol) + " y";

  std::ostringstream src;
  src << "pragma solidity " << pragma << ";\n\n";
  src << "contract " << contract << " {\n";
  if (with_state) src << "    uint256 fee = " << fee << ";\n\n";
  src << "    function " << fname << "(" << type_name << " x, " << type_name
      << " y) public pure returns (" << ret_type << ") {\n";
  if (guarded) src << "        " << guard_line(op, is_signed, width, guard_style) << "\n";
  src << "        " << ret_type << " result = " << expr << ";\n";
  src << "        return result;\n";
  src << "    }\n";
  src << "}\n";

  ContractSample s;
  std::ostringstream id;
  id << "synth-" << std::setw(4) << std::setfill('0') << index << "-" << op.name << "-"
     << (is_signed ? "s" : "u") << width << "-" << (vulnerable ? "vuln" : "safe");
  s.id = id.str();
  s.source_text = src.str();
  s.opcode_text = render_opcodes(op, is_signed, width, guarded, widened, rng);
  s.label = vulnerable ? 1 : 0;
  return s;
}

}  // namespace

std::vector<ContractSample> synth_corpus(int count, std::uint64_t seed) {
  if (count < 2 || count % 2 != 0)
    throw std::invalid_argument("synth_corpus count must be even and >= 2, got " +
                                std::to_string(count));
  Rng rng(seed);
  std::vector<ContractSample> out;
  out.reserve(static_cast<size_t>(count));
  for (int i = 0; i < count / 2; ++i) {
    out.push_back(make_synth_sample(rng, 2 * i, /*vulnerable=*/true));
    out.push_back(make_synth_sample(rng, 2 * i + 1, /*vulnerable=*/false));
  }
  return out;
}

}  // namespace hymo
