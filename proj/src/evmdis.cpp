#include "hymo/evmdis.hpp"

#include <unistd.h>

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace hymo {

namespace {

constexpr OpcodeInfo kInvalid{"INVALID", 0, false};

std::array<OpcodeInfo, 256> build_table() {
  std::array<OpcodeInfo, 256> t;
  t.fill(kInvalid);
  auto def = [&](int byte, const char* name) { t[static_cast<size_t>(byte)] = {name, 0, true}; };

  def(0x00, "STOP");
  def(0x01, "ADD");
  def(0x02, "MUL");
  def(0x03, "SUB");
  def(0x04, "DIV");
  def(0x05, "SDIV");
  def(0x06, "MOD");
  def(0x07, "SMOD");
  def(0x08, "ADDMOD");
  def(0x09, "MULMOD");
  def(0x0a, "EXP");
  def(0x0b, "SIGNEXTEND");

  def(0x10, "LT");
  def(0x11, "GT");
  def(0x12, "SLT");
  def(0x13, "SGT");
  def(0x14, "EQ");
  def(0x15, "ISZERO");
  def(0x16, "AND");
  def(0x17, "OR");
  def(0x18, "XOR");
  def(0x19, "NOT");
  def(0x1a, "BYTE");

  def(0x20, "SHA3");

  def(0x30, "ADDRESS");
  def(0x31, "BALANCE");
  def(0x32, "ORIGIN");
  def(0x33, "CALLER");
  def(0x34, "CALLVALUE");
  def(0x35, "CALLDATALOAD");
  def(0x36, "CALLDATASIZE");
  def(0x37, "CALLDATACOPY");
  def(0x38, "CODESIZE");
  def(0x39, "CODECOPY");
  def(0x3a, "GASPRICE");
  def(0x3b, "EXTCODESIZE");
  def(0x3c, "EXTCODECOPY");
  def(0x3d, "RETURNDATASIZE");
  def(0x3e, "RETURNDATACOPY");

  def(0x40, "BLOCKHASH");
  def(0x41, "COINBASE");
  def(0x42, "TIMESTAMP");
  def(0x43, "NUMBER");
  def(0x44, "DIFFICULTY");
  def(0x45, "GASLIMIT");

  def(0x50, "POP");
  def(0x51, "MLOAD");
  def(0x52, "MSTORE");
  def(0x53, "MSTORE8");
  def(0x54, "SLOAD");
  def(0x55, "SSTORE");
  def(0x56, "JUMP");
  def(0x57, "JUMPI");
  def(0x58, "PC");
  def(0x59, "MSIZE");
  def(0x5a, "GAS");
  def(0x5b, "JUMPDEST");

  static const char* push_names[32] = {
      "PUSH1",  "PUSH2",  "PUSH3",  "PUSH4",  "PUSH5",  "PUSH6",  "PUSH7",  "PUSH8",
      "PUSH9",  "PUSH10", "PUSH11", "PUSH12", "PUSH13", "PUSH14", "PUSH15", "PUSH16",
      "PUSH17", "PUSH18", "PUSH19", "PUSH20", "PUSH21", "PUSH22", "PUSH23", "PUSH24",
      "PUSH25", "PUSH26", "PUSH27", "PUSH28", "PUSH29", "PUSH30", "PUSH31", "PUSH32"};
  static const char* dup_names[16] = {"DUP1",  "DUP2",  "DUP3",  "DUP4", "DUP5",  "DUP6",
                                      "DUP7",  "DUP8",  "DUP9",  "DUP10", "DUP11", "DUP12",
                                      "DUP13", "DUP14", "DUP15", "DUP16"};
  static const char* swap_names[16] = {"SWAP1",  "SWAP2",  "SWAP3",  "SWAP4",  "SWAP5",  "SWAP6",
                                       "SWAP7",  "SWAP8",  "SWAP9",  "SWAP10", "SWAP11", "SWAP12",
                                       "SWAP13", "SWAP14", "SWAP15", "SWAP16"};
  for (int k = 0; k < 32; ++k)
    t[static_cast<size_t>(0x60 + k)] = {push_names[k], static_cast<std::uint8_t>(k + 1), true};
  for (int k = 0; k < 16; ++k) t[static_cast<size_t>(0x80 + k)] = {dup_names[k], 0, true};
  for (int k = 0; k < 16; ++k) t[static_cast<size_t>(0x90 + k)] = {swap_names[k], 0, true};

  def(0xa0, "LOG0");
  def(0xa1, "LOG1");
  def(0xa2, "LOG2");
  def(0xa3, "LOG3");
  def(0xa4, "LOG4");

  def(0xf0, "CREATE");
  def(0xf1, "CALL");
  def(0xf2, "CALLCODE");
  def(0xf3, "RETURN");
  def(0xf4, "DELEGATECALL");
  def(0xfa, "STATICCALL");
  def(0xfd, "REVERT");
  def(0xff, "SELFDESTRUCT");

  return t;
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

const std::array<OpcodeInfo, 256>& opcode_table() {
  static const std::array<OpcodeInfo, 256> table = build_table();
  return table;
}

int defined_opcode_count() {
  int n = 0;
  for (const auto& info : opcode_table())
    if (info.defined) ++n;
  return n;
}

bool is_known_mnemonic(const std::string& mnemonic) {
  static const std::unordered_set<std::string> known = [] {
    std::unordered_set<std::string> s;
    for (const auto& info : opcode_table()) s.insert(info.mnemonic);
    s.insert("INVALID");
    return s;
  }();
  return known.contains(mnemonic);
}

std::vector<std::uint8_t> parse_hex(const std::string& bytecode_hex) {
  std::string_view hex = bytecode_hex;
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.size() % 2 != 0)
    throw std::invalid_argument("odd number of hex digits: dangling digit " +
                                std::to_string(hex.size()) + " in \"" + bytecode_hex + "\"");
  std::vector<std::uint8_t> bytes;
  bytes.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_value(hex[i]);
    int lo = hex_value(hex[i + 1]);
    if (hi < 0 || lo < 0)
      throw std::invalid_argument("non-hex character at digit " +
                                  std::to_string(hi < 0 ? i + 1 : i + 2) + " in \"" + bytecode_hex +
                                  "\"");
    bytes.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
  }
  return bytes;
}

OpcodeSequence disassemble(const std::vector<std::uint8_t>& code, std::string origin_id) {
  OpcodeSequence seq;
  seq.origin_id = std::move(origin_id);
  size_t i = 0;
  while (i < code.size()) {
    const OpcodeInfo& info = opcode_table()[code[i]];
    seq.mnemonics.emplace_back(info.mnemonic);
    i += 1;
    i += std::min<size_t>(info.immediate_bytes, code.size() - i);  // immediates are not tokens
  }
  return seq;
}

std::vector<std::uint8_t> compile_external(const std::string& source, const PragmaSpec& pragma_spec,
                                           const std::string& compiler_path) {
  namespace fs = std::filesystem;
  if (compiler_path.empty() || !fs::exists(compiler_path))
    throw std::runtime_error(
        "compiler not found: \"" + compiler_path +
        "\"; supply a working solc via --solc/HYMO_SOLC or precompiled bytecode_path entries in "
        "the manifest");

  std::clog << "compile_external: pragma lower bound " << pragma_spec.lower_bound.str()
            << " (constraint " << pragma_kind_name(pragma_spec.constraint_kind) << "), compiler "
            << compiler_path << "\n";

  const fs::path tmp =
      fs::temp_directory_path() / ("hymo_compile_" + std::to_string(::getpid()) + "_" +
                                   std::to_string(reinterpret_cast<std::uintptr_t>(&source)));
  fs::create_directories(tmp);
  const fs::path src_path = tmp / "input.sol";
  {
    std::ofstream out(src_path, std::ios::binary);
    out << source;
  }

  const std::string cmd = "\"" + compiler_path + "\" --bin-runtime \"" + src_path.string() +
                          "\" 2>&1";
  std::string output;
  int status = -1;
  {
    std::unique_ptr<FILE, int (*)(FILE*)> pipe(::popen(cmd.c_str(), "r"), ::pclose);
    if (!pipe) {
      fs::remove_all(tmp);
      throw std::runtime_error("failed to spawn compiler: " + compiler_path);
    }
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe.get())) > 0) output.append(buf, n);
    FILE* raw = pipe.release();
    status = ::pclose(raw);
  }
  fs::remove_all(tmp);

  if (status != 0)
    throw std::runtime_error("solidity compile failed (exit status " + std::to_string(status) +
                             "):\n" + output);

  // solc prints "Binary of the runtime part:" followed by a hex line for
  // each contract; the first contract wins.
  std::istringstream lines(output);
  std::string line;
  bool marker_seen = false;
  while (std::getline(lines, line)) {
    if (line.find("Binary of the runtime part") != std::string::npos) {
      marker_seen = true;
      continue;
    }
    if (marker_seen) {
      std::string trimmed;
      for (char c : line)
        if (!isspace(static_cast<unsigned char>(c))) trimmed.push_back(c);
      if (trimmed.empty()) continue;
      return parse_hex(trimmed);
    }
  }
  throw std::runtime_error("compiler output contained no runtime bytecode:\n" + output);
}

OpcodeSequence acquire_opcodes(const ContractSample& sample, const std::string& compiler_path) {
  if (sample.opcode_text) {
    OpcodeSequence seq;
    seq.origin_id = sample.id;
    std::istringstream in(*sample.opcode_text);
    std::string tok;
    while (in >> tok) seq.mnemonics.push_back(is_known_mnemonic(tok) ? tok : "INVALID");
    return seq;
  }
  if (sample.bytecode_hex) return disassemble(parse_hex(*sample.bytecode_hex), sample.id);
  if (!sample.source_text.empty() && !compiler_path.empty()) {
    auto bytecode = compile_external(sample.source_text, extract_pragma(sample.source_text),
                                     compiler_path);
    return disassemble(bytecode, sample.id);
  }
  throw std::runtime_error("sample \"" + sample.id +
                           "\": no opcode route available (need opcode_text, bytecode_hex, or "
                           "source_text plus a compiler path)");
}

}  // namespace hymo
