#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hymo/corpus.hpp"
#include "hymo/solprep.hpp"

namespace hymo {

// Compiled contract as a mnemonic stream, input modality #2. PUSH immediates
// are dropped so the vocabulary stays bounded by the instruction set.
struct OpcodeSequence {
  std::vector<std::string> mnemonics;
  std::string origin_id;
};

struct OpcodeInfo {
  const char* mnemonic;
  std::uint8_t immediate_bytes;  // k for PUSHk, otherwise 0
  bool defined;                  // false => decodes as INVALID
};

// Byte value -> instruction, covering the 134-opcode instruction set.
// Undefined byte values (including 0xfe itself) decode as INVALID.
const std::array<OpcodeInfo, 256>& opcode_table();

// Number of defined opcodes in the table (134).
int defined_opcode_count();

bool is_known_mnemonic(const std::string& mnemonic);

// Decodes hex with an optional 0x prefix. Odd digit counts and non-hex
// characters are reported with their offset.
std::vector<std::uint8_t> parse_hex(const std::string& bytecode_hex);

// Linear-scan disassembly. Total: consumes every byte exactly once; a PUSH
// whose immediate runs off the end consumes what remains.
OpcodeSequence disassemble(const std::vector<std::uint8_t>& code, std::string origin_id = "");

// Invokes an external Solidity compiler on `source` and returns the runtime
// bytecode of the first contract. Never required by tests; manifests may
// carry precompiled bytecode instead.
std::vector<std::uint8_t> compile_external(const std::string& source, const PragmaSpec& pragma_spec,
                                           const std::string& compiler_path);

// Resolves the opcode stream for a sample with precedence
// opcode_text > bytecode_hex > compile_external(source).
OpcodeSequence acquire_opcodes(const ContractSample& sample, const std::string& compiler_path = "");

}  // namespace hymo
