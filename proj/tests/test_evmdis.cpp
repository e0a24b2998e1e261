#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>

#include "hymo/evmdis.hpp"
#include "hymo/rng.hpp"

using namespace hymo;
namespace fs = std::filesystem;

TEST_CASE("opcode table covers the 134-opcode instruction set") {
  CHECK(defined_opcode_count() == 134);

  // Spot checks frozen from the instruction-set listing.
  const std::map<int, std::string> reference = {
      {0x00, "STOP"},   {0x01, "ADD"},          {0x02, "MUL"},        {0x04, "DIV"},
      {0x05, "SDIV"},   {0x06, "MOD"},          {0x07, "SMOD"},       {0x0b, "SIGNEXTEND"},
      {0x10, "LT"},     {0x16, "AND"},          {0x20, "SHA3"},       {0x35, "CALLDATALOAD"},
      {0x3d, "RETURNDATASIZE"},                 {0x44, "DIFFICULTY"}, {0x52, "MSTORE"},
      {0x56, "JUMP"},   {0x57, "JUMPI"},        {0x5b, "JUMPDEST"},   {0x60, "PUSH1"},
      {0x7f, "PUSH32"}, {0x80, "DUP1"},         {0x8f, "DUP16"},      {0x90, "SWAP1"},
      {0xa0, "LOG0"},   {0xa4, "LOG4"},         {0xf0, "CREATE"},     {0xf3, "RETURN"},
      {0xf4, "DELEGATECALL"},                   {0xfa, "STATICCALL"}, {0xfd, "REVERT"},
      {0xff, "SELFDESTRUCT"}};
  for (const auto& [byte, name] : reference) {
    CAPTURE(byte);
    CHECK(opcode_table()[static_cast<size_t>(byte)].mnemonic == name);
    CHECK(opcode_table()[static_cast<size_t>(byte)].defined);
  }

  // PUSHk carries k immediate bytes.
  for (int k = 1; k <= 32; ++k)
    CHECK(opcode_table()[static_cast<size_t>(0x5f + k)].immediate_bytes == k);

  // Undefined byte values decode as INVALID with no immediates.
  for (int byte : {0x0c, 0x1b, 0x21, 0x46, 0x5c, 0xa5, 0xf5, 0xfe}) {
    CHECK(opcode_table()[static_cast<size_t>(byte)].mnemonic == std::string("INVALID"));
    CHECK_FALSE(opcode_table()[static_cast<size_t>(byte)].defined);
    CHECK(opcode_table()[static_cast<size_t>(byte)].immediate_bytes == 0);
  }
}

TEST_CASE("parse_hex decodes with optional prefix and reports offsets") {
  CHECK(parse_hex("0x6001") == std::vector<std::uint8_t>{0x60, 0x01});
  CHECK(parse_hex("6001") == std::vector<std::uint8_t>{0x60, 0x01});
  CHECK(parse_hex("0xDeAd") == std::vector<std::uint8_t>{0xde, 0xad});
  CHECK(parse_hex("").empty());
  CHECK(parse_hex("0x").empty());

  CHECK_THROWS_WITH_AS(parse_hex("0x601"), doctest::Contains("digit 3"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_hex("0x6g"), doctest::Contains("digit 2"), std::invalid_argument);
}

TEST_CASE("disassemble drops PUSH immediates") {
  auto seq = disassemble(parse_hex("0x6080604052"));
  CHECK(seq.mnemonics == std::vector<std::string>{"PUSH1", "PUSH1", "MSTORE"});

  CHECK(disassemble(parse_hex("0x01")).mnemonics == std::vector<std::string>{"ADD"});
  CHECK(disassemble({}).mnemonics.empty());

  // PUSH32 swallows the next 32 bytes.
  std::vector<std::uint8_t> code(34, 0x01);
  code[0] = 0x7f;
  auto long_push = disassemble(code);
  CHECK(long_push.mnemonics == std::vector<std::string>{"PUSH32", "ADD"});
}

TEST_CASE("truncated PUSH immediates consume what remains") {
  CHECK(disassemble(parse_hex("0x61ff")).mnemonics == std::vector<std::string>{"PUSH2"});
  CHECK(disassemble(parse_hex("0x60")).mnemonics == std::vector<std::string>{"PUSH1"});
}

TEST_CASE("undefined bytes emit INVALID") {
  CHECK(disassemble(parse_hex("0xfe")).mnemonics == std::vector<std::string>{"INVALID"});
  CHECK(disassemble(parse_hex("0x0c01")).mnemonics == std::vector<std::string>{"INVALID", "ADD"});
}

TEST_CASE("disassembly is total over random byte arrays") {
  Rng rng(31337);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<std::uint8_t> code(rng.next_below(513));
    for (auto& b : code) b = static_cast<std::uint8_t>(rng.next_below(256));

    OpcodeSequence seq;
    REQUIRE_NOTHROW(seq = disassemble(code));

    // Independent consumption walk over the table.
    size_t i = 0, ops = 0;
    while (i < code.size()) {
      size_t imm = opcode_table()[code[i]].immediate_bytes;
      i += 1 + std::min(imm, code.size() - i - 1);
      ++ops;
    }
    REQUIRE(i == code.size());
    REQUIRE(seq.mnemonics.size() == ops);
    for (const auto& m : seq.mnemonics) REQUIRE(is_known_mnemonic(m));
  }
}

TEST_CASE("PUSH-free byte arrays disassemble one token per byte") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint8_t> code(rng.next_below(100));
    for (auto& b : code) {
      do {
        b = static_cast<std::uint8_t>(rng.next_below(256));
      } while (b >= 0x60 && b <= 0x7f);
    }
    CHECK(disassemble(code).mnemonics.size() == code.size());
  }
}

TEST_CASE("acquire_opcodes resolves routes in precedence order") {
  SUBCASE("opcode_text passes through verbatim") {
    ContractSample s{"s1", "contract A{}", std::nullopt, "PUSH1 PUSH1 MSTORE", 0};
    CHECK(acquire_opcodes(s).mnemonics == std::vector<std::string>{"PUSH1", "PUSH1", "MSTORE"});
  }
  SUBCASE("unknown mnemonics in opcode_text normalize to INVALID") {
    ContractSample s{"s2", "", std::nullopt, "ADD BOGUS MUL", 1};
    CHECK(acquire_opcodes(s).mnemonics == std::vector<std::string>{"ADD", "INVALID", "MUL"});
  }
  SUBCASE("bytecode_hex is disassembled") {
    ContractSample s{"s3", "", std::string("0x6001"), std::nullopt, 0};
    CHECK(acquire_opcodes(s).mnemonics == std::vector<std::string>{"PUSH1"});
  }
  SUBCASE("opcode_text wins over bytecode") {
    ContractSample s{"s4", "", std::string("0x6001"), std::string("ADD"), 0};
    CHECK(acquire_opcodes(s).mnemonics == std::vector<std::string>{"ADD"});
  }
  SUBCASE("no route yields an error naming the sample") {
    ContractSample s{"lonely", "contract A{}", std::nullopt, std::nullopt, 0};
    CHECK_THROWS_WITH_AS(acquire_opcodes(s), doctest::Contains("lonely"), std::runtime_error);
  }
}

TEST_CASE("compile_external error contract") {
  SUBCASE("missing compiler") {
    ContractSample s{"s5", "contract A{}", std::nullopt, std::nullopt, 0};
    CHECK_THROWS_WITH_AS(acquire_opcodes(s, "/nonexistent/solc"),
                         doctest::Contains("compiler not found"), std::runtime_error);
  }

  SUBCASE("fake compiler smoke test") {
    // Stand-in for solc that emits the expected output shape.
    fs::path script = fs::temp_directory_path() / "hymo_fake_solc.sh";
    {
      std::ofstream out(script);
      out << "#!/bin/sh\n"
             "echo '======= input.sol:A ======='\n"
             "echo 'Binary of the runtime part:'\n"
             "echo '6080604052'\n";
    }
    fs::permissions(script, fs::perms::owner_all);
    auto bytes = compile_external("contract A{}", extract_pragma("contract A{}"), script.string());
    CHECK(bytes == parse_hex("6080604052"));
    fs::remove(script);
  }

  SUBCASE("compile failure carries diagnostics") {
    fs::path script = fs::temp_directory_path() / "hymo_bad_solc.sh";
    {
      std::ofstream out(script);
      out << "#!/bin/sh\n"
             "echo 'ParserError: expected pragma'\n"
             "exit 1\n";
    }
    fs::permissions(script, fs::perms::owner_all);
    CHECK_THROWS_WITH_AS(
        compile_external("contract {", extract_pragma("contract {"), script.string()),
        doctest::Contains("ParserError"), std::runtime_error);
    fs::remove(script);
  }
}
