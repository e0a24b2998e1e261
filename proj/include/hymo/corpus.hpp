#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hymo {

// One labeled contract. Label 0 = immune, 1 = vulnerable.
struct ContractSample {
  std::string id;
  std::string source_text;
  std::optional<std::string> bytecode_hex;
  std::optional<std::string> opcode_text;
  int label = 0;
};

struct DatasetSplit {
  std::vector<ContractSample> train;
  std::vector<ContractSample> test;
  std::uint64_t seed = 0;
  double test_fraction = 0.0;
};

// Reads a JSON-Lines manifest; each line has id, label, and at least one of
// source_path / bytecode_path / opcode_path, resolved relative to the
// manifest's directory.
std::vector<ContractSample> load_manifest(const std::string& path);

// Writes samples into `dir` (one file per populated field) plus
// dir/manifest.jsonl in load_manifest's format. Returns the manifest path.
std::string save_manifest(const std::vector<ContractSample>& samples, const std::string& dir);

// Deterministic stratified split: per-class test counts are
// round(test_fraction * class_total); train and test preserve input order.
DatasetSplit stratified_split(const std::vector<ContractSample>& samples, double test_fraction,
                              std::uint64_t seed);

// Generates `count` synthetic contracts, half vulnerable (unguarded
// fixed-width arithmetic, confirmed out-of-bounds-reachable by the arithsem
// oracle) and half immune (guarded or width-widened). Every sample carries a
// synthetic opcode rendering of its arithmetic core.
std::vector<ContractSample> synth_corpus(int count, std::uint64_t seed);

}  // namespace hymo
