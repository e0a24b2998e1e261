#include "hymo/hymodel.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "hymo/binio.hpp"
#include "hymo/evmdis.hpp"
#include "hymo/solprep.hpp"

using nlohmann::json;

namespace hymo {

namespace {

constexpr char kMagic[5] = {'H', 'Y', 'M', 'O', '1'};
constexpr unsigned char kFormatVersion = 1;

InputRep input_rep_from_name(const std::string& name) {
  if (name == "cleaned_source") return InputRep::cleaned_source;
  if (name == "opcode") return InputRep::opcode;
  throw std::runtime_error("unknown input representation: " + name);
}

EncoderKind encoder_kind_from_name(const std::string& name) {
  if (name == "cnn") return EncoderKind::cnn;
  if (name == "bigru") return EncoderKind::bigru;
  throw std::runtime_error("unknown encoder kind: " + name);
}

EmbedKind embed_kind_from_name(const std::string& name) {
  if (name == "word2vec") return EmbedKind::word2vec;
  if (name == "fasttext") return EmbedKind::fasttext;
  throw std::runtime_error("unknown embedding kind: " + name);
}

json branch_to_json(const BranchConfig& b) {
  return json{{"input_rep", input_rep_name(b.input_rep)},
              {"embedding", embed_kind_name(b.embedding)},
              {"encoder", encoder_kind_name(b.encoder)},
              {"embed_dim", b.embed_dim},
              {"gru_units", b.gru_units},
              {"cnn_filters", b.cnn_filters},
              {"cnn_kernel", b.cnn_kernel},
              {"seq_len", b.seq_len}};
}

BranchConfig branch_from_json(const json& j) {
  BranchConfig b;
  b.input_rep = input_rep_from_name(j.at("input_rep").get<std::string>());
  b.embedding = embed_kind_from_name(j.at("embedding").get<std::string>());
  b.encoder = encoder_kind_from_name(j.at("encoder").get<std::string>());
  b.embed_dim = j.at("embed_dim").get<int>();
  b.gru_units = j.at("gru_units").get<int>();
  b.cnn_filters = j.at("cnn_filters").get<int>();
  b.cnn_kernel = j.at("cnn_kernel").get<int>();
  b.seq_len = j.at("seq_len").get<int>();
  return b;
}

}  // namespace

const char* input_rep_name(InputRep rep) {
  return rep == InputRep::cleaned_source ? "cleaned_source" : "opcode";
}

const char* encoder_kind_name(EncoderKind kind) {
  return kind == EncoderKind::cnn ? "cnn" : "bigru";
}

BranchConfig single_model_config(const std::string& name, const ModelDims& dims) {
  BranchConfig b;
  b.embed_dim = dims.embed_dim;
  b.gru_units = dims.gru_units;
  b.cnn_filters = dims.cnn_filters;
  b.cnn_kernel = dims.cnn_kernel;
  if (name == "M1") {
    b.input_rep = InputRep::cleaned_source;
    b.embedding = EmbedKind::word2vec;
    b.encoder = EncoderKind::cnn;
  } else if (name == "M2") {
    b.input_rep = InputRep::cleaned_source;
    b.embedding = EmbedKind::fasttext;
    b.encoder = EncoderKind::bigru;
  } else if (name == "M3") {
    b.input_rep = InputRep::opcode;
    b.embedding = EmbedKind::word2vec;
    b.encoder = EncoderKind::cnn;
  } else if (name == "M4") {
    b.input_rep = InputRep::opcode;
    b.embedding = EmbedKind::fasttext;
    b.encoder = EncoderKind::bigru;
  } else {
    throw std::invalid_argument("unknown single model \"" + name +
                                "\"; valid names are M1, M2, M3, M4");
  }
  b.seq_len = b.input_rep == InputRep::cleaned_source ? dims.seq_len_source : dims.seq_len_opcode;
  if (b.encoder == EncoderKind::cnn && b.seq_len < b.cnn_kernel)
    throw std::invalid_argument("sequence length shorter than CNN kernel");
  return b;
}

HybridConfig hybrid_config(const std::string& name, const ModelDims& dims) {
  HybridConfig cfg;
  cfg.name = name;
  cfg.fusion_hidden = dims.fusion_hidden;
  cfg.dropout_p = dims.dropout_p;
  if (name == "WCWC") {
    cfg.branch1 = single_model_config("M1", dims);
    cfg.branch2 = single_model_config("M3", dims);
  } else if (name == "WCFB") {
    cfg.branch1 = single_model_config("M1", dims);
    cfg.branch2 = single_model_config("M4", dims);
  } else if (name == "FBWC") {
    cfg.branch1 = single_model_config("M2", dims);
    cfg.branch2 = single_model_config("M3", dims);
  } else if (name == "FBFB") {
    cfg.branch1 = single_model_config("M2", dims);
    cfg.branch2 = single_model_config("M4", dims);
  } else {
    throw std::invalid_argument("unknown hybrid config \"" + name +
                                "\"; valid names are WCWC, WCFB, FBWC, FBFB");
  }
  return cfg;
}

const std::vector<std::string>& hybrid_names() {
  static const std::vector<std::string> names = {"WCWC", "WCFB", "FBWC", "FBFB"};
  return names;
}

TokenSequence source_tokens_for(const ContractSample& sample) {
  return tokenize(clean_source(sample.source_text), sample.id);
}

EmbeddedSequence<float> embed_branch_input(const BranchConfig& branch,
                                           const EmbeddingModel& embedding,
                                           const ContractSample& sample,
                                           const std::string& compiler_path) {
  if (embedding.config.mode != branch.embedding)
    throw std::runtime_error(std::string("embedding mode ") +
                             embed_kind_name(embedding.config.mode) +
                             " does not match the branch's " +
                             embed_kind_name(branch.embedding));
  if (embedding.config.dim != branch.embed_dim)
    throw std::runtime_error("embedding dim " + std::to_string(embedding.config.dim) +
                             " does not match branch embed_dim " +
                             std::to_string(branch.embed_dim));
  if (branch.input_rep == InputRep::cleaned_source)
    return embed_sequence<float>(embedding, source_tokens_for(sample), branch.seq_len);
  return embed_sequence<float>(embedding, acquire_opcodes(sample, compiler_path), branch.seq_len);
}

Prediction predict(const HybridModel<float>& model, const ContractSample& sample,
                   const EmbeddingModel& emb_branch1, const EmbeddingModel& emb_branch2,
                   const std::string& compiler_path) {
  auto e1 = embed_branch_input(model.config.branch1, emb_branch1, sample, compiler_path);
  auto e2 = embed_branch_input(model.config.branch2, emb_branch2, sample, compiler_path);
  nn::Vector<float> probs = hybrid_forward(model, e1, e2, /*train=*/false, nullptr);
  Prediction p;
  p.p_vulnerable = probs(1);
  p.label = probs(1) >= probs(0) ? 1 : 0;  // exact ties flag for review
  return p;
}

void save_checkpoint(HybridModel<float>& model, const std::string& path) {
  json manifest = json::array();
  std::uint64_t offset = 0;
  model.visit([&](nn::Tensor<float>& t) {
    manifest.push_back(
        {{"name", t.name}, {"rows", t.value.rows()}, {"cols", t.value.cols()}, {"offset", offset}});
    offset += static_cast<std::uint64_t>(t.value.size()) * 4;
  });

  json meta;
  meta["config"] = {{"name", model.config.name},
                    {"fusion_hidden", model.config.fusion_hidden},
                    {"dropout_p", model.config.dropout_p},
                    {"branch1", branch_to_json(model.config.branch1)},
                    {"branch2", branch_to_json(model.config.branch2)}};
  meta["seed"] = model.seed;
  meta["embedding_hashes"] = {{"branch1", model.emb_hash_branch1},
                              {"branch2", model.emb_hash_branch2}};
  meta["params"] = manifest;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof kMagic);
  out.put(static_cast<char>(kFormatVersion));
  const std::string meta_str = meta.dump();
  write_u64le(out, meta_str.size());
  out.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));
  model.visit([&](nn::Tensor<float>& t) {
    for (Eigen::Index r = 0; r < t.value.rows(); ++r)
      for (Eigen::Index c = 0; c < t.value.cols(); ++c) write_f32le(out, t.value(r, c));
  });
  if (!out) throw std::runtime_error("short write to checkpoint: " + path);
}

HybridModel<float> load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[5];
  if (!in.read(magic, 5) || std::string_view(magic, 5) != std::string_view(kMagic, 5))
    throw std::runtime_error("bad magic in checkpoint: " + path);
  const int version = in.get();
  if (version != kFormatVersion)
    throw std::runtime_error("unsupported checkpoint format version " + std::to_string(version) +
                             " in " + path);

  const std::uint64_t meta_len = read_u64le(in, "checkpoint metadata length");
  std::string meta_str(meta_len, '\0');
  if (!in.read(meta_str.data(), static_cast<std::streamsize>(meta_len)))
    throw std::runtime_error("truncated checkpoint metadata in " + path + " at byte offset " +
                             std::to_string(static_cast<long long>(in.tellg())));
  json meta;
  try {
    meta = json::parse(meta_str);
  } catch (const json::exception& e) {
    throw std::runtime_error("corrupt checkpoint metadata in " + path + ": " + e.what());
  }

  HybridConfig cfg;
  const json& jc = meta.at("config");
  cfg.name = jc.at("name").get<std::string>();
  cfg.fusion_hidden = jc.at("fusion_hidden").get<int>();
  cfg.dropout_p = jc.at("dropout_p").get<double>();
  cfg.branch1 = branch_from_json(jc.at("branch1"));
  cfg.branch2 = branch_from_json(jc.at("branch2"));
  if (cfg.branch1.input_rep == cfg.branch2.input_rep)
    throw std::runtime_error("invalid checkpoint: both branches read the same modality");

  HybridModel<float> model;
  model.init(cfg, meta.at("seed").get<std::uint64_t>());
  model.emb_hash_branch1 = meta.at("embedding_hashes").at("branch1").get<std::string>();
  model.emb_hash_branch2 = meta.at("embedding_hashes").at("branch2").get<std::string>();

  const json& manifest = meta.at("params");
  size_t entry = 0;
  model.visit([&](nn::Tensor<float>& t) {
    if (entry >= manifest.size())
      throw std::runtime_error("checkpoint manifest too short in " + path);
    const json& m = manifest[entry++];
    if (m.at("name").get<std::string>() != t.name ||
        m.at("rows").get<Eigen::Index>() != t.value.rows() ||
        m.at("cols").get<Eigen::Index>() != t.value.cols())
      throw std::runtime_error("checkpoint parameter mismatch for " + t.name + " in " + path);
    for (Eigen::Index r = 0; r < t.value.rows(); ++r)
      for (Eigen::Index c = 0; c < t.value.cols(); ++c)
        t.value(r, c) = read_f32le(in, t.name);
  });
  if (entry != manifest.size())
    throw std::runtime_error("checkpoint manifest has extra entries in " + path);
  if (in.peek() != std::char_traits<char>::eof())
    throw std::runtime_error("trailing bytes after checkpoint data in " + path);
  return model;
}

}  // namespace hymo
