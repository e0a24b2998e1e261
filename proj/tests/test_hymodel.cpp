#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "hymo/binio.hpp"
#include "hymo/gradcheck.hpp"
#include "hymo/hymodel.hpp"

using namespace hymo;
namespace fs = std::filesystem;

namespace {

ModelDims tiny_dims() {
  ModelDims d;
  d.embed_dim = 4;
  d.gru_units = 3;
  d.cnn_filters = 2;
  d.cnn_kernel = 2;
  d.seq_len_source = 5;
  d.seq_len_opcode = 5;
  d.fusion_hidden = 4;
  d.dropout_p = 0.0;
  return d;
}

template <typename S>
EmbeddedSequence<S> random_embedded(int length, int dim, int valid, Rng& rng) {
  EmbeddedSequence<S> e;
  e.matrix.setZero(length, dim);
  e.mask.assign(static_cast<size_t>(length), 0);
  for (int i = 0; i < valid; ++i) {
    for (int c = 0; c < dim; ++c)
      e.matrix(i, c) = static_cast<S>(rng.next_uniform(-1.0, 1.0));
    e.mask[static_cast<size_t>(i)] = 1;
  }
  return e;
}

EmbeddingModel toy_embedding(EmbedKind kind, int dim, std::uint64_t seed) {
  EmbeddingConfig cfg;
  cfg.mode = kind;
  cfg.dim = dim;
  cfg.epochs = 1;
  cfg.bucket_count = 64;
  cfg.seed = seed;
  TokenCorpus corpus = {{"contract", "uint8", "require", "return", "x", "y", "+", ";"},
                        {"PUSH1", "ADD", "MSTORE", "REVERT", "JUMPI"}};
  return train_embeddings(corpus, cfg);
}

}  // namespace

TEST_CASE("hybrid names map to their single-model branch pairs") {
  auto wcwc = hybrid_config("WCWC");
  CHECK(wcwc.branch1.embedding == EmbedKind::word2vec);
  CHECK(wcwc.branch1.encoder == EncoderKind::cnn);
  CHECK(wcwc.branch1.input_rep == InputRep::cleaned_source);
  CHECK(wcwc.branch2.embedding == EmbedKind::word2vec);
  CHECK(wcwc.branch2.encoder == EncoderKind::cnn);
  CHECK(wcwc.branch2.input_rep == InputRep::opcode);

  auto wcfb = hybrid_config("WCFB");
  CHECK(wcfb.branch1.encoder == EncoderKind::cnn);
  CHECK(wcfb.branch2.encoder == EncoderKind::bigru);
  CHECK(wcfb.branch2.embedding == EmbedKind::fasttext);

  auto fbwc = hybrid_config("FBWC");
  CHECK(fbwc.branch1.encoder == EncoderKind::bigru);
  CHECK(fbwc.branch1.embedding == EmbedKind::fasttext);
  CHECK(fbwc.branch2.encoder == EncoderKind::cnn);

  auto fbfb = hybrid_config("FBFB");
  CHECK(fbfb.branch1.encoder == EncoderKind::bigru);
  CHECK(fbfb.branch2.encoder == EncoderKind::bigru);

  for (const auto& name : hybrid_names()) {
    auto cfg = hybrid_config(name);
    CHECK(cfg.branch1.input_rep != cfg.branch2.input_rep);  // both modalities present
    CHECK(cfg.name == name);
  }

  CHECK_THROWS_WITH_AS(hybrid_config("FBXX"), doctest::Contains("WCWC, WCFB, FBWC, FBFB"),
                       std::invalid_argument);
  CHECK_THROWS_AS(single_model_config("M5"), std::invalid_argument);
}

TEST_CASE("branch feature dimensions follow the encoder") {
  CHECK(single_model_config("M2").feature_dim() == 600);  // 2 x 300 BiGRU units
  CHECK(single_model_config("M1").feature_dim() == 128);
  CHECK(hybrid_config("FBFB").fused_dim() == 1200);
  CHECK(hybrid_config("WCFB").fused_dim() == 728);
  CHECK(hybrid_config("WCWC").fused_dim() == 256);
}

TEST_CASE("branch_forward produces the configured feature shapes") {
  Rng rng(3);
  ModelDims dims = tiny_dims();

  SUBCASE("bigru branch") {
    BranchConfig cfg = single_model_config("M2", dims);
    BranchParams<double> params;
    Rng init(7);
    params.init(cfg, "b", init);
    auto emb = random_embedded<double>(cfg.seq_len, cfg.embed_dim, 3, rng);
    auto f = branch_forward(params, cfg, emb);
    CHECK(f.size() == 6);

    auto padding = random_embedded<double>(cfg.seq_len, cfg.embed_dim, 0, rng);
    CHECK(branch_forward(params, cfg, padding).isZero(0));
  }
  SUBCASE("cnn branch") {
    BranchConfig cfg = single_model_config("M1", dims);
    BranchParams<double> params;
    Rng init(8);
    params.init(cfg, "b", init);
    auto emb = random_embedded<double>(cfg.seq_len, cfg.embed_dim, 4, rng);
    CHECK(branch_forward(params, cfg, emb).size() == 2);
  }
  SUBCASE("embedding dim mismatch is an error") {
    BranchConfig cfg = single_model_config("M1", dims);
    BranchParams<double> params;
    Rng init(9);
    params.init(cfg, "b", init);
    auto emb = random_embedded<double>(cfg.seq_len, cfg.embed_dim + 1, 2, rng);
    CHECK_THROWS_WITH_AS(branch_forward(params, cfg, emb), doctest::Contains("dim"),
                         std::invalid_argument);
  }
}

TEST_CASE("hybrid_forward produces a probability distribution") {
  Rng rng(5);
  HybridModel<double> model;
  model.init(hybrid_config("FBFB", tiny_dims()), 42);
  for (int trial = 0; trial < 50; ++trial) {
    auto e1 = random_embedded<double>(5, 4, 1 + static_cast<int>(rng.next_below(5)), rng);
    auto e2 = random_embedded<double>(5, 4, 1 + static_cast<int>(rng.next_below(5)), rng);
    auto probs = hybrid_forward(model, e1, e2, false, nullptr);
    REQUIRE(probs.size() == 2);
    CHECK(std::abs(probs.sum() - 1.0) < 1e-9);
    CHECK(probs(0) > 0.0);
    CHECK(probs(1) > 0.0);
  }
}

TEST_CASE("full tiny hybrid passes the gradient check") {
  for (const char* name : {"FBFB", "WCWC", "WCFB"}) {
    CAPTURE(name);
    HybridModel<double> model;
    model.init(hybrid_config(name, tiny_dims()), 11);
    Rng rng(13);
    auto e1 = random_embedded<double>(5, 4, 3, rng);
    auto e2 = random_embedded<double>(5, 4, 5, rng);
    const int label = 1;

    HybridCache<double> cache;
    hybrid_forward(model, e1, e2, false, nullptr, &cache);
    model.zero_grads();
    nn::Matrix<double> dX1, dX2;
    hybrid_backward(model, cache, label, 1.0, &dX1, &dX2);

    nn::GradCheck check;
    model.visit([&](nn::Tensor<double>& t) { check.add(t); });
    check.add("input1", &e1.matrix, &dX1);
    check.add("input2", &e2.matrix, &dX2);
    auto loss = [&] {
      auto probs = hybrid_forward(model, e1, e2, false, nullptr);
      return nn::cross_entropy(probs, label);
    };
    auto result = check.run(loss);
    CAPTURE(result.worst_coordinate);
    CHECK(result.max_rel_err < 1e-4);
  }
}

TEST_CASE("fusion head gradient check") {
  // Dense -> ReLU -> dense -> softmax with the branches frozen out of the
  // picture: perturb only fusion and head parameters.
  HybridModel<double> model;
  model.init(hybrid_config("WCWC", tiny_dims()), 3);
  Rng rng(29);
  auto e1 = random_embedded<double>(5, 4, 4, rng);
  auto e2 = random_embedded<double>(5, 4, 4, rng);

  HybridCache<double> cache;
  hybrid_forward(model, e1, e2, false, nullptr, &cache);
  model.zero_grads();
  hybrid_backward(model, cache, 0, 1.0);

  nn::GradCheck check;
  check.add(model.fusion_W);
  check.add(model.fusion_b);
  check.add(model.head_W);
  check.add(model.head_b);
  auto loss = [&] {
    auto probs = hybrid_forward(model, e1, e2, false, nullptr);
    return nn::cross_entropy(probs, 0);
  };
  auto result = check.run(loss);
  CHECK(result.max_rel_err < 1e-6);
}

TEST_CASE("predict maps probabilities to labels with the tie rule") {
  ModelDims dims = tiny_dims();
  dims.embed_dim = 8;
  HybridModel<float> model;
  model.init(hybrid_config("FBFB", dims), 4);

  auto src_emb = toy_embedding(EmbedKind::fasttext, 8, 1);
  auto op_emb = toy_embedding(EmbedKind::fasttext, 8, 2);

  ContractSample sample{"s", "contract A { function f(uint8 x) public { return x + 1; } }",
                        std::nullopt, std::string("PUSH1 ADD MSTORE"), 1};

  SUBCASE("exact 0.5 tie resolves to vulnerable") {
    model.visit([](nn::Tensor<float>& t) { t.value.setZero(); });
    auto pred = predict(model, sample, src_emb, op_emb);
    CHECK(pred.p_vulnerable == 0.5);
    CHECK(pred.label == 1);
  }
  SUBCASE("clear immune probability gives label 0") {
    model.visit([](nn::Tensor<float>& t) { t.value.setZero(); });
    model.head_b.value(0, 0) = 4.0f;  // logits (4, 0) -> p0 ~ 0.982
    auto pred = predict(model, sample, src_emb, op_emb);
    CHECK(pred.label == 0);
    CHECK(pred.p_vulnerable < 0.1);
  }
  SUBCASE("inference is deterministic") {
    auto a = predict(model, sample, src_emb, op_emb);
    auto b = predict(model, sample, src_emb, op_emb);
    CHECK(a.label == b.label);
    CHECK(a.p_vulnerable == b.p_vulnerable);
  }
  SUBCASE("embedding mode mismatch is rejected") {
    auto w2v = toy_embedding(EmbedKind::word2vec, 8, 3);
    CHECK_THROWS_WITH_AS(predict(model, sample, w2v, op_emb), doctest::Contains("mode"),
                         std::runtime_error);
  }
}

TEST_CASE("checkpoints round-trip bitwise and reject corruption") {
  ModelDims dims = tiny_dims();
  HybridModel<float> model;
  model.init(hybrid_config("WCFB", dims), 99);
  model.emb_hash_branch1 = "00112233aabbccdd";
  model.emb_hash_branch2 = "deadbeefdeadbeef";

  const fs::path path = fs::temp_directory_path() / "hymo_model_test.ckpt";
  save_checkpoint(model, path.string());
  auto loaded = load_checkpoint(path.string());

  CHECK(loaded.config.name == "WCFB");
  CHECK(loaded.seed == 99);
  CHECK(loaded.emb_hash_branch1 == model.emb_hash_branch1);
  CHECK(loaded.emb_hash_branch2 == model.emb_hash_branch2);

  std::vector<const nn::Tensor<float>*> orig, back;
  model.visit([&](nn::Tensor<float>& t) { orig.push_back(&t); });
  loaded.visit([&](nn::Tensor<float>& t) { back.push_back(&t); });
  REQUIRE(orig.size() == back.size());
  for (size_t i = 0; i < orig.size(); ++i) {
    CHECK(orig[i]->name == back[i]->name);
    REQUIRE(orig[i]->value.size() == back[i]->value.size());
    CHECK(std::memcmp(orig[i]->value.data(), back[i]->value.data(),
                      sizeof(float) * static_cast<size_t>(orig[i]->value.size())) == 0);
  }

  SUBCASE("loaded checkpoints predict identically") {
    Rng rng(17);
    auto e1 = random_embedded<float>(5, 4, 3, rng);
    auto e2 = random_embedded<float>(5, 4, 4, rng);
    auto pa = hybrid_forward(model, e1, e2, false, nullptr);
    auto pb = hybrid_forward(loaded, e1, e2, false, nullptr);
    CHECK(pa == pb);
  }
  SUBCASE("wrong magic is rejected") {
    const fs::path bad = fs::temp_directory_path() / "hymo_model_badmagic.ckpt";
    std::ofstream(bad, std::ios::binary) << "XYMO1" << '\x01' << "junkjunkjunk";
    CHECK_THROWS_WITH_AS(load_checkpoint(bad.string()), doctest::Contains("magic"),
                         std::runtime_error);
    fs::remove(bad);
  }
  SUBCASE("format version mismatch is rejected") {
    auto bytes = read_file(path.string());
    bytes[5] = '\x02';
    const fs::path bad = fs::temp_directory_path() / "hymo_model_badver.ckpt";
    write_file(bad.string(), bytes);
    CHECK_THROWS_WITH_AS(load_checkpoint(bad.string()), doctest::Contains("version"),
                         std::runtime_error);
    fs::remove(bad);
  }
  SUBCASE("truncation reports a byte offset") {
    auto bytes = read_file(path.string());
    const fs::path cut = fs::temp_directory_path() / "hymo_model_cut.ckpt";
    write_file(cut.string(), std::string_view(bytes).substr(0, bytes.size() - 9));
    CHECK_THROWS_WITH_AS(load_checkpoint(cut.string()), doctest::Contains("offset"),
                         std::runtime_error);
    fs::remove(cut);
  }
  fs::remove(path);
}
