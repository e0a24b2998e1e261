#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "hymo/rng.hpp"
#include "hymo/trainkit.hpp"

using namespace hymo;

namespace {

ModelDims desk_dims() {
  ModelDims d;
  d.embed_dim = 8;
  d.gru_units = 4;
  d.cnn_filters = 4;
  d.cnn_kernel = 2;
  d.seq_len_source = 48;
  d.seq_len_opcode = 48;
  d.fusion_hidden = 16;
  return d;
}

EmbeddingConfig desk_embedding_config(std::uint64_t seed) {
  EmbeddingConfig c;
  c.dim = 8;
  c.epochs = 3;
  c.bucket_count = 1024;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("metrics formulas on the worked example") {
  auto m = Metrics::from_counts(3, 1, 4, 2);
  CHECK(m.accuracy == doctest::Approx(0.7));
  CHECK(m.precision == doctest::Approx(0.75));
  CHECK(m.recall == doctest::Approx(0.6));
  CHECK(m.f1 == doctest::Approx(0.9 / 1.35).epsilon(1e-12));
  CHECK(m.f1 == doctest::Approx(0.6667).epsilon(1e-3));
}

TEST_CASE("metrics identities hold over random confusion counts") {
  Rng rng(2025);
  for (int trial = 0; trial < 2000; ++trial) {
    // Mix in zeros often enough to exercise the degenerate conventions.
    auto draw = [&]() -> long {
      return rng.next_below(4) == 0 ? 0 : static_cast<long>(rng.next_below(1000));
    };
    long tp = draw(), fp = draw(), tn = draw(), fn = draw();
    auto m = Metrics::from_counts(tp, fp, tn, fn);
    const long total = tp + fp + tn + fn;
    if (total == 0)
      CHECK(m.accuracy == 0.0);
    else
      CHECK(m.accuracy == static_cast<double>(tp + tn) / static_cast<double>(total));
    if (tp + fp == 0)
      CHECK(m.precision == 0.0);
    else
      CHECK(m.precision == static_cast<double>(tp) / static_cast<double>(tp + fp));
    if (tp + fn == 0)
      CHECK(m.recall == 0.0);
    else
      CHECK(m.recall == static_cast<double>(tp) / static_cast<double>(tp + fn));
    if (m.precision + m.recall == 0.0)
      CHECK(m.f1 == 0.0);
    else
      CHECK(m.f1 == 2.0 * m.precision * m.recall / (m.precision + m.recall));
    CHECK(m.accuracy >= 0.0);
    CHECK(m.accuracy <= 1.0);
    CHECK(m.f1 >= 0.0);
    CHECK(m.f1 <= 1.0);
  }
}

TEST_CASE("published F1 recomputation disagrees with the reported value") {
  const double recomputed = published_reference::f1_pct_recomputed();
  CHECK(recomputed == doctest::Approx(79.13).epsilon(0.0001));
  CHECK(std::abs(recomputed - published_reference::f1_pct_reported) > 0.05);
}

TEST_CASE("hyperparameter defaults match the published setup") {
  HyperParams hp;
  CHECK(hp.lr == 0.001);
  CHECK(hp.batch_size == 128);
  CHECK(hp.epochs == 50);
  CHECK(hp.dropout_p == 0.5);
  CHECK_NOTHROW(hp.validate());

  HyperParams bad = hp;
  bad.lr = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = hp;
  bad.dropout_p = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = hp;
  bad.epochs = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("epoch_permutation touches every index exactly once") {
  Rng rng(5);
  for (size_t n : {0ul, 1ul, 2ul, 17ul, 128ul}) {
    auto perm = epoch_permutation(n, rng);
    REQUIRE(perm.size() == n);
    auto sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < n; ++i) CHECK(sorted[i] == i);
  }
}

TEST_CASE("training fits a separable synthetic corpus to accuracy 1.0") {
  auto samples = synth_corpus(20, 77);
  DatasetSplit split;
  split.train = samples;
  split.test = samples;

  EmbeddingConfig ec = desk_embedding_config(7);
  ec.epochs = 10;
  auto embeddings = build_embedding_set(samples, ec);

  ModelDims dims = desk_dims();
  dims.gru_units = 8;
  dims.fusion_hidden = 32;

  HyperParams hp;
  hp.lr = 0.05;
  hp.batch_size = 2;
  hp.epochs = 10;
  hp.dropout_p = 0.0;
  hp.seed = 11;

  auto result = train(hybrid_config("FBFB", dims), split, hp, embeddings);
  REQUIRE(result.epoch_losses.size() == 10);
  for (double l : result.epoch_losses) CHECK(std::isfinite(l));
  CHECK(result.epoch_losses.back() < result.epoch_losses.front());

  auto metrics = evaluate(result.model, split.train, embeddings);
  CHECK(metrics.accuracy == 1.0);
}

TEST_CASE("training is deterministic given the seed") {
  auto samples = synth_corpus(12, 5);
  DatasetSplit split;
  split.train = samples;
  split.test = samples;
  auto embeddings = build_embedding_set(samples, desk_embedding_config(3));

  HyperParams hp;
  hp.lr = 0.01;
  hp.batch_size = 5;  // 12 samples: exercises the final partial batch
  hp.epochs = 3;
  hp.seed = 21;

  auto a = train(hybrid_config("WCFB", desk_dims()), split, hp, embeddings);
  auto b = train(hybrid_config("WCFB", desk_dims()), split, hp, embeddings);
  REQUIRE(a.epoch_losses.size() == b.epoch_losses.size());
  for (size_t i = 0; i < a.epoch_losses.size(); ++i)
    CHECK(a.epoch_losses[i] == b.epoch_losses[i]);  // bitwise

  auto ma = evaluate(a.model, split.test, embeddings);
  auto mb = evaluate(b.model, split.test, embeddings);
  CHECK(ma.accuracy == mb.accuracy);
  CHECK(ma.tp == mb.tp);
}

TEST_CASE("degenerate evaluation sets do not crash the metrics") {
  auto samples = synth_corpus(8, 9);
  DatasetSplit split;
  split.train = samples;
  split.test = samples;
  auto embeddings = build_embedding_set(samples, desk_embedding_config(2));
  HyperParams hp;
  hp.batch_size = 4;
  hp.epochs = 1;
  hp.seed = 1;
  auto result = train(hybrid_config("WCWC", desk_dims()), split, hp, embeddings);

  std::vector<ContractSample> immune_only;
  for (const auto& s : samples)
    if (s.label == 0) immune_only.push_back(s);
  auto m = evaluate(result.model, immune_only, embeddings);
  CHECK(m.tp + m.fn == 0);
  CHECK(m.recall == 0.0);  // zero-denominator convention

  CHECK_THROWS_AS(evaluate(result.model, {}, embeddings), std::invalid_argument);
}

TEST_CASE("self-comparison runs all four hybrids on the identical split") {
  auto samples = synth_corpus(24, 33);
  auto split = stratified_split(samples, 0.25, 4);
  auto embeddings = build_embedding_set(split.train, desk_embedding_config(5));

  HyperParams hp;
  hp.lr = 0.02;
  hp.batch_size = 4;
  hp.epochs = 3;
  hp.dropout_p = 0.1;
  hp.seed = 13;

  auto report = run_self_comparison(split, hp, embeddings, desk_dims());
  REQUIRE(report.entries.size() == 4);
  std::vector<std::string> names;
  for (const auto& e : report.entries) names.push_back(e.config);
  std::sort(names.begin(), names.end());
  CHECK(names == std::vector<std::string>{"FBFB", "FBWC", "WCFB", "WCWC"});

  for (size_t i = 1; i < report.entries.size(); ++i)
    CHECK(report.entries[i - 1].metrics.accuracy >= report.entries[i].metrics.accuracy);

  SUBCASE("report JSON is deterministic modulo timing") {
    auto again = run_self_comparison(split, hp, embeddings, desk_dims());
    CHECK(report.to_json(false) == again.to_json(false));
    CHECK(report.dataset_fingerprint == again.dataset_fingerprint);
  }
  SUBCASE("report carries the published reference with the discrepancy note") {
    auto j = report.to_json(true);
    CHECK(j.find("79.71") != std::string::npos);
    CHECK(j.find("79.05") != std::string::npos);
    CHECK(j.find("f1_pct_recomputed") != std::string::npos);
    CHECK(j.find("note") != std::string::npos);
  }
  SUBCASE("text table lists every config") {
    auto t = report.to_table();
    for (const auto& name : hybrid_names()) CHECK(t.find(name) != std::string::npos);
  }
}
