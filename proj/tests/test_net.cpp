#include <doctest.h>

#include <cmath>

#include "vgan/errors.hpp"
#include "vgan/net.hpp"
#include "vgan/util.hpp"

using namespace vgan;
using namespace vgan::net;

namespace {

Tensor random_tensor(int rows, int cols, Rng& rng, double scale = 1.0) {
  Tensor t(rows, cols);
  for (double& v : t.data) v = scale * rng.gaussian();
  return t;
}

GroupSample random_sample(const VganConfig& c, Rng& rng) {
  GroupSample s;
  s.papi = random_tensor(c.n_nodes, c.in_dim, rng, 2.0);
  s.lip = random_tensor(c.n_nodes, c.visual_in, rng, 1.5);
  s.has_lip = true;
  s.target = 80.0 + 15.0 * rng.gaussian();
  return s;
}

VganModel model_with_stats(const VganConfig& c, std::uint64_t seed) {
  VganModel model = init_params(c, seed);
  Rng rng = Rng::seeded(seed ^ 0xabcd);
  for (int j = 0; j < c.in_dim; ++j) {
    model.papi_mean[j] = rng.gaussian();
    model.papi_std[j] = 0.5 + rng.uniform();
  }
  for (int j = 0; j < c.visual_in; ++j) {
    model.lip_mean[j] = rng.gaussian();
    model.lip_std[j] = 0.5 + rng.uniform();
  }
  model.target_mean = 78.0;
  model.target_std = 18.0;
  return model;
}

}  // namespace

TEST_CASE("default configuration matches the published dimensions") {
  VganConfig c;
  CHECK(c.vga_flatten() == 576);   // 6 nodes x 3 heads x 32
  CHECK(c.feat_flatten() == 120);  // 6 nodes x 20 features
  CHECK(c.acoustic_dim() == 128);  // 64 + 64 after the two dense stacks
  CHECK(c.token_width() == 22);
  CHECK(c.fused_flatten() == 192);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("tensor matmul transpose cases agree with hand multiplication") {
  Tensor a(2, 3), b(3, 2);
  for (std::size_t i = 0; i < a.size(); ++i) a.data[i] = static_cast<double>(i + 1);
  for (std::size_t i = 0; i < b.size(); ++i) b.data[i] = static_cast<double>(2 * i + 1);
  const auto c = matmul(a, false, b, false);
  // Row 0: [1,2,3] . cols of b.
  CHECK(c.at(0, 0) == 1 * 1 + 2 * 5 + 3 * 9);
  CHECK(c.at(0, 1) == 1 * 3 + 2 * 7 + 3 * 11);
  const auto ct = matmul(b, true, a, true);  // (a b)^T = b^T a^T
  CHECK(ct.at(0, 0) == c.at(0, 0));
  CHECK(ct.at(1, 0) == c.at(0, 1));
}

TEST_CASE("vga_forward") {
  VganConfig c;
  const auto model = model_with_stats(c, 5);

  SUBCASE("identical node features give uniform attention 1/6") {
    Tensor features(c.n_nodes, c.in_dim);
    Rng rng = Rng::seeded(17);
    for (int j = 0; j < c.in_dim; ++j) {
      const double v = rng.gaussian();
      for (int i = 0; i < c.n_nodes; ++i) features.at(i, j) = v;
    }
    const auto out = vga_forward(model, features);
    REQUIRE(out.attention.size() == 3);
    for (const auto& alpha : out.attention) {
      for (double v : alpha.data)
        CHECK(std::abs(v - 1.0 / 6.0) <= 1e-12);
    }
  }
  SUBCASE("attention rows sum to one on random inputs") {
    Rng rng = Rng::seeded(23);
    for (int trial = 0; trial < 20; ++trial) {
      const auto out = vga_forward(model, random_tensor(6, 20, rng, 3.0));
      for (const auto& alpha : out.attention) {
        for (int i = 0; i < 6; ++i) {
          double sum = 0.0;
          for (int j = 0; j < 6; ++j) {
            sum += alpha.at(i, j);
            CHECK(alpha.at(i, j) >= 0.0);
            CHECK(alpha.at(i, j) <= 1.0);
          }
          CHECK(std::abs(sum - 1.0) <= 1e-9);
        }
      }
    }
  }
  SUBCASE("attended output flattens to 576") {
    Rng rng = Rng::seeded(29);
    const auto out = vga_forward(model, random_tensor(6, 20, rng));
    CHECK(out.attended.rows * out.attended.cols == 576);
  }
  SUBCASE("permutation equivariance") {
    Rng rng = Rng::seeded(31);
    const auto features = random_tensor(6, 20, rng, 2.0);
    const auto base = vga_forward(model, features);

    const int perm[6] = {3, 0, 5, 1, 4, 2};
    Tensor permuted(6, 20);
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 20; ++j) permuted.at(i, j) = features.at(perm[i], j);
    const auto moved = vga_forward(model, permuted);

    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < base.attended.cols; ++j) {
        CHECK(moved.attended.at(i, j) ==
              doctest::Approx(base.attended.at(perm[i], j)).epsilon(1e-12));
      }
    }
    for (std::size_t h = 0; h < base.attention.size(); ++h) {
      for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
          CHECK(moved.attention[h].at(i, j) ==
                doctest::Approx(base.attention[h].at(perm[i], perm[j]))
                    .epsilon(1e-12));
    }
  }
  SUBCASE("non-finite input is a numeric error") {
    Tensor bad(6, 20);
    bad.data[7] = std::nan("");
    CHECK_THROWS_AS(vga_forward(model, bad), VganError);
  }
}

TEST_CASE("forward") {
  Rng rng = Rng::seeded(47);

  SUBCASE("audio-only model skips fusion and yields finite output") {
    VganConfig c;
    c.audio_only = true;
    const auto model = model_with_stats(c, 7);
    const auto sample = random_sample(c, rng);
    const auto trace = forward(model, sample.papi, nullptr);
    CHECK(std::isfinite(trace.prediction));
    CHECK(trace.visual_embedding.empty());
    CHECK(trace.fused_embedding.size() == 128);
  }
  SUBCASE("bimodal model requires lip input") {
    VganConfig c;
    const auto model = model_with_stats(c, 7);
    const auto sample = random_sample(c, rng);
    CHECK_THROWS_AS(forward(model, sample.papi, nullptr), VganError);
  }
  SUBCASE("zero parameters predict the de-standardized output bias") {
    VganConfig c;
    auto model = model_with_stats(c, 9);
    for (auto& [name, p] : model.params)
      std::fill(p.data.begin(), p.data.end(), 0.0);
    model.params.at("out.b").data[0] = 0.25;
    const auto sample = random_sample(c, rng);
    const auto trace = forward(model, sample.papi, &sample.lip);
    CHECK(trace.prediction ==
          doctest::Approx(0.25 * model.target_std + model.target_mean)
              .epsilon(1e-12));
  }
  SUBCASE("repeated evaluation is deterministic") {
    VganConfig c;
    const auto model = model_with_stats(c, 11);
    const auto sample = random_sample(c, rng);
    const auto a = forward(model, sample.papi, &sample.lip);
    const auto b = forward(model, sample.papi, &sample.lip);
    CHECK(a.prediction == b.prediction);
    for (std::size_t i = 0; i < a.fused_embedding.size(); ++i)
      CHECK(a.fused_embedding[i] == b.fused_embedding[i]);
  }
  SUBCASE("trace shapes") {
    VganConfig c;
    const auto model = model_with_stats(c, 13);
    const auto sample = random_sample(c, rng);
    const auto trace = forward(model, sample.papi, &sample.lip);
    REQUIRE(trace.attention.size() == 3);
    CHECK(trace.acoustic_embedding.size() == 128);
    CHECK(trace.visual_embedding.size() == static_cast<std::size_t>(6 * 32));
    CHECK(trace.fused_embedding.size() == 192);
  }
}

TEST_CASE("mse_loss") {
  CHECK(mse_loss({1.0, 2.0}, {1.0, 2.0}) == 0.0);
  CHECK(mse_loss({0.0, 0.0}, {3.0, 4.0}) == doctest::Approx(12.5).epsilon(1e-15));
  CHECK_THROWS_AS(mse_loss({}, {}), VganError);
  CHECK_THROWS_AS(mse_loss({1.0}, {1.0, 2.0}), VganError);
  Rng rng = Rng::seeded(3);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> p{rng.gaussian(), rng.gaussian(), rng.gaussian()};
    std::vector<double> t{rng.gaussian(), rng.gaussian(), rng.gaussian()};
    CHECK(mse_loss(p, t) >= 0.0);
  }
}

namespace {

// Central-difference check on 20 coordinates per array.
void check_gradients(const VganConfig& config, std::uint64_t seed) {
  auto model = model_with_stats(config, seed);
  Rng rng = Rng::seeded(seed * 31 + 1);
  std::vector<GroupSample> batch;
  for (int i = 0; i < 3; ++i) batch.push_back(random_sample(config, rng));
  if (config.audio_only) {
    for (auto& s : batch) s.has_lip = false;
  }

  const auto grads = gradients(model, batch);
  const double eps = 1e-5;

  for (const auto& name : param_names(config)) {
    Tensor& p = model.params.at(name);
    const Tensor& g = grads.at(name);
    for (int pick = 0; pick < 20; ++pick) {
      const std::size_t idx = rng.index(p.size());
      const double saved = p.data[idx];
      p.data[idx] = saved + eps;
      const double up = batch_loss(model, batch);
      p.data[idx] = saved - eps;
      const double down = batch_loss(model, batch);
      p.data[idx] = saved;
      const double fd = (up - down) / (2.0 * eps);
      const double an = g.data[idx];
      const double rel =
          std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-6});
      INFO(name, "[", idx, "] analytic=", an, " fd=", fd);
      CHECK(rel < 1e-4);
    }
  }
}

}  // namespace

TEST_CASE("gradients match central finite differences") {
  SUBCASE("bimodal, three seeds") {
    check_gradients(VganConfig{}, 101);
    check_gradients(VganConfig{}, 202);
    check_gradients(VganConfig{}, 303);
  }
  SUBCASE("audio-only") {
    VganConfig c;
    c.audio_only = true;
    check_gradients(c, 404);
  }
}

TEST_CASE("gradient edge cases") {
  VganConfig c;
  Rng rng = Rng::seeded(61);
  auto model = model_with_stats(c, 15);

  SUBCASE("zero residual zeroes the output-layer gradient") {
    auto sample = random_sample(c, rng);
    // Force the prediction to hit the target exactly.
    const auto trace = forward(model, sample.papi, &sample.lip);
    sample.target = trace.prediction;
    const auto grads = gradients(model, {sample});
    for (double v : grads.at("out.w").data) CHECK(std::abs(v) <= 1e-9);
    CHECK(std::abs(grads.at("out.b").data[0]) <= 1e-9);
  }
  SUBCASE("duplicating the batch leaves mean gradients unchanged") {
    const auto sample1 = random_sample(c, rng);
    const auto sample2 = random_sample(c, rng);
    const auto once = gradients(model, {sample1, sample2});
    const auto twice = gradients(model, {sample1, sample2, sample1, sample2});
    for (const auto& name : param_names(c)) {
      const auto& a = once.at(name);
      const auto& b = twice.at(name);
      for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a.data[i] == doctest::Approx(b.data[i]).epsilon(1e-12));
    }
  }
  SUBCASE("empty batch is rejected") {
    CHECK_THROWS_AS(gradients(model, {}), VganError);
  }
}

TEST_CASE("init_params") {
  VganConfig c;
  SUBCASE("same seed reproduces bit-identical parameters") {
    const auto a = init_params(c, 99);
    const auto b = init_params(c, 99);
    for (const auto& name : param_names(c)) {
      const auto& pa = a.param(name);
      const auto& pb = b.param(name);
      for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa.data[i] == pb.data[i]);
    }
  }
  SUBCASE("different seeds differ somewhere") {
    const auto a = init_params(c, 99);
    const auto b = init_params(c, 100);
    bool any_diff = false;
    for (const auto& name : param_names(c)) {
      const auto& pa = a.param(name);
      const auto& pb = b.param(name);
      for (std::size_t i = 0; i < pa.size(); ++i)
        any_diff |= pa.data[i] != pb.data[i];
    }
    CHECK(any_diff);
  }
  SUBCASE("all arrays match config shapes and biases start at zero") {
    const auto m = init_params(c, 7);
    CHECK_NOTHROW(m.validate());
    for (double v : m.param("shared.b").data) CHECK(v == 0.0);
    for (double v : m.param("final.b").data) CHECK(v == 0.0);
  }
}

TEST_CASE("parameter count matches an independent hand count") {
  VganConfig audio;
  audio.audio_only = true;
  // shared 16x20+16; heads 3x(32x16 + 64); vga dense 128x576+128 + 64x128+64;
  // feat dense 128x120+128 + 64x128+64; final 32x128+32; out 32+1.
  const std::size_t shared = 16 * 20 + 16;
  const std::size_t heads = 3 * (32 * 16 + 64);
  const std::size_t vga_dense = 128 * 576 + 128 + 64 * 128 + 64;
  const std::size_t feat_dense = 128 * 120 + 128 + 64 * 128 + 64;
  const std::size_t final_audio = 32 * 128 + 32;
  const std::size_t out = 32 + 1;
  CHECK(parameter_count(audio) ==
        shared + heads + vga_dense + feat_dense + final_audio + out);

  VganConfig bimodal;
  const std::size_t visual = 128 * 10 + 128 + 64 * 128 + 64 + 32 * 64 + 32;
  const std::size_t fusion = 32 * 22 + 32 * 32 + 32 * 32;
  const std::size_t final_bimodal = 32 * 192 + 32;
  CHECK(parameter_count(bimodal) == shared + heads + vga_dense + feat_dense +
                                        visual + fusion + final_bimodal + out);

  // The materialized model carries exactly these elements.
  const auto m = init_params(bimodal, 1);
  std::size_t total = 0;
  for (const auto& [name, p] : m.params) total += p.size();
  CHECK(total == parameter_count(bimodal));
}

TEST_CASE("model serialization") {
  VganConfig c;
  Rng rng = Rng::seeded(71);
  auto model = model_with_stats(c, 21);
  model.target_kind = FdaKind::tongue;
  const auto sample = random_sample(c, rng);

  SUBCASE("save, load, predict is bit-identical") {
    const auto text = serialize_model(model);
    const auto back = deserialize_model(text);
    const auto a = forward(model, sample.papi, &sample.lip);
    const auto b = forward(back, sample.papi, &sample.lip);
    CHECK(a.prediction == b.prediction);
    CHECK(back.target_kind == FdaKind::tongue);
    // And the parameters themselves are identical bit for bit.
    for (const auto& name : param_names(c)) {
      const auto& pa = model.param(name);
      const auto& pb = back.param(name);
      for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa.data[i] == pb.data[i]);
    }
  }
  SUBCASE("tampered array shape is a load error") {
    auto text = serialize_model(model);
    const auto pos = text.find("\"shape\":[1,1]");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 13, "\"shape\":[1,2]");
    CHECK_THROWS_AS(deserialize_model(text), VganError);
  }
  SUBCASE("unknown version names the supported one") {
    auto text = serialize_model(model);
    const auto pos = text.find("vgan-model-1");
    text.replace(pos, 12, "vgan-model-9");
    try {
      deserialize_model(text);
      FAIL("expected version error");
    } catch (const VganError& e) {
      CHECK(std::string(e.what()).find("vgan-model-1") != std::string::npos);
    }
  }
}

TEST_CASE("audio-only model serialization round trip") {
  VganConfig c;
  c.audio_only = true;
  auto model = init_params(c, 31);
  model.target_mean = 70.0;
  model.target_std = 12.0;
  const auto back = deserialize_model(serialize_model(model));
  CHECK(back.config.audio_only);
  CHECK(back.params.size() == param_names(c).size());
  Rng rng = Rng::seeded(32);
  const auto papi = random_tensor(6, 20, rng);
  CHECK(forward(model, papi, nullptr).prediction ==
        forward(back, papi, nullptr).prediction);
}
