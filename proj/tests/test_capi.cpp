#include <doctest.h>

#include <filesystem>
#include <string>

#include "vgan/net.hpp"
#include "vgan/pipeline.hpp"
#include "vgan/util.hpp"
#include "vgan_c.h"

namespace {

std::string fresh_dir(const std::string& name) {
  const auto dir = (std::filesystem::temp_directory_path() / name).string();
  std::filesystem::remove_all(dir);
  vgan::make_dirs(dir);
  return dir;
}

struct Ctx {
  vgan_ctx* ptr = vgan_ctx_new();
  ~Ctx() { vgan_ctx_free(ptr); }
};

}  // namespace

TEST_CASE("context lifecycle and error reporting") {
  Ctx ctx;
  REQUIRE(ctx.ptr != nullptr);
  CHECK(std::string(vgan_ctx_error(ctx.ptr)).empty());

  SUBCASE("missing config file reports a data error") {
    const int rc = vgan_ctx_load_config(ctx.ptr, "/nonexistent/config.json");
    CHECK(rc == VGAN_ERR_DATA);
    CHECK(!std::string(vgan_ctx_error(ctx.ptr)).empty());
  }
  SUBCASE("bad override key reports a usage-or-parse error with message") {
    const int rc = vgan_ctx_set(ctx.ptr, "nonsense.key", "1");
    CHECK(rc == VGAN_ERR_DATA);  // unknown keys are rejected by the parser
    CHECK(std::string(vgan_ctx_error(ctx.ptr)).find("nonsense") !=
          std::string::npos);
  }
  SUBCASE("valid override round-trips") {
    CHECK(vgan_ctx_set(ctx.ptr, "train.epochs", "7") == VGAN_OK);
    CHECK(vgan_ctx_set(ctx.ptr, "synth.lip_weight", "0.25") == VGAN_OK);
    CHECK(vgan_ctx_set(ctx.ptr, "augment.mode", "zip") == VGAN_OK);
  }
  SUBCASE("out-of-range override is rejected at validation") {
    CHECK(vgan_ctx_set(ctx.ptr, "synth.lip_weight", "1.5") == VGAN_ERR_DATA);
  }
}

TEST_CASE("pipeline through the C API with model handle prediction") {
  Ctx ctx;
  const auto dir = fresh_dir("vgan_capi");

  REQUIRE(vgan_ctx_set(ctx.ptr, "synth.repetitions", "2") == VGAN_OK);
  REQUIRE(vgan_ctx_set(ctx.ptr, "augment.n", "3") == VGAN_OK);
  REQUIRE(vgan_ctx_set(ctx.ptr, "train.epochs", "3") == VGAN_OK);
  REQUIRE(vgan_ctx_set(ctx.ptr, "train.batch_size", "8") == VGAN_OK);

  const auto corpus = dir + "/corpus";
  REQUIRE(vgan_synth(ctx.ptr, corpus.c_str(), 3, 42) == VGAN_OK);
  const auto manifest = corpus + "/manifest.json";
  const auto features = dir + "/features.csv";
  REQUIRE(vgan_extract(ctx.ptr, manifest.c_str(), features.c_str(), 1) == VGAN_OK);
  const auto groups = dir + "/groups.json";
  REQUIRE(vgan_augment(ctx.ptr, manifest.c_str(), features.c_str(),
                       groups.c_str()) == VGAN_OK);
  const auto model_path = dir + "/model.json";
  REQUIRE(vgan_train(ctx.ptr, manifest.c_str(), groups.c_str(), features.c_str(),
                     model_path.c_str(), nullptr) == VGAN_OK);

  SUBCASE("eval and predict emit their artifacts") {
    const auto report = dir + "/report.json";
    CHECK(vgan_eval(ctx.ptr, model_path.c_str(), manifest.c_str(), groups.c_str(),
                    features.c_str(), report.c_str()) == VGAN_OK);
    CHECK(std::filesystem::exists(report));
    const auto pred = dir + "/pred.csv";
    CHECK(vgan_predict(ctx.ptr, model_path.c_str(), manifest.c_str(),
                       groups.c_str(), features.c_str(), pred.c_str()) == VGAN_OK);
    CHECK(std::filesystem::exists(pred));
  }

  SUBCASE("model handle predicts identically to the C++ core") {
    vgan_model* handle = vgan_model_open(ctx.ptr, model_path.c_str());
    REQUIRE(handle != nullptr);
    CHECK(vgan_model_is_audio_only(handle) == 0);

    // Pull one labeled group through the pipeline loader as reference.
    const auto config = vgan::default_config();
    const auto labeled = vgan::pipe::load_labeled_groups(
        config, manifest, groups, features, vgan::FdaKind::total);
    REQUIRE(!labeled.empty());
    const auto& sample = labeled.front().sample;

    const auto model = vgan::net::load_model(model_path);
    const auto expect = vgan::net::forward(model, sample.papi, &sample.lip);

    double got = 0.0;
    REQUIRE(vgan_model_predict(ctx.ptr, handle, sample.papi.data.data(),
                               sample.lip.data.data(), &got) == VGAN_OK);
    CHECK(got == expect.prediction);

    // Bimodal model without lip features is a data error.
    CHECK(vgan_model_predict(ctx.ptr, handle, sample.papi.data.data(), nullptr,
                             &got) == VGAN_ERR_DATA);
    vgan_model_close(handle);
  }

  SUBCASE("opening a missing model yields null and an error message") {
    vgan_model* handle = vgan_model_open(ctx.ptr, (dir + "/nope.json").c_str());
    CHECK(handle == nullptr);
    CHECK(!std::string(vgan_ctx_error(ctx.ptr)).empty());
  }

  std::filesystem::remove_all(dir);
}

TEST_CASE("status codes map error categories") {
  Ctx ctx;
  // Data error: manifest does not exist.
  CHECK(vgan_extract(ctx.ptr, "/nope/manifest.json", "/tmp/x.csv", 1) ==
        VGAN_ERR_DATA);
  // Usage error: zero group count in random mode.
  CHECK(vgan_ctx_set(ctx.ptr, "augment.n", "0") == VGAN_ERR_DATA);
}
