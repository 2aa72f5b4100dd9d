#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "vgan/util.hpp"

namespace {

std::string cli() {
  const char* path = std::getenv("VGAN_CLI");
  REQUIRE_MESSAGE(path != nullptr, "VGAN_CLI must point at the binary");
  return path;
}

int run(const std::string& args) {
  const std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string fresh_dir(const std::string& name) {
  const auto dir = (std::filesystem::temp_directory_path() / name).string();
  std::filesystem::remove_all(dir);
  vgan::make_dirs(dir);
  return dir;
}

}  // namespace

TEST_CASE("usage errors exit 1") {
  CHECK(run("") == 1);                    // missing subcommand
  CHECK(run("--frobnicate") == 1);        // unknown flag
  CHECK(run("synth") == 1);               // missing required --out
  CHECK(run("train --cv") == 1);          // missing required options
}

TEST_CASE("help exits 0") {
  CHECK(run("--help") == 0);
  CHECK(run("synth --help") == 0);
}

TEST_CASE("full pipeline smoke run exits 0 at every stage") {
  const auto dir = fresh_dir("vgan_cli_smoke");
  const std::string corpus = dir + "/corpus";
  const std::string common = " --manifest " + corpus + "/manifest.json" +
                             " --features " + dir + "/features.csv" +
                             " --groups " + dir + "/groups.json";

  CHECK(run("synth --subjects 3 --seed 5 --set synth.repetitions=2 --out " +
            corpus) == 0);
  CHECK(run("extract --manifest " + corpus + "/manifest.json --out " + dir +
            "/features.csv") == 0);
  CHECK(run("augment --manifest " + corpus + "/manifest.json --features " + dir +
            "/features.csv --mode random --n 3 --seed 5 --out " + dir +
            "/groups.json") == 0);
  CHECK(run("train --epochs 3 --set train.batch_size=8 --set train.seed=5" +
            common + " --out " + dir + "/model.json --history " + dir +
            "/history.csv") == 0);
  CHECK(run("eval --model " + dir + "/model.json" + common + " --report " + dir +
            "/report.json") == 0);
  CHECK(run("predict --model " + dir + "/model.json" + common + " --out " + dir +
            "/pred.csv") == 0);
  CHECK(run("export-embeddings --model " + dir + "/model.json" + common +
            " --out " + dir + "/emb.csv") == 0);

  SUBCASE("rerunning with identical seeds rewrites identical bytes") {
    const auto before = vgan::read_text_file(dir + "/groups.json");
    CHECK(run("augment --manifest " + corpus + "/manifest.json --features " + dir +
              "/features.csv --mode random --n 3 --seed 5 --out " + dir +
              "/groups.json") == 0);
    CHECK(vgan::read_text_file(dir + "/groups.json") == before);
  }
  SUBCASE("a model whose dims disagree with its arrays exits 2") {
    auto doc = vgan::read_text_file(dir + "/model.json");
    const auto pos = doc.find("\"shared_dim\":16");
    REQUIRE(pos != std::string::npos);
    doc.replace(pos, 15, "\"shared_dim\":28");
    vgan::write_text_file(dir + "/tampered.json", doc);
    CHECK(run("eval --model " + dir + "/tampered.json" + common + " --report " +
              dir + "/r2.json") == 2);
  }
  SUBCASE("data errors exit 2") {
    CHECK(run("extract --manifest /nope.json --out " + dir + "/x.csv") == 2);
  }
  std::filesystem::remove_all(dir);
}
