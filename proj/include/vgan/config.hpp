#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vgan/augment.hpp"
#include "vgan/dsp.hpp"
#include "vgan/gmm.hpp"
#include "vgan/io.hpp"
#include "vgan/net.hpp"
#include "vgan/papi.hpp"
#include "vgan/synth.hpp"
#include "vgan/train.hpp"

namespace vgan {

// Everything every stage needs, with built-in defaults. A JSON config file
// overrides fields; unknown keys are rejected; each block re-validates its
// module's constraints on load.
struct GlobalConfig {
  dsp::DspConfig dsp;
  papi::PapiConfig papi;  // shares the dsp block above at load time
  io::LandmarkIndexMap lip_index_map;
  aug::GroupingOptions augment;
  bool augment_balance = false;
  double augment_balance_factor = 1.0;
  gmm::FrameFeatureConfig gmm_features;
  gmm::EmOptions gmm_em;
  int gmm_components = 70;
  gmm::DetectOptions gmm_detect;
  net::VganConfig vgan;
  train::TrainConfig train;
  synth::SynthConfig synth;

  // Annotation conventions.
  std::string syllable_tier = "syllable";
  std::string vowel_tier;            // empty: vowel interval = syllable interval
  std::string gop_csv;               // optional sidecar path
  std::vector<std::string> skip_labels = {"", "sil", "sp", "spn"};

  void validate() const;
};

GlobalConfig default_config();
GlobalConfig load_config(const std::string& path);
// Applies a single `block.key=value` override (CLI flags win over the file).
void apply_override(GlobalConfig* config, const std::string& dotted_key,
                    const std::string& value);

}  // namespace vgan
