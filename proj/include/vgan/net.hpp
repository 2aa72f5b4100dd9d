#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vgan/core.hpp"
#include "vgan/tensor.hpp"

namespace vgan::net {

struct VganConfig {
  int n_nodes = 6;
  int in_dim = 20;      // acoustic features per vowel node
  int shared_dim = 16;  // shared layer width
  int n_heads = 3;
  int head_dim = 32;    // per-head value width; 6*3*32 = 576 flattened
  int dense1 = 128;
  int dense2 = 64;
  int visual_in = 10;   // lip features per vowel
  int visual1 = 128;
  int visual2 = 64;
  int visual3 = 32;     // visual token width
  int fusion_dim = 32;
  int fusion_tokens = 6;
  int final_dim = 32;
  double leaky_slope = 0.2;
  bool audio_only = false;

  int vga_flatten() const { return n_nodes * n_heads * head_dim; }  // 576
  int feat_flatten() const { return n_nodes * in_dim; }             // 120
  int acoustic_dim() const { return 2 * dense2; }                   // 128
  // Acoustic embedding resliced into fusion_tokens rows, zero-padded.
  int token_width() const {
    return (acoustic_dim() + fusion_tokens - 1) / fusion_tokens;
  }
  int fused_flatten() const { return fusion_tokens * fusion_dim; }  // 192
  int penultimate_dim() const {
    return audio_only ? acoustic_dim() : fused_flatten();
  }

  void validate() const;
};

// Parameters are a name -> tensor map with a fixed canonical order; the
// same names index gradient maps and the serialized document.
using ParamMap = std::map<std::string, Tensor>;

std::vector<std::string> param_names(const VganConfig& config);
std::size_t parameter_count(const VganConfig& config);

struct VganModel {
  VganConfig config;
  ParamMap params;

  // Feature/target standardization, computed on training data only.
  std::vector<double> papi_mean, papi_std;  // in_dim
  std::vector<double> lip_mean, lip_std;    // visual_in
  double target_mean = 0.0;
  double target_std = 1.0;
  FdaKind target_kind = FdaKind::total;

  const Tensor& param(const std::string& name) const;
  void validate() const;
};

VganModel init_params(const VganConfig& config, std::uint64_t seed);

struct VgaOutput {
  Tensor attended;                 // n_nodes x (n_heads*head_dim)
  std::vector<Tensor> attention;   // n_heads of n_nodes x n_nodes
};

// Graph-attention block alone (shared layer + per-head attention), on
// features as given (no standardization).
VgaOutput vga_forward(const VganModel& model, const Tensor& node_features);

struct ForwardTrace {
  std::vector<Tensor> attention;        // per head, rows sum to 1
  std::vector<double> acoustic_embedding;
  std::vector<double> visual_embedding;  // empty in audio-only mode
  std::vector<double> fused_embedding;   // penultimate layer
  double prediction = 0.0;               // de-standardized score points
};

// Raw (unstandardized) inputs; lip may be null only in audio-only mode.
ForwardTrace forward(const VganModel& model, const Tensor& group_papi,
                     const Tensor* group_lip);

double mse_loss(const std::vector<double>& predictions,
                const std::vector<double>& targets);

struct GroupSample {
  Tensor papi;       // n_nodes x in_dim, raw
  Tensor lip;        // n_nodes x visual_in, raw (ignored in audio-only mode)
  bool has_lip = false;
  double target = 0.0;  // score points
};

// Exact reverse-mode gradients of the mean standardized MSE over the batch,
// one tensor per parameter array. Fixed accumulation order.
ParamMap gradients(const VganModel& model, const std::vector<GroupSample>& batch,
                   double* loss_out = nullptr);

// The same objective, forward pass only.
double batch_loss(const VganModel& model, const std::vector<GroupSample>& batch);

// Model document (JSON): version, dims, standardization, named arrays with
// shapes. Round-trips bit-exactly.
std::string serialize_model(const VganModel& model);
VganModel deserialize_model(const std::string& text);

void save_model(const VganModel& model, const std::string& path);
VganModel load_model(const std::string& path);

}  // namespace vgan::net
