#include "vgan/net.hpp"

#include <cmath>

#include "vgan/errors.hpp"
#include "vgan/util.hpp"

namespace vgan::net {

void VganConfig::validate() const {
  if (n_nodes != kVowelCount)
    fail(Errc::validation, "config: n_nodes must be 6 (one per cardinal vowel)");
  for (const auto& [name, v] :
       {std::pair{"in_dim", in_dim}, std::pair{"shared_dim", shared_dim},
        std::pair{"n_heads", n_heads}, std::pair{"head_dim", head_dim},
        std::pair{"dense1", dense1}, std::pair{"dense2", dense2},
        std::pair{"visual_in", visual_in}, std::pair{"visual1", visual1},
        std::pair{"visual2", visual2}, std::pair{"visual3", visual3},
        std::pair{"fusion_dim", fusion_dim}, std::pair{"final_dim", final_dim}}) {
    if (v <= 0) fail(Errc::validation, std::string("config: ") + name + " must be positive");
  }
  if (fusion_tokens != n_nodes)
    fail(Errc::validation, "config: fusion operates over one token per vowel");
  if (leaky_slope <= 0.0 || leaky_slope >= 1.0)
    fail(Errc::validation, "config: leaky_slope must lie in (0,1)");
}

std::vector<std::string> param_names(const VganConfig& config) {
  std::vector<std::string> names = {"shared.W", "shared.b"};
  for (int h = 0; h < config.n_heads; ++h) {
    names.push_back("vga.head" + std::to_string(h) + ".W");
    names.push_back("vga.head" + std::to_string(h) + ".a");
  }
  for (const char* stem : {"vga", "feat"}) {
    names.push_back(std::string(stem) + ".dense1.W");
    names.push_back(std::string(stem) + ".dense1.b");
    names.push_back(std::string(stem) + ".dense2.W");
    names.push_back(std::string(stem) + ".dense2.b");
  }
  if (!config.audio_only) {
    for (int l = 1; l <= 3; ++l) {
      names.push_back("visual.dense" + std::to_string(l) + ".W");
      names.push_back("visual.dense" + std::to_string(l) + ".b");
    }
    names.push_back("fusion.Wq");
    names.push_back("fusion.Wk");
    names.push_back("fusion.Wv");
  }
  names.push_back("final.W");
  names.push_back("final.b");
  names.push_back("out.w");
  names.push_back("out.b");
  return names;
}

namespace {

// Weight matrices are stored out_dim x in_dim; biases 1 x out_dim.
std::pair<int, int> param_shape(const VganConfig& c, const std::string& name) {
  if (name == "shared.W") return {c.shared_dim, c.in_dim};
  if (name == "shared.b") return {1, c.shared_dim};
  for (int h = 0; h < c.n_heads; ++h) {
    const std::string stem = "vga.head" + std::to_string(h);
    if (name == stem + ".W") return {c.head_dim, c.shared_dim};
    if (name == stem + ".a") return {1, 2 * c.head_dim};
  }
  if (name == "vga.dense1.W") return {c.dense1, c.vga_flatten()};
  if (name == "vga.dense1.b") return {1, c.dense1};
  if (name == "vga.dense2.W") return {c.dense2, c.dense1};
  if (name == "vga.dense2.b") return {1, c.dense2};
  if (name == "feat.dense1.W") return {c.dense1, c.feat_flatten()};
  if (name == "feat.dense1.b") return {1, c.dense1};
  if (name == "feat.dense2.W") return {c.dense2, c.dense1};
  if (name == "feat.dense2.b") return {1, c.dense2};
  if (name == "visual.dense1.W") return {c.visual1, c.visual_in};
  if (name == "visual.dense1.b") return {1, c.visual1};
  if (name == "visual.dense2.W") return {c.visual2, c.visual1};
  if (name == "visual.dense2.b") return {1, c.visual2};
  if (name == "visual.dense3.W") return {c.visual3, c.visual2};
  if (name == "visual.dense3.b") return {1, c.visual3};
  if (name == "fusion.Wq") return {c.fusion_dim, c.token_width()};
  if (name == "fusion.Wk") return {c.fusion_dim, c.visual3};
  if (name == "fusion.Wv") return {c.fusion_dim, c.visual3};
  if (name == "final.W") return {c.final_dim, c.penultimate_dim()};
  if (name == "final.b") return {1, c.final_dim};
  if (name == "out.w") return {1, c.final_dim};
  if (name == "out.b") return {1, 1};
  fail(Errc::validation, "unknown parameter array \"" + name + "\"");
}

}  // namespace

std::size_t parameter_count(const VganConfig& config) {
  std::size_t total = 0;
  for (const auto& name : param_names(config)) {
    const auto [r, c] = param_shape(config, name);
    total += static_cast<std::size_t>(r) * c;
  }
  return total;
}

const Tensor& VganModel::param(const std::string& name) const {
  const auto it = params.find(name);
  if (it == params.end())
    fail(Errc::validation, "model is missing parameter array \"" + name + "\"");
  return it->second;
}

void VganModel::validate() const {
  config.validate();
  const auto names = param_names(config);
  if (params.size() != names.size())
    fail(Errc::validation, "model has " + std::to_string(params.size()) +
                               " parameter arrays, config implies " +
                               std::to_string(names.size()));
  for (const auto& name : names) {
    const auto [r, c] = param_shape(config, name);
    const Tensor& t = param(name);
    if (t.rows != r || t.cols != c)
      fail(Errc::validation, "parameter \"" + name + "\" has shape " +
                                 std::to_string(t.rows) + "x" + std::to_string(t.cols) +
                                 ", config implies " + std::to_string(r) + "x" +
                                 std::to_string(c));
    for (double v : t.data)
      if (!std::isfinite(v))
        fail(Errc::numeric, "parameter \"" + name + "\" has a non-finite entry");
  }
  if (static_cast<int>(papi_mean.size()) != config.in_dim ||
      static_cast<int>(papi_std.size()) != config.in_dim)
    fail(Errc::validation, "model standardization does not match in_dim");
  if (!config.audio_only &&
      (static_cast<int>(lip_mean.size()) != config.visual_in ||
       static_cast<int>(lip_std.size()) != config.visual_in))
    fail(Errc::validation, "model lip standardization does not match visual_in");
  for (double s : papi_std)
    if (!(s > 0.0)) fail(Errc::validation, "papi standardization std must be positive");
  for (double s : lip_std)
    if (!(s > 0.0)) fail(Errc::validation, "lip standardization std must be positive");
  if (!(target_std > 0.0))
    fail(Errc::validation, "target standardization std must be positive");
}

VganModel init_params(const VganConfig& config, std::uint64_t seed) {
  config.validate();
  VganModel model;
  model.config = config;
  const Rng base = Rng::seeded(seed);
  const auto names = param_names(config);
  for (std::size_t i = 0; i < names.size(); ++i) {
    const auto [rows, cols] = param_shape(config, names[i]);
    Tensor t(rows, cols);
    const bool is_bias = names[i].back() == 'b';
    if (!is_bias) {
      // Glorot uniform; each array gets its own child stream so a layout
      // change upstream does not shift every other array.
      Rng rng = base.child(i);
      const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
      for (double& v : t.data) v = rng.uniform(-limit, limit);
    }
    model.params.emplace(names[i], std::move(t));
  }
  model.papi_mean.assign(config.in_dim, 0.0);
  model.papi_std.assign(config.in_dim, 1.0);
  model.lip_mean.assign(config.visual_in, 0.0);
  model.lip_std.assign(config.visual_in, 1.0);
  return model;
}

namespace {

// Registers each parameter array as a single tape leaf, at most once, so
// gradients can be read back by name after backward().
struct ParamLeaves {
  Tape& tape;
  const VganModel& model;
  std::map<std::string, Tape::Id> ids;

  Tape::Id get(const std::string& name) {
    const auto it = ids.find(name);
    if (it != ids.end()) return it->second;
    const Tape::Id id = tape.leaf(model.param(name));
    ids.emplace(name, id);
    return id;
  }
};

struct GraphIds {
  std::vector<Tape::Id> attention;  // per head, n_nodes x n_nodes
  Tape::Id attended = -1;           // n_nodes x (n_heads*head_dim)
};

// Shared layer plus multi-head attention over the six vowel nodes.
GraphIds build_vga(Tape& tape, ParamLeaves& pl, const VganConfig& c,
                   Tape::Id features) {
  const Tape::Id hidden = tape.add_row_broadcast(
      tape.matmul(features, pl.get("shared.W"), false, true), pl.get("shared.b"));

  GraphIds out;
  std::vector<Tape::Id> heads;
  for (int h = 0; h < c.n_heads; ++h) {
    const std::string stem = "vga.head" + std::to_string(h);
    const Tape::Id a = pl.get(stem + ".a");
    const Tape::Id g =
        tape.matmul(hidden, pl.get(stem + ".W"), false, true);  // n x head_dim

    // e_ij = leaky(a . [g_i || g_j]) splits into source/destination scores.
    const Tape::Id s_src =
        tape.matmul(g, tape.slice_cols(a, 0, c.head_dim), false, true);
    const Tape::Id s_dst =
        tape.matmul(g, tape.slice_cols(a, c.head_dim, c.head_dim), false, true);
    const Tape::Id logits =
        tape.leaky_relu(tape.add_outer(s_src, s_dst), c.leaky_slope);
    const Tape::Id alpha = tape.softmax_rows(logits);
    out.attention.push_back(alpha);
    heads.push_back(tape.matmul(alpha, g));  // n x head_dim
  }
  out.attended = tape.concat_cols(heads);
  return out;
}

Tape::Id dense(Tape& tape, ParamLeaves& pl, const std::string& stem, Tape::Id x) {
  return tape.add_row_broadcast(
      tape.matmul(x, pl.get(stem + ".W"), false, true), pl.get(stem + ".b"));
}

struct BuiltForward {
  GraphIds vga;
  Tape::Id acoustic = -1;       // 1 x acoustic_dim
  Tape::Id visual_tokens = -1;  // n_nodes x visual3 (bimodal only)
  Tape::Id penultimate = -1;    // 1 x penultimate_dim
  Tape::Id prediction = -1;     // 1 x 1, standardized units
};

BuiltForward build_forward(Tape& tape, ParamLeaves& pl, const VganConfig& c,
                           Tape::Id papi, Tape::Id lip) {
  BuiltForward out;
  out.vga = build_vga(tape, pl, c, papi);

  const Tape::Id vga_flat = tape.reshape(out.vga.attended, 1, c.vga_flatten());
  const Tape::Id vga_emb =
      dense(tape, pl, "vga.dense2", tape.relu(dense(tape, pl, "vga.dense1", vga_flat)));

  const Tape::Id feat_flat = tape.reshape(papi, 1, c.feat_flatten());
  const Tape::Id feat_emb = dense(
      tape, pl, "feat.dense2", tape.relu(dense(tape, pl, "feat.dense1", feat_flat)));

  out.acoustic = tape.concat_cols({vga_emb, feat_emb});

  if (c.audio_only) {
    out.penultimate = out.acoustic;
  } else {
    if (lip < 0) fail(Errc::validation, "forward: lip input required unless audio_only");
    // The visual stack is shared across the six vowels (applied row-wise);
    // its per-vowel outputs are the key/value tokens of the fusion.
    const Tape::Id v1 = tape.relu(dense(tape, pl, "visual.dense1", lip));
    const Tape::Id v2 = tape.relu(dense(tape, pl, "visual.dense2", v1));
    out.visual_tokens = dense(tape, pl, "visual.dense3", v2);

    const Tape::Id acoustic_tokens = tape.reshape(
        tape.pad_cols(out.acoustic, c.fusion_tokens * c.token_width()),
        c.fusion_tokens, c.token_width());

    const Tape::Id q = tape.matmul(acoustic_tokens, pl.get("fusion.Wq"), false, true);
    const Tape::Id k = tape.matmul(out.visual_tokens, pl.get("fusion.Wk"), false, true);
    const Tape::Id v = tape.matmul(out.visual_tokens, pl.get("fusion.Wv"), false, true);
    const Tape::Id scores = tape.matmul(q, k, false, true);  // no 1/sqrt(d) factor
    const Tape::Id weights = tape.softmax_rows(scores);
    out.penultimate =
        tape.reshape(tape.matmul(weights, v), 1, c.fused_flatten());
  }

  const Tape::Id head = tape.relu(dense(tape, pl, "final", out.penultimate));
  out.prediction = tape.add(tape.matmul(head, pl.get("out.w"), false, true),
                            pl.get("out.b"));
  return out;
}

Tensor standardize(const Tensor& raw, const std::vector<double>& mean,
                   const std::vector<double>& std) {
  Tensor out = raw;
  for (int i = 0; i < out.rows; ++i)
    for (int j = 0; j < out.cols; ++j)
      out.at(i, j) = (out.at(i, j) - mean[j]) / std[j];
  return out;
}

void check_input(const Tensor& t, int rows, int cols, const char* what) {
  if (t.rows != rows || t.cols != cols)
    fail(Errc::validation, std::string(what) + " must be " + std::to_string(rows) +
                               "x" + std::to_string(cols) + ", got " +
                               std::to_string(t.rows) + "x" + std::to_string(t.cols));
  for (double v : t.data) {
    if (!std::isfinite(v))
      fail(Errc::numeric, std::string(what) + " contains a non-finite value");
  }
}

}  // namespace

VgaOutput vga_forward(const VganModel& model, const Tensor& node_features) {
  const auto& c = model.config;
  check_input(node_features, c.n_nodes, c.in_dim, "node features");
  Tape tape;
  ParamLeaves pl{tape, model, {}};
  const auto ids = build_vga(tape, pl, c, tape.leaf(node_features));
  VgaOutput out;
  out.attended = tape.value(ids.attended);
  for (Tape::Id a : ids.attention) out.attention.push_back(tape.value(a));
  return out;
}

ForwardTrace forward(const VganModel& model, const Tensor& group_papi,
                     const Tensor* group_lip) {
  const auto& c = model.config;
  check_input(group_papi, c.n_nodes, c.in_dim, "papi input");
  if (!c.audio_only) {
    if (!group_lip)
      fail(Errc::validation, "forward: lip input required unless audio_only");
    check_input(*group_lip, c.n_nodes, c.visual_in, "lip input");
  }

  Tape tape;
  ParamLeaves pl{tape, model, {}};
  const Tape::Id papi =
      tape.leaf(standardize(group_papi, model.papi_mean, model.papi_std));
  Tape::Id lip = -1;
  if (!c.audio_only)
    lip = tape.leaf(standardize(*group_lip, model.lip_mean, model.lip_std));

  const auto built = build_forward(tape, pl, c, papi, lip);

  ForwardTrace trace;
  for (Tape::Id a : built.vga.attention) trace.attention.push_back(tape.value(a));
  trace.acoustic_embedding = tape.value(built.acoustic).data;
  if (built.visual_tokens >= 0)
    trace.visual_embedding = tape.value(built.visual_tokens).data;
  trace.fused_embedding = tape.value(built.penultimate).data;
  trace.prediction =
      tape.value(built.prediction).data[0] * model.target_std + model.target_mean;
  return trace;
}

double mse_loss(const std::vector<double>& predictions,
                const std::vector<double>& targets) {
  if (predictions.empty() || predictions.size() != targets.size())
    fail(Errc::usage, "mse_loss: need equal nonempty prediction/target lists");
  double acc = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - targets[i];
    acc += d * d;
  }
  return acc / static_cast<double>(predictions.size());
}

double batch_loss(const VganModel& model, const std::vector<GroupSample>& batch) {
  if (batch.empty()) fail(Errc::usage, "batch_loss: empty batch");
  const auto& c = model.config;
  double total = 0.0;
  for (const auto& sample : batch) {
    Tape tape;
    ParamLeaves pl{tape, model, {}};
    const Tape::Id papi =
        tape.leaf(standardize(sample.papi, model.papi_mean, model.papi_std));
    Tape::Id lip = -1;
    if (!c.audio_only)
      lip = tape.leaf(standardize(sample.lip, model.lip_mean, model.lip_std));
    const auto built = build_forward(tape, pl, c, papi, lip);
    const double target_standardized =
        (sample.target - model.target_mean) / model.target_std;
    const double d = tape.value(built.prediction).data[0] - target_standardized;
    total += d * d;
  }
  return total / static_cast<double>(batch.size());
}

ParamMap gradients(const VganModel& model, const std::vector<GroupSample>& batch,
                   double* loss_out) {
  if (batch.empty()) fail(Errc::usage, "gradients: empty batch");
  const auto& c = model.config;

  ParamMap grads;
  for (const auto& name : param_names(c)) {
    const Tensor& p = model.param(name);
    grads.emplace(name, Tensor(p.rows, p.cols));
  }

  const double inv_m = 1.0 / static_cast<double>(batch.size());
  double total_loss = 0.0;

  for (const auto& sample : batch) {
    check_input(sample.papi, c.n_nodes, c.in_dim, "papi input");
    Tape tape;
    ParamLeaves pl{tape, model, {}};
    const Tape::Id papi =
        tape.leaf(standardize(sample.papi, model.papi_mean, model.papi_std));
    Tape::Id lip = -1;
    if (!c.audio_only) {
      if (!sample.has_lip)
        fail(Errc::validation, "gradients: sample lacks lip features");
      check_input(sample.lip, c.n_nodes, c.visual_in, "lip input");
      lip = tape.leaf(standardize(sample.lip, model.lip_mean, model.lip_std));
    }

    const auto built = build_forward(tape, pl, c, papi, lip);
    const double target_standardized =
        (sample.target - model.target_mean) / model.target_std;
    Tensor t(1, 1);
    t.data[0] = target_standardized;
    const Tape::Id loss =
        tape.square(tape.sub(built.prediction, tape.leaf(std::move(t))));

    total_loss += tape.value(loss).data[0];
    tape.backward(loss);

    for (const auto& [name, id] : pl.ids) {
      const Tensor& g = tape.grad(id);
      Tensor& acc = grads.at(name);
      for (std::size_t i = 0; i < acc.size(); ++i) acc.data[i] += inv_m * g.data[i];
    }
  }

  if (loss_out) *loss_out = total_loss * inv_m;
  return grads;
}

}  // namespace vgan::net
