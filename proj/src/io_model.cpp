#include <json.hpp>

#include "vgan/errors.hpp"
#include "vgan/net.hpp"
#include "vgan/util.hpp"

namespace vgan::net {

using nlohmann::json;

namespace {
constexpr const char* kModelVersion = "vgan-model-1";
}

std::string serialize_model(const VganModel& model) {
  model.validate();
  const auto& c = model.config;
  json doc;
  doc["version"] = kModelVersion;
  doc["dims"] = {{"n_nodes", c.n_nodes},
                 {"in_dim", c.in_dim},
                 {"shared_dim", c.shared_dim},
                 {"n_heads", c.n_heads},
                 {"head_dim", c.head_dim},
                 {"dense1", c.dense1},
                 {"dense2", c.dense2},
                 {"visual_in", c.visual_in},
                 {"visual1", c.visual1},
                 {"visual2", c.visual2},
                 {"visual3", c.visual3},
                 {"fusion_dim", c.fusion_dim},
                 {"fusion_tokens", c.fusion_tokens},
                 {"final_dim", c.final_dim},
                 {"leaky_slope", c.leaky_slope},
                 {"audio_only", c.audio_only}};
  doc["target"] = {{"kind", fda_kind_name(model.target_kind)},
                   {"scale_max", fda_scale_max(model.target_kind)},
                   {"mean", model.target_mean},
                   {"std", model.target_std}};
  doc["standardization"] = {{"papi_mean", model.papi_mean},
                            {"papi_std", model.papi_std},
                            {"lip_mean", model.lip_mean},
                            {"lip_std", model.lip_std}};
  json params = json::object();
  for (const auto& [name, tensor] : model.params) {
    params[name] = {{"shape", {tensor.rows, tensor.cols}}, {"data", tensor.data}};
  }
  doc["params"] = params;
  return doc.dump() + "\n";
}

VganModel deserialize_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(Errc::parse, std::string("model document: ") + e.what());
  }
  if (!doc.contains("version") || !doc["version"].is_string() ||
      doc["version"] != kModelVersion)
    fail(Errc::parse, "model document: unsupported version " +
                          (doc.contains("version") ? doc["version"].dump() : "(none)") +
                          " (supported: " + kModelVersion + ")");

  VganModel model;
  try {
    const auto& d = doc.at("dims");
    auto& c = model.config;
    c.n_nodes = d.at("n_nodes").get<int>();
    c.in_dim = d.at("in_dim").get<int>();
    c.shared_dim = d.at("shared_dim").get<int>();
    c.n_heads = d.at("n_heads").get<int>();
    c.head_dim = d.at("head_dim").get<int>();
    c.dense1 = d.at("dense1").get<int>();
    c.dense2 = d.at("dense2").get<int>();
    c.visual_in = d.at("visual_in").get<int>();
    c.visual1 = d.at("visual1").get<int>();
    c.visual2 = d.at("visual2").get<int>();
    c.visual3 = d.at("visual3").get<int>();
    c.fusion_dim = d.at("fusion_dim").get<int>();
    c.fusion_tokens = d.at("fusion_tokens").get<int>();
    c.final_dim = d.at("final_dim").get<int>();
    c.leaky_slope = d.at("leaky_slope").get<double>();
    c.audio_only = d.at("audio_only").get<bool>();

    const auto& t = doc.at("target");
    const auto kind = fda_kind_from_name(t.at("kind").get<std::string>());
    if (!kind) fail(Errc::parse, "model document: unknown target kind");
    model.target_kind = *kind;
    model.target_mean = t.at("mean").get<double>();
    model.target_std = t.at("std").get<double>();

    const auto& s = doc.at("standardization");
    model.papi_mean = s.at("papi_mean").get<std::vector<double>>();
    model.papi_std = s.at("papi_std").get<std::vector<double>>();
    model.lip_mean = s.at("lip_mean").get<std::vector<double>>();
    model.lip_std = s.at("lip_std").get<std::vector<double>>();

    for (const auto& [name, entry] : doc.at("params").items()) {
      const auto shape = entry.at("shape").get<std::vector<int>>();
      if (shape.size() != 2)
        fail(Errc::parse, "model document: parameter \"" + name +
                              "\" shape is not 2-dimensional");
      Tensor tensor(shape[0], shape[1]);
      const auto data = entry.at("data").get<std::vector<double>>();
      if (data.size() != tensor.size())
        fail(Errc::parse, "model document: parameter \"" + name + "\" declares " +
                              std::to_string(tensor.size()) + " values but carries " +
                              std::to_string(data.size()));
      tensor.data = data;
      model.params.emplace(name, std::move(tensor));
    }
  } catch (const json::exception& e) {
    fail(Errc::parse, std::string("model document: ") + e.what());
  }

  try {
    model.validate();
  } catch (const VganError& e) {
    fail(Errc::parse, std::string("model document: ") + e.what());
  }
  return model;
}

void save_model(const VganModel& model, const std::string& path) {
  write_text_file(path, serialize_model(model));
}

VganModel load_model(const std::string& path) {
  return deserialize_model(read_text_file(path));
}

}  // namespace vgan::net
