#include "redsum/checkpoint.h"

#include <cmath>
#include <fstream>

#include "redsum/corpus.h"

namespace redsum {

namespace {

std::string shape_str(const std::vector<std::size_t>& s) {
  std::string out = "[";
  for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + std::to_string(s[i]);
  return out + "]";
}

}  // namespace

const grad::Tensor& Checkpoint::tensor(const std::string& name, const std::vector<std::size_t>& shape) const {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw DataError("checkpoint '" + kind + "' lacks tensor '" + name + "'");
  if (it->second.shape != shape)
    throw DataError("checkpoint tensor '" + name + "' has shape " + shape_str(it->second.shape) +
                    ", expected " + shape_str(shape));
  return it->second;
}

nlohmann::json checkpoint_to_json(const Checkpoint& ckpt) {
  nlohmann::json j;
  j["version"] = Checkpoint::kVersion;
  j["kind"] = ckpt.kind;
  j["dim"] = ckpt.dim;
  nlohmann::json tensors = nlohmann::json::object();
  for (const auto& [name, t] : ckpt.tensors) tensors[name] = {{"shape", t.shape}, {"values", t.values}};
  j["tensors"] = std::move(tensors);
  j["config"] = ckpt.config;
  return j;
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != Checkpoint::kVersion)
      throw DataError("unsupported checkpoint version " + j.at("version").dump());
    Checkpoint c;
    c.kind = j.at("kind").get<std::string>();
    c.dim = j.at("dim").get<std::size_t>();
    for (const auto& [name, t] : j.at("tensors").items()) {
      grad::Tensor tensor(t.at("shape").get<std::vector<std::size_t>>(),
                          t.at("values").get<std::vector<double>>());
      for (double v : tensor.values)
        if (!std::isfinite(v)) throw DataError("non-finite value in tensor '" + name + "'");
      c.tensors.emplace(name, std::move(tensor));
    }
    if (j.contains("config")) c.config = j["config"];
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << checkpoint_to_json(ckpt).dump() << '\n';
}

Checkpoint load_checkpoint(const std::string& path, const std::string& kind) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("checkpoint '" + path + "': " + e.what());
  }
  Checkpoint c = checkpoint_from_json(j);
  if (!kind.empty() && c.kind != kind)
    throw DataError("checkpoint '" + path + "' is of kind '" + c.kind + "', expected '" + kind + "'");
  return c;
}

}  // namespace redsum
