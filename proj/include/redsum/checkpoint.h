#ifndef REDSUM_CHECKPOINT_H_
#define REDSUM_CHECKPOINT_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "redsum/grad.h"

namespace redsum {

/// Versioned model file:
///   {"version":1,"kind":str,"dim":int,
///    "tensors":{name:{"shape":[...],"values":[...]}},"config":{...}}
struct Checkpoint {
  static constexpr int kVersion = 1;

  std::string kind;
  std::size_t dim = 0;
  std::map<std::string, grad::Tensor> tensors;
  nlohmann::json config = nlohmann::json::object();

  /// Throws DataError when missing or shaped differently from `shape`.
  const grad::Tensor& tensor(const std::string& name, const std::vector<std::size_t>& shape) const;
  void add(const grad::Parameter& p) { tensors[p.name] = p.value; }
};

nlohmann::json checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
/// Loads and checks version and kind (an empty `kind` accepts any).
Checkpoint load_checkpoint(const std::string& path, const std::string& kind = "");

}  // namespace redsum

#endif  // REDSUM_CHECKPOINT_H_
