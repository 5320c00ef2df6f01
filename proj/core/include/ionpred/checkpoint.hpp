#pragma once

#include <map>
#include <string>
#include <vector>

namespace ionpred::numerics {

// Named parameter tensor as stored in checkpoint files.
struct NamedTensor {
  std::string name;
  std::vector<int> shape;
  std::vector<double> values;  // row-major
};

using Checkpoint = std::vector<NamedTensor>;

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Lookup by name; throws if missing.
const NamedTensor& find_tensor(const Checkpoint& ckpt, const std::string& name);

}  // namespace ionpred::numerics
