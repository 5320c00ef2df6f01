#include "ionpred/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace ionpred::numerics {

using json = nlohmann::ordered_json;

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  json j;
  j["tensors"] = json::array();
  for (const auto& t : ckpt) {
    json jt;
    jt["name"] = t.name;
    jt["shape"] = t.shape;
    jt["values"] = t.values;
    j["tensors"].push_back(std::move(jt));
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  out << j.dump() << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint for reading: " + path);
  json j = json::parse(in);
  Checkpoint ckpt;
  for (const auto& jt : j.at("tensors")) {
    NamedTensor t;
    t.name = jt.at("name").get<std::string>();
    t.shape = jt.at("shape").get<std::vector<int>>();
    t.values = jt.at("values").get<std::vector<double>>();
    std::size_t expect = 1;
    for (int d : t.shape) expect *= static_cast<std::size_t>(d);
    if (expect != t.values.size()) {
      throw std::runtime_error("checkpoint tensor " + t.name + " has inconsistent shape");
    }
    ckpt.push_back(std::move(t));
  }
  return ckpt;
}

const NamedTensor& find_tensor(const Checkpoint& ckpt, const std::string& name) {
  for (const auto& t : ckpt) {
    if (t.name == name) return t;
  }
  throw std::runtime_error("checkpoint is missing tensor: " + name);
}

}  // namespace ionpred::numerics
