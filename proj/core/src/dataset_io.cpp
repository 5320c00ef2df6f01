#include "ionpred/dataset_io.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace ionpred {

namespace {

using json = nlohmann::ordered_json;

json structure_to_json(const Structure& st) {
  json j;
  j["positions"] = json::array();
  for (const auto& p : st.positions) j["positions"].push_back({p[0], p[1], p[2]});
  j["species"] = st.species;
  j["node_features"] = st.node_features;
  j["edges"] = json::array();
  for (std::size_t e = 0; e < st.edge_list.size(); ++e) {
    json je;
    je["k"] = st.edge_list[e].first;
    je["l"] = st.edge_list[e].second;
    je["features"] = st.edge_features[e];
    j["edges"].push_back(std::move(je));
  }
  return j;
}

Structure structure_from_json(const json& j) {
  Structure st;
  for (const auto& p : j.at("positions")) {
    st.positions.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
  }
  st.species = j.at("species").get<std::vector<int>>();
  st.node_features = j.at("node_features").get<std::vector<std::vector<double>>>();
  for (const auto& je : j.at("edges")) {
    st.edge_list.emplace_back(je.at("k").get<int>(), je.at("l").get<int>());
    st.edge_features.push_back(je.at("features").get<std::vector<double>>());
  }
  return st;
}

}  // namespace

void write_dataset_jsonl(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const Sample& s = ds.samples[i];
    json j;
    j["id"] = s.id;
    j["split"] = to_string(ds.split[i]);
    j["temperature"] = s.temperature;
    j["t_norm"] = ds.t_norm;
    j["target"] = {{"kind", to_string(s.target.kind)},
                   {"species", s.target.species},
                   {"value_log10", s.target.value_log10}};
    j["structure"] = structure_to_json(s.structure);
    if (s.trajectory) {
      json jt;
      jt["dt"] = s.trajectory->dt;
      jt["frames"] = json::array();
      for (const auto& frame : s.trajectory->frames) {
        json jf = json::array();
        for (const auto& p : frame) jf.push_back({p[0], p[1], p[2]});
        jt["frames"].push_back(std::move(jf));
      }
      j["trajectory"] = std::move(jt);
    } else {
      j["trajectory"] = nullptr;
    }
    out << j.dump() << '\n';
  }
}

Dataset read_dataset_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  Dataset ds;
  bool any_trajectory = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    Sample s;
    s.id = j.at("id").get<std::string>();
    ds.split.push_back(split_from_string(j.at("split").get<std::string>()));
    s.temperature = j.at("temperature").get<double>();
    ds.t_norm = j.at("t_norm").get<double>();
    const json& jt = j.at("target");
    s.target.kind = target_kind_from_string(jt.at("kind").get<std::string>());
    s.target.species = jt.at("species").get<int>();
    s.target.value_log10 = jt.at("value_log10").get<double>();
    s.structure = structure_from_json(j.at("structure"));
    if (!j.at("trajectory").is_null()) {
      Trajectory tr;
      const json& jj = j.at("trajectory");
      tr.dt = jj.at("dt").get<double>();
      for (const auto& jf : jj.at("frames")) {
        std::vector<Vec3> frame;
        frame.reserve(jf.size());
        for (const auto& p : jf) {
          frame.push_back({p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
        }
        tr.frames.push_back(std::move(frame));
      }
      s.trajectory = std::move(tr);
      any_trajectory = true;
    }
    ds.samples.push_back(std::move(s));
  }
  ds.kind = any_trajectory ? DatasetKind::TrajectoryBased : DatasetKind::StructureBased;
  return ds;
}

}  // namespace ionpred
