#pragma once

#include <string>

#include "ionpred/types.hpp"

namespace ionpred {

// One sample per line, fixed key order:
//   id, split, temperature, t_norm, target{kind, species, value_log10},
//   structure{positions, species, node_features, edges:[{k,l,features}]},
//   trajectory{dt, frames} | null
// Numbers are written with shortest round-trip precision, so reals survive
// a write/read cycle exactly.
void write_dataset_jsonl(const Dataset& ds, const std::string& path);

// Dataset kind is inferred: a file whose train samples carry trajectories is
// trajectory-based, anything else structure-based.
Dataset read_dataset_jsonl(const std::string& path);

}  // namespace ionpred
