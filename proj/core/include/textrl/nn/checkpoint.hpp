#pragma once

#include <map>
#include <string>

#include "textrl/nn/params.hpp"

namespace textrl::nn {

struct Checkpoint {
  ParamContainer params;
  std::map<std::string, std::string> meta;  // extra header entries
};

// Text header (magic, version, meta lines, shape table) followed by the raw
// little-endian 64-bit reals of every tensor in shape-table order.
void save_checkpoint(const std::string& path, const ParamContainer& params,
                     const std::map<std::string, std::string>& meta = {});

Checkpoint load_checkpoint(const std::string& path);

}  // namespace textrl::nn
