// Copyright 2026 The nqem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <json.hpp>

#include <fstream>
#include <string>
#include <vector>

#include "nqem/nn/param.hpp"

namespace nqem {

inline constexpr const char* kCheckpointSchema = "nqem.checkpoint.v1";

namespace detail {

inline void write_doubles_le(std::ofstream& out,
                             const Eigen::MatrixXd& values) {
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
      uint64_t bits;
      const double v = values(r, c);
      std::memcpy(&bits, &v, sizeof(bits));
      unsigned char buf[8];
      for (int i = 0; i < 8; ++i) {
        buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
      }
      out.write(reinterpret_cast<const char*>(buf), 8);
    }
  }
}

inline void read_doubles_le(std::ifstream& in, Eigen::MatrixXd& values) {
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    for (Eigen::Index r = 0; r < values.rows(); ++r) {
      unsigned char buf[8];
      in.read(reinterpret_cast<char*>(buf), 8);
      if (!in) throw_io("checkpoint value file truncated");
      uint64_t bits = 0;
      for (int i = 0; i < 8; ++i) {
        bits |= uint64_t(buf[i]) << (8 * i);
      }
      double v;
      std::memcpy(&v, &bits, sizeof(v));
      values(r, c) = v;
    }
  }
}

}  // namespace detail

/// Writes `base`.json (manifest: schema, parameter names/shapes/offsets,
/// caller-supplied extras) and `base`.bin (flat little-endian doubles in
/// list order, column major per parameter). Round trip is bit exact.
inline void save_checkpoint(const std::string& base,
                            const ParamRefs& params,
                            const nlohmann::json& extra) {
  nlohmann::json manifest;
  manifest["schema"] = kCheckpointSchema;
  manifest["extra"] = extra;
  nlohmann::json plist = nlohmann::json::array();
  int64_t offset = 0;
  for (const ParamArray* p : params) {
    plist.push_back({{"name", p->name},
                     {"rows", p->value.rows()},
                     {"cols", p->value.cols()},
                     {"offset", offset}});
    offset += p->size();
  }
  manifest["params"] = plist;
  manifest["total_values"] = offset;

  std::ofstream jf(base + ".json");
  if (!jf) throw_io("cannot write checkpoint manifest " + base + ".json");
  jf << manifest.dump(2) << "\n";
  jf.close();
  if (!jf) throw_io("failed writing checkpoint manifest " + base + ".json");

  std::ofstream bf(base + ".bin", std::ios::binary);
  if (!bf) throw_io("cannot write checkpoint values " + base + ".bin");
  for (const ParamArray* p : params) {
    detail::write_doubles_le(bf, p->value);
  }
  bf.close();
  if (!bf) throw_io("failed writing checkpoint values " + base + ".bin");
}

/// Loads a checkpoint written by save_checkpoint into an identically
/// structured parameter list (names and shapes must match in order).
/// Returns the manifest's extra block.
inline nlohmann::json load_checkpoint(const std::string& base,
                                      const ParamRefs& params) {
  std::ifstream jf(base + ".json");
  if (!jf) throw_io("cannot open checkpoint manifest " + base + ".json");
  nlohmann::json manifest;
  try {
    jf >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw_data("checkpoint manifest is not valid JSON: " +
               std::string(e.what()));
  }
  if (manifest.value("schema", "") != kCheckpointSchema) {
    throw_data("checkpoint manifest has wrong schema tag");
  }
  const auto& plist = manifest.at("params");
  if (plist.size() != params.size()) {
    throw_data("checkpoint parameter count mismatch");
  }
  for (size_t k = 0; k < params.size(); ++k) {
    const auto& entry = plist.at(k);
    if (entry.at("name").get<std::string>() != params[k]->name ||
        entry.at("rows").get<int64_t>() != params[k]->value.rows() ||
        entry.at("cols").get<int64_t>() != params[k]->value.cols()) {
      throw_data("checkpoint parameter '" + params[k]->name +
                 "' does not match the expected architecture");
    }
  }

  std::ifstream bf(base + ".bin", std::ios::binary);
  if (!bf) throw_io("cannot open checkpoint values " + base + ".bin");
  for (ParamArray* p : params) {
    detail::read_doubles_le(bf, p->value);
  }
  char extra_byte;
  if (bf.read(&extra_byte, 1)) {
    throw_data("checkpoint value file has trailing bytes");
  }
  return manifest.value("extra", nlohmann::json::object());
}

}  // namespace nqem
