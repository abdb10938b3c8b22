// Copyright 2026 The Authors.
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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "bundlegen/data/corpus.hpp"
#include "bundlegen/error.hpp"
#include "bundlegen/generate/config.hpp"
#include "bundlegen/model/config.hpp"
#include "json.hpp"

namespace bundlegen::cli {

using json = nlohmann::json;

struct DataPaths {
  std::string events;
  std::string bundles;
  std::string catalog;
  std::string split_dir;
};

// Everything one pipeline run needs, stored as a single JSON document:
//   {"model": {...}, "generation": {...}, "data": {...},
//    "output_dir": "...", "seed": 7}
// Keys left out keep their defaults.
struct RunConfig {
  model::ModelConfig model;
  generate::GenerationConfig generation;
  DataPaths data;
  std::string output_dir;
  std::uint64_t seed = 7;

  // The run seed drives both the split and the model initialization.
  model::ModelConfig seeded_model() const {
    model::ModelConfig c = model;
    c.seed = seed;
    return c;
  }
};

inline json to_json(const RunConfig& r) {
  return {{"model", model::to_json(r.seeded_model())},
          {"generation", generate::to_json(r.generation)},
          {"data",
           {{"events", r.data.events},
            {"bundles", r.data.bundles},
            {"catalog", r.data.catalog},
            {"split_dir", r.data.split_dir}}},
          {"output_dir", r.output_dir},
          {"seed", r.seed}};
}

inline RunConfig run_config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::kInvalidArgument, "run config must be an object");
  RunConfig r;
  try {
    r.seed = j.value("seed", r.seed);
    if (j.contains("model")) r.model = model::model_config_from_json(j.at("model"));
    if (!j.contains("seed")) r.seed = r.model.seed;
    if (j.contains("generation")) {
      r.generation = generate::generation_config_from_json(j.at("generation"));
    }
    if (j.contains("data")) {
      const json& d = j.at("data");
      r.data.events = d.value("events", "");
      r.data.bundles = d.value("bundles", "");
      r.data.catalog = d.value("catalog", "");
      r.data.split_dir = d.value("split_dir", "");
    }
    r.output_dir = j.value("output_dir", "");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kInvalidArgument, std::string("run config: ") + e.what());
  }
  return r;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kParseError, path + ": " + e.what());
  }
}

inline RunConfig load_run_config(const std::string& path) {
  return run_config_from_json(read_json_file(path));
}

inline void write_json_file(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

// FNV-1a of the compact JSON text, recorded in manifests.
inline std::string config_hash(const json& j) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return data::hash_hex(h);
}

inline void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw Error(ErrorKind::kInvalidArgument, std::string("missing ") + what);
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorKind::kIo, std::string(what) + " not found: " + path);
  }
}

}  // namespace bundlegen::cli
