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

#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "bundlegen/data/corpus.hpp"
#include "bundlegen/model/quality_model.hpp"
#include "bundlegen/model/train.hpp"
#include "json.hpp"

namespace bundlegen::model {

using nlohmann::json;

inline constexpr const char* kCheckpointFormat = "bundlegen-checkpoint-1";

namespace detail {

inline json tensor_to_json(const Tensor& t) {
  return json{{"rows", t.rows()}, {"cols", t.cols()}, {"values", t.values()}};
}

inline Tensor tensor_from_json(const json& j) {
  return Tensor(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                j.at("values").get<std::vector<double>>());
}

}  // namespace detail

// Config, vocabulary catalog and hash, named parameters and optimizer state
// in one JSON document. Serialization is deterministic: equal models give
// equal bytes.
inline json checkpoint_to_json(const QualityModel& m, const TrainState* state = nullptr) {
  json j;
  j["format"] = kCheckpointFormat;
  j["config"] = to_json(m.config());
  j["vocab_hash"] = data::hash_hex(m.vocab().hash());
  json catalog = json::array();
  for (const Item& it : m.vocab().items()) {
    catalog.push_back(json::array(
        {it.raw_id, it.category ? json(*it.category) : json(nullptr), it.price}));
  }
  j["catalog"] = std::move(catalog);
  json params = json::array();
  for (const Parameter& p : m.parameter_values()) {
    json pj = detail::tensor_to_json(p.value);
    pj["name"] = p.name;
    params.push_back(std::move(pj));
  }
  j["params"] = std::move(params);
  if (state) {
    json s;
    s["epochs_done"] = state->epochs_done;
    s["best_valid"] = std::isfinite(state->best_valid) ? json(state->best_valid) : json(nullptr);
    s["bad_epochs"] = state->bad_epochs;
    s["stopped"] = state->stopped;
    json curve = json::array();
    for (const EpochStats& e : state->curve) {
      curve.push_back({{"epoch", e.epoch}, {"train", e.train_loss}, {"valid", e.valid_loss}});
    }
    s["curve"] = std::move(curve);
    numerics::Adam adam = state->adam;
    s["adam_steps"] = adam.steps();
    s["adam_lr"] = adam.config().learning_rate;
    json mm = json::array(), vv = json::array();
    for (const Tensor& t : adam.first_moments()) mm.push_back(t.values());
    for (const Tensor& t : adam.second_moments()) vv.push_back(t.values());
    s["adam_m"] = std::move(mm);
    s["adam_v"] = std::move(vv);
    j["train_state"] = std::move(s);
  }
  return j;
}

inline void save_checkpoint(const std::string& path, const QualityModel& m,
                            const TrainState* state = nullptr) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << checkpoint_to_json(m, state).dump() << '\n';
}

struct Checkpoint {
  QualityModel model;
  TrainState state;
};

inline Checkpoint checkpoint_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kCheckpointFormat) {
      throw Error(ErrorKind::kIncompatibleArtifact, "unknown checkpoint format");
    }
    const ModelConfig cfg = model_config_from_json(j.at("config"));
    std::vector<Item> items;
    for (const json& row : j.at("catalog")) {
      Item it;
      it.raw_id = row.at(0).get<RawId>();
      if (!row.at(1).is_null()) it.category = row.at(1).get<RawId>();
      it.price = row.at(2).get<double>();
      items.push_back(it);
    }
    Vocabulary vocab(std::move(items));
    if (data::hash_hex(vocab.hash()) != j.at("vocab_hash").get<std::string>()) {
      throw Error(ErrorKind::kIncompatibleArtifact, "checkpoint catalog hash mismatch");
    }
    Checkpoint ck{QualityModel(cfg, std::move(vocab)), {}};
    auto params = ck.model.parameters();
    const json& pj = j.at("params");
    if (pj.size() != params.size()) {
      throw Error(ErrorKind::kIncompatibleArtifact, "parameter count mismatch");
    }
    for (std::size_t k = 0; k < params.size(); ++k) {
      Tensor t = detail::tensor_from_json(pj[k]);
      if (pj[k].at("name").get<std::string>() != params[k]->name ||
          !t.same_shape(params[k]->value)) {
        throw Error(ErrorKind::kIncompatibleArtifact,
                    "parameter " + params[k]->name + " does not match the config");
      }
      params[k]->value = std::move(t);
    }
    if (j.contains("train_state")) {
      const json& s = j.at("train_state");
      TrainState& st = ck.state;
      st.epochs_done = s.at("epochs_done").get<int>();
      st.best_valid = s.at("best_valid").is_null()
                          ? std::numeric_limits<double>::infinity()
                          : s.at("best_valid").get<double>();
      st.bad_epochs = s.at("bad_epochs").get<int>();
      st.stopped = s.at("stopped").get<bool>();
      for (const json& e : s.at("curve")) {
        st.curve.push_back(EpochStats{e.at("epoch").get<int>(), e.at("train").get<double>(),
                                      e.at("valid").get<double>()});
      }
      numerics::AdamConfig ac;
      ac.learning_rate = s.at("adam_lr").get<double>();
      st.adam = numerics::Adam(ac);
      st.adam.set_steps(s.at("adam_steps").get<long long>());
      const json& mm = s.at("adam_m");
      const json& vv = s.at("adam_v");
      if (!mm.empty()) {
        for (std::size_t k = 0; k < params.size(); ++k) {
          const Tensor& pv = params[k]->value;
          st.adam.first_moments().emplace_back(pv.rows(), pv.cols(),
                                               mm.at(k).get<std::vector<double>>());
          st.adam.second_moments().emplace_back(pv.rows(), pv.cols(),
                                                vv.at(k).get<std::vector<double>>());
        }
      }
    }
    return ck;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kIncompatibleArtifact, std::string("checkpoint: ") + e.what());
  }
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kIncompatibleArtifact, std::string("checkpoint: ") + e.what());
  }
  return checkpoint_from_json(j);
}

// Refuses to pair a model with data built on a different catalog.
inline void require_same_vocab(const QualityModel& m, const Vocabulary& v) {
  if (m.vocab().hash() != v.hash()) {
    throw Error(ErrorKind::kIncompatibleArtifact,
                "vocabulary hash " + data::hash_hex(v.hash()) +
                    " does not match checkpoint " + data::hash_hex(m.vocab().hash()));
  }
}

}  // namespace bundlegen::model
