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
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bundlegen/core/types.hpp"
#include "bundlegen/error.hpp"
#include "json.hpp"

namespace bundlegen::data {

using json = nlohmann::json;

struct RawEvent {
  RawId user = 0;
  RawId order = 0;  // groups co-purchased items within a user
  RawId item = 0;
  std::optional<RawId> cate;
  double price = 0.0;

  friend bool operator==(const RawEvent&, const RawEvent&) = default;
};

struct CatalogEntry {
  std::optional<RawId> cate;
  double price = 0.0;
};

// Item attributes keyed by raw id. The first occurrence of an item wins.
using Catalog = std::map<RawId, CatalogEntry>;

namespace detail {

inline RawId require_id(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(line, std::string("missing \"") + key + "\"");
  if (!it->is_number_integer()) {
    throw ParseError(line, std::string("\"") + key + "\" must be an integer");
  }
  const auto v = it->get<std::int64_t>();
  if (v < 0) throw ParseError(line, std::string("\"") + key + "\" is negative");
  return v;
}

inline std::optional<RawId> optional_id(const json& obj, const char* key,
                                        std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return require_id(obj, key, line);
}

inline double require_price(const json& obj, std::size_t line) {
  auto it = obj.find("price");
  if (it == obj.end()) throw ParseError(line, "missing \"price\"");
  if (!it->is_number()) throw ParseError(line, "\"price\" must be a number");
  const double p = it->get<double>();
  if (!(p >= 0.0)) throw ParseError(line, "\"price\" is negative");
  return p;
}

inline json parse_line(const std::string& text, std::size_t line) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(line, e.what());
  }
  if (!obj.is_object()) throw ParseError(line, "expected a JSON object");
  return obj;
}

// Calls fn(obj, line_number) for every non-blank line of a JSONL file.
template <class Fn>
void for_each_jsonl(const std::string& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    fn(parse_line(text, line), line);
  }
}

inline json id_or_null(const std::optional<RawId>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace detail

inline RawEvent parse_event(const json& obj, std::size_t line) {
  RawEvent e;
  e.user = detail::require_id(obj, "user", line);
  e.order = detail::require_id(obj, "order", line);
  e.item = detail::require_id(obj, "item", line);
  e.cate = detail::optional_id(obj, "cate", line);
  e.price = detail::require_price(obj, line);
  return e;
}

// Events in file order. A malformed line raises ParseError with its number.
inline std::vector<RawEvent> load_events(const std::string& path) {
  std::vector<RawEvent> out;
  detail::for_each_jsonl(path, [&](const json& obj, std::size_t line) {
    out.push_back(parse_event(obj, line));
  });
  return out;
}

inline json event_to_json(const RawEvent& e) {
  return json{{"user", e.user},
              {"order", e.order},
              {"item", e.item},
              {"cate", detail::id_or_null(e.cate)},
              {"price", e.price}};
}

inline void write_events(const std::string& path,
                         const std::vector<RawEvent>& events) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  for (const RawEvent& e : events) out << event_to_json(e).dump() << '\n';
}

inline Catalog catalog_from_events(const std::vector<RawEvent>& events) {
  Catalog cat;
  for (const RawEvent& e : events) cat.try_emplace(e.item, CatalogEntry{e.cate, e.price});
  return cat;
}

// Item catalog JSONL: {"item":int,"cate":int|null,"price":float}
inline Catalog load_catalog(const std::string& path) {
  Catalog cat;
  detail::for_each_jsonl(path, [&](const json& obj, std::size_t line) {
    const RawId item = detail::require_id(obj, "item", line);
    cat.try_emplace(item, CatalogEntry{detail::optional_id(obj, "cate", line),
                                       detail::require_price(obj, line)});
  });
  return cat;
}

inline void write_catalog(const std::string& path, const Catalog& cat) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  for (const auto& [item, entry] : cat) {
    out << json{{"item", item}, {"cate", detail::id_or_null(entry.cate)},
                {"price", entry.price}}
               .dump()
        << '\n';
  }
}

}  // namespace bundlegen::data
