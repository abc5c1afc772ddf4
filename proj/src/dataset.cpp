// Copyright 2026 The achgraph Authors.
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

#include "achgraph/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <utility>

#include <json.hpp>

namespace achgraph {

using nlohmann::json;

namespace {

constexpr const char* kFileKeys[] = {"players",    "games",     "developers",  "genres",
                                     "friendships", "ownership", "achievements"};

struct Source {
  std::string file;
  std::size_t line = 0;

  [[noreturn]] void fail(DatasetErrc code, const std::string& message) const {
    throw DatasetError(code, file, line, message);
  }
};

const json& field(const json& obj, const char* key, const Source& src) {
  auto it = obj.find(key);
  if (it == obj.end()) src.fail(DatasetErrc::SchemaViolation, std::string("missing field '") + key + "'");
  return *it;
}

std::string get_string(const json& obj, const char* key, const Source& src) {
  const json& v = field(obj, key, src);
  if (!v.is_string()) src.fail(DatasetErrc::SchemaViolation, std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

std::int64_t get_int(const json& v, const char* key, const Source& src) {
  if (v.is_number_integer()) {
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
      src.fail(DatasetErrc::SchemaViolation, std::string("field '") + key + "' out of range");
    }
    return v.get<std::int64_t>();
  }
  src.fail(DatasetErrc::SchemaViolation, std::string("field '") + key + "' must be an integer");
}

double get_real(const json& v, const char* key, const Source& src) {
  if (!v.is_number()) src.fail(DatasetErrc::SchemaViolation, std::string("field '") + key + "' must be a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) src.fail(DatasetErrc::SchemaViolation, std::string("field '") + key + "' must be finite");
  return d;
}

std::vector<std::string> get_string_list(const json& obj, const char* key, const Source& src) {
  const json& v = field(obj, key, src);
  if (!v.is_array()) src.fail(DatasetErrc::SchemaViolation, std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_string()) src.fail(DatasetErrc::SchemaViolation, std::string("field '") + key + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

ExtraFields extras(const json& obj, std::initializer_list<const char*> known) {
  json rest = json::object();
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) rest[key] = value;
  }
  return rest.dump();
}

template <typename Fn>
void read_lines(const std::filesystem::path& path, const std::string& label, Fn&& on_record) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(DatasetErrc::IoError, label, 0, "cannot open " + path.string());
  std::string line;
  Source src{label, 0};
  while (std::getline(in, line)) {
    ++src.line;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      src.fail(DatasetErrc::ParseError, e.what());
    }
    if (!obj.is_object()) src.fail(DatasetErrc::ParseError, "record is not an object");
    on_record(obj, src);
  }
}

// Scalar JSON values become typed attributes; anything else stays raw text.
void absorb_extras(const ExtraFields& extra, AttrMap& attrs, std::map<std::string, std::string, std::less<>>& raw) {
  const json obj = json::parse(extra);
  for (const auto& [key, value] : obj.items()) {
    if (value.is_string()) {
      attrs[key] = value.get<std::string>();
    } else if (value.is_boolean()) {
      attrs[key] = value.get<bool>();
    } else if (value.is_number_integer() &&
               !(value.is_number_unsigned() && value.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX))) {
      attrs[key] = value.get<std::int64_t>();
    } else if (value.is_number_float() && std::isfinite(value.get<double>())) {
      attrs[key] = value.get<double>();
    } else {
      raw[key] = value.dump();
    }
  }
}

json attr_to_json(const AttrValue& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

ExtraFields collect_extras(const AttrMap& attrs, const std::map<std::string, std::string, std::less<>>& raw,
                           std::initializer_list<const char*> known) {
  json rest = json::object();
  for (const auto& [key, value] : attrs) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      rest[key] = attr_to_json(value);
    }
  }
  for (const auto& [key, text] : raw) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      rest[key] = json::parse(text);
    }
  }
  return rest.dump();
}

json with_extras(json obj, const ExtraFields& extra) {
  const json rest = json::parse(extra);
  for (const auto& [key, value] : rest.items()) obj[key] = value;
  return obj;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError(DatasetErrc::IoError, path.filename().string(), 0, "cannot write " + path.string());
  return out;
}

json player_json(const PlayerRecord& p) {
  json o = {{"steamid", p.steamid}};
  if (p.name) o["name"] = *p.name;
  return with_extras(std::move(o), p.extra);
}

json game_json(const GameRecord& g) {
  json o = {{"appid", g.appid},
            {"name", g.name},
            {"developers", g.developers},
            {"genres", g.genres},
            {"achievement_names", g.achievement_names}};
  if (g.cost) o["cost"] = *g.cost;
  if (g.tags) o["tags"] = *g.tags;
  if (g.global_completion) o["global_completion"] = *g.global_completion;
  return with_extras(std::move(o), g.extra);
}

json developer_json(const DeveloperRecord& d) { return with_extras({{"name", d.name}}, d.extra); }
json genre_json(const GenreRecord& r) { return with_extras({{"description", r.description}}, r.extra); }
json friendship_json(const FriendshipRecord& f) { return with_extras({{"a", f.a}, {"b", f.b}}, f.extra); }
json ownership_json(const OwnershipRecord& o) {
  json j = {{"steamid", o.steamid}, {"appid", o.appid}};
  if (o.playtime_minutes) j["playtime_minutes"] = *o.playtime_minutes;
  return with_extras(std::move(j), o.extra);
}

// Hand-formatted: this is by far the largest file.
std::string achievement_line(const AchievementRecord& a) {
  std::string s;
  s.reserve(48 + 2 * a.unlocked.size());
  s += "{\"appid\":";
  s += std::to_string(a.appid);
  s += ",\"steamid\":";
  s += json(a.steamid).dump();
  s += ",\"unlocked\":[";
  for (std::size_t i = 0; i < a.unlocked.size(); ++i) {
    if (i) s += ',';
    s += a.unlocked[i] ? '1' : '0';
  }
  s += "]}";
  return s;
}

}  // namespace

DatasetError::DatasetError(DatasetErrc code, std::string file, std::size_t line, const std::string& message)
    : std::runtime_error(file.empty() ? message
                                      : file + (line ? ":" + std::to_string(line) : std::string()) + ": " + message),
      code_(code),
      file_(std::move(file)),
      line_(line) {}

std::optional<std::size_t> AchievementTable::owner_index(VertexId player) const {
  auto it = std::lower_bound(owners.begin(), owners.end(), player);
  if (it == owners.end() || *it != player) return std::nullopt;
  return static_cast<std::size_t>(it - owners.begin());
}

const AchievementTable* Dataset::table_for(VertexId game) const {
  const auto games = graph.vertices_of(VertexKind::Game);
  auto it = std::lower_bound(games.begin(), games.end(), game);
  if (it == games.end() || *it != game) return nullptr;
  const auto index = static_cast<std::size_t>(it - games.begin());
  return index < achievements.size() ? &achievements[index] : nullptr;
}

DatasetSummary summarize(const PropertyGraph& g) {
  DatasetSummary s;
  s.players = g.count(VertexKind::Player);
  s.games = g.count(VertexKind::Game);
  s.developers = g.count(VertexKind::Developer);
  s.genres = g.count(VertexKind::Genre);
  s.friendships = g.count(EdgeKind::Friend);
  s.ownership = g.count(EdgeKind::Owns);
  s.developed = g.count(EdgeKind::DevelopedBy);
  s.genre_links = g.count(EdgeKind::HasGenre);
  return s;
}

DatasetRecords read_records(const std::filesystem::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  std::ifstream in(manifest_path, std::ios::binary);
  if (!in) throw DatasetError(DatasetErrc::IoError, "manifest.json", 0, "cannot open " + manifest_path.string());
  json manifest;
  try {
    manifest = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DatasetError(DatasetErrc::ParseError, "manifest.json", 1, e.what());
  }
  const Source msrc{"manifest.json", 1};
  if (!manifest.is_object()) msrc.fail(DatasetErrc::SchemaViolation, "manifest must be an object");
  if (get_int(field(manifest, "version", msrc), "version", msrc) != 1) {
    msrc.fail(DatasetErrc::SchemaViolation, "unsupported manifest version");
  }
  const json& files = field(manifest, "files", msrc);
  if (!files.is_object()) msrc.fail(DatasetErrc::SchemaViolation, "'files' must be an object");
  std::map<std::string, std::filesystem::path> paths;
  for (const char* key : kFileKeys) paths[key] = dir / get_string(files, key, msrc);
  auto label = [&](const char* key) { return paths[key].filename().string(); };

  DatasetRecords r;
  read_lines(paths["players"], label("players"), [&](const json& o, const Source& src) {
    PlayerRecord p;
    p.steamid = get_string(o, "steamid", src);
    if (auto it = o.find("name"); it != o.end() && !it->is_null()) p.name = get_string(o, "name", src);
    p.extra = extras(o, {"steamid", "name"});
    r.players.push_back(std::move(p));
  });
  read_lines(paths["games"], label("games"), [&](const json& o, const Source& src) {
    GameRecord g;
    g.appid = get_int(field(o, "appid", src), "appid", src);
    g.name = get_string(o, "name", src);
    if (auto it = o.find("cost"); it != o.end() && !it->is_null()) g.cost = get_real(*it, "cost", src);
    if (auto it = o.find("tags"); it != o.end() && !it->is_null()) g.tags = get_string_list(o, "tags", src);
    g.developers = get_string_list(o, "developers", src);
    g.genres = get_string_list(o, "genres", src);
    g.achievement_names = get_string_list(o, "achievement_names", src);
    if (auto it = o.find("global_completion"); it != o.end() && !it->is_null()) {
      if (!it->is_array()) src.fail(DatasetErrc::SchemaViolation, "'global_completion' must be an array");
      std::vector<double> rates;
      for (const auto& v : *it) rates.push_back(get_real(v, "global_completion", src));
      g.global_completion = std::move(rates);
    }
    g.extra = extras(o, {"appid", "name", "cost", "tags", "developers", "genres", "achievement_names",
                         "global_completion"});
    r.games.push_back(std::move(g));
  });
  read_lines(paths["developers"], label("developers"), [&](const json& o, const Source& src) {
    r.developers.push_back({get_string(o, "name", src), extras(o, {"name"})});
  });
  read_lines(paths["genres"], label("genres"), [&](const json& o, const Source& src) {
    r.genres.push_back({get_string(o, "description", src), extras(o, {"description"})});
  });
  read_lines(paths["friendships"], label("friendships"), [&](const json& o, const Source& src) {
    r.friendships.push_back({get_string(o, "a", src), get_string(o, "b", src), extras(o, {"a", "b"})});
  });
  read_lines(paths["ownership"], label("ownership"), [&](const json& o, const Source& src) {
    OwnershipRecord w;
    w.steamid = get_string(o, "steamid", src);
    w.appid = get_int(field(o, "appid", src), "appid", src);
    if (auto it = o.find("playtime_minutes"); it != o.end() && !it->is_null()) {
      w.playtime_minutes = get_int(*it, "playtime_minutes", src);
    }
    w.extra = extras(o, {"steamid", "appid", "playtime_minutes"});
    r.ownership.push_back(std::move(w));
  });
  read_lines(paths["achievements"], label("achievements"), [&](const json& o, const Source& src) {
    AchievementRecord a;
    a.steamid = get_string(o, "steamid", src);
    a.appid = get_int(field(o, "appid", src), "appid", src);
    const json& flags = field(o, "unlocked", src);
    if (!flags.is_array()) src.fail(DatasetErrc::SchemaViolation, "'unlocked' must be an array");
    a.unlocked.reserve(flags.size());
    for (const auto& f : flags) {
      if (!f.is_number_integer() || (f.get<std::int64_t>() != 0 && f.get<std::int64_t>() != 1)) {
        src.fail(DatasetErrc::SchemaViolation, "'unlocked' entries must be 0 or 1");
      }
      a.unlocked.push_back(static_cast<std::uint8_t>(f.get<std::int64_t>()));
    }
    r.achievements.push_back(std::move(a));
  });
  return r;
}

void write_records(const DatasetRecords& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DatasetError(DatasetErrc::IoError, "", 0, "cannot create " + dir.string() + ": " + ec.message());

  json manifest = {{"version", 1}, {"files", json::object()}};
  for (const char* key : kFileKeys) manifest["files"][key] = std::string(key) + ".jsonl";
  {
    auto out = open_out(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
  }
  auto write_all = [&](const char* key, const auto& items, auto&& to_line) {
    auto out = open_out(dir / (std::string(key) + ".jsonl"));
    for (const auto& item : items) out << to_line(item) << '\n';
    if (!out) throw DatasetError(DatasetErrc::IoError, std::string(key) + ".jsonl", 0, "write failed");
  };
  write_all("players", r.players, [](const auto& p) { return player_json(p).dump(); });
  write_all("games", r.games, [](const auto& g) { return game_json(g).dump(); });
  write_all("developers", r.developers, [](const auto& d) { return developer_json(d).dump(); });
  write_all("genres", r.genres, [](const auto& g) { return genre_json(g).dump(); });
  write_all("friendships", r.friendships, [](const auto& f) { return friendship_json(f).dump(); });
  write_all("ownership", r.ownership, [](const auto& o) { return ownership_json(o).dump(); });
  write_all("achievements", r.achievements, achievement_line);
}

Dataset build_dataset(const DatasetRecords& r) {
  Dataset ds;
  PropertyGraph& g = ds.graph;
  std::unordered_map<std::string, VertexId> developers, genres;

  for (std::size_t i = 0; i < r.players.size(); ++i) {
    const Source src{"players.jsonl", i + 1};
    const auto& p = r.players[i];
    if (p.steamid.empty()) src.fail(DatasetErrc::SchemaViolation, "empty steamid");
    if (g.find_player(p.steamid)) src.fail(DatasetErrc::SchemaViolation, "duplicate steamid " + p.steamid);
    AttrMap attrs;
    std::map<std::string, std::string, std::less<>> raw;
    absorb_extras(p.extra, attrs, raw);
    attrs["steamid"] = p.steamid;
    if (p.name) attrs["name"] = *p.name;
    const VertexId v = g.add_vertex(VertexKind::Player, std::move(attrs));
    g.mutable_vertex(v).raw = std::move(raw);
  }
  for (std::size_t i = 0; i < r.developers.size(); ++i) {
    const Source src{"developers.jsonl", i + 1};
    const auto& d = r.developers[i];
    if (developers.contains(d.name)) src.fail(DatasetErrc::SchemaViolation, "duplicate developer " + d.name);
    AttrMap attrs;
    std::map<std::string, std::string, std::less<>> raw;
    absorb_extras(d.extra, attrs, raw);
    attrs["name"] = d.name;
    const VertexId v = g.add_vertex(VertexKind::Developer, std::move(attrs));
    g.mutable_vertex(v).raw = std::move(raw);
    developers.emplace(d.name, v);
  }
  for (std::size_t i = 0; i < r.genres.size(); ++i) {
    const Source src{"genres.jsonl", i + 1};
    const auto& gr = r.genres[i];
    if (genres.contains(gr.description)) src.fail(DatasetErrc::SchemaViolation, "duplicate genre " + gr.description);
    AttrMap attrs;
    std::map<std::string, std::string, std::less<>> raw;
    absorb_extras(gr.extra, attrs, raw);
    attrs["description"] = gr.description;
    const VertexId v = g.add_vertex(VertexKind::Genre, std::move(attrs));
    g.mutable_vertex(v).raw = std::move(raw);
    genres.emplace(gr.description, v);
  }

  std::vector<const GameRecord*> game_records;
  for (std::size_t i = 0; i < r.games.size(); ++i) {
    const Source src{"games.jsonl", i + 1};
    const auto& gm = r.games[i];
    if (g.find_game(gm.appid)) src.fail(DatasetErrc::SchemaViolation, "duplicate appid " + std::to_string(gm.appid));
    if (gm.global_completion) {
      if (gm.global_completion->size() != gm.achievement_names.size()) {
        src.fail(DatasetErrc::SchemaViolation, "global_completion length differs from achievement_names");
      }
      for (double c : *gm.global_completion) {
        if (!(c >= 0.0 && c <= 1.0)) src.fail(DatasetErrc::SchemaViolation, "global_completion outside [0,1]");
      }
    }
    AttrMap attrs;
    std::map<std::string, std::string, std::less<>> raw;
    absorb_extras(gm.extra, attrs, raw);
    attrs["appid"] = gm.appid;
    attrs["name"] = gm.name;
    if (gm.cost) attrs["cost"] = *gm.cost;
    if (gm.tags) raw["tags"] = json(*gm.tags).dump();
    const VertexId v = g.add_vertex(VertexKind::Game, std::move(attrs));
    g.mutable_vertex(v).raw = std::move(raw);
    game_records.push_back(&gm);

    for (const auto& dev : gm.developers) {
      auto it = developers.find(dev);
      if (it == developers.end()) src.fail(DatasetErrc::DanglingReference, "unknown developer " + dev);
      if (g.find_edge(EdgeKind::DevelopedBy, v, it->second)) {
        src.fail(DatasetErrc::SchemaViolation, "developer listed twice: " + dev);
      }
      g.add_edge(EdgeKind::DevelopedBy, v, it->second);
    }
    for (const auto& genre : gm.genres) {
      auto it = genres.find(genre);
      if (it == genres.end()) src.fail(DatasetErrc::DanglingReference, "unknown genre " + genre);
      if (g.find_edge(EdgeKind::HasGenre, v, it->second)) {
        src.fail(DatasetErrc::SchemaViolation, "genre listed twice: " + genre);
      }
      g.add_edge(EdgeKind::HasGenre, v, it->second);
    }
  }

  auto player_of = [&](const std::string& steamid, const Source& src) {
    auto p = g.find_player(steamid);
    if (!p) src.fail(DatasetErrc::DanglingReference, "unknown player " + steamid);
    return *p;
  };
  auto game_of = [&](std::int64_t appid, const Source& src) {
    auto v = g.find_game(appid);
    if (!v) src.fail(DatasetErrc::DanglingReference, "unknown game " + std::to_string(appid));
    return *v;
  };

  for (std::size_t i = 0; i < r.friendships.size(); ++i) {
    const Source src{"friendships.jsonl", i + 1};
    const auto& f = r.friendships[i];
    const VertexId a = player_of(f.a, src);
    const VertexId b = player_of(f.b, src);
    if (!(f.a < f.b)) src.fail(DatasetErrc::SchemaViolation, "friendship requires a < b");
    if (g.find_edge(EdgeKind::Friend, a, b)) src.fail(DatasetErrc::SchemaViolation, "duplicate friendship");
    AttrMap attrs;
    std::map<std::string, std::string, std::less<>> raw;
    absorb_extras(f.extra, attrs, raw);
    const EdgeId e = g.add_edge(EdgeKind::Friend, a, b, std::move(attrs));
    g.mutable_edge(e).raw = std::move(raw);
  }
  for (std::size_t i = 0; i < r.ownership.size(); ++i) {
    const Source src{"ownership.jsonl", i + 1};
    const auto& o = r.ownership[i];
    const VertexId p = player_of(o.steamid, src);
    const VertexId gm = game_of(o.appid, src);
    if (g.find_edge(EdgeKind::Owns, p, gm)) src.fail(DatasetErrc::SchemaViolation, "duplicate ownership");
    AttrMap attrs;
    std::map<std::string, std::string, std::less<>> raw;
    absorb_extras(o.extra, attrs, raw);
    if (o.playtime_minutes) attrs["playtime_minutes"] = *o.playtime_minutes;
    const EdgeId e = g.add_edge(EdgeKind::Owns, p, gm, std::move(attrs));
    g.mutable_edge(e).raw = std::move(raw);
  }

  const auto games = g.vertices_of(VertexKind::Game);
  ds.achievements.resize(games.size());
  std::unordered_map<std::uint32_t, std::size_t> table_of;
  for (std::size_t gi = 0; gi < games.size(); ++gi) {
    AchievementTable& t = ds.achievements[gi];
    t.game = games[gi];
    t.n_achievements = game_records[gi]->achievement_names.size();
    t.names = game_records[gi]->achievement_names;
    t.rate_override = game_records[gi]->global_completion;
    for (const auto& adj : g.adjacency(games[gi], EdgeKind::Owns, Direction::In)) t.owners.push_back(adj.vertex);
    t.bits.assign(t.owners.size() * t.n_achievements, 0);
    t.has_row.assign(t.owners.size(), false);
    table_of.emplace(games[gi].value, gi);
  }
  for (std::size_t i = 0; i < r.achievements.size(); ++i) {
    const Source src{"achievements.jsonl", i + 1};
    const auto& a = r.achievements[i];
    const VertexId p = player_of(a.steamid, src);
    const VertexId gm = game_of(a.appid, src);
    AchievementTable& t = ds.achievements[table_of.at(gm.value)];
    const auto row = t.owner_index(p);
    if (!row) src.fail(DatasetErrc::SchemaViolation, "achievements for a game the player does not own");
    if (t.has_row[*row]) src.fail(DatasetErrc::SchemaViolation, "duplicate achievement record");
    if (a.unlocked.size() != t.n_achievements) {
      src.fail(DatasetErrc::SchemaViolation, "expected " + std::to_string(t.n_achievements) + " flags, got " +
                                                 std::to_string(a.unlocked.size()));
    }
    std::copy(a.unlocked.begin(), a.unlocked.end(), t.row(*row).begin());
    t.has_row[*row] = true;
  }
  return ds;
}

DatasetRecords to_records(const Dataset& ds) {
  const PropertyGraph& g = ds.graph;
  DatasetRecords r;
  auto text = [](const AttrMap& attrs, std::string_view key) -> std::string {
    auto it = attrs.find(key);
    return it == attrs.end() ? std::string() : render(it->second);
  };
  auto steamid = [&](VertexId v) { return text(g.vertex(v).attrs, "steamid"); };
  auto appid = [&](VertexId v) { return std::get<std::int64_t>(g.vertex(v).attrs.at("appid")); };

  for (VertexId v : g.vertices_of(VertexKind::Player)) {
    const auto& vx = g.vertex(v);
    PlayerRecord p{text(vx.attrs, "steamid"), std::nullopt, collect_extras(vx.attrs, vx.raw, {"steamid", "name"})};
    if (auto it = vx.attrs.find("name"); it != vx.attrs.end()) p.name = render(it->second);
    r.players.push_back(std::move(p));
  }
  for (VertexId v : g.vertices_of(VertexKind::Developer)) {
    const auto& vx = g.vertex(v);
    r.developers.push_back({text(vx.attrs, "name"), collect_extras(vx.attrs, vx.raw, {"name"})});
  }
  for (VertexId v : g.vertices_of(VertexKind::Genre)) {
    const auto& vx = g.vertex(v);
    r.genres.push_back({text(vx.attrs, "description"), collect_extras(vx.attrs, vx.raw, {"description"})});
  }
  const auto games = g.vertices_of(VertexKind::Game);
  for (std::size_t gi = 0; gi < games.size(); ++gi) {
    const auto& vx = g.vertex(games[gi]);
    GameRecord gm;
    gm.appid = appid(games[gi]);
    gm.name = text(vx.attrs, "name");
    if (auto it = vx.attrs.find("cost"); it != vx.attrs.end()) gm.cost = as_real(it->second).value_or(0.0);
    if (auto it = vx.raw.find("tags"); it != vx.raw.end()) gm.tags = json::parse(it->second).get<std::vector<std::string>>();
    for (const auto& adj : g.adjacency(games[gi], EdgeKind::DevelopedBy, Direction::Out)) {
      gm.developers.push_back(text(g.vertex(adj.vertex).attrs, "name"));
    }
    for (const auto& adj : g.adjacency(games[gi], EdgeKind::HasGenre, Direction::Out)) {
      gm.genres.push_back(text(g.vertex(adj.vertex).attrs, "description"));
    }
    const AchievementTable* t = gi < ds.achievements.size() ? &ds.achievements[gi] : nullptr;
    const std::size_t n = t ? t->n_achievements : 0;
    if (t && t->names.size() == n) {
      gm.achievement_names = t->names;
    } else {
      for (std::size_t i = 0; i < n; ++i) gm.achievement_names.push_back("ACH_" + std::to_string(i + 1));
    }
    if (t) gm.global_completion = t->rate_override;
    gm.extra = collect_extras(vx.attrs, vx.raw, {"appid", "name", "cost", "tags"});
    r.games.push_back(std::move(gm));
  }
  for (const Edge& e : g.edges()) {
    if (e.kind == EdgeKind::Friend) {
      auto a = steamid(e.src), b = steamid(e.dst);
      if (b < a) std::swap(a, b);
      r.friendships.push_back({a, b, collect_extras(e.attrs, e.raw, {"attainmentRating"})});
    } else if (e.kind == EdgeKind::Owns) {
      OwnershipRecord o{steamid(e.src), appid(e.dst), std::nullopt,
                        collect_extras(e.attrs, e.raw, {"playtime_minutes", "attainmentRating"})};
      if (auto it = e.attrs.find("playtime_minutes"); it != e.attrs.end()) {
        if (const auto* m = std::get_if<std::int64_t>(&it->second)) o.playtime_minutes = *m;
      }
      r.ownership.push_back(std::move(o));
    }
  }
  for (const AchievementTable& t : ds.achievements) {
    for (std::size_t i = 0; i < t.owners.size(); ++i) {
      if (!t.has_row[i]) continue;
      const auto row = t.row(i);
      r.achievements.push_back({steamid(t.owners[i]), appid(t.game), {row.begin(), row.end()}});
    }
  }
  return r;
}

Dataset load_dataset(const std::filesystem::path& dir) { return build_dataset(read_records(dir)); }

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  write_records(to_records(dataset), dir);
}

std::string canonical_form(const DatasetRecords& r) {
  std::ostringstream out;
  auto section = [&](const char* title, std::vector<std::string> lines) {
    std::sort(lines.begin(), lines.end());
    out << "# " << title << ' ' << lines.size() << '\n';
    for (const auto& l : lines) out << l << '\n';
  };
  auto map_lines = [](const auto& items, auto&& fn) {
    std::vector<std::string> lines;
    lines.reserve(items.size());
    for (const auto& it : items) lines.push_back(fn(it));
    return lines;
  };
  section("players", map_lines(r.players, [](const auto& p) { return player_json(p).dump(); }));
  section("games", map_lines(r.games, [](const auto& g) { return game_json(g).dump(); }));
  section("developers", map_lines(r.developers, [](const auto& d) { return developer_json(d).dump(); }));
  section("genres", map_lines(r.genres, [](const auto& g) { return genre_json(g).dump(); }));
  section("friendships", map_lines(r.friendships, [](const auto& f) { return friendship_json(f).dump(); }));
  section("ownership", map_lines(r.ownership, [](const auto& o) { return ownership_json(o).dump(); }));
  section("achievements", map_lines(r.achievements, achievement_line));
  return out.str();
}

}  // namespace achgraph
