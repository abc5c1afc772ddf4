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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "achgraph/achievements.hpp"
#include "achgraph/graph.hpp"

namespace achgraph {

enum class DatasetErrc { ParseError, SchemaViolation, DanglingReference, IoError };

class DatasetError : public std::runtime_error {
 public:
  DatasetError(DatasetErrc code, std::string file, std::size_t line, const std::string& message);
  DatasetErrc code() const noexcept { return code_; }
  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  DatasetErrc code_;
  std::string file_;
  std::size_t line_;
};

/// Fields of a record not covered by the documented schema, as a JSON object
/// in text form ("{}" when empty). Preserved verbatim through load and save.
using ExtraFields = std::string;

struct PlayerRecord {
  std::string steamid;
  std::optional<std::string> name;
  ExtraFields extra = "{}";
};

struct GameRecord {
  std::int64_t appid = 0;
  std::string name;
  std::optional<double> cost;
  std::optional<std::vector<std::string>> tags;
  std::vector<std::string> developers;
  std::vector<std::string> genres;
  std::vector<std::string> achievement_names;
  std::optional<std::vector<double>> global_completion;
  ExtraFields extra = "{}";
};

struct DeveloperRecord {
  std::string name;
  ExtraFields extra = "{}";
};

struct GenreRecord {
  std::string description;
  ExtraFields extra = "{}";
};

struct FriendshipRecord {
  std::string a;
  std::string b;
  ExtraFields extra = "{}";
};

struct OwnershipRecord {
  std::string steamid;
  std::int64_t appid = 0;
  std::optional<std::int64_t> playtime_minutes;
  ExtraFields extra = "{}";
};

struct AchievementRecord {
  std::string steamid;
  std::int64_t appid = 0;
  std::vector<std::uint8_t> unlocked;
};

/// File-level image of a dataset directory.
struct DatasetRecords {
  std::vector<PlayerRecord> players;
  std::vector<GameRecord> games;
  std::vector<DeveloperRecord> developers;
  std::vector<GenreRecord> genres;
  std::vector<FriendshipRecord> friendships;
  std::vector<OwnershipRecord> ownership;
  std::vector<AchievementRecord> achievements;
};

struct Dataset {
  PropertyGraph graph;
  /// One table per game, indexed in game order (vertices_of(Game)).
  std::vector<AchievementTable> achievements;

  const AchievementTable* table_for(VertexId game) const;
};

struct DatasetSummary {
  std::size_t players = 0, games = 0, developers = 0, genres = 0;
  std::size_t friendships = 0, ownership = 0, developed = 0, genre_links = 0;
};
DatasetSummary summarize(const PropertyGraph& g);

/// Reads manifest.json and the record files it names.
DatasetRecords read_records(const std::filesystem::path& dir);
/// Writes manifest.json plus one .jsonl file per record class. Output is a
/// pure function of the records.
void write_records(const DatasetRecords& records, const std::filesystem::path& dir);

/// Validates records and builds the graph plus achievement tables. Errors
/// name the file and 1-based line of the offending record.
Dataset build_dataset(const DatasetRecords& records);
DatasetRecords to_records(const Dataset& dataset);

Dataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);

/// Order-independent text form: each record class serialized and sorted.
std::string canonical_form(const DatasetRecords& records);

}  // namespace achgraph
