#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "stratsel/metrics.hpp"
#include "stratsel/model.hpp"

namespace stratsel {

using Json = nlohmann::json;

// Structural parse only: missing or mistyped fields throw InvalidConfig
// naming the field. Value checks are left to validate().
GameConfig config_from_json(const Json& j);
GameConfig load_config(const std::string& path);
Json load_json(const std::string& path);

Json config_to_json(const GameConfig& config);

// 64-bit FNV-1a, rendered as 16 hex digits.
std::uint64_t fnv1a(const std::string& bytes);
std::string hash_hex(std::uint64_t h);
// Hash of the canonical JSON rendering of a document or config.
std::string content_hash(const Json& j);
std::string config_hash(const GameConfig& config);

Json report_to_json(const EquilibriumReport& report, const GameConfig& config);
Json predictions_to_json(const AsymptoticPrediction& p, const GameConfig& config);
Json crossings_to_json(const SmallSCrossings& s);

}  // namespace stratsel
