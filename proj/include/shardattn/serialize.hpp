// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "shardattn/csr.hpp"
#include "shardattn/pattern.hpp"
#include "shardattn/verify.hpp"

namespace shardattn {

nlohmann::json to_json(const PatternConfig& config);
nlohmann::json to_json(const LayerSchedule& schedule);
nlohmann::json to_json(const VerificationReport& report);
nlohmann::json to_json(const CsrMask& csr);

PatternConfig pattern_config_from_json(const nlohmann::json& j);
LayerSchedule layer_schedule_from_json(const nlohmann::json& j,
                                       const PatternConfig& default_pattern);
CsrMask csr_from_json(const nlohmann::json& j);

/// Top-level CLI configuration document: a pattern, an optional layer
/// schedule and optional report defaults.
struct CliConfigFile {
    PatternConfig pattern;
    std::optional<LayerSchedule> schedule;
    std::string out;     // report output path, may be empty
    std::string format;  // report format, may be empty
};

/// Parses a config file, mapping parse and validation failures to
/// std::runtime_error with the offending field in the message.
CliConfigFile load_config_file(const std::string& path);

/// FNV-1a over the canonical JSON encoding; stable across runs and platforms.
std::uint64_t config_hash(const PatternConfig& config);

}  // namespace shardattn
