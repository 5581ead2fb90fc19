// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#include "shardattn/serialize.hpp"

#include <fstream>
#include <stdexcept>

namespace shardattn {

namespace {

using nlohmann::json;

const char* scheme_name(OffsetScheme scheme) {
    switch (scheme) {
        case OffsetScheme::HeadModStride:
        default:
            return "head_mod_stride";
    }
}

OffsetScheme scheme_from_name(const std::string& name) {
    if (name == "head_mod_stride") return OffsetScheme::HeadModStride;
    throw std::invalid_argument("unknown offset_scheme '" + name + "'");
}

}  // namespace

nlohmann::json to_json(const PatternConfig& config) {
    json segments = json::array();
    for (const StrideSegment& seg : config.stride_segments) {
        json s{{"start_block_distance", seg.start_block_distance},
               {"end_block_distance", seg.end_block_distance},
               {"stride", seg.stride}};
        if (!seg.offsets.empty()) s["offsets"] = seg.offsets;
        segments.push_back(s);
    }
    return json{{"seq_len", config.seq_len},
                {"block_size", config.block_size},
                {"num_heads", config.num_heads},
                {"num_kv_heads", config.kv_heads()},
                {"local_blocks", config.local_blocks},
                {"local_stride", config.local_stride},
                {"stride_segments", segments},
                {"offset_scheme", scheme_name(config.offset_scheme)}};
}

nlohmann::json to_json(const LayerSchedule& schedule) {
    return json{{"num_layers", schedule.num_layers},
                {"dense_layer_ids", schedule.dense_layer_ids},
                {"sparse_pattern", to_json(schedule.sparse_pattern)}};
}

nlohmann::json to_json(const VerificationReport& report) {
    json violations = json::array();
    for (const Witness& w : report.violations)
        violations.push_back(json{{"head", w.head},
                                  {"query_block", w.query_block},
                                  {"key_block", w.key_block},
                                  {"rule", w.rule}});
    return json{{"union_complete", report.union_complete},
                {"heterogeneous", report.heterogeneous},
                {"kv_cache_efficient", report.kv_cache_efficient},
                {"violations", violations}};
}

nlohmann::json to_json(const CsrMask& csr) {
    return json{{"head_index", csr.head_index},
                {"num_blocks", csr.num_blocks},
                {"row_ptr", csr.row_ptr},
                {"col_idx", csr.col_idx}};
}

PatternConfig pattern_config_from_json(const nlohmann::json& j) {
    PatternConfig config;
    config.seq_len = j.at("seq_len").get<int>();
    config.block_size = j.at("block_size").get<int>();
    config.num_heads = j.at("num_heads").get<int>();
    config.num_kv_heads = j.value("num_kv_heads", config.num_heads);
    config.local_blocks = j.value("local_blocks", 1);
    config.local_stride = j.value("local_stride", 1);
    if (j.contains("stride_segments")) {
        for (const json& s : j.at("stride_segments")) {
            StrideSegment seg;
            seg.start_block_distance = s.at("start_block_distance").get<int>();
            seg.end_block_distance = s.at("end_block_distance").get<int>();
            seg.stride = s.at("stride").get<int>();
            if (s.contains("offsets")) seg.offsets = s.at("offsets").get<std::vector<int>>();
            config.stride_segments.push_back(std::move(seg));
        }
    }
    config.offset_scheme = scheme_from_name(j.value("offset_scheme", "head_mod_stride"));
    config.validate();
    return config;
}

LayerSchedule layer_schedule_from_json(const nlohmann::json& j,
                                       const PatternConfig& default_pattern) {
    LayerSchedule schedule;
    schedule.num_layers = j.at("num_layers").get<int>();
    if (j.contains("dense_layer_ids"))
        for (const json& id : j.at("dense_layer_ids"))
            schedule.dense_layer_ids.insert(id.get<int>());
    schedule.sparse_pattern = j.contains("sparse_pattern")
                                  ? pattern_config_from_json(j.at("sparse_pattern"))
                                  : default_pattern;
    schedule.validate();
    return schedule;
}

CsrMask csr_from_json(const nlohmann::json& j) {
    CsrMask csr;
    csr.head_index = j.value("head_index", 0);
    csr.num_blocks = j.at("num_blocks").get<int>();
    csr.row_ptr = j.at("row_ptr").get<std::vector<int>>();
    csr.col_idx = j.at("col_idx").get<std::vector<int>>();
    csr.validate();
    return csr;
}

CliConfigFile load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config '" + path + "': " + e.what());
    }
    try {
        CliConfigFile file;
        file.pattern = pattern_config_from_json(j.contains("pattern") ? j.at("pattern") : j);
        if (j.contains("schedule"))
            file.schedule = layer_schedule_from_json(j.at("schedule"), file.pattern);
        if (j.contains("report")) {
            file.out = j.at("report").value("out", "");
            file.format = j.at("report").value("format", "");
        }
        return file;
    } catch (const json::exception& e) {
        throw std::runtime_error("config '" + path + "': " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error("config '" + path + "': " + e.what());
    }
}

std::uint64_t config_hash(const PatternConfig& config) {
    const std::string doc = to_json(config).dump();
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : doc) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

}  // namespace shardattn
