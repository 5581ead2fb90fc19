// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "shardattn/csr.hpp"
#include "shardattn/serialize.hpp"
#include "shardattn/verify.hpp"

using namespace shardattn;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name, const std::string& body)
        : path("serialize_test_" + name) {
        std::ofstream out(path);
        out << body;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("pattern config round-trips through its document form") {
    PatternConfig cfg = make_multi_stride_config(256, 16, 8, 2, 8, 3, 6);
    cfg.num_kv_heads = 4;
    cfg.stride_segments[0].offsets = {0, 1, 2, 0};
    cfg.validate();

    const nlohmann::json doc = to_json(cfg);
    for (const char* key : {"seq_len", "block_size", "num_heads", "num_kv_heads",
                            "local_blocks", "local_stride", "stride_segments",
                            "offset_scheme"})
        CHECK(doc.contains(key));
    CHECK(doc["stride_segments"][0].contains("start_block_distance"));
    CHECK(doc["stride_segments"][0].contains("end_block_distance"));
    CHECK(doc["stride_segments"][0].contains("stride"));

    const PatternConfig back = pattern_config_from_json(doc);
    CHECK(to_json(back) == doc);
    CHECK(config_hash(back) == config_hash(cfg));
}

TEST_CASE("layer schedule round-trips and inherits the pattern when omitted") {
    LayerSchedule schedule;
    schedule.num_layers = 24;
    schedule.dense_layer_ids = {0, 1};
    schedule.sparse_pattern = make_single_stride_config(512, 64, 4, 1, 4);

    const nlohmann::json doc = to_json(schedule);
    const LayerSchedule back = layer_schedule_from_json(doc, schedule.sparse_pattern);
    CHECK(back.num_layers == 24);
    CHECK(back.dense_layer_ids == std::set<int>{0, 1});
    CHECK(to_json(back.sparse_pattern) == to_json(schedule.sparse_pattern));

    const LayerSchedule inherited = layer_schedule_from_json(
        nlohmann::json{{"num_layers", 8}}, schedule.sparse_pattern);
    CHECK(inherited.dense_layer_ids.empty());
    CHECK(to_json(inherited.sparse_pattern) == to_json(schedule.sparse_pattern));
}

TEST_CASE("verification report serializes flags and witnesses") {
    const VerificationReport report = verify_pattern(make_single_stride_config(16, 1, 4, 1, 5));
    const nlohmann::json doc = to_json(report);
    CHECK(doc["union_complete"] == false);
    CHECK(doc["heterogeneous"] == true);
    CHECK(doc["kv_cache_efficient"] == true);
    REQUIRE(doc["violations"].is_array());
    REQUIRE_FALSE(doc["violations"].empty());
    const nlohmann::json& w = doc["violations"][0];
    CHECK(w.contains("head"));
    CHECK(w.contains("query_block"));
    CHECK(w.contains("key_block"));
    CHECK(w["rule"] == "union");
}

TEST_CASE("csr masks round-trip through the document form") {
    const CsrMask csr = to_csr(build_head_mask(make_single_stride_config(8, 1, 4, 2, 3), 1));
    const CsrMask back = csr_from_json(to_json(csr));
    CHECK(back.row_ptr == csr.row_ptr);
    CHECK(back.col_idx == csr.col_idx);
    CHECK(back.head_index == csr.head_index);
}

TEST_CASE("config files load with and without a schedule") {
    TempFile with_schedule("a.json", R"({
        "pattern": {"seq_len": 512, "block_size": 64, "num_heads": 4,
                    "local_blocks": 1,
                    "stride_segments": [{"start_block_distance": 1,
                                         "end_block_distance": 8, "stride": 2}]},
        "schedule": {"num_layers": 12, "dense_layer_ids": [0]},
        "report": {"out": "r.csv", "format": "csv"}
    })");
    const CliConfigFile file = load_config_file(with_schedule.path);
    CHECK(file.pattern.num_heads == 4);
    CHECK(file.pattern.kv_heads() == 4);
    REQUIRE(file.schedule.has_value());
    CHECK(file.schedule->num_layers == 12);
    CHECK(to_json(file.schedule->sparse_pattern) == to_json(file.pattern));
    CHECK(file.out == "r.csv");
    CHECK(file.format == "csv");

    TempFile bare("b.json", R"({"seq_len": 64, "block_size": 8, "num_heads": 2})");
    const CliConfigFile plain = load_config_file(bare.path);
    CHECK(plain.pattern.num_blocks() == 8);
    CHECK_FALSE(plain.schedule.has_value());
}

TEST_CASE("bad config files carry a pointed diagnostic") {
    TempFile missing("c.json", R"({"pattern": {"block_size": 64, "num_heads": 4}})");
    CHECK_THROWS_WITH_AS(load_config_file(missing.path),
                         doctest::Contains("seq_len"), std::runtime_error);

    TempFile invalid("d.json", R"({"seq_len": 64, "block_size": 8, "num_heads": 4,
        "stride_segments": [{"start_block_distance": 1, "end_block_distance": 8,
                             "stride": 0}]})");
    CHECK_THROWS_WITH_AS(load_config_file(invalid.path),
                         doctest::Contains("stride"), std::runtime_error);

    TempFile scheme("e.json", R"({"seq_len": 64, "block_size": 8, "num_heads": 4,
        "offset_scheme": "mystery"})");
    CHECK_THROWS_WITH_AS(load_config_file(scheme.path),
                         doctest::Contains("offset_scheme"), std::runtime_error);

    CHECK_THROWS_AS(load_config_file("does_not_exist.json"), std::runtime_error);
}

TEST_CASE("config hash is stable and content-sensitive") {
    const PatternConfig a = make_single_stride_config(512, 64, 4, 1, 4);
    PatternConfig b = a;
    CHECK(config_hash(a) == config_hash(b));
    b.stride_segments[0].stride = 5;
    CHECK(config_hash(a) != config_hash(b));
}
