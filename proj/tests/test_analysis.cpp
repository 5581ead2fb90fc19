// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "shardattn/analysis.hpp"
#include "shardattn/pattern.hpp"
#include "shardattn/verify.hpp"

using namespace shardattn;

namespace {

LayerSchedule table_schedule(const PatternConfig& pattern, std::set<int> dense_ids = {}) {
    LayerSchedule schedule;
    schedule.num_layers = 24;
    schedule.dense_layer_ids = std::move(dense_ids);
    schedule.sparse_pattern = pattern;
    return schedule;
}

}  // namespace

TEST_CASE("equivalent context length and reduction factors") {
    CHECK(equivalent_context_length(8192, 64, 16) == doctest::Approx(572.0).epsilon(1e-12));
    CHECK(analytic_flops_reduction(8192, 64, 16) == doctest::Approx(14.32).epsilon(5e-4));
    CHECK(equivalent_context_length(8192, 64, 64) == doctest::Approx(191.0).epsilon(1e-12));
    CHECK(analytic_flops_reduction(8192, 64, 64) == doctest::Approx(42.89).epsilon(5e-4));
    CHECK(equivalent_context_length(4096, 64, 1) == doctest::Approx(4096.0));
    CHECK(analytic_flops_reduction(4096, 64, 1) == doctest::Approx(1.0));

    CHECK_THROWS_AS(equivalent_context_length(64, 128, 4), std::invalid_argument);
    CHECK_THROWS_AS(equivalent_context_length(64, 16, 0), std::invalid_argument);
}

TEST_CASE("speedup upper bound") {
    CHECK(speedup_upper_bound(64, 8192, 64) == doctest::Approx(42.89).epsilon(5e-4));
    CHECK(speedup_upper_bound(1, 8192, 64) == doctest::Approx(1.0));
    double prev = 0.0;
    for (int heads : {2, 4, 8, 16, 32, 64}) {
        const double bound = speedup_upper_bound(heads, 8192, 64);
        CHECK(bound > prev);
        prev = bound;
    }
}

TEST_CASE("exact flops: dense config reduces by exactly 1") {
    const FlopsReport report = exact_flops(make_dense_config(1024, 64, 4), 64);
    CHECK(report.reduction_factor == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(report.dense_flops == report.sparse_flops);
}

TEST_CASE("exact flops tracks the closed form within 10% at the quoted scale") {
    const PatternConfig cfg = make_single_stride_config(8192, 64, 16, 1, 16);
    const FlopsReport report = exact_flops(cfg, 64);
    const double analytic = analytic_flops_reduction(8192, 64, 16);
    CHECK(std::abs(1.0 - report.reduction_factor / analytic) <= 0.10);
}

TEST_CASE("sparse flops are linear in the admitted block count") {
    const double unit = flops_per_block_pair(64, 64);
    CHECK(unit == doctest::Approx(4.0 * 64 * 64 * 64));
    // Doubling nnz doubles the count exactly: counts are pure multiples.
    CHECK(2.0 * unit * 1000 == unit * 2000);
}

TEST_CASE("exact and analytic reductions converge as the grid grows") {
    double prev_gap = 1e9;
    for (int blocks : {64, 128, 256, 512}) {
        const int seq_len = blocks * 64;
        const PatternConfig cfg = make_single_stride_config(seq_len, 64, 8, 1, 8);
        const double exact = exact_flops(cfg, 64).reduction_factor;
        const double analytic = analytic_flops_reduction(seq_len, 64, 8);
        const double gap = std::abs(1.0 - exact / analytic);
        CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}

TEST_CASE("kv reduction reproduces the reported schedule figures") {
    const PatternConfig l1v15 = make_single_stride_config(8192, 64, 16, 1, 15);
    const PatternConfig l8v15 = make_single_stride_config(8192, 64, 16, 8, 15);
    const PatternConfig swa = make_sliding_window_config(8192, 64, 16, 9);

    CHECK(kv_reduction(table_schedule(l1v15)) == doctest::Approx(92.70).epsilon(0.0055));
    CHECK(kv_reduction(table_schedule(l1v15, {0, 1})) == doctest::Approx(85.0).epsilon(0.0059));
    CHECK(kv_reduction(table_schedule(l8v15)) == doctest::Approx(87.5).epsilon(0.0058));
    CHECK(kv_reduction(table_schedule(l8v15, {0, 1})) == doctest::Approx(80.4).epsilon(0.0063));
    CHECK(kv_reduction(table_schedule(swa)) == doctest::Approx(92.9).epsilon(0.0054));
    CHECK(kv_reduction(table_schedule(swa, {0, 1})) == doctest::Approx(85.4).epsilon(0.0059));
}

TEST_CASE("kv reduction of a dense model is zero and mixes linearly") {
    const PatternConfig dense = make_dense_config(512, 64, 4);
    LayerSchedule schedule = table_schedule(dense);
    for (int l = 0; l < 24; ++l) schedule.dense_layer_ids.insert(l);
    CHECK(kv_reduction(schedule) == doctest::Approx(0.0).epsilon(1e-12));

    const PatternConfig sparse = make_single_stride_config(512, 64, 4, 1, 4);
    const double all_sparse = kv_reduction(table_schedule(sparse));
    for (int dense_layers : {1, 2, 6, 12}) {
        std::set<int> ids;
        for (int l = 0; l < dense_layers; ++l) ids.insert(l);
        const double mixed = kv_reduction(table_schedule(sparse, std::move(ids)));
        CHECK(mixed ==
              doctest::Approx(all_sparse * (24 - dense_layers) / 24.0).epsilon(1e-9));
    }
}

TEST_CASE("dense decode cache grows one token per step and never evicts") {
    const PatternConfig cfg = make_dense_config(256, 16, 2);
    const CacheSchedule cache = simulate_decode_cache(cfg, 256);
    for (const HeadCacheSchedule& head : cache.heads) {
        for (int t = 0; t < 256; ++t) CHECK(head.occupancy[t] == t + 1);
        for (int j = 0; j < cache.num_blocks; ++j)
            CHECK(head.evict_after[j] == cache.num_blocks - 1);
        CHECK(head.peak_tokens == 256);
    }
}

TEST_CASE("sliding window reaches a steady state of exactly the window size") {
    const PatternConfig cfg = make_sliding_window_config(8192, 64, 2, 9);
    const CacheSchedule cache = simulate_decode_cache(cfg, 8192);
    for (const HeadCacheSchedule& head : cache.heads)
        CHECK(head.occupancy.back() == 576);
}

TEST_CASE("strided steady-state occupancy matches the stripe count") {
    const PatternConfig cfg = make_single_stride_config(8192, 64, 16, 1, 15);
    const CacheSchedule cache = simulate_decode_cache(cfg, 8192);
    const int blocks = cfg.num_blocks();
    const int expected_blocks = 1 + (blocks - 1 + 14) / 15;  // local + ceil(remote/15)
    double mean_fraction = 0.0;
    for (const HeadCacheSchedule& head : cache.heads) {
        const auto occupied_blocks = head.occupancy.back() / 64;
        CHECK(std::abs(static_cast<int>(occupied_blocks) - expected_blocks) <= 1);
        mean_fraction += static_cast<double>(head.occupancy.back()) / 8192;
    }
    mean_fraction /= cache.heads.size();
    CHECK(mean_fraction > 0.072);
    CHECK(mean_fraction < 0.075);
}

TEST_CASE("efficient shardings carry no dead storage; inefficient ones do") {
    const PatternConfig efficient = make_single_stride_config(512, 32, 4, 2, 3);
    const CacheSchedule good = simulate_decode_cache(efficient, 512);
    const std::vector<HeadBlockMask> masks = build_all_masks(efficient);
    for (const HeadCacheSchedule& head : good.heads) {
        for (int dead : head.dead_blocks) CHECK(dead == 0);
        // Retained set at each step is exactly the current row of the mask.
        const HeadBlockMask& mask = masks[head.head_index];
        for (int t = 0; t < good.total_tokens; ++t) {
            const int bt = t / good.block_size;
            for (int j = 0; j <= bt; ++j)
                CHECK((head.evict_after[j] >= bt) == mask.at(bt, j));
        }
    }

    PatternConfig skipping = make_single_stride_config(512, 32, 4, 3, 3, /*local_stride=*/2);
    REQUIRE_FALSE(check_kv_cache_efficiency(build_all_masks(skipping)).ok);
    const CacheSchedule bad = simulate_decode_cache(skipping, 512);
    int total_dead = 0;
    for (const HeadCacheSchedule& head : bad.heads)
        for (int dead : head.dead_blocks) total_dead += dead;
    CHECK(total_dead > 0);
}

TEST_CASE("decode simulation rejects out-of-range token counts") {
    const PatternConfig cfg = make_dense_config(64, 16, 1);
    CHECK_THROWS_AS(simulate_decode_cache(cfg, 0), std::invalid_argument);
    CHECK_THROWS_AS(simulate_decode_cache(cfg, 65), std::invalid_argument);
}
