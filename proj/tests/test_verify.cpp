// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "shardattn/pattern.hpp"
#include "shardattn/verify.hpp"

using namespace shardattn;

namespace {

PatternConfig stride_config(int blocks, int heads, int local, int remote_stride,
                            int local_stride = 1) {
    return make_single_stride_config(blocks, 1, heads, local, remote_stride, local_stride);
}

}  // namespace

TEST_CASE("union holds when offsets cover every stripe residue") {
    // H=4 over stride 3: offsets {0,1,2,0}.
    const CheckResult r = check_union_coverage(build_all_masks(stride_config(8, 4, 2, 3)));
    CHECK(r.ok);
    CHECK(r.witnesses.empty());
}

TEST_CASE("union fails when a residue is missed and the witness replays") {
    const std::vector<HeadBlockMask> masks = build_all_masks(stride_config(16, 4, 1, 5));
    const CheckResult r = check_union_coverage(masks);
    REQUIRE_FALSE(r.ok);
    REQUIRE_FALSE(r.witnesses.empty());
    bool saw_stripe4 = false;
    for (const Witness& w : r.witnesses) {
        CHECK(witness_confirms(w, masks));
        if (w.key_block % 5 == 4) saw_stripe4 = true;
    }
    CHECK(saw_stripe4);  // offsets {0,1,2,3} leave residue 4 uncovered
}

TEST_CASE("a single dense head covers everything") {
    CHECK(check_union_coverage({dense_causal_mask(8)}).ok);
}

TEST_CASE("union coverage rejects bad inputs") {
    CHECK_THROWS_AS(check_union_coverage({}), std::invalid_argument);
    CHECK_THROWS_AS(check_union_coverage({dense_causal_mask(4), dense_causal_mask(5)}),
                    std::invalid_argument);
}

TEST_CASE("heterogeneity") {
    CHECK(check_heterogeneity(build_all_masks(stride_config(8, 4, 2, 3))));
    CHECK_FALSE(check_heterogeneity({dense_causal_mask(8, 0), dense_causal_mask(8, 1)}));
    CHECK_FALSE(check_heterogeneity(build_all_masks(stride_config(8, 4, 2, 1))));
    CHECK_THROWS_AS(check_heterogeneity({dense_causal_mask(8)}), std::invalid_argument);
}

TEST_CASE("unit local stride is cache efficient for any remote stride") {
    for (int v : {1, 2, 3, 5})
        for (int local : {1, 2, 4}) {
            const std::vector<HeadBlockMask> masks =
                build_all_masks(stride_config(16, 4, local, v));
            CHECK(check_kv_cache_efficiency(masks).ok);
        }
}

TEST_CASE("local stride 2 breaks cache efficiency with a replayable witness") {
    const std::vector<HeadBlockMask> masks =
        build_all_masks(stride_config(8, 4, 3, 3, /*local_stride=*/2));
    const CheckResult r = check_kv_cache_efficiency(masks);
    REQUIRE_FALSE(r.ok);
    REQUIRE_FALSE(r.witnesses.empty());
    for (const Witness& w : r.witnesses) CHECK(witness_confirms(w, masks));
}

TEST_CASE("dense causal masks are cache efficient") {
    CHECK(check_kv_cache_efficiency(dense_causal_mask(12)).ok);
}

TEST_CASE("efficiency check rejects a non-causal mask") {
    HeadBlockMask bad = dense_causal_mask(4);
    bad.set(0, 3, true);
    CHECK_THROWS_AS(check_kv_cache_efficiency(bad), std::invalid_argument);
}

TEST_CASE("multi-stride constraints") {
    SUBCASE("stride doubling with aligned offsets satisfies the constraint") {
        const PatternConfig cfg = make_multi_stride_config(32, 1, 8, 1, 8, 3, 6);
        const MultiStrideResult r = check_multi_stride_constraints(cfg);
        CHECK(r.satisfied);
        CHECK_FALSE(r.vacuous);
    }
    SUBCASE("non-multiple strides violate it") {
        const PatternConfig cfg = make_multi_stride_config(32, 1, 8, 1, 8, 3, 4);
        CHECK_FALSE(check_multi_stride_constraints(cfg).satisfied);
    }
    SUBCASE("equal strides and offsets are fine") {
        const PatternConfig cfg = make_multi_stride_config(32, 1, 8, 1, 8, 3, 3);
        CHECK(check_multi_stride_constraints(cfg).satisfied);
    }
    SUBCASE("offset differences must be non-negative stride multiples") {
        PatternConfig cfg = make_multi_stride_config(32, 1, 2, 1, 8, 3, 6);
        cfg.stride_segments[0].offsets = {2, 2};
        cfg.stride_segments[1].offsets = {1, 1};  // difference -1
        CHECK_FALSE(check_multi_stride_constraints(cfg).satisfied);
    }
    SUBCASE("single segment is vacuous") {
        const MultiStrideResult r =
            check_multi_stride_constraints(stride_config(16, 4, 1, 3));
        CHECK(r.satisfied);
        CHECK(r.vacuous);
    }
}

TEST_CASE("constraint-satisfying tiled multi-stride configs are cache efficient") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 80; ++trial) {
        const int blocks = 8 + rng() % 25;  // up to 32
        const int heads = 2 + rng() % 7;    // up to 8
        const int local = 1 + rng() % 3;
        const int mid = local + 1 + rng() % (blocks - local - 1);
        const int v1 = 1 + rng() % 4;
        const int v2 = v1 * (1 + rng() % 3);
        const PatternConfig cfg =
            make_multi_stride_config(blocks, 1, heads, local, mid, v1, v2);
        REQUIRE(check_multi_stride_constraints(cfg).satisfied);
        for (const HeadBlockMask& mask : build_all_masks(cfg))
            CHECK(check_kv_cache_efficiency(mask).ok);
    }
}

TEST_CASE("union coverage equals the residue-enumeration prediction") {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 80; ++trial) {
        const int blocks = 16 + rng() % 17;  // 16..32
        const int heads = 2 + rng() % 7;
        const int local = 1 + rng() % 3;
        PatternConfig cfg;
        const bool two_segments = rng() % 2 == 0;
        if (two_segments) {
            const int mid = local + 1 + rng() % (blocks / 2 - local);
            cfg = make_multi_stride_config(blocks, 1, heads, local, mid, 1 + rng() % 6,
                                           1 + rng() % 6);
        } else {
            cfg = make_single_stride_config(blocks, 1, heads, local, 1 + rng() % 6);
        }
        // Default offsets are h mod v, so residues are covered iff v <= H.
        bool predicted = true;
        for (const StrideSegment& seg : cfg.stride_segments)
            predicted = predicted && seg.stride <= heads;
        CHECK(check_union_coverage(build_all_masks(cfg)).ok == predicted);
    }
}

TEST_CASE("verify_pattern merges the three checks deterministically") {
    const VerificationReport good = verify_pattern(stride_config(16, 4, 1, 3));
    CHECK(good.all_ok());
    CHECK(good.violations.empty());

    const VerificationReport bad = verify_pattern(stride_config(16, 4, 1, 5));
    CHECK_FALSE(bad.union_complete);
    CHECK(bad.heterogeneous);
    CHECK(bad.kv_cache_efficient);
    REQUIRE_FALSE(bad.violations.empty());
    CHECK(bad.violations.front().rule == "union");

    const VerificationReport homo = verify_pattern(stride_config(16, 4, 1, 1));
    CHECK_FALSE(homo.heterogeneous);
    REQUIRE(homo.violations.size() == 1);
    CHECK(homo.violations.front().rule == "heterogeneity");
    CHECK(witness_confirms(homo.violations.front(),
                           build_all_masks(stride_config(16, 4, 1, 1))));
}
