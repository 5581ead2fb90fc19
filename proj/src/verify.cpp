// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#include "shardattn/verify.hpp"

#include <stdexcept>

namespace shardattn {

namespace {

constexpr const char* kUnionRule = "union";
constexpr const char* kHeterogeneityRule = "heterogeneity";
constexpr const char* kEfficiencyRule = "kv_cache_efficiency";

void require_same_dims(const std::vector<HeadBlockMask>& masks) {
    if (masks.empty()) throw std::invalid_argument("mask list is empty");
    for (const HeadBlockMask& m : masks)
        if (m.num_blocks() != masks.front().num_blocks())
            throw std::invalid_argument("masks differ in block count");
}

}  // namespace

CheckResult check_union_coverage(const std::vector<HeadBlockMask>& masks) {
    require_same_dims(masks);
    const int blocks = masks.front().num_blocks();
    CheckResult result;
    for (int i = 0; i < blocks; ++i) {
        for (int j = 0; j <= i; ++j) {
            bool covered = false;
            for (const HeadBlockMask& m : masks)
                if (m.at(i, j)) {
                    covered = true;
                    break;
                }
            if (!covered) result.witnesses.push_back({-1, i, j, kUnionRule});
        }
    }
    result.ok = result.witnesses.empty();
    return result;
}

bool check_heterogeneity(const std::vector<HeadBlockMask>& masks) {
    if (masks.size() < 2)
        throw std::invalid_argument("heterogeneity check needs at least 2 masks");
    require_same_dims(masks);
    for (std::size_t a = 1; a < masks.size(); ++a)
        if (!same_bits(masks[0], masks[a])) return true;
    return false;
}

CheckResult check_kv_cache_efficiency(const HeadBlockMask& mask) {
    if (!mask.is_causal())
        throw std::invalid_argument("efficiency check requires a causal mask");
    const int blocks = mask.num_blocks();
    CheckResult result;
    // Column scan: once a key block goes unattended it must stay unattended.
    for (int j = 0; j < blocks; ++j) {
        bool gap_seen = false;
        for (int i = j; i < blocks; ++i) {
            if (!mask.at(i, j)) {
                gap_seen = true;
            } else if (gap_seen) {
                result.witnesses.push_back({mask.head_index(), i, j, kEfficiencyRule});
                gap_seen = false;  // report each resume once
            }
        }
    }
    result.ok = result.witnesses.empty();
    return result;
}

CheckResult check_kv_cache_efficiency(const std::vector<HeadBlockMask>& masks) {
    require_same_dims(masks);
    CheckResult merged;
    for (const HeadBlockMask& m : masks) {
        CheckResult r = check_kv_cache_efficiency(m);
        merged.witnesses.insert(merged.witnesses.end(), r.witnesses.begin(), r.witnesses.end());
    }
    merged.ok = merged.witnesses.empty();
    return merged;
}

MultiStrideResult check_multi_stride_constraints(const PatternConfig& config) {
    config.validate();
    if (config.stride_segments.size() < 2) return {true, true};
    for (std::size_t s = 0; s + 1 < config.stride_segments.size(); ++s) {
        const int v_lo = config.stride_segments[s].stride;
        const int v_hi = config.stride_segments[s + 1].stride;
        if (v_hi <= 0 || v_hi % v_lo != 0) return {false, false};
        for (int h = 0; h < config.num_heads; ++h) {
            const int diff = config.offset_for(s + 1, h) - config.offset_for(s, h);
            if (diff < 0 || diff % v_lo != 0) return {false, false};
        }
    }
    return {true, false};
}

VerificationReport verify_pattern(const PatternConfig& config) {
    const std::vector<HeadBlockMask> masks = build_all_masks(config);
    VerificationReport report;

    CheckResult coverage = check_union_coverage(masks);
    report.union_complete = coverage.ok;
    report.violations = std::move(coverage.witnesses);

    report.heterogeneous = check_heterogeneity(masks);
    if (!report.heterogeneous)
        report.violations.push_back({-1, -1, -1, kHeterogeneityRule});

    CheckResult efficiency = check_kv_cache_efficiency(masks);
    report.kv_cache_efficient = efficiency.ok;
    report.violations.insert(report.violations.end(), efficiency.witnesses.begin(),
                             efficiency.witnesses.end());
    return report;
}

bool witness_confirms(const Witness& witness, const std::vector<HeadBlockMask>& masks) {
    if (witness.rule == kUnionRule) {
        for (const HeadBlockMask& m : masks)
            if (m.at(witness.query_block, witness.key_block)) return false;
        return true;
    }
    if (witness.rule == kEfficiencyRule) {
        if (witness.head < 0 || witness.head >= static_cast<int>(masks.size())) return false;
        const HeadBlockMask& m = masks[witness.head];
        if (!m.at(witness.query_block, witness.key_block)) return false;
        for (int i = witness.key_block; i < witness.query_block; ++i)
            if (!m.at(i, witness.key_block)) return true;  // the gap the resume follows
        return false;
    }
    if (witness.rule == kHeterogeneityRule) {
        for (std::size_t a = 1; a < masks.size(); ++a)
            if (!same_bits(masks[0], masks[a])) return false;
        return true;
    }
    return false;
}

}  // namespace shardattn
