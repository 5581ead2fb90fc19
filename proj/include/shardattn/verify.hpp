// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "shardattn/pattern.hpp"

namespace shardattn {

/// One concrete violation of a structural rule. head is -1 when the rule is
/// a property of the whole head set rather than a single mask.
struct Witness {
    int head = -1;
    int query_block = -1;
    int key_block = -1;
    std::string rule;
};

struct CheckResult {
    bool ok = true;
    std::vector<Witness> witnesses;
};

/// Every causal pair (i, j <= i) must be attended by at least one head.
/// Brute-force over all pairs; a witness per uncovered pair.
/// Throws std::invalid_argument on an empty list or mismatched dimensions.
CheckResult check_union_coverage(const std::vector<HeadBlockMask>& masks);

/// At least two heads carry different shards. Throws on fewer than 2 masks.
bool check_heterogeneity(const std::vector<HeadBlockMask>& masks);

/// A mask is KV-cache efficient when every key block's attending query set
/// {i >= j : bits[i][j]} is a contiguous interval starting at i = j. Each
/// gap-then-resume yields a witness {head, resume row, key block}.
/// Throws std::invalid_argument on a non-causal mask.
CheckResult check_kv_cache_efficiency(const HeadBlockMask& mask);
CheckResult check_kv_cache_efficiency(const std::vector<HeadBlockMask>& masks);

struct MultiStrideResult {
    bool satisfied = true;
    bool vacuous = false;  // fewer than two segments, nothing to constrain
};

/// For each consecutive segment pair: the later stride must be a positive
/// multiple of the earlier, and every head's offset difference must be zero
/// or a positive multiple of the earlier stride.
MultiStrideResult check_multi_stride_constraints(const PatternConfig& config);

struct VerificationReport {
    bool union_complete = false;
    bool heterogeneous = false;
    bool kv_cache_efficient = false;
    std::vector<Witness> violations;

    bool all_ok() const { return union_complete && heterogeneous && kv_cache_efficient; }
};

/// Runs all three structural checks against the config's materialized masks.
/// Witnesses are merged deterministically (union first, then per head).
VerificationReport verify_pattern(const PatternConfig& config);

/// Replays a witness against the masks; true when the violation is real.
bool witness_confirms(const Witness& witness, const std::vector<HeadBlockMask>& masks);

}  // namespace shardattn
