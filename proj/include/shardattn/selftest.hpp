// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace shardattn {

struct SelftestOptions {
    std::uint64_t seed = 42;
    std::vector<int> seq_lens = {16, 64, 128, 256};
    /// Test hook: drops one remote key block from one head's shard list
    /// before the streaming runs, so the oracle comparison must fail.
    bool inject_corruption = false;
};

struct SelftestReport {
    bool ok = false;
    int instances = 0;
    int comparisons = 0;
    int failures = 0;
};

/// Runs the oracle-equivalence matrix: randomized q/k/v over a grid of
/// sequence lengths, block sizes, head dims, head counts and strides;
/// per instance the serial reference, the dense oracle, the streaming kernel
/// and the D-split kernel must agree. Writes one CSV row per comparison
/// (keyed by config hash and tolerance) to `csv`. Deterministic in `seed`.
SelftestReport run_selftest(const SelftestOptions& options, std::ostream& csv);

/// Largest elementwise |a - b| / max(|a|, |b|) over two equally-sized arrays.
double max_relative_error(const std::vector<float>& a, const std::vector<float>& b);
double max_relative_error(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace shardattn
