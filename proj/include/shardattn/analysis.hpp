// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "shardattn/pattern.hpp"

namespace shardattn {

/// Dense-equivalent context per head: local_window + (seq_len - local_window)
/// / stride tokens. Arguments are in tokens. Throws when local_window is
/// outside [1, seq_len] or stride < 1.
double equivalent_context_length(double seq_len, double local_window, double stride);

/// seq_len / equivalent_context_length: the per-layer FLOPs reduction factor
/// against a baseline that attends the full sequence per token.
double analytic_flops_reduction(double seq_len, double local_window, double stride);

/// Reduction at the maximal stride (one stripe residue per head):
/// seq_len / (local_window + (seq_len - local_window) / num_heads).
double speedup_upper_bound(int num_heads, double seq_len, double local_window);

/// Multiply-add count of the two attention matmuls for one admitted block
/// pair: 4 * head_dim * block_size^2.
double flops_per_block_pair(int head_dim, int block_size);

struct FlopsReport {
    double dense_flops = 0.0;   // causal-dense block mask, same counting rule
    double sparse_flops = 0.0;  // summed over every head's admitted block pairs
    double reduction_factor = 0.0;
    double equivalent_context = 0.0;  // seq_len / reduction_factor, tokens
    std::vector<std::size_t> nnz_per_head;
};

/// Exact block-granular count for a config. Softmax FLOPs are excluded; only
/// the score and output matmuls are counted, on whole blocks.
FlopsReport exact_flops(const PatternConfig& config, int head_dim);

/// Decode-time cache bookkeeping for one head.
struct HeadCacheSchedule {
    int head_index = 0;
    /// Per key block: the last query block that attends it. A block may be
    /// dropped once decoding passes this row; the final block index means
    /// never evictable.
    std::vector<int> evict_after;
    /// Per decode step: retained tokens (generated blocks whose evict point
    /// has not passed; the in-progress block counts its generated tokens).
    std::vector<std::int64_t> occupancy;
    /// Per decode step: retained blocks the current query block does not
    /// attend — storage kept only for later rows.
    std::vector<int> dead_blocks;
    std::int64_t peak_tokens = 0;
    double mean_tokens = 0.0;
};

struct CacheSchedule {
    int block_size = 0;
    int num_blocks = 0;
    int total_tokens = 0;
    std::vector<HeadCacheSchedule> heads;
};

/// Steps through decode positions 0..total_tokens-1. A key block is retained
/// at step t when some query block at or after block(t) attends it.
CacheSchedule simulate_decode_cache(const PatternConfig& config, int total_tokens);

/// Percentage of KV cache saved versus dense attention: one minus the
/// retained-token fraction at the final decode step, averaged over heads and
/// layers (dense layers retain everything).
double kv_reduction(const LayerSchedule& schedule);

}  // namespace shardattn
