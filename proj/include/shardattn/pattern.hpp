// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <vector>

namespace shardattn {

/// One strided band of remote context. A query block q attends a key block k
/// through this segment when the block distance q - k lies in
/// [start_block_distance, end_block_distance) and k sits on the head's
/// stripe: k - o_h is zero or a positive multiple of `stride`.
struct StrideSegment {
    int start_block_distance = 0;
    int end_block_distance = 0;
    int stride = 1;
    /// Explicit per-head offsets o_h. May hold one entry per head or one per
    /// KV group; offsets are normalized modulo `stride` at use. Empty means
    /// the config's offset_scheme decides.
    std::vector<int> offsets;
};

/// Rule deriving the stripe offset o_h when a segment has no explicit list.
/// HeadModStride: o_h = (KV group index of h) mod stride, so grouped-query
/// configs stay homogeneous within each group.
enum class OffsetScheme {
    HeadModStride,
};

/// Declarative sharding policy for one set of attention heads: a local
/// window of `local_blocks` (sub-strided by `local_stride`) plus strided
/// remote segments with per-head stripe offsets.
struct PatternConfig {
    int seq_len = 0;       // N, tokens
    int block_size = 1;    // S, tokens per block
    int num_heads = 1;     // H
    int num_kv_heads = 0;  // 0 means num_heads (plain multi-head attention)
    int local_blocks = 1;  // N_l
    int local_stride = 1;  // v_l; distance 0 is always attended
    std::vector<StrideSegment> stride_segments;
    OffsetScheme offset_scheme = OffsetScheme::HeadModStride;

    int num_blocks() const;  // B = ceil(N / S)
    int kv_heads() const { return num_kv_heads > 0 ? num_kv_heads : num_heads; }
    int heads_per_group() const { return num_heads / kv_heads(); }
    int group_of(int head) const { return head / heads_per_group(); }

    /// Resolved stripe offset for (segment, head), normalized to [0, stride).
    int offset_for(std::size_t segment, int head) const;

    /// Throws std::invalid_argument on any violated invariant: non-positive
    /// dims, kv_heads not dividing num_heads, unordered or overlapping
    /// segments, segment ranges outside [local_blocks, num_blocks), strides
    /// < 1, negative offsets, or offsets that differ within a KV group.
    void validate() const;
};

/// Causal B x B boolean block mask for one head; row = query block,
/// column = key block. The diagonal is always set.
class HeadBlockMask {
public:
    HeadBlockMask() = default;
    HeadBlockMask(int head_index, int num_blocks);

    int head_index() const { return head_index_; }
    int num_blocks() const { return num_blocks_; }

    bool at(int query_block, int key_block) const {
        return bits_[static_cast<std::size_t>(query_block) * num_blocks_ + key_block] != 0;
    }
    void set(int query_block, int key_block, bool value) {
        bits_[static_cast<std::size_t>(query_block) * num_blocks_ + key_block] = value ? 1 : 0;
    }

    bool is_causal() const;
    bool has_full_diagonal() const;
    std::size_t popcount() const;

    /// Key blocks attended by one query block, ascending.
    std::vector<int> row(int query_block) const;

    bool operator==(const HeadBlockMask&) const = default;

private:
    int head_index_ = 0;
    int num_blocks_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// True when the two masks encode the same shard, ignoring head identity.
bool same_bits(const HeadBlockMask& a, const HeadBlockMask& b);

/// Per-layer plan: listed layers run dense, the rest use sparse_pattern.
struct LayerSchedule {
    int num_layers = 0;
    std::set<int> dense_layer_ids;
    PatternConfig sparse_pattern;

    void validate() const;
};

/// Materializes the mask for one head:
///   bits[i][j] = 1 iff j <= i and either
///     (i - j < local_blocks and (i - j) mod local_stride == 0), or
///     some segment s has i - j in [s.start, s.end) with
///     j - o_h(s) >= 0 and (j - o_h(s)) mod s.stride == 0.
/// The diagonal is forced on. Heads in the same KV group get identical bits.
HeadBlockMask build_head_mask(const PatternConfig& config, int head);

/// All heads' masks, indexed by head.
std::vector<HeadBlockMask> build_all_masks(const PatternConfig& config);

/// Per-layer masks: dense layers get the full causal mask for every head.
std::vector<std::vector<HeadBlockMask>> build_layer_masks(const LayerSchedule& schedule);

HeadBlockMask dense_causal_mask(int num_blocks, int head_index = 0);

// Config factories for the common policies.
PatternConfig make_single_stride_config(int seq_len, int block_size, int num_heads,
                                        int local_blocks, int remote_stride,
                                        int local_stride = 1);
/// Two contiguous remote bands: [local, mid) with stride1, [mid, B) with stride2.
PatternConfig make_multi_stride_config(int seq_len, int block_size, int num_heads,
                                       int local_blocks, int mid_block_distance,
                                       int stride1, int stride2);
PatternConfig make_sliding_window_config(int seq_len, int block_size, int num_heads,
                                         int window_blocks);
PatternConfig make_dense_config(int seq_len, int block_size, int num_heads);

}  // namespace shardattn
