// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#include "shardattn/pattern.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace shardattn {

int PatternConfig::num_blocks() const {
    return static_cast<int>((static_cast<long long>(seq_len) + block_size - 1) / block_size);
}

int PatternConfig::offset_for(std::size_t segment, int head) const {
    const StrideSegment& seg = stride_segments.at(segment);
    int raw;
    if (!seg.offsets.empty()) {
        if (seg.offsets.size() == static_cast<std::size_t>(num_heads)) {
            raw = seg.offsets[head];
        } else {
            raw = seg.offsets[group_of(head)];
        }
    } else {
        switch (offset_scheme) {
            case OffsetScheme::HeadModStride:
            default:
                raw = group_of(head);
                break;
        }
    }
    return raw % seg.stride;
}

void PatternConfig::validate() const {
    if (seq_len < 1) throw std::invalid_argument("seq_len must be positive");
    if (block_size < 1) throw std::invalid_argument("block_size must be positive");
    if (num_heads < 1) throw std::invalid_argument("num_heads must be positive");
    if (num_kv_heads < 0) throw std::invalid_argument("num_kv_heads must be positive");
    if (num_heads % kv_heads() != 0)
        throw std::invalid_argument("num_kv_heads must divide num_heads");
    if (local_blocks < 1) throw std::invalid_argument("local_blocks must be >= 1");
    if (local_stride < 1) throw std::invalid_argument("local_stride must be >= 1");

    const int blocks = num_blocks();
    int prev_end = local_blocks;
    for (std::size_t s = 0; s < stride_segments.size(); ++s) {
        const StrideSegment& seg = stride_segments[s];
        if (seg.stride < 1)
            throw std::invalid_argument("segment stride must be >= 1");
        if (seg.start_block_distance < local_blocks)
            throw std::invalid_argument("segment start must be >= local_blocks");
        if (seg.end_block_distance > blocks)
            throw std::invalid_argument("segment end must be <= num_blocks");
        if (seg.start_block_distance >= seg.end_block_distance)
            throw std::invalid_argument("segment range must be non-empty");
        if (seg.start_block_distance < prev_end && s > 0)
            throw std::invalid_argument("segments must be ordered and non-overlapping");
        prev_end = seg.end_block_distance;
        if (!seg.offsets.empty()) {
            if (seg.offsets.size() != static_cast<std::size_t>(num_heads) &&
                seg.offsets.size() != static_cast<std::size_t>(kv_heads()))
                throw std::invalid_argument(
                    "segment offsets must list one entry per head or per kv head");
            for (int o : seg.offsets)
                if (o < 0) throw std::invalid_argument("offsets must be non-negative");
            if (seg.offsets.size() == static_cast<std::size_t>(num_heads)) {
                // Grouped-query configs keep one shard per KV group.
                for (int h = 0; h < num_heads; ++h) {
                    const int lead = group_of(h) * heads_per_group();
                    if (seg.offsets[h] % seg.stride != seg.offsets[lead] % seg.stride)
                        throw std::invalid_argument(
                            "offsets must agree within each kv group");
                }
            }
        }
    }
}

HeadBlockMask::HeadBlockMask(int head_index, int num_blocks)
    : head_index_(head_index),
      num_blocks_(num_blocks),
      bits_(static_cast<std::size_t>(num_blocks) * num_blocks, 0) {}

bool HeadBlockMask::is_causal() const {
    for (int i = 0; i < num_blocks_; ++i)
        for (int j = i + 1; j < num_blocks_; ++j)
            if (at(i, j)) return false;
    return true;
}

bool HeadBlockMask::has_full_diagonal() const {
    for (int i = 0; i < num_blocks_; ++i)
        if (!at(i, i)) return false;
    return true;
}

std::size_t HeadBlockMask::popcount() const {
    return std::accumulate(bits_.begin(), bits_.end(), std::size_t{0});
}

std::vector<int> HeadBlockMask::row(int query_block) const {
    std::vector<int> cols;
    for (int j = 0; j < num_blocks_; ++j)
        if (at(query_block, j)) cols.push_back(j);
    return cols;
}

bool same_bits(const HeadBlockMask& a, const HeadBlockMask& b) {
    if (a.num_blocks() != b.num_blocks()) return false;
    for (int i = 0; i < a.num_blocks(); ++i)
        for (int j = 0; j < a.num_blocks(); ++j)
            if (a.at(i, j) != b.at(i, j)) return false;
    return true;
}

void LayerSchedule::validate() const {
    if (num_layers < 1) throw std::invalid_argument("num_layers must be positive");
    for (int id : dense_layer_ids)
        if (id < 0 || id >= num_layers)
            throw std::invalid_argument("dense layer id " + std::to_string(id) +
                                        " outside [0, num_layers)");
    sparse_pattern.validate();
}

HeadBlockMask build_head_mask(const PatternConfig& config, int head) {
    config.validate();
    if (head < 0 || head >= config.num_heads)
        throw std::invalid_argument("head index " + std::to_string(head) +
                                    " outside [0, num_heads)");

    const int blocks = config.num_blocks();
    std::vector<int> seg_offset(config.stride_segments.size());
    for (std::size_t s = 0; s < seg_offset.size(); ++s)
        seg_offset[s] = config.offset_for(s, head);

    HeadBlockMask mask(head, blocks);
    for (int i = 0; i < blocks; ++i) {
        for (int j = 0; j <= i; ++j) {
            const int dist = i - j;
            bool on = dist < config.local_blocks && dist % config.local_stride == 0;
            if (!on) {
                for (std::size_t s = 0; s < config.stride_segments.size(); ++s) {
                    const StrideSegment& seg = config.stride_segments[s];
                    if (dist < seg.start_block_distance || dist >= seg.end_block_distance)
                        continue;
                    const int r = j - seg_offset[s];
                    on = r >= 0 && r % seg.stride == 0;
                    break;  // segments are disjoint in distance
                }
            }
            if (on) mask.set(i, j, true);
        }
        mask.set(i, i, true);  // own block, keeps every softmax row non-empty
    }
    return mask;
}

std::vector<HeadBlockMask> build_all_masks(const PatternConfig& config) {
    config.validate();
    std::vector<HeadBlockMask> masks(config.num_heads);
#pragma omp parallel for schedule(static)
    for (int h = 0; h < config.num_heads; ++h) masks[h] = build_head_mask(config, h);
    return masks;
}

std::vector<std::vector<HeadBlockMask>> build_layer_masks(const LayerSchedule& schedule) {
    schedule.validate();
    const std::vector<HeadBlockMask> sparse = build_all_masks(schedule.sparse_pattern);
    std::vector<HeadBlockMask> dense;
    dense.reserve(sparse.size());
    for (std::size_t h = 0; h < sparse.size(); ++h)
        dense.push_back(dense_causal_mask(schedule.sparse_pattern.num_blocks(), static_cast<int>(h)));

    std::vector<std::vector<HeadBlockMask>> layers;
    layers.reserve(schedule.num_layers);
    for (int l = 0; l < schedule.num_layers; ++l)
        layers.push_back(schedule.dense_layer_ids.count(l) ? dense : sparse);
    return layers;
}

HeadBlockMask dense_causal_mask(int num_blocks, int head_index) {
    HeadBlockMask mask(head_index, num_blocks);
    for (int i = 0; i < num_blocks; ++i)
        for (int j = 0; j <= i; ++j) mask.set(i, j, true);
    return mask;
}

PatternConfig make_single_stride_config(int seq_len, int block_size, int num_heads,
                                        int local_blocks, int remote_stride,
                                        int local_stride) {
    PatternConfig cfg;
    cfg.seq_len = seq_len;
    cfg.block_size = block_size;
    cfg.num_heads = num_heads;
    cfg.num_kv_heads = num_heads;
    cfg.local_blocks = local_blocks;
    cfg.local_stride = local_stride;
    if (local_blocks < cfg.num_blocks())
        cfg.stride_segments.push_back({local_blocks, cfg.num_blocks(), remote_stride, {}});
    cfg.validate();
    return cfg;
}

PatternConfig make_multi_stride_config(int seq_len, int block_size, int num_heads,
                                       int local_blocks, int mid_block_distance,
                                       int stride1, int stride2) {
    PatternConfig cfg;
    cfg.seq_len = seq_len;
    cfg.block_size = block_size;
    cfg.num_heads = num_heads;
    cfg.num_kv_heads = num_heads;
    cfg.local_blocks = local_blocks;
    cfg.stride_segments.push_back({local_blocks, mid_block_distance, stride1, {}});
    cfg.stride_segments.push_back({mid_block_distance, cfg.num_blocks(), stride2, {}});
    cfg.validate();
    return cfg;
}

PatternConfig make_sliding_window_config(int seq_len, int block_size, int num_heads,
                                         int window_blocks) {
    PatternConfig cfg;
    cfg.seq_len = seq_len;
    cfg.block_size = block_size;
    cfg.num_heads = num_heads;
    cfg.num_kv_heads = num_heads;
    cfg.local_blocks = window_blocks;
    cfg.validate();
    return cfg;
}

PatternConfig make_dense_config(int seq_len, int block_size, int num_heads) {
    return make_single_stride_config(seq_len, block_size, num_heads,
                                     /*local_blocks=*/1, /*remote_stride=*/1);
}

}  // namespace shardattn
