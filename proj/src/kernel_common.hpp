// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "shardattn/attention.hpp"

namespace shardattn::detail {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline int block_count(int seq_len, int block_size) {
    return (seq_len + block_size - 1) / block_size;
}

inline void check_shapes(const AttentionTensors& t, std::size_t num_masks, int mask_blocks,
                         int block_size) {
    if (t.num_heads < 1 || t.seq_len < 1 || t.head_dim < 1)
        throw std::invalid_argument("tensor dimensions must be positive");
    const std::size_t n = static_cast<std::size_t>(t.num_heads) * t.seq_len * t.head_dim;
    if (t.q.size() != n || t.k.size() != n || t.v.size() != n)
        throw std::invalid_argument("q/k/v sizes do not match [heads, seq, dim]");
    if (num_masks != static_cast<std::size_t>(t.num_heads))
        throw std::invalid_argument("one mask per head required");
    if (block_size < 1) throw std::invalid_argument("block_size must be positive");
    if (mask_blocks != block_count(t.seq_len, block_size))
        throw std::invalid_argument("mask block count does not match ceil(seq_len/block_size)");
}

inline void check_finite(const AttentionTensors& t) {
    for (float x : t.q)
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite entry in q");
    for (float x : t.k)
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite entry in k");
    for (float x : t.v)
        if (!std::isfinite(x)) throw std::invalid_argument("non-finite entry in v");
}

inline void prepare_outputs(AttentionTensors& t) {
    t.out.assign(static_cast<std::size_t>(t.num_heads) * t.seq_len * t.head_dim, 0.0f);
    t.lse.assign(static_cast<std::size_t>(t.num_heads) * t.seq_len, kNegInf);
}

inline double dot_full(const float* a, const float* b, int d) {
    double acc = 0.0;
    for (int x = 0; x < d; ++x) acc += static_cast<double>(a[x]) * b[x];
    return acc;
}

}  // namespace shardattn::detail
