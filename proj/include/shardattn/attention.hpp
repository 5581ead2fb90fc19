// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "shardattn/csr.hpp"
#include "shardattn/pattern.hpp"

namespace shardattn {

/// Q/K/V/output activations for a multi-head attention call, all shaped
/// [num_heads, seq_len, head_dim] row-major. Storage is float; every kernel
/// accumulates scores, normalizers and outputs in double.
struct AttentionTensors {
    int num_heads = 0;
    int seq_len = 0;
    int head_dim = 0;
    double scale = 0.0;  // applied to q.k scores; default 1/sqrt(head_dim)

    std::vector<float> q, k, v;
    std::vector<float> out;
    std::vector<double> lse;  // per row: log sum of exp(scale * q.k) over attended keys

    static AttentionTensors zeros(int num_heads, int seq_len, int head_dim);
    static AttentionTensors random(int num_heads, int seq_len, int head_dim,
                                   std::uint64_t seed);

    std::size_t idx(int head, int token, int component) const {
        return (static_cast<std::size_t>(head) * seq_len + token) * head_dim + component;
    }
    std::size_t row_index(int head, int token) const {
        return static_cast<std::size_t>(head) * seq_len + token;
    }
};

/// Serial per-token reference: for every query, two plain passes over the
/// admitted keys (max, then normalizer and weighted sum). Kept as the
/// independent oracle for the streaming kernels and as the benchmark
/// baseline.
void naive_masked_attention(AttentionTensors& t, const std::vector<HeadBlockMask>& masks,
                            int block_size);

/// Dense oracle: materializes the token-level score matrix per head, applies
/// the block mask and in-block causality, then a row softmax. Parallel over
/// heads. Throws on shape mismatch or non-finite input.
void dense_masked_attention(AttentionTensors& t, const std::vector<HeadBlockMask>& masks,
                            int block_size);

/// Streaming kernel: one query block at a time, scanning its CSR shard list
/// with the online-softmax recurrence (running max, rescaled normalizer and
/// accumulator). Parallel over (head, query block); within a head the
/// accumulation order is fixed, so results are deterministic for any thread
/// count.
void streaming_sharded_attention(AttentionTensors& t, const std::vector<CsrMask>& csr,
                                 int block_size);

/// Streaming kernel with the head dimension split into num_splits slices:
/// scores accumulate as the sum of per-slice partial dot products and the
/// output accumulates slice by slice. num_splits == 1 reproduces
/// streaming_sharded_attention bit-for-bit. Throws when num_splits does not
/// divide head_dim.
void dsplit_attention(AttentionTensors& t, const std::vector<CsrMask>& csr, int block_size,
                      int num_splits);

}  // namespace shardattn
