// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#include "shardattn/attention.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "kernel_common.hpp"

namespace shardattn {

namespace {

using detail::check_finite;
using detail::check_shapes;
using detail::dot_full;
using detail::kNegInf;
using detail::prepare_outputs;

// Streaming core shared by the plain and D-split kernels. One (head, query
// block) task: scan the shard list in ascending key-block order, maintaining
// per-row running max m, normalizer l and output accumulator.
void process_query_block(AttentionTensors& t, const CsrMask& csr, int head, int qb,
                         int block_size, int num_splits) {
    const int n = t.seq_len;
    const int d = t.head_dim;
    const int slice = d / num_splits;
    const int q_begin = qb * block_size;
    const int q_end = std::min(q_begin + block_size, n);
    const int rows = q_end - q_begin;

    std::vector<double> m(rows, kNegInf), l(rows, 0.0);
    std::vector<double> acc(static_cast<std::size_t>(rows) * d, 0.0);
    std::vector<double> p(block_size);

    for (int ptr = csr.row_ptr[qb]; ptr < csr.row_ptr[qb + 1]; ++ptr) {
        const int kb = csr.col_idx[ptr];
        const int k_begin = kb * block_size;
        const int k_end = std::min(k_begin + block_size, n);

        for (int r = 0; r < rows; ++r) {
            const int i = q_begin + r;
            const int c_end = std::min(k_end, i + 1);  // in-block causality
            const int cols = c_end - k_begin;
            if (cols <= 0) continue;

            const float* q_row = &t.q[t.idx(head, i, 0)];
            // Scores as a sum of per-slice partial products; the scale is
            // applied once on the completed sum.
            std::fill(p.begin(), p.begin() + cols, 0.0);
            for (int s = 0; s < num_splits; ++s) {
                const int x0 = s * slice;
                for (int c = 0; c < cols; ++c) {
                    const float* k_row = &t.k[t.idx(head, k_begin + c, 0)];
                    p[c] += dot_full(q_row + x0, k_row + x0, slice);
                }
            }
            double block_max = kNegInf;
            for (int c = 0; c < cols; ++c) {
                p[c] *= t.scale;
                block_max = std::max(block_max, p[c]);
            }

            const double m_new = std::max(m[r], block_max);
            const double alpha = std::exp(m[r] - m_new);  // 0 on the first block
            double block_sum = 0.0;
            for (int c = 0; c < cols; ++c) {
                p[c] = std::exp(p[c] - m_new);
                block_sum += p[c];
            }
            l[r] = alpha * l[r] + block_sum;

            double* a = &acc[static_cast<std::size_t>(r) * d];
            for (int x = 0; x < d; ++x) a[x] *= alpha;
            for (int s = 0; s < num_splits; ++s) {
                const int x0 = s * slice;
                for (int c = 0; c < cols; ++c) {
                    const float* v_row = &t.v[t.idx(head, k_begin + c, 0)];
                    const double w = p[c];
                    for (int x = x0; x < x0 + slice; ++x) a[x] += w * v_row[x];
                }
            }
            m[r] = m_new;
        }
    }

    for (int r = 0; r < rows; ++r) {
        const int i = q_begin + r;
        const double inv = 1.0 / l[r];  // l > 0: the diagonal block is always attended
        const double* a = &acc[static_cast<std::size_t>(r) * d];
        float* o = &t.out[t.idx(head, i, 0)];
        for (int x = 0; x < d; ++x) o[x] = static_cast<float>(a[x] * inv);
        t.lse[t.row_index(head, i)] = m[r] + std::log(l[r]);
    }
}

void run_streaming(AttentionTensors& t, const std::vector<CsrMask>& csr, int block_size,
                   int num_splits) {
    if (csr.empty()) throw std::invalid_argument("csr list is empty");
    check_shapes(t, csr.size(), csr.front().num_blocks, block_size);
    for (const CsrMask& c : csr) {
        c.validate();
        if (c.num_blocks != csr.front().num_blocks)
            throw std::invalid_argument("csr masks differ in block count");
    }
    if (num_splits < 1 || t.head_dim % num_splits != 0)
        throw std::invalid_argument("num_splits must divide head_dim");
    prepare_outputs(t);

    const int blocks = csr.front().num_blocks;
#pragma omp parallel for collapse(2) schedule(dynamic)
    for (int h = 0; h < t.num_heads; ++h)
        for (int qb = 0; qb < blocks; ++qb)
            process_query_block(t, csr[h], h, qb, block_size, num_splits);
}

}  // namespace

AttentionTensors AttentionTensors::zeros(int num_heads, int seq_len, int head_dim) {
    AttentionTensors t;
    t.num_heads = num_heads;
    t.seq_len = seq_len;
    t.head_dim = head_dim;
    t.scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
    const std::size_t n = static_cast<std::size_t>(num_heads) * seq_len * head_dim;
    t.q.assign(n, 0.0f);
    t.k.assign(n, 0.0f);
    t.v.assign(n, 0.0f);
    return t;
}

AttentionTensors AttentionTensors::random(int num_heads, int seq_len, int head_dim,
                                          std::uint64_t seed) {
    AttentionTensors t = zeros(num_heads, seq_len, head_dim);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
    for (float& x : t.q) x = dist(rng);
    for (float& x : t.k) x = dist(rng);
    for (float& x : t.v) x = dist(rng);
    return t;
}

void dense_masked_attention(AttentionTensors& t, const std::vector<HeadBlockMask>& masks,
                            int block_size) {
    check_shapes(t, masks.size(), masks.empty() ? -1 : masks.front().num_blocks(), block_size);
    for (const HeadBlockMask& m : masks)
        if (!m.is_causal() || !m.has_full_diagonal())
            throw std::invalid_argument("masks must be causal with a full diagonal");
    check_finite(t);
    prepare_outputs(t);
    const int n = t.seq_len;
    const int d = t.head_dim;

#pragma omp parallel for schedule(static)
    for (int h = 0; h < t.num_heads; ++h) {
        const HeadBlockMask& mask = masks[h];
        std::vector<double> scores(static_cast<std::size_t>(n) * n, kNegInf);
        for (int i = 0; i < n; ++i) {
            const int bi = i / block_size;
            const float* q_row = &t.q[t.idx(h, i, 0)];
            for (int j = 0; j <= i; ++j)
                if (mask.at(bi, j / block_size))
                    scores[static_cast<std::size_t>(i) * n + j] =
                        t.scale * dot_full(q_row, &t.k[t.idx(h, j, 0)], d);
        }
        for (int i = 0; i < n; ++i) {
            double* row = &scores[static_cast<std::size_t>(i) * n];
            const double mx = *std::max_element(row, row + i + 1);
            double z = 0.0;
            for (int j = 0; j <= i; ++j) {
                row[j] = row[j] == kNegInf ? 0.0 : std::exp(row[j] - mx);
                z += row[j];
            }
            float* o = &t.out[t.idx(h, i, 0)];
            std::vector<double> acc(d, 0.0);
            for (int j = 0; j <= i; ++j) {
                if (row[j] == 0.0) continue;
                const float* v_row = &t.v[t.idx(h, j, 0)];
                for (int x = 0; x < d; ++x) acc[x] += row[j] * v_row[x];
            }
            for (int x = 0; x < d; ++x) o[x] = static_cast<float>(acc[x] / z);
            t.lse[t.row_index(h, i)] = mx + std::log(z);
        }
    }
}

void streaming_sharded_attention(AttentionTensors& t, const std::vector<CsrMask>& csr,
                                 int block_size) {
    run_streaming(t, csr, block_size, 1);
}

void dsplit_attention(AttentionTensors& t, const std::vector<CsrMask>& csr, int block_size,
                      int num_splits) {
    run_streaming(t, csr, block_size, num_splits);
}

}  // namespace shardattn
