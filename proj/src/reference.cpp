// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

// Serial per-token reference kernel. Deliberately plain: no blocking, no
// online softmax, double precision throughout. The parallel kernels are
// tested and benchmarked against this implementation.

#include <algorithm>
#include <cmath>
#include <vector>

#include "kernel_common.hpp"
#include "shardattn/attention.hpp"

namespace shardattn {

void naive_masked_attention(AttentionTensors& t, const std::vector<HeadBlockMask>& masks,
                            int block_size) {
    detail::check_shapes(t, masks.size(), masks.empty() ? -1 : masks.front().num_blocks(),
                         block_size);
    detail::prepare_outputs(t);
    const int n = t.seq_len;
    const int d = t.head_dim;

    std::vector<double> acc(d);
    for (int h = 0; h < t.num_heads; ++h) {
        const HeadBlockMask& mask = masks[h];
        for (int i = 0; i < n; ++i) {
            const int bi = i / block_size;
            const float* q_row = &t.q[t.idx(h, i, 0)];

            double mx = detail::kNegInf;
            for (int j = 0; j <= i; ++j) {
                if (!mask.at(bi, j / block_size)) continue;
                mx = std::max(mx,
                              t.scale * detail::dot_full(q_row, &t.k[t.idx(h, j, 0)], d));
            }
            double z = 0.0;
            std::fill(acc.begin(), acc.end(), 0.0);
            for (int j = 0; j <= i; ++j) {
                if (!mask.at(bi, j / block_size)) continue;
                const double w = std::exp(
                    t.scale * detail::dot_full(q_row, &t.k[t.idx(h, j, 0)], d) - mx);
                z += w;
                const float* v_row = &t.v[t.idx(h, j, 0)];
                for (int x = 0; x < d; ++x) acc[x] += w * v_row[x];
            }
            float* o = &t.out[t.idx(h, i, 0)];
            for (int x = 0; x < d; ++x) o[x] = static_cast<float>(acc[x] / z);
            t.lse[t.row_index(h, i)] = mx + std::log(z);
        }
    }
}

}  // namespace shardattn
