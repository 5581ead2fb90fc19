// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#include "shardattn/analysis.hpp"

#include <algorithm>
#include <stdexcept>

#include "shardattn/csr.hpp"

namespace shardattn {

double equivalent_context_length(double seq_len, double local_window, double stride) {
    if (local_window < 1.0 || local_window > seq_len)
        throw std::invalid_argument("local_window must lie in [1, seq_len]");
    if (stride < 1.0) throw std::invalid_argument("stride must be >= 1");
    return local_window + (seq_len - local_window) / stride;
}

double analytic_flops_reduction(double seq_len, double local_window, double stride) {
    return seq_len / equivalent_context_length(seq_len, local_window, stride);
}

double speedup_upper_bound(int num_heads, double seq_len, double local_window) {
    if (num_heads < 1) throw std::invalid_argument("num_heads must be positive");
    return seq_len / equivalent_context_length(seq_len, local_window, num_heads);
}

double flops_per_block_pair(int head_dim, int block_size) {
    return 4.0 * head_dim * static_cast<double>(block_size) * block_size;
}

FlopsReport exact_flops(const PatternConfig& config, int head_dim) {
    config.validate();
    if (head_dim < 1) throw std::invalid_argument("head_dim must be positive");

    const int blocks = config.num_blocks();
    const double per_pair = flops_per_block_pair(head_dim, config.block_size);
    const double causal_pairs = static_cast<double>(blocks) * (blocks + 1) / 2.0;

    FlopsReport report;
    report.nnz_per_head.resize(config.num_heads);
    const std::vector<HeadBlockMask> masks = build_all_masks(config);
    for (int h = 0; h < config.num_heads; ++h)
        report.nnz_per_head[h] = masks[h].popcount();

    std::size_t total_nnz = 0;
    for (std::size_t n : report.nnz_per_head) total_nnz += n;

    report.dense_flops = per_pair * causal_pairs * config.num_heads;
    report.sparse_flops = per_pair * static_cast<double>(total_nnz);
    report.reduction_factor = report.dense_flops / report.sparse_flops;
    report.equivalent_context = config.seq_len / report.reduction_factor;
    return report;
}

CacheSchedule simulate_decode_cache(const PatternConfig& config, int total_tokens) {
    config.validate();
    if (total_tokens < 1 || total_tokens > config.seq_len)
        throw std::invalid_argument("total_tokens must lie in [1, seq_len]");

    const int S = config.block_size;
    const int blocks = config.num_blocks();
    CacheSchedule schedule;
    schedule.block_size = S;
    schedule.num_blocks = blocks;
    schedule.total_tokens = total_tokens;
    schedule.heads.resize(config.num_heads);

#pragma omp parallel for schedule(static)
    for (int h = 0; h < config.num_heads; ++h) {
        const HeadBlockMask mask = build_head_mask(config, h);
        HeadCacheSchedule& head = schedule.heads[h];
        head.head_index = h;

        head.evict_after.assign(blocks, 0);
        for (int j = 0; j < blocks; ++j) {
            int last = j;  // the diagonal guarantees at least its own row
            for (int i = j; i < blocks; ++i)
                if (mask.at(i, j)) last = i;
            head.evict_after[j] = last;
        }

        head.occupancy.assign(total_tokens, 0);
        head.dead_blocks.assign(total_tokens, 0);
        std::int64_t sum = 0;
        for (int t = 0; t < total_tokens; ++t) {
            const int bt = t / S;
            std::int64_t tokens = 0;
            int dead = 0;
            for (int j = 0; j <= bt; ++j) {
                if (head.evict_after[j] < bt) continue;
                tokens += j == bt ? (t - bt * S + 1) : S;
                if (!mask.at(bt, j)) ++dead;
            }
            head.occupancy[t] = tokens;
            head.dead_blocks[t] = dead;
            sum += tokens;
        }
        head.peak_tokens = *std::max_element(head.occupancy.begin(), head.occupancy.end());
        head.mean_tokens = static_cast<double>(sum) / total_tokens;
    }
    return schedule;
}

double kv_reduction(const LayerSchedule& schedule) {
    schedule.validate();
    const PatternConfig& cfg = schedule.sparse_pattern;
    const CacheSchedule cache = simulate_decode_cache(cfg, cfg.seq_len);

    double sparse_fraction = 0.0;
    for (const HeadCacheSchedule& head : cache.heads)
        sparse_fraction += static_cast<double>(head.occupancy.back()) / cfg.seq_len;
    sparse_fraction /= cache.heads.size();

    double retained = 0.0;
    for (int l = 0; l < schedule.num_layers; ++l)
        retained += schedule.dense_layer_ids.count(l) ? 1.0 : sparse_fraction;
    retained /= schedule.num_layers;
    return 100.0 * (1.0 - retained);
}

}  // namespace shardattn
