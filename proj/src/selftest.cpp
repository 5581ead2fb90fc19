// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#include "shardattn/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "shardattn/attention.hpp"
#include "shardattn/serialize.hpp"

namespace shardattn {

namespace {

template <typename T>
double max_rel(const std::vector<T>& a, const std::vector<T>& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = static_cast<double>(a[i]);
        const double y = static_cast<double>(b[i]);
        const double scale = std::max(std::abs(x), std::abs(y));
        if (scale == 0.0) continue;
        worst = std::max(worst, std::abs(x - y) / scale);
    }
    return worst;
}

struct Comparison {
    const char* label;
    double tolerance;
    double out_error;
    double lse_error;
};

// Drops the last remote block from the densest row of head 0, keeping the
// CSR structurally valid but numerically wrong.
void corrupt(std::vector<CsrMask>& csr) {
    CsrMask& c = csr.front();
    for (int i = c.num_blocks - 1; i > 0; --i) {
        if (c.row_ptr[i + 1] - c.row_ptr[i] < 2) continue;
        c.col_idx.erase(c.col_idx.begin() + c.row_ptr[i]);
        for (int r = i + 1; r <= c.num_blocks; ++r) --c.row_ptr[r];
        return;
    }
}

}  // namespace

double max_relative_error(const std::vector<float>& a, const std::vector<float>& b) {
    return max_rel(a, b);
}

double max_relative_error(const std::vector<double>& a, const std::vector<double>& b) {
    return max_rel(a, b);
}

SelftestReport run_selftest(const SelftestOptions& options, std::ostream& csv) {
    const int block_sizes[] = {8, 16, 64};
    const int head_dims[] = {16, 64};
    // 0 stands for "stride = num_heads".
    const int strides[] = {1, 3, 4, 0};

    csv << "config,seq_len,block_size,head_dim,num_heads,stride,comparison,tolerance,"
           "max_rel_error,status\n";

    SelftestReport report;
    bool first_instance = true;
    for (int n : options.seq_lens) {
        for (int s : block_sizes) {
            for (int d : head_dims) {
                for (int v_code : strides) {
                    // Small sequences also exercise a 2-head variant.
                    const int head_counts[] = {4, 2};
                    const int variants = n <= 64 ? 2 : 1;
                    for (int hv = 0; hv < variants; ++hv) {
                        const int heads = head_counts[hv];
                        const int v = v_code == 0 ? heads : v_code;
                        const int blocks = (n + s - 1) / s;
                        const int local = std::min(1 + report.instances % 2, blocks);
                        const PatternConfig cfg =
                            make_single_stride_config(n, s, heads, local, v);

                        const std::vector<HeadBlockMask> masks = build_all_masks(cfg);
                        std::vector<CsrMask> shards = to_csr(masks);
                        if (options.inject_corruption && first_instance) corrupt(shards);
                        first_instance = false;

                        AttentionTensors base = AttentionTensors::random(
                            heads, n, d, options.seed + report.instances);

                        AttentionTensors naive = base;
                        naive_masked_attention(naive, masks, s);
                        AttentionTensors dense = base;
                        dense_masked_attention(dense, masks, s);
                        AttentionTensors streaming = base;
                        streaming_sharded_attention(streaming, shards, s);
                        AttentionTensors dsplit2 = base;
                        dsplit_attention(dsplit2, shards, s, d % 2 == 0 ? 2 : 1);
                        AttentionTensors dsplit1 = base;
                        dsplit_attention(dsplit1, shards, s, 1);

                        const Comparison comparisons[] = {
                            {"naive_vs_dense", 1e-5,
                             max_relative_error(naive.out, dense.out),
                             max_relative_error(naive.lse, dense.lse)},
                            {"dense_vs_streaming", 1e-5,
                             max_relative_error(dense.out, streaming.out),
                             max_relative_error(dense.lse, streaming.lse)},
                            {"naive_vs_streaming", 1e-5,
                             max_relative_error(naive.out, streaming.out),
                             max_relative_error(naive.lse, streaming.lse)},
                            {"streaming_vs_dsplit2", 1e-5,
                             max_relative_error(streaming.out, dsplit2.out),
                             max_relative_error(streaming.lse, dsplit2.lse)},
                            {"streaming_vs_dsplit1", 1e-6,
                             max_relative_error(streaming.out, dsplit1.out),
                             max_relative_error(streaming.lse, dsplit1.lse)},
                        };

                        char hash[32];
                        std::snprintf(hash, sizeof hash, "%016llx",
                                      static_cast<unsigned long long>(config_hash(cfg)));
                        for (const Comparison& c : comparisons) {
                            const double err = std::max(c.out_error, c.lse_error);
                            const bool pass = err <= c.tolerance;
                            char err_buf[32];
                            std::snprintf(err_buf, sizeof err_buf, "%.3e", err);
                            csv << hash << ',' << n << ',' << s << ',' << d << ',' << heads
                                << ',' << v << ',' << c.label << ',' << c.tolerance << ','
                                << err_buf << ',' << (pass ? "pass" : "FAIL") << '\n';
                            ++report.comparisons;
                            if (!pass) ++report.failures;
                        }
                        ++report.instances;
                    }
                }
            }
        }
    }
    report.ok = report.failures == 0;
    return report;
}

}  // namespace shardattn
