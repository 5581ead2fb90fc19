// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

// Compares the serial per-token reference against the parallel kernels on
// the same sharding policy, and dense against strided shard lists.
// Run: ./bench_attention [--benchmark_filter=...]

#include <benchmark/benchmark.h>
#include <omp.h>

#include "shardattn/attention.hpp"
#include "shardattn/csr.hpp"
#include "shardattn/pattern.hpp"

namespace {

constexpr int kHeads = 8;
constexpr int kHeadDim = 64;
constexpr int kBlockSize = 64;
constexpr int kStride = 8;

struct Instance {
    shardattn::AttentionTensors tensors;
    std::vector<shardattn::HeadBlockMask> masks;
    std::vector<shardattn::CsrMask> shards;
};

Instance make_instance(int seq_len, int stride) {
    Instance inst;
    const shardattn::PatternConfig cfg = shardattn::make_single_stride_config(
        seq_len, kBlockSize, kHeads, /*local_blocks=*/1, stride);
    inst.masks = shardattn::build_all_masks(cfg);
    inst.shards = shardattn::to_csr(inst.masks);
    inst.tensors = shardattn::AttentionTensors::random(kHeads, seq_len, kHeadDim, 7);
    return inst;
}

void BM_naive_serial(benchmark::State& state) {
    Instance inst = make_instance(static_cast<int>(state.range(0)), kStride);
    for (auto _ : state) {
        shardattn::naive_masked_attention(inst.tensors, inst.masks, kBlockSize);
        benchmark::ClobberMemory();
    }
}

void BM_dense_masked(benchmark::State& state) {
    Instance inst = make_instance(static_cast<int>(state.range(0)), kStride);
    for (auto _ : state) {
        shardattn::dense_masked_attention(inst.tensors, inst.masks, kBlockSize);
        benchmark::ClobberMemory();
    }
}

void BM_streaming(benchmark::State& state) {
    Instance inst = make_instance(static_cast<int>(state.range(0)), kStride);
    for (auto _ : state) {
        shardattn::streaming_sharded_attention(inst.tensors, inst.shards, kBlockSize);
        benchmark::ClobberMemory();
    }
}

void BM_streaming_single_thread(benchmark::State& state) {
    Instance inst = make_instance(static_cast<int>(state.range(0)), kStride);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    for (auto _ : state) {
        shardattn::streaming_sharded_attention(inst.tensors, inst.shards, kBlockSize);
        benchmark::ClobberMemory();
    }
    omp_set_num_threads(saved);
}

void BM_streaming_dense_shards(benchmark::State& state) {
    Instance inst = make_instance(static_cast<int>(state.range(0)), /*stride=*/1);
    for (auto _ : state) {
        shardattn::streaming_sharded_attention(inst.tensors, inst.shards, kBlockSize);
        benchmark::ClobberMemory();
    }
}

void BM_dsplit2(benchmark::State& state) {
    Instance inst = make_instance(static_cast<int>(state.range(0)), kStride);
    for (auto _ : state) {
        shardattn::dsplit_attention(inst.tensors, inst.shards, kBlockSize, 2);
        benchmark::ClobberMemory();
    }
}

}  // namespace

BENCHMARK(BM_naive_serial)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_dense_masked)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_streaming)->Arg(512)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_streaming_single_thread)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_streaming_dense_shards)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_dsplit2)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
