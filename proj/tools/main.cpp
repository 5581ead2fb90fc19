// Copyright 2026 the shardattn authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shardattn/analysis.hpp"
#include "shardattn/attention.hpp"
#include "shardattn/render.hpp"
#include "shardattn/selftest.hpp"
#include "shardattn/serialize.hpp"
#include "shardattn/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitError = 2;

void write_output(const std::string& path, const std::string& payload, bool binary) {
    if (path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw std::runtime_error("cannot write to '" + path + "'");
    out << payload;
}

std::string format_fixed(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    return buf;
}

int cmd_render(const shardattn::CliConfigFile& file, int head, const std::string& format,
               const std::string& out_path) {
    const shardattn::HeadBlockMask mask = shardattn::build_head_mask(file.pattern, head);
    if (format == "text") {
        write_output(out_path, shardattn::render_text(mask), false);
    } else if (format == "pgm") {
        write_output(out_path, shardattn::render_pgm(mask), true);
    } else {
        throw std::runtime_error("render format must be 'text' or 'pgm'");
    }
    return kExitOk;
}

int cmd_verify(const shardattn::CliConfigFile& file, const std::string& out_path) {
    const shardattn::VerificationReport report = shardattn::verify_pattern(file.pattern);
    const auto multi = shardattn::check_multi_stride_constraints(file.pattern);

    write_output(out_path, shardattn::to_json(report).dump(2) + "\n", false);
    std::cerr << "union_complete: " << (report.union_complete ? "yes" : "NO") << "\n"
              << "heterogeneous: " << (report.heterogeneous ? "yes" : "NO") << "\n"
              << "kv_cache_efficient: " << (report.kv_cache_efficient ? "yes" : "NO") << "\n";
    if (multi.vacuous)
        std::cerr << "multi_stride_constraints: n/a (fewer than two segments)\n";
    else
        std::cerr << "multi_stride_constraints: " << (multi.satisfied ? "yes" : "NO") << "\n";
    if (!report.violations.empty())
        std::cerr << report.violations.size() << " violation witness(es) recorded\n";
    return report.all_ok() ? kExitOk : kExitCheckFailed;
}

int cmd_report_flops(const shardattn::CliConfigFile& file, int head_dim,
                     const std::string& out_path) {
    const shardattn::PatternConfig& cfg = file.pattern;
    const shardattn::FlopsReport report = shardattn::exact_flops(cfg, head_dim);

    std::ostringstream csv;
    csv << "layer,head,metric,value\n";
    const int layers = file.schedule ? file.schedule->num_layers : 1;
    for (int l = 0; l < layers; ++l) {
        const bool dense = file.schedule && file.schedule->dense_layer_ids.count(l);
        for (int h = 0; h < cfg.num_heads; ++h) {
            const double nnz = dense ? static_cast<double>(cfg.num_blocks()) *
                                           (cfg.num_blocks() + 1) / 2.0
                                     : static_cast<double>(report.nnz_per_head[h]);
            csv << l << ',' << h << ",nnz_blocks," << nnz << '\n';
        }
    }
    csv << "-1,-1,dense_flops," << report.dense_flops << '\n';
    csv << "-1,-1,sparse_flops," << report.sparse_flops << '\n';
    csv << "-1,-1,reduction_exact," << format_fixed(report.reduction_factor) << '\n';

    std::ostringstream summary;
    summary << "exact reduction: " << format_fixed(report.reduction_factor) << "X\n";
    // The closed-form figure applies to a plain single-stride policy.
    if (cfg.local_stride == 1 && cfg.stride_segments.size() == 1) {
        const double local_tokens =
            static_cast<double>(cfg.local_blocks) * cfg.block_size;
        const double analytic = shardattn::analytic_flops_reduction(
            cfg.seq_len, local_tokens, cfg.stride_segments[0].stride);
        const double context = shardattn::equivalent_context_length(
            cfg.seq_len, local_tokens, cfg.stride_segments[0].stride);
        summary << "analytic reduction: " << format_fixed(analytic) << "X\n"
                << "equivalent context: " << format_fixed(context) << " tokens\n";
        csv << "-1,-1,reduction_analytic," << format_fixed(analytic) << '\n';
        csv << "-1,-1,equivalent_context," << format_fixed(context) << '\n';
    }

    write_output(out_path, csv.str(), false);
    std::cout << summary.str();
    return kExitOk;
}

int cmd_report_kvcache(const shardattn::CliConfigFile& file, const std::string& out_path) {
    shardattn::LayerSchedule schedule;
    if (file.schedule) {
        schedule = *file.schedule;
    } else {
        schedule.num_layers = 1;
        schedule.sparse_pattern = file.pattern;
    }
    const shardattn::PatternConfig& cfg = schedule.sparse_pattern;
    const shardattn::CacheSchedule cache =
        shardattn::simulate_decode_cache(cfg, cfg.seq_len);
    const double reduction = shardattn::kv_reduction(schedule);

    std::ostringstream csv;
    csv << "layer,head,metric,value\n";
    for (int l = 0; l < schedule.num_layers; ++l) {
        const bool dense = schedule.dense_layer_ids.count(l) > 0;
        for (const shardattn::HeadCacheSchedule& head : cache.heads) {
            const double fraction =
                dense ? 1.0
                      : static_cast<double>(head.occupancy.back()) / cfg.seq_len;
            csv << l << ',' << head.head_index << ",retained_fraction," << fraction << '\n';
        }
    }
    csv << "-1,-1,kv_reduction_percent," << format_fixed(reduction) << '\n';
    write_output(out_path, csv.str(), false);
    std::cout << "kv reduction: " << format_fixed(reduction) << "%\n";
    return kExitOk;
}

int cmd_selftest(std::uint64_t seed, const std::string& sizes, bool corrupt,
                 const std::string& out_path) {
    shardattn::SelftestOptions options;
    options.seed = seed;
    options.inject_corruption = corrupt;
    if (!sizes.empty()) {
        options.seq_lens.clear();
        std::istringstream in(sizes);
        for (std::string item; std::getline(in, item, ',');)
            options.seq_lens.push_back(std::stoi(item));
        if (options.seq_lens.empty()) throw std::runtime_error("empty --sizes list");
    }

    std::ostringstream csv;
    const shardattn::SelftestReport report = shardattn::run_selftest(options, csv);
    write_output(out_path, csv.str(), false);
    std::cerr << "selftest: " << (report.ok ? "PASS" : "FAIL") << " (" << report.instances
              << " instances, " << report.comparisons << " comparisons, " << report.failures
              << " failures)\n";
    return report.ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"strided context-sharding attention toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path, format = "text", sizes;
    int head = 0, head_dim = 64;
    std::uint64_t seed = 42;
    bool corrupt = false;

    CLI::App* render = app.add_subcommand("render", "draw one head's block mask");
    render->add_option("--config", config_path, "pattern config file")->required();
    render->add_option("--head", head, "head index");
    render->add_option("--format", format, "text or pgm")
        ->check(CLI::IsMember({"text", "pgm"}));
    render->add_option("--out", out_path, "output path (stdout if omitted)");

    CLI::App* verify = app.add_subcommand("verify", "run the structural checks");
    verify->add_option("--config", config_path, "pattern config file")->required();
    verify->add_option("--out", out_path, "report path (stdout if omitted)");

    CLI::App* report = app.add_subcommand("report", "emit FLOPs or KV-cache figures");
    report->require_subcommand(1);
    CLI::App* flops = report->add_subcommand("flops", "attention FLOPs reduction");
    flops->add_option("--config", config_path, "pattern config file")->required();
    flops->add_option("--head-dim", head_dim, "head dimension for absolute counts");
    flops->add_option("--out", out_path, "CSV path (stdout if omitted)");
    CLI::App* kvcache = report->add_subcommand("kvcache", "decode-time cache reduction");
    kvcache->add_option("--config", config_path, "pattern config file")->required();
    kvcache->add_option("--out", out_path, "CSV path (stdout if omitted)");

    CLI::App* selftest = app.add_subcommand("selftest", "oracle-equivalence matrix");
    selftest->add_option("--seed", seed, "RNG seed");
    selftest->add_option("--sizes", sizes, "comma-separated sequence lengths");
    selftest->add_option("--out", out_path, "CSV path (stdout if omitted)");
    selftest->add_flag("--inject-corruption", corrupt, "negative control: force a failure")
        ->group("");  // test hook, hidden from help

    CLI11_PARSE(app, argc, argv);

    try {
        if (render->parsed()) {
            return cmd_render(shardattn::load_config_file(config_path), head, format, out_path);
        }
        if (verify->parsed()) {
            return cmd_verify(shardattn::load_config_file(config_path), out_path);
        }
        if (report->parsed()) {
            if (flops->parsed())
                return cmd_report_flops(shardattn::load_config_file(config_path), head_dim,
                                        out_path);
            return cmd_report_kvcache(shardattn::load_config_file(config_path), out_path);
        }
        if (selftest->parsed()) {
            return cmd_selftest(seed, sizes, corrupt, out_path);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
