// Command-line front end: encode, decode, verify, stats, simulate, sweep
// over a manifest-described network, plus a synthetic fixture generator.
// Exit codes: 0 success, 1 verification failure, 2 input/format error.

#include <cstdio>
#include <functional>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sfscsf/commands.hpp"
#include "sfscsf/errors.hpp"

namespace {

struct GlobalFlags {
    std::string format = "json";
};

void print_output(const sfs::CommandOutput& out, const GlobalFlags& flags) {
    std::cout << (flags.format == "text" ? out.text : out.json);
}

void add_common(CLI::App* cmd, sfs::CommandOptions& opts, std::string& bit_arg,
                std::string& mode_arg, std::string& input_arg) {
    cmd->add_option("--manifest", opts.manifest, "network manifest (JSON)")->required();
    cmd->add_option("--out", opts.out_dir, "directory for CSF group files");
    cmd->add_option("--bit", bit_arg, "relative index width: 'auto' or 1..16 (default auto)");
    cmd->add_option("--mode", mode_arg, "arithmetic mode: int or real")
        ->check(CLI::IsMember({"int", "real"}));
    cmd->add_option("--input", input_arg, "input feature tensor (SFST)");
    cmd->add_option("--seed", opts.seed, "seed for synthetic inputs");
}

void apply_common(sfs::CommandOptions& opts, const std::string& bit_arg,
                  const std::string& mode_arg, const std::string& input_arg) {
    if (!bit_arg.empty() && bit_arg != "auto") {
        opts.bit = std::stoi(bit_arg);
    }
    if (mode_arg == "real") {
        opts.mode = sfs::ArithMode::Real;
    }
    if (!input_arg.empty()) {
        opts.input = input_arg;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stacked-filters convolution flow, CSF weight codec and dataflow simulator"};
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--format", flags.format, "report format: json or text")
        ->check(CLI::IsMember({"json", "text"}));

    sfs::CommandOptions opts;
    std::string bit_arg, mode_arg, input_arg;
    std::function<sfs::CommandOutput()> run;

    auto* encode = app.add_subcommand("encode", "encode manifest weights into CSF files");
    add_common(encode, opts, bit_arg, mode_arg, input_arg);
    encode->callback([&] { run = [&] { return sfs::cmd_encode(opts); }; });

    auto* decode = app.add_subcommand("decode", "reconstruct weight tensors from CSF files");
    add_common(decode, opts, bit_arg, mode_arg, input_arg);
    decode->callback([&] { run = [&] { return sfs::cmd_decode(opts); }; });

    auto* verify =
        app.add_subcommand("verify", "check dense vs stacked-filters vs CSF-path outputs");
    add_common(verify, opts, bit_arg, mode_arg, input_arg);
    verify->callback([&] { run = [&] { return sfs::cmd_verify(opts); }; });

    auto* stats = app.add_subcommand("stats", "zero-run histograms and index-width tables");
    add_common(stats, opts, bit_arg, mode_arg, input_arg);
    stats->callback([&] { run = [&] { return sfs::cmd_stats(opts); }; });

    auto* simulate = app.add_subcommand("simulate", "run the dataflow simulator");
    add_common(simulate, opts, bit_arg, mode_arg, input_arg);
    simulate->callback([&] { run = [&] { return sfs::cmd_simulate(opts); }; });

    auto* sweep = app.add_subcommand("sweep", "storage totals per candidate batch size");
    add_common(sweep, opts, bit_arg, mode_arg, input_arg);
    sweep->add_option("--batch-sizes", opts.batch_sizes, "candidate batch sizes")
        ->required()
        ->delimiter(',');
    sweep->callback([&] { run = [&] { return sfs::cmd_sweep(opts); }; });

    sfs::GenOptions gen_opts;
    auto* gen = app.add_subcommand("gen", "write a synthetic network fixture");
    gen->add_option("--out", gen_opts.out_dir, "output directory")->required();
    gen->add_option("--seed", gen_opts.seed, "generator seed");
    gen->add_option("--wbit", gen_opts.wbit, "weight code width");
    gen->add_option("--sparsity", gen_opts.sparsity, "fraction of zero weights");
    gen->add_option("--layers", gen_opts.layers, "number of layers");
    gen->callback([&] { run = [&] { return sfs::cmd_gen(gen_opts); }; });

    CLI11_PARSE(app, argc, argv);

    try {
        apply_common(opts, bit_arg, mode_arg, input_arg);
        const sfs::CommandOutput out = run();
        print_output(out, flags);
        return out.ok ? 0 : 1;
    } catch (const sfs::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
