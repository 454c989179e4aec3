#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <stdexcept>

#include "cli.hpp"

namespace {

using namespace primelike;
using namespace primelike::cli;

// Inline set flags shared by check / anb / gen-set.
struct SetFlags {
    std::string set;  // kind name or spec file
    Natural limit = 0;
    std::optional<std::uint64_t> seed;
    std::int64_t shift = 0;
    std::string path;
};

void add_set_flags(CLI::App* cmd, SetFlags& f, const char* selector, const char* help) {
    cmd->add_option(selector, f.set, help)->required();
    cmd->add_option("--limit", f.limit, "Universe limit for generated sets");
    cmd->add_option("--seed", f.seed, "Perturbation seed");
    cmd->add_option("--shift", f.shift, "Shift t for shifted sets");
    cmd->add_option("--path", f.path, "Set file for kind=file");
}

SetSpec resolve_spec(const SetFlags& f, bool allow_spec_file) {
    const auto kind = parse_set_kind(f.set);
    if (!kind) {
        if (!allow_spec_file) throw InputError("--kind: unknown set kind '" + f.set + "'");
        if (!std::filesystem::exists(f.set))
            throw InputError("--set: '" + f.set + "' is neither a set kind nor a spec file");
        return parse_spec_text(read_text_file(f.set));
    }
    auto need_limit = [&] {
        if (f.limit == 0) throw InputError("--limit is required for --set/--kind " + f.set);
    };
    switch (*kind) {
        case SetKind::primes:
            need_limit();
            return SetSpec::primes(f.limit);
        case SetKind::perturbed:
            need_limit();
            if (!f.seed) throw InputError("--seed is required for perturbed sets");
            return SetSpec::perturbed(f.limit, *f.seed);
        case SetKind::shifted:
            need_limit();
            return SetSpec::shifted(SetSpec::primes(f.limit), f.shift);
        case SetKind::file:
            if (f.path.empty()) throw InputError("--path is required for file sets");
            return SetSpec::from_file(f.path);
    }
    throw InputError("unreachable set kind");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"primelike: prime-similar sets, Goldbach-style checks, disjointness model"};
    app.require_subcommand(1);

    RunConfig cfg;
    SetFlags set_flags;
    std::string format = "json";

    auto* sieve = app.add_subcommand("sieve", "Sieve primes up to --limit");
    sieve->add_option("--limit", cfg.sieve_limit, "Upper bound")->required();
    sieve->add_option("--segment", cfg.segment_size, "Numbers per sieve segment");
    sieve->add_option("--workers", cfg.workers, "Worker threads");
    sieve->add_option("--out", cfg.output, "Write the primes as a set file");

    auto* gen = app.add_subcommand("gen-set", "Generate a set file");
    add_set_flags(gen, set_flags, "--kind", "primes|perturbed|shifted|file");
    gen->add_option("--out", cfg.output, "Output set file")->required();
    gen->add_option("--workers", cfg.workers, "Worker threads");

    auto* check = app.add_subcommand("check", "Check every even number in [lo, hi]");
    add_set_flags(check, set_flags, "--set", "Set kind (with inline flags) or a spec file");
    check->add_option("--lo", cfg.lo, "First even number")->default_val(4);
    check->add_option("--hi", cfg.hi, "Last even number")->required();
    check->add_option("--allow-below", cfg.allow_below, "Failures below this do not fail the run")->default_val(42);
    check->add_option("--workers", cfg.workers, "Worker threads");
    check->add_flag("--slow", cfg.slow_mode, "Count representations of every even number");
    check->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    check->add_option("--out", cfg.output, "Report file (stdout if absent)");

    auto* anb = app.add_subcommand("anb", "Distance sets A_n and B_n");
    add_set_flags(anb, set_flags, "--set", "Set kind (with inline flags) or a spec file");
    anb->add_option("--n", cfg.n, "Midpoint n")->required();
    anb->add_option("--out", cfg.output, "Output file (stdout if absent)");

    auto* prob = app.add_subcommand("prob", "Disjointness model at n, or a table over n");
    prob->add_option("--n", cfg.n, "Midpoint n");
    prob->add_option("--pmax", cfg.pmax, "Residue filter: 2 or 3")->check(CLI::IsMember({2, 3}));
    prob->add_option("--c-from-pmax", cfg.c_from_pmax, "Damping coefficient from primes <= P");
    prob->add_option("--table-from", cfg.table_from, "Table mode: first n");
    prob->add_option("--table-to", cfg.table_to, "Table mode: last n");
    prob->add_option("--table-step", cfg.table_step, "Table mode: step in n");
    prob->add_option("--out", cfg.output, "Output file (stdout if absent)");

    auto* tail = app.add_subcommand("tail", "Tail integral of the damping function");
    tail->add_option("--from", cfg.tail_from, "Lower limit N")->required();
    tail->add_option("--c", cfg.tail_c, "Damping coefficient")->default_val(1.0);
    tail->add_option("--out", cfg.output, "Output file (stdout if absent)");

    auto* report = app.add_subcommand("report", "Derive plot data from a report, model table, or set file");
    report->add_option("--in", cfg.input, "Input file")->required();
    report->add_flag("--plot-data", cfg.plot_data, "Emit series,x,y plot data");
    report->add_option("--out", cfg.output, "Output CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (sieve->parsed()) cfg.command = Command::sieve;
        if (gen->parsed()) cfg.command = Command::gen_set;
        if (check->parsed()) cfg.command = Command::check;
        if (anb->parsed()) cfg.command = Command::anb;
        if (prob->parsed()) cfg.command = Command::prob;
        if (tail->parsed()) cfg.command = Command::tail;
        if (report->parsed()) cfg.command = Command::report;

        if (gen->parsed() || check->parsed() || anb->parsed()) cfg.spec = resolve_spec(set_flags, !gen->parsed());
        if (set_flags.seed) cfg.seed = *set_flags.seed;
        cfg.format = format == "csv" ? Format::csv : Format::json;
        if (prob->parsed() && cfg.table_step == 0 && cfg.n == 0) throw InputError("prob: --n is required");
        if (cfg.workers == 0) throw InputError("--workers must be >= 1");
        return run(cfg);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInput;
    }
}
