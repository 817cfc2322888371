// trapctl: manifest-driven runs of the trap-model lab.
//
//   trapctl aging manifest.json --out runs/aging --threads 4
//   trapctl spectrum --seed 7 --out runs/spec        (defaults, seed overridden)
//   trapctl validate runs/spec
//
// Exit codes: 0 ok, 2 validation failure, 3 numerical non-convergence, 1 other.

#include <cstdio>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "trap/cli/manifest.hpp"
#include "trap/cli/run.hpp"
#include "trap/cli/validate.hpp"
#include "trap/errors.hpp"
#include "trap/io.hpp"
#include "trap/parallel.hpp"

namespace {

using trap::cli::Kind;

int run_kind(Kind kind, const std::string& manifest_path, const trap::cli::Overrides& o) {
    trap::cli::Manifest m = manifest_path.empty()
                                ? trap::cli::default_manifest(kind)
                                : trap::cli::parse_manifest_text(trap::io::read_file(manifest_path));
    if (m.kind != kind)
        throw trap::cli::ValidationError("manifest kind " + trap::cli::to_string(m.kind) + " given to subcommand " +
                                         trap::cli::to_string(kind));
    m = trap::cli::apply_overrides(std::move(m), o);
    if (m.output.empty()) m.output = "run-" + trap::cli::to_string(kind);
    const auto out = trap::cli::run_manifest(m, m.output);
    std::cout << out.dir.string() << '\n';
    return 0;
}

int run_validate(const std::string& target) {
    std::filesystem::path dir = target;
    if (std::filesystem::is_regular_file(dir)) {
        const auto m = trap::cli::parse_manifest_text(trap::io::read_file(dir));
        if (m.kind != Kind::validate) throw trap::cli::ValidationError("expected a validate manifest or a run directory");
        dir = m.params.at("run").get<std::string>();
    }
    const auto rep = trap::cli::validate_run(dir);
    for (const auto& p : rep.passed) std::cout << "ok    " << p << '\n';
    for (const auto& v : rep.violations) std::cout << "FAIL  " << v << '\n';
    std::cout << rep.kind << ": " << rep.passed.size() << " passed, " << rep.violations.size() << " violated\n";
    return rep.ok() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical lab for the complete-graph trap model"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    double tol = 0.0;
    std::string out;
    unsigned threads = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Override the manifest seed");
    auto* tol_opt = app.add_option("--tol", tol, "Override the manifest tolerance")->check(CLI::NonNegativeNumber);
    auto* out_opt = app.add_option("--out", out, "Output directory");
    app.add_option("--threads", threads, "Worker cap (0: all cores); never changes results");

    std::map<CLI::App*, Kind> kinds;
    std::string manifest;
    const std::pair<const char*, Kind> runs[] = {{"sample", Kind::sample}, {"spectrum", Kind::spectrum},
                                                 {"aging", Kind::aging},   {"mc", Kind::mc},
                                                 {"ppp", Kind::ppp},       {"tauber", Kind::tauber}};
    for (const auto& [name, kind] : runs) {
        auto* sub = app.add_subcommand(name, "Run the " + std::string(name) + " experiment from a manifest (defaults if omitted)");
        sub->add_option("manifest", manifest, "Manifest JSON");
        kinds[sub] = kind;
    }
    std::string target;
    auto* val = app.add_subcommand("validate", "Replay the invariants of a run directory");
    val->add_option("run", target, "Run directory or validate manifest")->required();

    CLI11_PARSE(app, argc, argv);
    trap::set_max_threads(threads);

    try {
        if (val->parsed()) return run_validate(target);
        trap::cli::Overrides o;
        if (seed_opt->count()) o.seed = seed;
        if (tol_opt->count()) o.tol = tol;
        if (out_opt->count()) o.out = out;
        for (const auto& [sub, kind] : kinds)
            if (sub->parsed()) return run_kind(kind, manifest, o);
    } catch (const trap::cli::ValidationError& e) {
        std::cerr << "validation: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid parameter: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid parameter: " << e.what() << '\n';
        return 2;
    } catch (const trap::NonConvergence& e) {
        std::cerr << "no convergence: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
