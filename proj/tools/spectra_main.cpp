#include <cstdio>
#include <exception>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "spectra/config.hpp"
#include "spectra/harness.hpp"
#include "spectra/rng.hpp"

namespace {

struct Options {
    std::string config;
    std::optional<std::string> seed;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
};

int execute(const std::string& kind, const Options& o) {
    using namespace spectra;
    ExperimentConfig cfg = ExperimentConfig::load(o.config);
    if (cfg.kind() != kind) throw ConfigError("config kind '" + cfg.kind() + "' does not match command '" + kind + "'");
    if (o.seed) cfg.set("seed", *o.seed);
    if (o.out) cfg.set("out_dir", *o.out);
    cfg.validate();
    const unsigned threads = o.threads ? *o.threads : 0;

    RunReport rep = run(cfg, threads);
    const std::string dir = cfg.text("out_dir");
    emit(rep, dir, cfg.text("format"));

    for (const auto& a : rep.assertions)
        std::printf("%s %s: %s %s %s%s%s\n", a.pass ? "PASS" : "FAIL", a.name.c_str(), format_real(a.value).c_str(),
                    a.relation.c_str(), format_real(a.threshold).c_str(), a.detail.empty() ? "" : "  ",
                    a.detail.c_str());
    std::printf("%s: %zu tables, %zu assertions, %.1f s, output in %s\n", kind.c_str(), rep.tables.size(),
                rep.assertions.size(), rep.wall_seconds, dir.c_str());
    return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral distribution of heavy-tailed Wigner matrices"};
    app.set_version_flag("--version", std::string(spectra::kToolVersion));
    app.require_subcommand(1);

    Options opt;
    std::string chosen;
    for (const std::string& kind : spectra::kExperimentKinds) {
        CLI::App* sub = app.add_subcommand(kind, "run a " + kind + " experiment");
        sub->add_option("--config", opt.config, "experiment config file")->required();
        sub->add_option("--seed", opt.seed, "base seed, overrides the config");
        sub->add_option("--out", opt.out, "output directory, overrides the config");
        sub->add_option("--threads", opt.threads, "worker threads (default SPECTRA_THREADS or 1)")
            ->check(CLI::PositiveNumber);
        sub->callback([&chosen, kind] { chosen = kind; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        return execute(chosen, opt);
    } catch (const spectra::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
