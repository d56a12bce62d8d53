#include "helirot/commands.hpp"
#include "helirot/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct CommonOptions {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
    sub->add_option("--config", opts.config, "JSON run configuration (built-in defaults when omitted)");
    sub->add_option("--out", opts.out, "output directory (overrides output_dir)");
    sub->add_option("--seed", opts.seed, "random seed (overrides seed)");
}

helirot::RunConfig resolve(const CommonOptions& opts) {
    auto config = opts.config.empty() ? helirot::RunConfig::defaults() : helirot::load_config(opts.config);
    if (!opts.out.empty()) {
        config.output_dir = opts.out;
    }
    if (opts.seed) {
        config.seed = *opts.seed;
        config.fit.seed = *opts.seed;
    }
    return config;
}

int finish(const helirot::CommandOutput& output, const helirot::RunConfig& config) {
    for (const auto& path : helirot::write_outputs(output, config.output_dir)) {
        std::cerr << "wrote " << path.string() << "\n";
    }
    std::cout << output.report;
    return output.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"helirot: rotational wave packets of He2* excimers in superfluid helium"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(HELIROT_VERSION));

    CommonOptions kick_opts;
    auto* kick = app.add_subcommand("simulate-kick", "populations and coherences after the kick versus energy");
    add_common(kick, kick_opts);

    CommonOptions synth_opts;
    auto* synth = app.add_subcommand("synthesize", "LD trace, spectrum and labelled peaks");
    add_common(synth, synth_opts);

    CommonOptions spectrum_opts;
    std::string trace_path;
    auto* spectrum = app.add_subcommand("spectrum", "spectrum and peaks of an existing trace CSV");
    add_common(spectrum, spectrum_opts);
    spectrum->add_option("--trace", trace_path, "trace CSV with columns t_ps,ld")->required();

    CommonOptions fit_opts;
    std::string recipe;
    std::string data_path;
    auto* fit = app.add_subcommand("fit", "run a figure recipe (synthetic data unless --data is given)");
    add_common(fit, fit_opts);
    fit->add_option("recipe", recipe, "fig1b-spectrum, fig2a-ratio, fig2b-beat, fig3-temperature, figS2b-bimolecular")
        ->required();
    fit->add_option("--data", data_path, "measured data CSV");

    CommonOptions val_opts;
    auto* val = app.add_subcommand("validate", "check tables, constants and basis adequacy");
    add_common(val, val_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*kick) {
            const auto config = resolve(kick_opts);
            return finish(helirot::cmd_simulate_kick(config), config);
        }
        if (*synth) {
            const auto config = resolve(synth_opts);
            return finish(helirot::cmd_synthesize(config), config);
        }
        if (*spectrum) {
            const auto config = resolve(spectrum_opts);
            return finish(helirot::cmd_spectrum(config, trace_path), config);
        }
        if (*fit) {
            const auto config = resolve(fit_opts);
            std::optional<std::filesystem::path> data;
            if (!data_path.empty()) {
                data = data_path;
            }
            return finish(helirot::cmd_fit(config, recipe, data), config);
        }
        if (*val) {
            const auto config = resolve(val_opts);
            return finish(helirot::cmd_validate(config), config);
        }
    } catch (const helirot::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 3;
    } catch (const helirot::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
