// zetatrap: weight tables, convergence sweeps, conditioning table, field sampling.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "zetatrap/experiments.hpp"
#include "zetatrap/stencil_table.hpp"

namespace {

using namespace zetatrap;

enum Exit { kOk = 0, kNumerical = 1, kUsage = 2 };

struct Output {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    explicit Output(const std::string& path) {
        if (path.empty() || path == "-")
            return;
        file.open(path);
        if (!file)
            throw InvalidInput("cannot open '" + path + "' for writing");
        stream = &file;
    }
    std::ostream& operator*() { return *stream; }
};

int cmd_weights(std::optional<int> K, std::optional<int> order, const std::string& kind, std::optional<double> z) {
    if (K.has_value() == order.has_value())
        throw InvalidInput("weights: give exactly one of --K or --order");
    if (order) {
        if (kind != "log")
            throw InvalidInput("weights: --order applies to --kind log only");
        if (*order < 2 || *order % 2 != 0)
            throw InvalidInput("weights: --order must be even and >= 2");
        K = (*order - 2) / 2;
    }
    if (*K < 0 || *K > 20)
        throw InvalidInput("weights: K must satisfy 0 <= K <= 20");
    CorrectionStencil s;
    if (kind == "log") {
        if (z)
            throw InvalidInput("weights: --z applies to --kind pow only");
        s = build_log_stencil(*K);
    } else {
        if (!z)
            throw InvalidInput("weights: --kind pow needs --z");
        s = build_pow_stencil(*K, *z);
    }
    write_weights(std::cout, s);
    std::cerr << "# nominal order " << display_order(s) << '\n';
    return kOk;
}

int cmd_convergence(const std::string& config, const std::string& out, bool timings) {
    const ProblemConfig cfg = load_config(config);
    const ConvergenceResult res = run_convergence(cfg);
    Output o(out);
    write_convergence_csv(*o, res, timings);
    write_eoc_summary(out.empty() ? std::cerr : std::cout, res);
    return kOk;
}

int cmd_table1(const std::string& config, const std::string& out) {
    const ProblemConfig cfg = load_config(config);
    const auto rows = run_table1(cfg);
    Output o(out);
    write_table1_csv(*o, rows);
    for (const auto& r : rows)
        if (!r.converged) {
            std::cerr << "GMRES did not converge for " << r.method << " at kappa = " << r.kappa << '\n';
            return kNumerical;
        }
    return kOk;
}

int cmd_field(const std::string& config, const std::string& out) {
    const ProblemConfig cfg = load_config(config);
    const auto samples = run_field(cfg);
    Output o(out);
    write_field_csv(*o, cfg, samples);
    return kOk;
}

int cmd_ingest_check(const std::string& path) {
    const ExternalStencilTable t = ingest_stencil_table(path);
    const LogCorrection c = to_log_correction(t);
    std::cout << "name: " << c.name << "\norder: " << c.order << "\ntaps: " << c.taps.size()
              << "\nreach: " << c.reach() << '\n';
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Zeta-corrected trapezoidal quadrature for boundary integral equations"};
    app.require_subcommand(1);

    std::optional<int> K, order;
    std::optional<double> z;
    std::string kind = "log", config, out, table;
    bool timings = false;

    auto* weights = app.add_subcommand("weights", "Print correction weights w_0..w_K");
    weights->add_option("--K", K, "Number of correction weights minus one (0..20)");
    weights->add_option("--order", order, "Nominal order 2K+2 (even), alternative to --K");
    weights->add_option("--kind", kind, "log or pow")->check(CLI::IsMember({"log", "pow"}));
    weights->add_option("--z", z, "z in the |x|^-z singularity, -1 < z < 1 (pow kind)");

    auto* convergence = app.add_subcommand("convergence", "Sweep N and methods; CSV of target errors with fitted EOC");
    convergence->add_option("--config", config, "JSON problem config")->required()->check(CLI::ExistingFile);
    convergence->add_option("--out", out, "Output CSV (default stdout)");
    convergence->add_flag("--timings", timings, "Record assemble and solve seconds");

    auto* table1 = app.add_subcommand("table1", "Condition numbers and GMRES iterations");
    table1->add_option("--config", config, "JSON problem config")->required()->check(CLI::ExistingFile);
    table1->add_option("--out", out, "Output CSV (default stdout)");

    auto* field = app.add_subcommand("field", "Sample the solved field on a grid");
    field->add_option("--config", config, "JSON problem config with a 'field' section")
        ->required()
        ->check(CLI::ExistingFile);
    field->add_option("--out", out, "Output CSV (default stdout)");

    auto* ingest = app.add_subcommand("ingest-check", "Parse and validate an external stencil table");
    ingest->add_option("--table", table, "Stencil table path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    try {
        if (*weights)
            return cmd_weights(K, order, kind, z);
        if (*convergence)
            return cmd_convergence(config, out, timings);
        if (*table1)
            return cmd_table1(config, out);
        if (*field)
            return cmd_field(config, out);
        return cmd_ingest_check(table);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const NotSupported& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
}
