// Batch experiment driver.  One subcommand per experiment; exit codes:
// 0 success, 2 validation/ambiguity, 3 precision/budget, 1 anything else.
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "eklab/errors.hpp"
#include "eklab/experiments.hpp"

namespace ek = eklab::experiments;

int main(int argc, char** argv) {
    CLI::App app{"Floor-sequence statistics laboratory"};
    app.require_subcommand(1);

    ek::ExperimentConfig cfg;
    static const struct {
        ek::ExperimentKind kind;
        const char* name;
        const char* help;
    } kSubs[] = {
        {ek::ExperimentKind::ek_single, "ek_single",
         "distribution of omega(floor(alpha n + beta)): d_K and CDF curve"},
        {ek::ExperimentKind::ek_joint, "ek_joint",
         "joint distribution for several slopes: orthant d_K and order-2 moments"},
        {ek::ExperimentKind::moments, "moments",
         "standardized mixed moments against the Gaussian values (cap via --l)"},
        {ek::ExperimentKind::quantitative, "quantitative",
         "d_K ladder over N plus independent-model and smoothing-bound diagnostics"},
        {ek::ExperimentKind::kubilius, "kubilius",
         "independent model: characteristic function, binomial moments, tail margin"},
        {ek::ExperimentKind::adversary, "adversary",
         "floor-collapse schedule: construction, exhaustive check, tail-mass report"},
        {ek::ExperimentKind::relations, "relations",
         "certified near-relations among slopes and the rational surrogate"},
        {ek::ExperimentKind::coprimality, "coprimality",
         "density of n coprime to floor(alpha n)"},
    };

    for (const auto& s : kSubs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--n", cfg.N, "sample size N (>= 16)");
        sub->add_option("--alpha", cfg.alphas,
                        "slope spec (rational:p/q, sqrt:d, quadratic:(a+b*sqrt:d)/c, decimal:x); repeatable");
        sub->add_option("--beta", cfg.betas, "shift spec, parallel to --alpha; repeatable");
        sub->add_option("--seed", cfg.seed, "RNG seed for sampled diagnostics");
        sub->add_option("--out", cfg.out, "export base path (omit to print CSV to stdout)");
        sub->add_option("--format", cfg.format, "csv (one file per table) or json (single document)")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--r", cfg.R, "model prime cutoff override (2 <= R <= N)");
        sub->add_option("--j", cfg.J, "relation height bound (relations; default 64, minimum 64)");
        sub->add_option("--l", cfg.L, "moment cap (moments; default 4) or level count (adversary; default 2)");
        sub->add_option("--eps", cfg.epsilon, "exact rational tolerance, e.g. 1/1000 (relations)");
        sub->add_option("--d", cfg.degree, "polynomial degree (adversary; default 2)");
        sub->add_option("--cache", cfg.cache_dir, "sieve cache directory");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    for (const auto& s : kSubs)
        if (app.get_subcommand(s.name)->parsed()) cfg.experiment = s.kind;

    try {
        const ek::ExperimentResult result = ek::run_experiment(cfg);
        if (cfg.out.empty()) {
            for (const ek::Table& t : result.tables)
                std::cout << "# table " << t.name << "\n" << ek::table_csv(t);
        } else {
            for (const auto& path : ek::export_results(result))
                std::cerr << "wrote " << path.string() << "\n";
        }
        std::fprintf(stderr, "wall %.3f s\n", result.wall_seconds);
        return 0;
    } catch (const eklab::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const eklab::ambiguity_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const eklab::precision_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const eklab::budget_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
