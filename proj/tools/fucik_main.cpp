// Command line front end.  Flags mirror the command fields; a JSON config
// file can preset any shared flag and explicit flags win.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "fucik/cli.hpp"

namespace {

using namespace fucik;

TruncationSpec trunc_from_flags(int m_max, int n_max, int grid_s, int grid_t, double oversample) {
    if (grid_s <= 0 || grid_t <= 0) {
        TruncationSpec t = TruncationSpec::with_bounds(m_max, n_max, oversample);
        if (grid_s > 0) t.grid_s = grid_s;
        if (grid_t > 0) t.grid_t = grid_t;
        t.validate();
        return t;
    }
    return TruncationSpec(m_max, n_max, grid_s, grid_t, oversample);
}

Side side_from_string(const std::string& s) {
    if (s == "lower") return Side::Lower;
    if (s == "upper") return Side::Upper;
    throw CLI::ValidationError("--side must be lower or upper");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fucik spectrum curves of the 2:1 wave operator and dual solves"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "JSON file presetting shared numeric flags");

    // Shared numeric knobs with flag-over-config precedence.
    int m_max = 32, n_max = 32, grid_s = 0, grid_t = 0;
    double oversample = 2.0;
    double eps1 = 0.1, eps2 = 0.1, eps3 = 0.1, eps4 = 0.1;
    MaximizerConfig mcfg;

    auto add_trunc_flags = [&](CLI::App* cmd) {
        cmd->add_option("--m-max", m_max, "spatial mode bound");
        cmd->add_option("--n-max", n_max, "temporal mode bound");
        cmd->add_option("--grid-s", grid_s, "collocation points in s (0 = derive)");
        cmd->add_option("--grid-t", grid_t, "collocation points in t (0 = derive)");
        cmd->add_option("--oversample", oversample, "anti-aliasing margin");
    };
    auto add_mcfg_flags = [&](CLI::App* cmd) {
        cmd->add_option("--n-starts", mcfg.n_starts, "multi-start count");
        cmd->add_option("--max-iters", mcfg.max_iters, "iteration budget per start");
        cmd->add_option("--tol-residual", mcfg.tol_residual, "Euler-Lagrange residual tolerance");
        cmd->add_option("--seed", mcfg.seed, "random seed");
    };

    auto* spectrum = app.add_subcommand("spectrum-list", "distinct eigenvalues in a bound box");
    int m_bound = 8, n_bound = 8;
    std::string spectrum_out;
    spectrum->add_option("--m-bound", m_bound)->required();
    spectrum->add_option("--n-bound", n_bound)->required();
    spectrum->add_option("--out", spectrum_out, "JSON artifact path");

    auto* curve_trace = app.add_subcommand("curve-trace", "trace one extremal curve");
    int trace_k = 1, n_r = 40;
    std::string trace_side = "lower", trace_out;
    double r_max = 100.0;
    curve_trace->add_option("--k", trace_k)->required();
    curve_trace->add_option("--side", trace_side)->required();
    curve_trace->add_option("--eps1", eps1);
    curve_trace->add_option("--eps2", eps2);
    curve_trace->add_option("--eps3", eps3);
    curve_trace->add_option("--eps4", eps4);
    curve_trace->add_option("--r-max", r_max);
    curve_trace->add_option("--n-r", n_r);
    curve_trace->add_option("--out", trace_out, "artifact prefix (.csv/.json)");
    add_trunc_flags(curve_trace);
    add_mcfg_flags(curve_trace);

    auto* curve_check = app.add_subcommand("curve-check", "classify a point against curves");
    double check_a = 0.0, check_b = 0.0;
    int check_k = 1;
    std::vector<std::string> curves_in;
    curve_check->add_option("--a", check_a)->required();
    curve_check->add_option("--b", check_b)->required();
    curve_check->add_option("--k", check_k)->required();
    curve_check->add_option("--curves-in", curves_in, "curve JSON bundles (lower and upper)")
        ->required()
        ->expected(1, 2);

    auto* validate_1d = app.add_subcommand("validate-1d", "shooting check of separable families");
    std::string family = "dirichlet", validate_out;
    int index = 2, n_samples = 50;
    validate_1d->add_option("--family", family)->required()->check(CLI::IsMember({"dirichlet", "periodic"}));
    validate_1d->add_option("--index", index)->required();
    validate_1d->add_option("--n-samples", n_samples);
    validate_1d->add_option("--out", validate_out, "CSV artifact path");

    auto* solve_cmd = app.add_subcommand("solve", "dual solve of the nonhomogeneous problem");
    int solve_k = 1;
    std::string solve_side = "lower", p_spec = "zero", solve_out;
    double solve_a = 0.5, solve_b = 0.5;
    solve_cmd->add_option("--k", solve_k)->required();
    solve_cmd->add_option("--side", solve_side)->required();
    solve_cmd->add_option("--a", solve_a)->required();
    solve_cmd->add_option("--b", solve_b)->required();
    solve_cmd->add_option("--p", p_spec, "zero | forcing:m,n,cos|sin | arctan:c | expr:<text>");
    solve_cmd->add_option("--out", solve_out, "artifact prefix");
    add_trunc_flags(solve_cmd);
    add_mcfg_flags(solve_cmd);

    auto* oracle = app.add_subcommand("oracle", "brute-force oracle vs solver");
    std::string suite = "ratio", oracle_out;
    int dim = 6;
    std::uint64_t oracle_seed = 1;
    oracle->add_option("--suite", suite);
    oracle->add_option("--dim", dim);
    oracle->add_option("--seed", oracle_seed);
    oracle->add_option("--out", oracle_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (!config_path.empty()) {
            // Config presets apply only where the flag was not given.
            std::ifstream f(config_path);
            if (!f) throw fucik::Error("cannot read config " + config_path);
            nlohmann::json j;
            f >> j;
            auto preset = [&](const char* key, auto& target, const CLI::Option* opt) {
                if (j.contains(key) && (opt == nullptr || opt->count() == 0))
                    target = j.at(key).get<std::decay_t<decltype(target)>>();
            };
            const CLI::App* active = app.get_subcommands().front();
            auto find = [&](const std::string& name) -> const CLI::Option* {
                try {
                    return active->get_option(name);
                } catch (...) {
                    return nullptr;
                }
            };
            preset("k", trace_k, find("--k"));
            preset("k", solve_k, find("--k"));
            preset("eps1", eps1, find("--eps1"));
            preset("eps2", eps2, find("--eps2"));
            preset("eps3", eps3, find("--eps3"));
            preset("eps4", eps4, find("--eps4"));
            preset("m_max", m_max, find("--m-max"));
            preset("n_max", n_max, find("--n-max"));
            preset("grid_s", grid_s, find("--grid-s"));
            preset("grid_t", grid_t, find("--grid-t"));
            preset("oversample", oversample, find("--oversample"));
        }

        Command command;
        if (spectrum->parsed()) {
            command = SpectrumListCmd{m_bound, n_bound, spectrum_out};
        } else if (curve_trace->parsed()) {
            CurveTraceCmd c;
            c.k = trace_k;
            c.side = side_from_string(trace_side);
            c.eps_first = c.side == Side::Lower ? eps1 : eps3;
            c.eps_second = c.side == Side::Lower ? eps2 : eps4;
            c.trunc = trunc_from_flags(m_max, n_max, grid_s, grid_t, oversample);
            c.r_max = r_max;
            c.n_r = n_r;
            c.mcfg = mcfg;
            c.out = trace_out;
            command = c;
        } else if (curve_check->parsed()) {
            command = CurveCheckCmd{check_a, check_b, check_k, curves_in};
        } else if (validate_1d->parsed()) {
            Validate1dCmd c;
            c.family = family == "dirichlet" ? Family::Dirichlet : Family::Periodic;
            c.index = index;
            c.n_samples = n_samples;
            c.out = validate_out;
            command = c;
        } else if (solve_cmd->parsed()) {
            SolveCmd c;
            c.k = solve_k;
            c.side = side_from_string(solve_side);
            c.a = solve_a;
            c.b = solve_b;
            c.p_spec = p_spec;
            c.trunc = trunc_from_flags(m_max, n_max, grid_s, grid_t, oversample);
            c.mcfg = mcfg;
            c.out = solve_out;
            command = c;
        } else {
            command = OracleCmd{suite, dim, oracle_seed, oracle_out};
        }
        return fucik::run(command, std::cout);
    } catch (const fucik::ParseError& e) {
        std::cerr << "parse error at offset " << e.position << ": " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
