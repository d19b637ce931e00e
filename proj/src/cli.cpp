#include "fucik/cli.hpp"

#include <cmath>
#include <ostream>

#include "fucik/maximizer.hpp"
#include "fucik/serialize.hpp"

namespace fucik {

namespace {

int run_spectrum_list(const SpectrumListCmd& cmd, std::ostream& out) {
    const auto list = enumerate_spectrum(cmd.m_bound, cmd.n_bound);
    out << "lambda,multiplicity,modes\n";
    JsonWriter w;
    w.begin_object();
    w.key("version").value(std::string(kToolVersion));
    w.key("config").begin_object();
    w.key("m_bound").value(cmd.m_bound);
    w.key("n_bound").value(cmd.n_bound);
    w.end_object();
    w.key("spectrum").begin_array();
    for (const auto& e : list) {
        out << e.lambda << "," << e.multiplicity << ",";
        w.begin_object();
        w.key("lambda").value(e.lambda);
        w.key("multiplicity").value(e.multiplicity);
        w.key("modes").begin_array();
        bool first = true;
        for (const auto& m : e.modes) {
            if (!first) out << " ";
            first = false;
            out << "(" << m.m << "," << m.n << "," << parity_name(m.parity) << ")";
            w.begin_array();
            w.value(m.m);
            w.value(m.n);
            w.value(parity_name(m.parity));
            w.end_array();
        }
        w.end_array();
        w.end_object();
        out << "\n";
    }
    w.end_array();
    w.end_object();
    if (!cmd.out.empty()) write_file(cmd.out, w.str() + "\n");
    return 0;
}

int run_curve_trace(const CurveTraceCmd& cmd, std::ostream& out) {
    const auto grid = default_r_grid(cmd.r_max, cmd.n_r);
    const Curve curve = trace(cmd.k, cmd.side, grid, cmd.eps_first, cmd.eps_second, cmd.trunc,
                              cmd.mcfg);
    bool all_ok = true;
    for (const auto& p : curve.points)
        if (p.flag == "noconv") all_ok = false;
    if (!cmd.out.empty()) {
        write_file(cmd.out + ".csv", curve_to_csv(curve));
        write_file(cmd.out + ".json", curve_to_json(curve, cmd.mcfg.seed) + "\n");
    }
    out << "traced " << curve.points.size() << " points, lambda_k = " << curve.lambda_k
        << ", square ]" << fmt17(curve.square_lo) << ", " << fmt17(curve.square_hi) << "[^2\n";
    return all_ok ? 0 : 3;
}

int run_curve_check(const CurveCheckCmd& cmd, std::ostream& out) {
    const Curve* lower = nullptr;
    const Curve* upper = nullptr;
    std::vector<Curve> curves;
    curves.reserve(cmd.curves_in.size());
    for (const auto& path : cmd.curves_in) curves.push_back(curve_from_json(read_file(path)));
    for (const auto& c : curves) {
        if (c.side == Side::Lower) lower = &c;
        if (c.side == Side::Upper) upper = &c;
    }
    if (lower == nullptr || upper == nullptr)
        throw DomainError("curve-check needs one lower and one upper curve bundle");
    if (lower->k != cmd.k || upper->k != cmd.k)
        throw DomainError("curve-check: bundles traced for a different k");
    const Region region = classify(cmd.a, cmd.b, *lower, *upper);
    out << region_name(region) << "\n";
    return 0;
}

int run_validate_1d(const Validate1dCmd& cmd, std::ostream& out) {
    std::vector<OdePoint> points;
    if (cmd.family == Family::Dirichlet) {
        const int m = cmd.index;
        // Aggregate every branch (p,q) with p+q=m, |p-q| <= 1, q >= 1.
        for (int p = (m + 1) / 2; p >= m / 2 && p >= 1; --p) {
            const int q = m - p;
            if (q < 1) continue;
            const auto sampled = sample_dirichlet(m, {p, q}, cmd.n_samples);
            points.insert(points.end(), sampled.begin(), sampled.end());
        }
        if (points.empty()) {
            // m = 1 degenerates to the lines a = 1 and b = 1.
            const auto sampled = sample_dirichlet(1, {1, 0}, cmd.n_samples);
            points.insert(points.end(), sampled.begin(), sampled.end());
        }
    } else {
        points = sample_periodic(cmd.index, cmd.n_samples);
    }

    double worst = 0.0;
    std::string csv = "family,index,p,q,a,b,defect\n";
    for (const auto& pt : points) {
        double defect = 0.0;
        if (pt.family == Family::Dirichlet) {
            // Branches starting negative are shot with the roles of a and b
            // swapped (u -> -u symmetry).
            const ShootResult shot = pt.hump_pos >= pt.hump_neg
                                         ? shoot_dirichlet(pt.a, pt.b)
                                         : shoot_dirichlet(pt.b, pt.a);
            defect = std::abs(shot.miss);
        } else {
            defect = shoot_periodic(pt.a, pt.b);
        }
        worst = std::max(worst, defect);
        csv += std::string(pt.family == Family::Dirichlet ? "dirichlet" : "periodic") + "," +
               std::to_string(pt.index) + "," + std::to_string(pt.hump_pos) + "," +
               std::to_string(pt.hump_neg) + "," + fmt17(pt.a) + "," + fmt17(pt.b) + "," +
               fmt17(defect) + "\n";
    }
    if (!cmd.out.empty()) {
        write_file(cmd.out + ".csv", csv);
        JsonWriter w;
        w.begin_object();
        w.key("version").value(std::string(kToolVersion));
        w.key("seed").value(0L);
        w.key("config").begin_object();
        w.key("family").value(std::string(cmd.family == Family::Dirichlet ? "dirichlet"
                                                                          : "periodic"));
        w.key("index").value(cmd.index);
        w.key("n_samples").value(cmd.n_samples);
        w.end_object();
        w.key("points_checked").value(static_cast<long>(points.size()));
        w.key("worst_defect").value(worst);
        w.end_object();
        write_file(cmd.out + ".json", w.str() + "\n");
    }
    out << "checked " << points.size() << " closed-form points, worst shooting defect "
        << fmt17(worst) << "\n";
    return worst <= 1e-6 ? 0 : 3;
}

int run_solve(const SolveCmd& cmd, std::ostream& out) {
    const NonlinearitySpec nl = make_nonlinearity(cmd.p_spec, cmd.trunc);
    SolveOptions options;
    options.trunc = cmd.trunc;
    options.mcfg = cmd.mcfg;
    const SolveResult result = solve(nl, cmd.a, cmd.b, cmd.k, cmd.side, options);

    JsonWriter w;
    w.begin_object();
    w.key("version").value(std::string(kToolVersion));
    w.key("seed").value(static_cast<long>(cmd.mcfg.seed));
    w.key("config").begin_object();
    w.key("k").value(cmd.k);
    w.key("side").value(std::string(cmd.side == Side::Lower ? "lower" : "upper"));
    w.key("a").value(cmd.a);
    w.key("b").value(cmd.b);
    w.key("p").value(cmd.p_spec);
    w.key("eps_first_used").value(result.eps_first_used);
    w.key("eps_second_used").value(result.eps_second_used);
    w.key("trunc");
    write_trunc(w, cmd.trunc);
    w.end_object();
    w.key("region").value(region_name(result.region));
    w.key("converged").value(result.converged);
    w.key("I_value").value(result.I_value);
    w.key("grad_norm").value(result.grad_norm);
    w.key("max_weak_residual").value(result.max_weak_residual);
    w.key("max_kernel_residual").value(result.max_kernel_residual);
    w.key("v0");
    write_field(w, result.v0);
    w.key("u0");
    write_field(w, result.u0);
    w.end_object();
    if (!cmd.out.empty()) {
        write_file(cmd.out + ".json", w.str() + "\n");
        const Transform transform(cmd.trunc);
        write_file(cmd.out + "_u0.csv", grid_to_csv(transform.synthesize(result.u0), transform));
    }
    out << "region " << region_name(result.region) << ", I = " << fmt17(result.I_value)
        << ", max weak residual " << fmt17(result.max_weak_residual) << "\n";
    return result.converged ? 0 : 3;
}

int run_oracle(const OracleCmd& cmd, std::ostream& out) {
    if (cmd.suite != "ratio") throw DomainError("unknown oracle suite '" + cmd.suite + "'");
    // Tiny truncation with dimension <= 8 for the exhaustive oracle.
    TruncationSpec tiny(2, 1, 6, 8, 2.0);
    if (cmd.dim <= 3)
        tiny = TruncationSpec(1, 1, 4, 6, 2.0);
    const Transform transform(tiny);
    if (transform.modes().size() > 8) throw DomainError("oracle: dimension must be <= 8");
    const auto cfg = validate_lower(1, 0.1, 0.1, tiny);
    const auto op = ShiftedOperator::lower(cfg);

    MaximizerConfig mcfg;
    mcfg.seed = cmd.seed;
    JsonWriter w;
    w.begin_object();
    w.key("version").value(std::string(kToolVersion));
    w.key("seed").value(static_cast<long>(cmd.seed));
    w.key("suite").value(cmd.suite);
    w.key("dim").value(transform.modes().size());
    w.key("cases").begin_array();
    bool ok = true;
    for (double r : {0.5, 1.0, 2.0}) {
        const auto solver = maximize_ratio(op, r, transform, mcfg);
        const double oracle = brute_force_sup(op, r, transform, 1000000, cmd.seed);
        const double diff = std::abs(solver.a_hat - oracle);
        ok = ok && oracle <= solver.a_hat + 1e-9 && diff <= 1e-3 * std::abs(solver.a_hat);
        w.begin_object();
        w.key("r").value(r);
        w.key("solver").value(solver.a_hat);
        w.key("oracle").value(oracle);
        w.key("diff").value(diff);
        w.end_object();
        out << "r = " << fmt17(r) << ": solver " << fmt17(solver.a_hat) << ", oracle "
            << fmt17(oracle) << "\n";
    }
    w.end_array();
    w.key("agree").value(ok);
    w.end_object();
    if (!cmd.out.empty()) write_file(cmd.out, w.str() + "\n");
    return ok ? 0 : 3;
}

}  // namespace

PExpression parse_p(const std::string& source) { return PExpression::parse(source); }

int run(const Command& command, std::ostream& out) {
    try {
        return std::visit(
            [&out](const auto& cmd) -> int {
                using T = std::decay_t<decltype(cmd)>;
                if constexpr (std::is_same_v<T, SpectrumListCmd>)
                    return run_spectrum_list(cmd, out);
                else if constexpr (std::is_same_v<T, CurveTraceCmd>)
                    return run_curve_trace(cmd, out);
                else if constexpr (std::is_same_v<T, CurveCheckCmd>)
                    return run_curve_check(cmd, out);
                else if constexpr (std::is_same_v<T, Validate1dCmd>)
                    return run_validate_1d(cmd, out);
                else if constexpr (std::is_same_v<T, SolveCmd>)
                    return run_solve(cmd, out);
                else
                    return run_oracle(cmd, out);
            },
            command);
    } catch (const ParseError& e) {
        out << "parse error at offset " << e.position << ": " << e.what() << "\n";
        return 4;
    } catch (const InvalidEps& e) {
        out << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const HypothesisViolated& e) {
        out << "validation error: " << e.what() << " (witness s=" << fmt17(e.s)
            << " t=" << fmt17(e.t) << " u=" << fmt17(e.u) << ")\n";
        return 2;
    } catch (const RegionError& e) {
        out << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const ZeroEigenvalue& e) {
        out << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        out << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace fucik
