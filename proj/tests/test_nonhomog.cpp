#include <doctest.h>

#include <cmath>

#include "fucik/nonhomog.hpp"
#include "fucik/rng.hpp"

using namespace fucik;

namespace {

const TruncationSpec kTrunc = TruncationSpec::with_bounds(8, 8, 2.0);

NonlinearitySpec arctan_spec(double scale) { return make_nonlinearity("arctan:" + std::to_string(scale), kTrunc); }

ConjugateScene scene_of(const NonlinearitySpec& nl, double cp, double cn, double sign = 1.0) {
    ConjugateScene sc;
    sc.coef_pos = cp;
    sc.coef_neg = cn;
    sc.p_sign = sign;
    sc.nl = &nl;
    return sc;
}

double J_of(const NonlinearitySpec& nl, const ConjugateScene& sc, double s, double t, double u) {
    const double up = std::max(u, 0.0), un = std::max(-u, 0.0);
    double P = 0.0;
    if (!nl.is_zero()) {
        // closed forms exist for all catalog entries used here
        P = nl.P(s, t, u);
    }
    return 0.5 * sc.coef_pos * up * up + 0.5 * sc.coef_neg * un * un + sc.p_sign * P;
}

}  // namespace

TEST_CASE("hypotheses pass for p == 0 strictly inside the square") {
    const auto nl = make_nonlinearity("zero", kTrunc);
    const SampleSpec samples;
    const auto rep = check_hypotheses(nl, 0.5, 0.5, 1, Side::Lower, 0.1, 0.1, samples);
    CHECK(rep.h1_ok);
    CHECK(rep.h2_ok);
    CHECK(rep.slope_lo == doctest::Approx(0.5));
    CHECK(rep.slope_hi == doctest::Approx(0.5));
    CHECK(rep.eps_first_adj <= 0.1);
    CHECK(rep.eps_under == doctest::Approx(0.5));
}

TEST_CASE("hypotheses pass for a u-independent forcing") {
    const auto nl = make_nonlinearity("forcing:1,0,cos", kTrunc);
    const SampleSpec samples;
    const auto rep = check_hypotheses(nl, 0.6, 0.4, 1, Side::Lower, 0.1, 0.1, samples);
    CHECK(rep.h1_ok);
    CHECK(rep.slope_lo == doctest::Approx(0.4));
    CHECK(rep.slope_hi == doctest::Approx(0.6));
}

TEST_CASE("a slope violation is caught with a witness") {
    NonlinearitySpec nl;
    nl.name = "expr";
    nl.p = [](double, double, double u) { return -2.0 * std::tanh(u); };  // slope -2 at 0
    nl.u_independent = false;
    const SampleSpec samples;
    try {
        check_hypotheses(nl, 0.5, 0.5, 1, Side::Lower, 0.1, 0.1, samples);
        FAIL("expected HypothesisViolated");
    } catch (const HypothesisViolated& e) {
        CHECK(std::abs(e.u) < 5.0);  // witness near the origin where the slope dips
    }
}

TEST_CASE("upper-side hypotheses") {
    const auto nl = make_nonlinearity("zero", kTrunc);
    const SampleSpec samples;
    const auto rep = check_hypotheses(nl, 1.5, 1.5, 1, Side::Upper, 0.1, 0.1, samples);
    CHECK(rep.h1_ok);  // slopes below lambda_2 = 3
    CHECK(rep.h2_ok);  // slopes positive
    // (a,b) above lambda_2 would break H1'.
    CHECK_THROWS_AS(check_hypotheses(nl, 3.5, 3.5, 1, Side::Upper, 0.1, 0.1, samples),
                    HypothesisViolated);
}

TEST_CASE("conjugate of the pure quadratic") {
    const auto nl = make_nonlinearity("zero", kTrunc);
    const auto sc = scene_of(nl, 0.4, 0.9);
    const auto cv = conjugate_eval(0.3, 0.7, 2.0, sc);
    CHECK(cv.q == doctest::Approx(0.0));
    CHECK(cv.u_of_v == doctest::Approx(2.0 / 0.4).epsilon(1e-14));
    CHECK(cv.jstar == doctest::Approx(4.0 / (2 * 0.4)).epsilon(1e-14));
    const auto cvn = conjugate_eval(0.3, 0.7, -1.5, sc);
    CHECK(cvn.jstar == doctest::Approx(1.5 * 1.5 / (2 * 0.9)).epsilon(1e-14));
}

TEST_CASE("self-conjugate quadratic") {
    const auto nl = make_nonlinearity("zero", kTrunc);
    const auto sc = scene_of(nl, 1.0, 1.0);
    const auto cv = conjugate_eval(0.0, 0.0, 3.0, sc);
    CHECK(cv.jstar == doctest::Approx(4.5).epsilon(1e-14));
    CHECK(cv.u_of_v == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("dense-grid conjugate oracle for the arctan entry") {
    const auto nl = arctan_spec(1.0);
    const auto sc = scene_of(nl, 1.0, 2.0);
    const double v = 2.0;
    const auto cv = conjugate_eval(0.5, 0.5, v, sc);

    // sup over u in [-1e3, 1e3] on 10^7 grid points
    double best = -std::numeric_limits<double>::infinity();
    double best_u = 0.0;
    const int N = 10000000;
    for (int i = 0; i <= N; ++i) {
        const double u = -1000.0 + 2000.0 * static_cast<double>(i) / N;
        const double val = v * u - J_of(nl, sc, 0.5, 0.5, u);
        if (val > best) {
            best = val;
            best_u = u;
        }
    }
    CHECK(cv.jstar == doctest::Approx(best).epsilon(1e-6));
    CHECK(cv.u_of_v == doctest::Approx(best_u).epsilon(1e-3));
}

TEST_CASE("Fenchel round trip and Young inequality") {
    const auto nl = arctan_spec(0.7);
    const auto sc = scene_of(nl, 0.9, 1.7);
    Rng rng(21);
    for (int rep = 0; rep < 40; ++rep) {
        const double s = rng.uniform(0.1, 3.0), t = rng.uniform(0.0, 6.28);
        const double u = rng.uniform(-30.0, 30.0);
        const double jpu = sc.coef_pos * std::max(u, 0.0) - sc.coef_neg * std::max(-u, 0.0) +
                           nl.p(s, t, u);
        const auto cv = conjugate_eval(s, t, jpu, sc);
        CHECK(cv.u_of_v == doctest::Approx(u).epsilon(1e-10));
        // equality in Young's inequality at the round-trip pair
        const double lhs = cv.jstar + J_of(nl, sc, s, t, u);
        CHECK(lhs == doctest::Approx(jpu * u).epsilon(1e-10));

        // strict inequality elsewhere
        const double u_other = u + 1.5;
        CHECK(cv.jstar + J_of(nl, sc, s, t, u_other) >= jpu * u_other - 1e-12);
    }
}

TEST_CASE("convexity probe of v -> J* - (mu/2) v^2") {
    const auto nl = arctan_spec(0.5);
    const auto sc = scene_of(nl, 0.4, 0.4);
    const double mu = 0.1;  // J'' <= max slope 0.9 < 1/mu = 10
    const double h = 0.05;
    for (double v = -8.0; v <= 8.0; v += 0.25) {
        const double f0 = conjugate_eval(1.0, 2.0, v - h, sc).jstar - 0.5 * mu * (v - h) * (v - h);
        const double f1 = conjugate_eval(1.0, 2.0, v, sc).jstar - 0.5 * mu * v * v;
        const double f2 = conjugate_eval(1.0, 2.0, v + h, sc).jstar - 0.5 * mu * (v + h) * (v + h);
        CHECK(f0 + f2 - 2.0 * f1 >= -1e-10);
    }
}

TEST_CASE("q sublinearity for the arctan entry") {
    const auto nl = arctan_spec(1.0);
    const auto sc = scene_of(nl, 0.9, 1.9);
    double prev = std::numeric_limits<double>::infinity();
    for (double vmag : {1e2, 1e3, 1e4}) {
        double worst = 0.0;
        for (double sign : {-1.0, 1.0}) {
            const auto cv = conjugate_eval(0.5, 1.0, sign * vmag, sc);
            worst = std::max(worst, std::abs(cv.q) / vmag);
        }
        CHECK(worst < prev);
        // analytic envelope: |q| ~ (pi/2)/min(coef) for large |v|
        const double envelope = 0.5 * 3.14159265358979 / std::min(sc.coef_pos, sc.coef_neg) / vmag;
        CHECK(worst <= 10.0 * envelope);
        prev = worst;
    }
}

TEST_CASE("functional I vanishes at zero and matches finite differences") {
    const auto cfg = validate_lower(1, 0.1, 0.1, kTrunc);
    const auto op = ShiftedOperator::lower(cfg);
    const Transform transform(kTrunc);
    const auto nl = arctan_spec(0.3);
    // a = 0.6, b = 0.4 inside Q_1
    const auto sc = scene_of(nl, 0.6 - 0.1, 0.4 - 0.1);

    const auto [I0, g0] = functional_I(SpectralField::zero(kTrunc), op, sc, transform);
    CHECK(std::abs(I0) < 1e-14);

    const auto nlz = make_nonlinearity("zero", kTrunc);
    const auto scz = scene_of(nlz, 0.4, 0.4);
    const auto [Iz, gz] = functional_I(SpectralField::zero(kTrunc), op, scz, transform);
    CHECK(Iz == 0.0);
    CHECK(gz.coeffs.norm() == 0.0);

    Rng rng(77);
    const double h = 1e-5;
    for (int rep = 0; rep < 20; ++rep) {
        SpectralField v = SpectralField::zero(kTrunc);
        for (int i = 0; i < v.coeffs.size(); ++i) v.coeffs[i] = 0.6 * rng.normal();
        SpectralField dir = SpectralField::zero(kTrunc);
        for (int i = 0; i < dir.coeffs.size(); ++i) dir.coeffs[i] = rng.normal();
        dir.coeffs /= dir.norm();
        const auto [I, g] = functional_I(v, op, sc, transform);
        SpectralField vp = v, vm = v;
        vp.coeffs += h * dir.coeffs;
        vm.coeffs -= h * dir.coeffs;
        const double fd = (functional_I(vp, op, sc, transform).first -
                           functional_I(vm, op, sc, transform).first) /
                          (2 * h);
        const double an = g.coeffs.dot(dir.coeffs);
        CHECK(std::abs(fd - an) <= 1e-5 * std::max(1.0, std::abs(an)));
    }
}

TEST_CASE("homogeneous dual functional is negative in the type-I region") {
    const auto cfg = validate_lower(1, 0.1, 0.1, kTrunc);
    const auto op = ShiftedOperator::lower(cfg);
    const Transform transform(kTrunc);
    const auto nl = make_nonlinearity("zero", kTrunc);
    const auto sc = scene_of(nl, 0.5 - 0.1, 0.5 - 0.1);
    Rng rng(13);
    for (int rep = 0; rep < 100; ++rep) {
        SpectralField v = SpectralField::zero(kTrunc);
        for (int i = 0; i < v.coeffs.size(); ++i) v.coeffs[i] = rng.normal();
        v.coeffs *= rng.uniform(0.01, 3.0) / v.coeffs.norm();
        CHECK(functional_I(v, op, sc, transform).first < 0.0);
    }
}

TEST_CASE("exact linear solve recovers 2 phi_(1,0)") {
    const auto nl = make_nonlinearity("forcing:1,0,cos", kTrunc);
    SolveOptions options;
    options.trunc = kTrunc;
    options.mcfg.n_starts = 4;
    options.mcfg.seed = 3;
    options.grad_tol = 1e-10;
    options.classify_n_r = 9;
    const SolveResult result = solve(nl, 0.5, 0.5, 1, Side::Lower, options);
    CHECK(result.region == Region::BelowC);
    CHECK(result.converged);
    const int idx = ModeSet::build(kTrunc).find(ModeIndex(1, 0, Parity::Cos));
    CHECK(result.u0.coeffs[idx] == doctest::Approx(2.0).epsilon(1e-6));
    for (int i = 0; i < result.weak_residuals.size(); ++i)
        if (i != idx) CHECK(result.weak_residuals[i] <= 1e-8);
    CHECK(std::abs(result.weak_residuals[idx]) <= 1e-8);
    CHECK(result.max_kernel_residual <= 1e-8);
}

TEST_CASE("solve with p == 0 returns the zero solution") {
    const auto nl = make_nonlinearity("zero", kTrunc);
    SolveOptions options;
    options.trunc = kTrunc;
    options.mcfg.n_starts = 3;
    options.mcfg.seed = 9;
    options.classify_n_r = 9;
    const SolveResult result = solve(nl, 0.5, 0.5, 1, Side::Lower, options);
    CHECK(std::abs(result.I_value) <= 1e-10);
    CHECK(result.u0.norm() <= 1e-6);
}

TEST_CASE("solve outside the region is rejected") {
    const auto nl = make_nonlinearity("zero", kTrunc);
    SolveOptions options;
    options.trunc = kTrunc;
    options.mcfg.n_starts = 3;
    options.classify_n_r = 9;
    CHECK_THROWS_AS(solve(nl, 0.999, 0.999, 1, Side::Upper, options), RegionError);
}

TEST_CASE("arctan solve in the type-I region has small weak residuals") {
    const auto nl = arctan_spec(0.2);
    SolveOptions options;
    options.trunc = kTrunc;
    options.mcfg.n_starts = 3;
    options.mcfg.seed = 11;
    options.classify_n_r = 9;
    const SolveResult result = solve(nl, 0.6, 0.4, 1, Side::Lower, options);
    CHECK(result.max_weak_residual <= 1e-5);
    CHECK(result.max_kernel_residual <= 1e-5);
    // u0 = resolvent(v0) mode by mode
    const auto cfgL = validate_lower(1, result.eps_first_used, result.eps_second_used, kTrunc);
    const SpectralField check = apply_L(result.v0, cfgL);
    CHECK((check.coeffs - result.u0.coeffs).norm() <= 1e-12 * (1.0 + result.u0.norm()));
}

TEST_CASE("arctan solve at the default truncation") {
    // Classification curves may come from a cheaper truncation; only their
    // plane geometry enters the region gate.
    MaximizerConfig cheap;
    cheap.n_starts = 6;
    cheap.coarse_iters = 200;
    cheap.max_iters = 2500;
    cheap.seed = 5;
    const Curve c = trace(1, Side::Lower, default_r_grid(100.0, 11), 0.1, 0.1, kTrunc, cheap);
    const Curve d = trace(1, Side::Upper, default_r_grid(100.0, 11), 0.1, 0.1, kTrunc, cheap);

    const TruncationSpec full = TruncationSpec::with_bounds(32, 32, 2.0);
    const auto nl = make_nonlinearity("arctan:0.2", full);
    SolveOptions options;
    options.trunc = full;
    options.mcfg.n_starts = 2;
    options.mcfg.seed = 17;
    options.curve_c = &c;
    options.curve_d = &d;
    const SolveResult result = solve(nl, 0.6, 0.4, 1, Side::Lower, options);
    CHECK(result.max_weak_residual <= 1e-5);
    CHECK(result.max_kernel_residual <= 1e-5);
}

TEST_CASE("gap diagnostic is positive in a type-I point") {
    MaximizerConfig mcfg;
    mcfg.n_starts = 6;
    mcfg.coarse_iters = 200;
    mcfg.seed = 2;
    const double gap = gap_diagnostic(0.5, 0.5, 1, Side::Lower, 0.1, 0.1, kTrunc, mcfg);
    CHECK(gap > 0.0);
}
