#pragma once

// Dual solve of the asymptotically linear problem
//   box u = a u+ - b u- + p(s,t,u)
// in a type-I region: maximize
//   I(v) = 1/2 <(L-mu)v, v> - integral [ J*(s,t,v) - (mu/2) v^2 ]
// where J(s,t,u) = H(u) + P(s,t,u) with H the shifted quadratic and
// J*(s,t,.) its Fenchel-Legendre transform, then recover u0 = L v0.  Any
// stationary point of I solves the weak problem; the weak per-mode residuals
// are reported directly.
//
// The upper variant mirrors everything through M, rho and the reflected
// shifted quadratic: J(s,t,u) = K(u) - P(s,t,u), u0 = M v0.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fucik/curve.hpp"
#include "fucik/maximizer.hpp"

namespace fucik {

struct NonlinearitySpec {
    std::string name = "zero";
    // p(s, t, u); empty means p == 0.
    std::function<double(double, double, double)> p;
    // Closed-form antiderivative in u (P(s,t,0) = 0); empty falls back to
    // adaptive quadrature.
    std::function<double(double, double, double)> P;
    bool u_independent = true;
    std::pair<double, double> u_probe_range{-50.0, 50.0};
    std::optional<std::pair<double, double>> derivative_bounds;

    bool is_zero() const { return !p; }
};

// Catalog: "zero" | "forcing:m,n,cos|sin" | "arctan:<scale>" | "expr:<text>".
// forcing uses the basis function of the named mode (u-independent);
// arctan:c is p(u) = c * atan(u).
NonlinearitySpec make_nonlinearity(const std::string& spec_string,
                                   const TruncationSpec& trunc);

struct SublinearityProbe {
    bool ok = true;
    // max over an (s,t) lattice of |p(s,t,u)|/|u| at |u| = hi, 10 hi, 100 hi
    double ratio_at_hi = 0.0;
    double ratio_at_10hi = 0.0;
    double ratio_at_100hi = 0.0;
};

// Sampled check of the sublinearity assumption p(s,t,u)/u -> 0: the ratio
// must decay across the probe extremes.  Sampling cannot prove the limit.
SublinearityProbe sublinearity_probe(const NonlinearitySpec& p);

struct SampleSpec {
    int n_s = 16;
    int n_t = 16;
    int n_u = 401;
    double u_lo = -50.0;
    double u_hi = 50.0;
    double u_tail = 1000.0;
};

struct HypothesisReport {
    Side side = Side::Lower;
    bool h1_ok = false, h2_ok = false, h3_ok = false;
    double slope_lo = 0.0;   // min sampled difference quotient of a u+ - b u- + p
    double slope_hi = 0.0;   // max
    double eps_under = 0.0;  // margin for (H1) / (H1')
    double eps_over = 0.0;   // margin for (H2)/(H3) resp. (H2')/(H3')
    double eps_first_adj = 0.0;   // shrunk eps1 (or eps3) with p_k below all slopes
    double eps_second_adj = 0.0;  // shrunk eps2 (or eps4) with q_k above all slopes
};

// Difference-quotient sampling of the monotonicity hypotheses on an
// (s,t,u) lattice with tail probes.  Throws HypothesisViolated with a
// witness triple when the required hypothesis fails.
HypothesisReport check_hypotheses(const NonlinearitySpec& p, double a, double b, int k, Side side,
                                  double eps_first, double eps_second, const SampleSpec& samples);

// Pointwise conjugate data at one collocation node.
struct ConjugateScene {
    double coef_pos = 1.0;  // a - pole (lower) or pole - a (upper)
    double coef_neg = 1.0;
    double p_sign = 1.0;  // +1 lower, -1 upper (P enters J with this sign)
    const NonlinearitySpec* nl = nullptr;
};

struct ConjugateValue {
    double jstar = 0.0;
    double u_of_v = 0.0;  // (J*)'_v = argmax of vu - J(s,t,u)
    double q = 0.0;       // u_of_v - (v+/coef_pos - v-/coef_neg)
};

ConjugateValue conjugate_eval(double s, double t, double v, const ConjugateScene& scene);

// I(v) and exact gradient of the discretized functional:
// gradI = resolvent(v) - analyze(u_of_v at the nodes).
std::pair<double, SpectralField> functional_I(const SpectralField& v, const ShiftedOperator& op,
                                              const ConjugateScene& scene,
                                              const Transform& transform);

struct SolveOptions {
    TruncationSpec trunc = TruncationSpec::with_bounds(32, 32, 2.0);
    MaximizerConfig mcfg;
    SampleSpec samples;
    double eps_first = 0.1;   // starting eps1 / eps3, shrunk by the hypothesis check
    double eps_second = 0.1;  // starting eps2 / eps4
    double grad_tol = 1e-7;   // on ||gradI|| / (1 + ||v0||)
    // Classification curves; traced on a reduced grid when absent.
    const Curve* curve_c = nullptr;
    const Curve* curve_d = nullptr;
    int classify_n_r = 13;
    double classify_r_max = 100.0;
    bool compute_gap = false;
};

struct SolveResult {
    SpectralField v0;
    SpectralField u0;  // resolvent applied to v0
    double I_value = 0.0;
    bool converged = false;
    double grad_norm = 0.0;
    Eigen::VectorXd weak_residuals;        // per mode: |lambda theta - <rhs, e>|
    double max_weak_residual = 0.0;        // over non-kernel modes
    double max_kernel_residual = 0.0;      // over kernel modes (orthogonality)
    HypothesisReport hypotheses;
    Region region = Region::Outside;
    double eps_first_used = 0.0;
    double eps_second_used = 0.0;
    // Optional diagnostic gap min{a_hat - a(r), ...} of the homogeneous
    // problem; not computed rigorously.
    std::optional<double> gap_estimate;
};

SolveResult solve(const NonlinearitySpec& p, double a, double b, int k, Side side,
                  const SolveOptions& options);

// Diagnostic estimate of the coercivity gap of the homogeneous dual problem
// at (a, b): min{a_hat - sup(b_hat/a_hat), b_hat - sup(a_hat/b_hat)}.  No
// accuracy claim; both suprema come from the multi-start solver.
double gap_diagnostic(double a, double b, int k, Side side, double eps_first, double eps_second,
                      const TruncationSpec& trunc, const MaximizerConfig& mcfg);

}  // namespace fucik
