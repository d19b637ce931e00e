#include "fucik/nonhomog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "fucik/expr.hpp"
#include "fucik/rng.hpp"

namespace fucik {

namespace {

constexpr double kPi = 3.14159265358979323846;

double basis_value(const ModeIndex& mode, double s, double t) {
    const double c = mode.n == 0 ? 1.0 / kPi : std::sqrt(2.0) / kPi;
    const double trig = mode.parity == Parity::Cos ? std::cos(mode.n * t) : std::sin(mode.n * t);
    return c * std::sin(mode.m * s) * trig;
}

// Adaptive Simpson for P(s,t,u) = integral of p over [0, u].
double simpson(const std::function<double(double)>& f, double lo, double hi, double flo,
               double fmid, double fhi, double whole, double tol, int depth) {
    const double mid = 0.5 * (lo + hi);
    const double lmid = 0.5 * (lo + mid), rmid = 0.5 * (mid + hi);
    const double flm = f(lmid), frm = f(rmid);
    const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
    const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(f, lo, mid, flo, flm, fmid, left, 0.5 * tol, depth - 1) +
           simpson(f, mid, hi, fmid, frm, fhi, right, 0.5 * tol, depth - 1);
}

double integrate_p(const NonlinearitySpec& nl, double s, double t, double u) {
    if (nl.P) return nl.P(s, t, u);
    if (u == 0.0) return 0.0;
    auto f = [&](double x) { return nl.p(s, t, x); };
    const double flo = f(0.0), fhi = f(u), fmid = f(0.5 * u);
    const double whole = u / 6.0 * (flo + 4.0 * fmid + fhi);
    return simpson(f, 0.0, u, flo, fmid, fhi, whole, 1e-12 * (1.0 + std::abs(u)), 40);
}

}  // namespace

NonlinearitySpec make_nonlinearity(const std::string& spec_string, const TruncationSpec& trunc) {
    NonlinearitySpec nl;
    nl.name = spec_string;
    if (spec_string == "zero") {
        nl.derivative_bounds = {{0.0, 0.0}};
        return nl;
    }
    if (spec_string.rfind("forcing:", 0) == 0) {
        const std::string body = spec_string.substr(8);
        const auto c1 = body.find(',');
        const auto c2 = body.find(',', c1 == std::string::npos ? c1 : c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos)
            throw ParseError("forcing needs m,n,cos|sin", 8);
        const int m = std::stoi(body.substr(0, c1));
        const int n = std::stoi(body.substr(c1 + 1, c2 - c1 - 1));
        const std::string par = body.substr(c2 + 1);
        if (par != "cos" && par != "sin") throw ParseError("forcing parity must be cos or sin", 8);
        const ModeIndex mode(m, n, par == "cos" ? Parity::Cos : Parity::Sin);
        if (m > trunc.m_max || n > trunc.n_max)
            throw DomainError("forcing mode outside the truncation");
        nl.p = [mode](double s, double t, double) { return basis_value(mode, s, t); };
        nl.P = [mode](double s, double t, double u) { return basis_value(mode, s, t) * u; };
        nl.u_independent = true;
        nl.derivative_bounds = {{0.0, 0.0}};
        return nl;
    }
    if (spec_string.rfind("arctan:", 0) == 0) {
        const double scale = std::stod(spec_string.substr(7));
        nl.p = [scale](double, double, double u) { return scale * std::atan(u); };
        nl.P = [scale](double, double, double u) {
            return scale * (u * std::atan(u) - 0.5 * std::log1p(u * u));
        };
        nl.u_independent = false;
        nl.derivative_bounds = {{std::min(0.0, scale), std::max(0.0, scale)}};
        return nl;
    }
    if (spec_string.rfind("expr:", 0) == 0) {
        auto expr = std::make_shared<PExpression>(PExpression::parse(spec_string.substr(5)));
        nl.p = [expr](double s, double t, double u) { return expr->eval(s, t, u); };
        nl.u_independent = false;
        return nl;
    }
    throw ParseError("unknown nonlinearity '" + spec_string + "'", 0);
}

SublinearityProbe sublinearity_probe(const NonlinearitySpec& nl) {
    SublinearityProbe probe;
    if (nl.is_zero()) return probe;
    const double hi = std::max(std::abs(nl.u_probe_range.first),
                               std::abs(nl.u_probe_range.second));
    auto ratio_at = [&](double mag) {
        double worst = 0.0;
        for (int is = 1; is <= 8; ++is) {
            const double s = kPi * is / 9.0;
            for (int it = 0; it < 8; ++it) {
                const double t = 2.0 * kPi * it / 8.0;
                worst = std::max({worst, std::abs(nl.p(s, t, mag)) / mag,
                                  std::abs(nl.p(s, t, -mag)) / mag});
            }
        }
        return worst;
    };
    probe.ratio_at_hi = ratio_at(hi);
    probe.ratio_at_10hi = ratio_at(10.0 * hi);
    probe.ratio_at_100hi = ratio_at(100.0 * hi);
    // decay demanded only where the ratio is not already negligible
    const double tiny = 1e-12;
    probe.ok = probe.ratio_at_100hi <= tiny ||
               (probe.ratio_at_10hi <= 0.9 * probe.ratio_at_hi &&
                probe.ratio_at_100hi <= 0.9 * probe.ratio_at_10hi);
    return probe;
}

HypothesisReport check_hypotheses(const NonlinearitySpec& nl, double a, double b, int k, Side side,
                                  double eps_first, double eps_second, const SampleSpec& samples) {
    if (k == 0) throw ZeroEigenvalue("check_hypotheses: lambda_k = 0 is excluded");
    const long lambda_k = lambda_of_index(k);
    const long lambda_km1 = lambda_of_index(k - 1);
    const long lambda_kp1 = lambda_of_index(k + 1);

    HypothesisReport rep;
    rep.side = side;

    // Sampled slope range of g(u) = a u+ - b u- + p(s,t,u) and of p alone.
    double g_lo = std::numeric_limits<double>::infinity(), g_hi = -g_lo;
    double p_lo = 0.0, p_hi = 0.0;
    double wit_s = 0.0, wit_t = 0.0, wit_u_lo = 0.0, wit_u_hi = 0.0;
    if (nl.is_zero() || nl.u_independent) {
        g_lo = std::min(a, b);
        g_hi = std::max(a, b);
    } else {
        p_lo = std::numeric_limits<double>::infinity();
        p_hi = -p_lo;
        std::vector<double> ugrid;
        ugrid.reserve(samples.n_u + 4);
        ugrid.push_back(-samples.u_tail);
        for (int i = 0; i < samples.n_u; ++i)
            ugrid.push_back(samples.u_lo +
                            (samples.u_hi - samples.u_lo) * i / (samples.n_u - 1.0));
        ugrid.push_back(samples.u_tail);
        for (int is = 0; is < samples.n_s; ++is) {
            const double s = kPi * (is + 1) / (samples.n_s + 1);
            for (int it = 0; it < samples.n_t; ++it) {
                const double t = 2.0 * kPi * it / samples.n_t;
                double up = ugrid[0];
                double pp = nl.p(s, t, up);
                double gp = a * std::max(up, 0.0) - b * std::max(-up, 0.0) + pp;
                for (std::size_t i = 1; i < ugrid.size(); ++i) {
                    const double u = ugrid[i];
                    const double pv = nl.p(s, t, u);
                    const double gv = a * std::max(u, 0.0) - b * std::max(-u, 0.0) + pv;
                    const double du = u - up;
                    const double gq = (gv - gp) / du;
                    const double pq = (pv - pp) / du;
                    if (gq < g_lo) {
                        g_lo = gq;
                        wit_s = s;
                        wit_t = t;
                        wit_u_lo = 0.5 * (u + up);
                    }
                    if (gq > g_hi) {
                        g_hi = gq;
                        wit_u_hi = 0.5 * (u + up);
                    }
                    p_lo = std::min(p_lo, pq);
                    p_hi = std::max(p_hi, pq);
                    up = u;
                    pp = pv;
                    gp = gv;
                }
            }
        }
    }
    rep.slope_lo = g_lo;
    rep.slope_hi = g_hi;

    if (side == Side::Lower) {
        rep.h1_ok = g_lo > static_cast<double>(lambda_km1);
        rep.eps_under = g_lo - lambda_km1;
        if (!rep.h1_ok)
            throw HypothesisViolated("H1 fails: slope " + std::to_string(g_lo) +
                                         " not above lambda_{k-1}",
                                     wit_s, wit_t, wit_u_lo);
        if (lambda_k > 0) {
            rep.h2_ok = std::isfinite(p_hi);
            rep.eps_over = 1.0 / std::max(p_hi, 1e-12);
            rep.h3_ok = true;
        } else {
            rep.h3_ok = g_hi < 0.0;
            rep.eps_over = -g_hi;
            rep.h2_ok = true;
            if (!rep.h3_ok)
                throw HypothesisViolated("H3 fails: slope " + std::to_string(g_hi) +
                                             " not negative",
                                         wit_s, wit_t, wit_u_hi);
        }
    } else {
        rep.h1_ok = g_hi < static_cast<double>(lambda_kp1);
        rep.eps_under = lambda_kp1 - g_hi;
        if (!rep.h1_ok)
            throw HypothesisViolated("H1' fails: slope " + std::to_string(g_hi) +
                                         " not below lambda_{k+1}",
                                     wit_s, wit_t, wit_u_hi);
        if (lambda_k > 0) {
            rep.h2_ok = g_lo > 0.0;
            rep.eps_over = g_lo;
            rep.h3_ok = true;
            if (!rep.h2_ok)
                throw HypothesisViolated("H2' fails: slope " + std::to_string(g_lo) +
                                             " not positive",
                                         wit_s, wit_t, wit_u_lo);
        } else {
            rep.h3_ok = std::isfinite(p_lo);
            rep.eps_over = 1.0 / std::max(-p_lo, 1e-12);
            rep.h2_ok = true;
        }
    }

    // Shrink the shift parameters until the sampled slope band and (a,b)
    // both fit strictly inside the square ]p_k, q_k[^2, halving down to a
    // floor of 1e-4.
    const double need_lo = std::min({g_lo, a, b});
    const double need_hi = std::max({g_hi, a, b});
    double e1 = eps_first, e2 = eps_second;
    const double floor_eps = 1e-4;
    if (side == Side::Lower) {
        const double gap = static_cast<double>(lambda_k - lambda_km1);
        while (e1 >= gap) e1 *= 0.5;
        while (lambda_km1 + e1 >= need_lo && e1 > floor_eps) e1 *= 0.5;
        if (lambda_km1 + e1 >= need_lo)
            throw HypothesisViolated("no eps1 above the floor puts p_k below the slopes", wit_s,
                                     wit_t, wit_u_lo);
        auto q_of = [&](double eps2) {
            const double pole = lambda_km1 + e1;
            const double mu = std::max(0.0, -1.0 / pole) + eps2;
            return pole + 1.0 / mu;
        };
        const double e2_hi =
            1.0 / (gap - e1) - std::max(0.0, -1.0 / (lambda_km1 + e1));
        while (e2 >= e2_hi) e2 *= 0.5;
        while (q_of(e2) <= need_hi && e2 > floor_eps) e2 *= 0.5;
        if (q_of(e2) <= need_hi)
            throw HypothesisViolated("no eps2 above the floor puts q_k above the slopes", wit_s,
                                     wit_t, wit_u_hi);
    } else {
        const double gap = static_cast<double>(lambda_kp1 - lambda_k);
        while (e1 >= gap) e1 *= 0.5;
        while (lambda_kp1 - e1 <= need_hi && e1 > floor_eps) e1 *= 0.5;
        if (lambda_kp1 - e1 <= need_hi)
            throw HypothesisViolated("no eps3 above the floor puts the square top above the slopes",
                                     wit_s, wit_t, wit_u_hi);
        auto p_of = [&](double eps4) {
            const double pole = lambda_kp1 - e1;
            const double rho = std::max(0.0, 1.0 / pole) + eps4;
            return pole - 1.0 / rho;
        };
        const double e2_hi = 1.0 / (gap - e1) - std::max(0.0, 1.0 / (lambda_kp1 - e1));
        while (e2 >= e2_hi) e2 *= 0.5;
        while (p_of(e2) >= need_lo && e2 > floor_eps) e2 *= 0.5;
        if (p_of(e2) >= need_lo)
            throw HypothesisViolated("no eps4 above the floor puts the square bottom below", wit_s,
                                     wit_t, wit_u_lo);
    }
    rep.eps_first_adj = e1;
    rep.eps_second_adj = e2;
    return rep;
}

ConjugateValue conjugate_eval(double s, double t, double v, const ConjugateScene& scene) {
    const double cp = scene.coef_pos, cn = scene.coef_neg;
    if (!(cp > 0.0) || !(cn > 0.0))
        throw DomainError("conjugate_eval: shifted slopes must be positive");
    ConjugateValue out;

    const bool zero_p = scene.nl == nullptr || scene.nl->is_zero();
    if (zero_p || scene.nl->u_independent) {
        const double c = zero_p ? 0.0 : scene.p_sign * scene.nl->p(s, t, 0.0);
        const double w = v - c;
        const double u = std::max(w, 0.0) / cp - std::max(-w, 0.0) / cn;
        out.u_of_v = u;
        const double up = std::max(u, 0.0), un = std::max(-u, 0.0);
        out.jstar = v * u - (0.5 * cp * up * up + 0.5 * cn * un * un + c * u);
        out.q = u - (std::max(v, 0.0) / cp - std::max(-v, 0.0) / cn);
        return out;
    }

    const NonlinearitySpec& nl = *scene.nl;
    auto jprime = [&](double u) {
        return cp * std::max(u, 0.0) - cn * std::max(-u, 0.0) + scene.p_sign * nl.p(s, t, u);
    };

    // Bracket the strictly increasing J'_u around the H* guess, expanding
    // geometrically.
    const double c0 = scene.p_sign * nl.p(s, t, 0.0);
    const double w0 = v - c0;
    double guess = std::max(w0, 0.0) / cp - std::max(-w0, 0.0) / cn;
    double lo = guess, hi = guess;
    double flo = jprime(lo), fhi = flo;
    double stride = 1.0 + 0.25 * std::abs(guess);
    int grow = 0;
    while (flo > v) {
        lo -= stride;
        stride *= 2.0;
        flo = jprime(lo);
        if (++grow > 80) throw BracketFailure("conjugate_eval: cannot bracket below");
    }
    stride = 1.0 + 0.25 * std::abs(guess);
    while (fhi < v) {
        hi += stride;
        stride *= 2.0;
        fhi = jprime(hi);
        if (++grow > 160) throw BracketFailure("conjugate_eval: cannot bracket above");
    }
    if (fhi < flo - 1e-9 * (1.0 + std::abs(v)))
        throw BracketFailure("conjugate_eval: J'_u not increasing on the bracket");

    // Safeguarded Newton with numerical slope, falling back to bisection.
    double u = std::clamp(guess, lo, hi);
    double fu = jprime(u);
    const double tol = 1e-12 * (1.0 + std::abs(v));
    for (int it = 0; it < 200 && std::abs(fu - v) > tol; ++it) {
        if (fu > v)
            hi = u;
        else
            lo = u;
        const double h = 1e-7 * (1.0 + std::abs(u));
        const double slope = (jprime(u + h) - jprime(u - h)) / (2.0 * h);
        double next = slope > 0.0 ? u - (fu - v) / slope : 0.5 * (lo + hi);
        if (!(next > lo) || !(next < hi)) next = 0.5 * (lo + hi);
        u = next;
        fu = jprime(u);
    }
    out.u_of_v = u;
    const double up = std::max(u, 0.0), un = std::max(-u, 0.0);
    const double J = 0.5 * cp * up * up + 0.5 * cn * un * un +
                     scene.p_sign * integrate_p(nl, s, t, u);
    out.jstar = v * u - J;
    out.q = u - (std::max(v, 0.0) / cp - std::max(-v, 0.0) / cn);
    return out;
}

namespace {

// One conjugate sweep over the grid: integral of J* and the pointwise
// maximizer field.  Vectorized fast paths for the closed-form cases.
struct ConjugatePass {
    double jstar_sum = 0.0;  // sum over nodes, unweighted
    Eigen::MatrixXd u_grid;
};

ConjugatePass conjugate_pass(const Eigen::MatrixXd& V, const ConjugateScene& scene,
                             const Transform& transform) {
    ConjugatePass out;
    const double cp = scene.coef_pos, cn = scene.coef_neg;
    const bool zero_p = scene.nl == nullptr || scene.nl->is_zero();
    if (zero_p) {
        const Eigen::MatrixXd pos = V.cwiseMax(0.0), neg = (-V).cwiseMax(0.0);
        out.u_grid = pos / cp - neg / cn;
        out.jstar_sum = 0.5 / cp * pos.squaredNorm() + 0.5 / cn * neg.squaredNorm();
        return out;
    }
    const NonlinearitySpec& nl = *scene.nl;
    if (nl.u_independent) {
        Eigen::MatrixXd C(V.rows(), V.cols());
        for (int i = 0; i < V.rows(); ++i)
            for (int j = 0; j < V.cols(); ++j)
                C(i, j) = scene.p_sign * nl.p(transform.node_s(i), transform.node_t(j), 0.0);
        const Eigen::MatrixXd W = V - C;
        const Eigen::MatrixXd wp = W.cwiseMax(0.0), wn = (-W).cwiseMax(0.0);
        out.u_grid = wp / cp - wn / cn;
        // J* = v u - H(u) - C u with u = w+/cp - w-/cn
        const Eigen::MatrixXd H = 0.5 / cp * wp.array().square().matrix() +
                                  0.5 / cn * wn.array().square().matrix();
        out.jstar_sum =
            (V.cwiseProduct(out.u_grid) - H - C.cwiseProduct(out.u_grid)).sum();
        return out;
    }
    out.u_grid.resize(V.rows(), V.cols());
    for (int i = 0; i < V.rows(); ++i) {
        const double s = transform.node_s(i);
        for (int j = 0; j < V.cols(); ++j) {
            const ConjugateValue cv = conjugate_eval(s, transform.node_t(j), V(i, j), scene);
            out.u_grid(i, j) = cv.u_of_v;
            out.jstar_sum += cv.jstar;
        }
    }
    return out;
}

double I_of(const Eigen::VectorXd& coeffs, const Eigen::MatrixXd& V, const Eigen::VectorXd& dF,
            double mu, const ConjugateScene& scene, const Transform& transform,
            ConjugatePass* pass_out = nullptr) {
    ConjugatePass pass = conjugate_pass(V, scene, transform);
    const double w = transform.node_weight();
    const double I = 0.5 * (dF.array() * coeffs.array().square()).sum() -
                     (w * pass.jstar_sum - 0.5 * mu * coeffs.squaredNorm());
    if (pass_out != nullptr) *pass_out = std::move(pass);
    return I;
}

}  // namespace

std::pair<double, SpectralField> functional_I(const SpectralField& v, const ShiftedOperator& op,
                                              const ConjugateScene& scene,
                                              const Transform& transform) {
    const ModeSet& set = transform.modes();
    Eigen::VectorXd dF(set.size()), resolvent(set.size());
    for (int i = 0; i < set.size(); ++i) {
        dF[i] = op.shifted_diag(set.lambda[i]);
        resolvent[i] = op.resolvent_diag(set.lambda[i]);
    }
    const GridField grid = transform.synthesize(v);
    ConjugatePass pass;
    const double I =
        I_of(v.coeffs, grid.values, dF, op.second_shift(), scene, transform, &pass);
    GridField u_grid;
    u_grid.trunc = transform.trunc();
    u_grid.values = std::move(pass.u_grid);
    SpectralField grad = transform.analyze(u_grid);
    grad.coeffs = (resolvent.array() * v.coeffs.array()).matrix() - grad.coeffs;
    return {I, std::move(grad)};
}

namespace {

struct IAscent {
    SpectralField v;
    double I = -std::numeric_limits<double>::infinity();
    double grad_norm = std::numeric_limits<double>::infinity();
    bool converged = false;
};

IAscent ascend_I(SpectralField v, const ShiftedOperator& op, const ConjugateScene& scene,
                 const Transform& transform, const MaximizerConfig& mcfg, double grad_tol,
                 int budget) {
    const ModeSet& set = transform.modes();
    Eigen::VectorXd dF(set.size()), resolvent(set.size());
    for (int i = 0; i < set.size(); ++i) {
        dF[i] = op.shifted_diag(set.lambda[i]);
        resolvent[i] = op.resolvent_diag(set.lambda[i]);
    }
    const double mu = op.second_shift();

    Eigen::MatrixXd V = transform.synthesize(v).values;
    double step = mcfg.step_init;
    IAscent out;
    GridField work;
    work.trunc = transform.trunc();

    auto eval = [&](const Eigen::VectorXd& c, const Eigen::MatrixXd& Vc, ConjugatePass* pass) {
        return I_of(c, Vc, dF, mu, scene, transform, pass);
    };

    Eigen::VectorXd prev_c, prev_g;
    double tau_bb = step;
    int stalled = 0;
    for (int iter = 0; iter < budget; ++iter) {
        ConjugatePass pass;
        const double I = eval(v.coeffs, V, &pass);
        work.values = pass.u_grid;
        const SpectralField proj_u = transform.analyze(work);
        Eigen::VectorXd g = (resolvent.array() * v.coeffs.array()).matrix() - proj_u.coeffs;
        const double gn = g.norm();
        const double scale = 1.0 + v.coeffs.norm();

        if (I > out.I) {
            const double improvement = (I - out.I) / std::max(std::abs(I), 1e-300);
            stalled = (iter > 0 && improvement < mcfg.tol_ratio) ? stalled + 1 : 0;
            out.I = I;
            out.v = v;
            out.grad_norm = gn;
        } else {
            ++stalled;
        }
        if (gn <= grad_tol * scale) {
            out.converged = true;
            out.v = v;
            out.I = I;
            out.grad_norm = gn;
            break;
        }
        if (stalled >= mcfg.stall_window) break;

        // Backtracking on I along the gradient.
        Eigen::VectorXd dir = g / gn;
        SpectralField dir_field;
        dir_field.trunc = transform.trunc();
        dir_field.coeffs = dir;
        const Eigen::MatrixXd Vd = transform.synthesize(dir_field).values;
        double tau = std::min(step * 2.0, 1e4);
        bool accepted = false;
        while (tau > 1e-14) {
            const Eigen::VectorXd c_try = v.coeffs + tau * dir;
            const Eigen::MatrixXd V_try = V + tau * Vd;
            if (eval(c_try, V_try, nullptr) > I) {
                v.coeffs = c_try;
                V = V_try;
                step = tau;
                accepted = true;
                break;
            }
            tau *= mcfg.backtrack;
        }
        if (!accepted) {
            // Endgame: BB fixed steps tracked by the gradient norm.
            Eigen::VectorXd best_c = v.coeffs;
            double best_g = gn;
            prev_c.resize(0);
            prev_g.resize(0);
            for (int it2 = 0; it2 < 400; ++it2) {
                ConjugatePass p2;
                eval(v.coeffs, V, &p2);
                work.values = p2.u_grid;
                const SpectralField pu = transform.analyze(work);
                Eigen::VectorXd g2 =
                    (resolvent.array() * v.coeffs.array()).matrix() - pu.coeffs;
                const double g2n = g2.norm();
                if (g2n < best_g) {
                    best_g = g2n;
                    best_c = v.coeffs;
                }
                if (g2n <= grad_tol * (1.0 + v.coeffs.norm()) || g2n > 1e5 * (best_g + 1e-300))
                    break;
                if (prev_g.size() > 0) {
                    const Eigen::VectorXd dc = v.coeffs - prev_c;
                    const Eigen::VectorXd dg = g2 - prev_g;
                    const double den = dg.squaredNorm();
                    if (den > 0.0) tau_bb = std::clamp(std::abs(dc.dot(dg)) / den, 1e-9, 1e3);
                }
                prev_c = v.coeffs;
                prev_g = g2;
                SpectralField gf;
                gf.trunc = transform.trunc();
                gf.coeffs = g2;
                V += tau_bb * transform.synthesize(gf).values;
                v.coeffs += tau_bb * g2;
            }
            v.coeffs = best_c;
            V = transform.synthesize(v).values;
            ConjugatePass p3;
            const double If = eval(v.coeffs, V, &p3);
            out.v = v;
            out.I = If;
            out.grad_norm = best_g;
            out.converged = best_g <= grad_tol * (1.0 + v.coeffs.norm());
            break;
        }
    }
    if (out.v.coeffs.size() == 0) out.v = v;
    return out;
}

}  // namespace

SolveResult solve(const NonlinearitySpec& nl, double a, double b, int k, Side side,
                  const SolveOptions& options) {
    SolveResult result;
    const SublinearityProbe probe = sublinearity_probe(nl);
    if (!probe.ok)
        throw HypothesisViolated("p fails the sampled sublinearity probe: |p|/|u| = " +
                                     std::to_string(probe.ratio_at_100hi) +
                                     " not decaying at the probe extremes",
                                 0.0, 0.0, 100.0 * std::abs(nl.u_probe_range.second));
    result.hypotheses = check_hypotheses(nl, a, b, k, side, options.eps_first,
                                         options.eps_second, options.samples);
    const double e1 = result.hypotheses.eps_first_adj;
    const double e2 = result.hypotheses.eps_second_adj;
    result.eps_first_used = e1;
    result.eps_second_used = e2;

    ShiftConfigLower lo;
    ShiftConfigUpper up;
    ShiftedOperator op;
    double pole = 0.0;
    if (side == Side::Lower) {
        lo = validate_lower(k, e1, e2, options.trunc);
        op = ShiftedOperator::lower(lo);
        pole = lo.lambda_km1 + lo.eps1;
    } else {
        up = validate_upper(k, e1, e2, options.trunc);
        op = ShiftedOperator::upper(up);
        pole = up.lambda_kp1 - up.eps3;
    }

    // Region gate against the traced curves.
    Curve curve_c, curve_d;
    const Curve* cc = options.curve_c;
    const Curve* cd = options.curve_d;
    if (cc == nullptr || cd == nullptr) {
        MaximizerConfig trace_cfg = options.mcfg;
        trace_cfg.n_starts = std::min(trace_cfg.n_starts, 8);
        const auto grid = default_r_grid(options.classify_r_max, options.classify_n_r);
        if (cc == nullptr) {
            curve_c = trace(k, Side::Lower, grid, e1, e2, options.trunc, trace_cfg);
            cc = &curve_c;
        }
        if (cd == nullptr) {
            curve_d = trace(k, Side::Upper, grid, e1, e2, options.trunc, trace_cfg);
            cd = &curve_d;
        }
    }
    result.region = classify(a, b, *cc, *cd);
    if (side == Side::Lower && result.region != Region::BelowC)
        throw RegionError("solve: (a,b) classifies as " + region_name(result.region) +
                          ", lower solve needs BELOW_C");
    if (side == Side::Upper && result.region != Region::AboveD)
        throw RegionError("solve: (a,b) classifies as " + region_name(result.region) +
                          ", upper solve needs ABOVE_D");

    ConjugateScene scene;
    scene.coef_pos = side == Side::Lower ? a - pole : pole - a;
    scene.coef_neg = side == Side::Lower ? b - pole : pole - b;
    scene.p_sign = side == Side::Lower ? 1.0 : -1.0;
    scene.nl = &nl;

    const Transform transform(options.trunc);

    // Multi-start ascent on I; v = 0 first, then seeded random fields.
    std::vector<SpectralField> starts;
    starts.push_back(SpectralField::zero(options.trunc));
    Rng rng(options.mcfg.seed);
    while (static_cast<int>(starts.size()) < options.mcfg.n_starts) {
        SpectralField f = SpectralField::zero(options.trunc);
        for (int i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] = rng.normal();
        f.coeffs *= 0.5 / f.coeffs.norm();
        starts.push_back(std::move(f));
    }
    IAscent best;
    for (const auto& start : starts) {
        IAscent got = ascend_I(start, op, scene, transform, options.mcfg, options.grad_tol,
                               options.mcfg.max_iters);
        if (got.I > best.I ||
            (std::abs(got.I - best.I) <= 1e-12 * std::max(1.0, std::abs(best.I)) &&
             got.grad_norm < best.grad_norm))
            best = std::move(got);
    }

    result.v0 = best.v;
    result.I_value = best.I;
    result.converged = best.converged;
    result.grad_norm = best.grad_norm;

    // u0 = resolvent(v0) and weak residuals per mode.
    const ModeSet& set = transform.modes();
    result.u0 = best.v;
    for (int i = 0; i < set.size(); ++i)
        result.u0.coeffs[i] = best.v.coeffs[i] * op.resolvent_diag(set.lambda[i]);

    const GridField U = transform.synthesize(result.u0);
    GridField rhs;
    rhs.trunc = options.trunc;
    rhs.values.resize(U.values.rows(), U.values.cols());
    for (int i = 0; i < U.values.rows(); ++i) {
        const double s = transform.node_s(i);
        for (int j = 0; j < U.values.cols(); ++j) {
            const double u = U.values(i, j);
            const double pv = nl.is_zero() ? 0.0 : nl.p(s, transform.node_t(j), u);
            rhs.values(i, j) = a * std::max(u, 0.0) - b * std::max(-u, 0.0) + pv;
        }
    }
    const SpectralField f = transform.analyze(rhs);
    result.weak_residuals.resize(set.size());
    result.max_weak_residual = 0.0;
    result.max_kernel_residual = 0.0;
    for (int i = 0; i < set.size(); ++i) {
        const double res = std::abs(set.lambda[i] * result.u0.coeffs[i] - f.coeffs[i]);
        result.weak_residuals[i] = res;
        if (set.modes[i].m == set.modes[i].n)
            result.max_kernel_residual = std::max(result.max_kernel_residual, res);
        else
            result.max_weak_residual = std::max(result.max_weak_residual, res);
    }

    if (options.compute_gap)
        result.gap_estimate = gap_diagnostic(a, b, k, side, e1, e2, options.trunc, options.mcfg);

    return result;
}

double gap_diagnostic(double a, double b, int k, Side side, double eps_first, double eps_second,
                      const TruncationSpec& trunc, const MaximizerConfig& mcfg) {
    const Transform transform(trunc);
    double a_hat = 0.0, b_hat = 0.0;
    ShiftedOperator op;
    if (side == Side::Lower) {
        const auto cfg = validate_lower(k, eps_first, eps_second, trunc);
        std::tie(a_hat, b_hat) = dual_coordinates(cfg, a, b);
        op = ShiftedOperator::lower(cfg);
    } else {
        const auto cfg = validate_upper(k, eps_first, eps_second, trunc);
        std::tie(a_hat, b_hat) = dual_coordinates(cfg, a, b);
        op = ShiftedOperator::upper(cfg);
    }
    if (!(a_hat > 0.0) || !(b_hat > 0.0))
        throw DomainError("gap_diagnostic: dual coordinates not positive");
    const double sup1 = maximize_ratio(op, b_hat / a_hat, transform, mcfg).a_hat;
    const double sup2 = maximize_ratio(op, a_hat / b_hat, transform, mcfg).a_hat;
    return std::min(a_hat - sup1, b_hat - sup2);
}

}  // namespace fucik
