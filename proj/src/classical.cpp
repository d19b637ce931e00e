#include "fucik/classical.hpp"

#include <algorithm>
#include <array>
#include <vector>
#include <cmath>
#include <string>

namespace fucik {

namespace {

constexpr double kPi = 3.14159265358979323846;

using State = std::array<double, 2>;  // (y, y')

// Embedded Cash-Karp RK45 step for y'' = f(y).
template <typename Rhs>
State rk_step(const Rhs& f, const State& y, double h, double& err) {
    static constexpr double b21 = 1.0 / 5;
    static constexpr double b31 = 3.0 / 40, b32 = 9.0 / 40;
    static constexpr double b41 = 3.0 / 10, b42 = -9.0 / 10, b43 = 6.0 / 5;
    static constexpr double b51 = -11.0 / 54, b52 = 5.0 / 2, b53 = -70.0 / 27, b54 = 35.0 / 27;
    static constexpr double b61 = 1631.0 / 55296, b62 = 175.0 / 512, b63 = 575.0 / 13824,
                            b64 = 44275.0 / 110592, b65 = 253.0 / 4096;
    static constexpr double c1 = 37.0 / 378, c3 = 250.0 / 621, c4 = 125.0 / 594,
                            c6 = 512.0 / 1771;
    static constexpr double d1 = 2825.0 / 27648, d3 = 18575.0 / 48384, d4 = 13525.0 / 55296,
                            d5 = 277.0 / 14336, d6 = 1.0 / 4;

    auto rhs = [&](const State& s) { return State{s[1], f(s[0])}; };
    const State k1 = rhs(y);
    const State k2 = rhs({y[0] + h * b21 * k1[0], y[1] + h * b21 * k1[1]});
    const State k3 = rhs({y[0] + h * (b31 * k1[0] + b32 * k2[0]),
                          y[1] + h * (b31 * k1[1] + b32 * k2[1])});
    const State k4 = rhs({y[0] + h * (b41 * k1[0] + b42 * k2[0] + b43 * k3[0]),
                          y[1] + h * (b41 * k1[1] + b42 * k2[1] + b43 * k3[1])});
    const State k5 =
        rhs({y[0] + h * (b51 * k1[0] + b52 * k2[0] + b53 * k3[0] + b54 * k4[0]),
             y[1] + h * (b51 * k1[1] + b52 * k2[1] + b53 * k3[1] + b54 * k4[1])});
    const State k6 = rhs(
        {y[0] + h * (b61 * k1[0] + b62 * k2[0] + b63 * k3[0] + b64 * k4[0] + b65 * k5[0]),
         y[1] + h * (b61 * k1[1] + b62 * k2[1] + b63 * k3[1] + b64 * k4[1] + b65 * k5[1])});

    State out, low;
    for (int i = 0; i < 2; ++i) {
        out[i] = y[i] + h * (c1 * k1[i] + c3 * k3[i] + c4 * k4[i] + c6 * k6[i]);
        low[i] = y[i] + h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i]);
    }
    err = std::max(std::abs(out[0] - low[0]), std::abs(out[1] - low[1]));
    return out;
}

struct IntegrationResult {
    State y;
    std::vector<double> crossings;  // positions of sign changes
};

// Adaptive integration of y'' = f(y) over [0, length], locating each sign
// change of y by bisection and restarting there.
template <typename Rhs>
IntegrationResult integrate(const Rhs& f, State y, double length, double tol) {
    double x = 0.0;
    double h = length / 64.0;
    std::vector<double> crossings;
    int prev_sign = y[0] > 0 ? 1 : (y[0] < 0 ? -1 : 0);
    const double zero_band = 1e-13;
    int steps = 0;

    while (x < length) {
        if (x + h > length) h = length - x;
        double err = 0.0;
        State trial = rk_step(f, y, h, err);
        const double scale = tol * (1.0 + std::max(std::abs(y[0]), std::abs(y[1])));
        if (err > scale && h > 1e-12 * length) {
            h *= std::max(0.2, 0.9 * std::pow(scale / err, 0.25));
            if (++steps > 2000000) throw IntegratorFailure("integrate: step count exceeded");
            continue;
        }

        const int trial_sign = trial[0] > zero_band ? 1 : (trial[0] < -zero_band ? -1 : 0);
        if (prev_sign != 0 && trial_sign != 0 && trial_sign != prev_sign) {
            // Bisect the step length to land on the crossing, then restart
            // with the fresh sign so each arch is integrated smoothly.
            double lo = 0.0, hi = h;
            State at_cross = trial;
            for (int it = 0; it < 80 && hi - lo > 1e-15 * h; ++it) {
                const double mid = 0.5 * (lo + hi);
                double e2 = 0.0;
                State probe = rk_step(f, y, mid, e2);
                if ((probe[0] > 0 ? 1 : -1) == prev_sign)
                    lo = mid;
                else {
                    hi = mid;
                    at_cross = probe;
                }
            }
            x += hi;
            y = at_cross;
            crossings.push_back(x);
            prev_sign = trial_sign;
            continue;
        }

        x += h;
        y = trial;
        if (trial_sign != 0) prev_sign = trial_sign;
        if (err > 0.0) h *= std::min(5.0, 0.9 * std::pow(scale / err, 0.2));
        if (++steps > 2000000) throw IntegratorFailure("integrate: step count exceeded");
    }
    return {y, std::move(crossings)};
}

}  // namespace

double dirichlet_b_of_a(int m, std::pair<int, int> branch, double a) {
    const auto [p, q] = branch;
    if (p < 0 || q < 0 || p + q != m || std::abs(p - q) > 1)
        throw DomainError("dirichlet_b_of_a: branch (p,q) must satisfy p+q=m, |p-q|<=1");
    if (q == 0)
        throw DomainError("dirichlet_b_of_a: the (m,0) branch is the vertical line a = m^2");
    if (p == 0) return static_cast<double>(q) * q;  // horizontal line b = q^2 (= 1 for m = 1)
    if (!(a > static_cast<double>(p) * p))
        throw DomainError("dirichlet_b_of_a: need a > p^2 on this branch");
    const double root = q / (1.0 - p / std::sqrt(a));
    return root * root;
}

double periodic_b_of_a(int n, double a) {
    if (n < 1) throw DomainError("periodic_b_of_a: index must be >= 1");
    if (!(a < 1.0 - 0.25 * n * n))
        throw DomainError("periodic_b_of_a: need a < 1 - n^2/4");
    const double inv = 2.0 / n - 1.0 / std::sqrt(1.0 - a);
    const double root = 1.0 / inv;
    return 1.0 - root * root;
}

ShootResult shoot_dirichlet(double a, double b, double tol) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("shoot_dirichlet: need a, b > 0");
    auto rhs = [a, b](double y) { return -a * std::max(y, 0.0) + b * std::max(-y, 0.0); };
    const IntegrationResult res = integrate(rhs, State{0.0, 1.0}, kPi, tol);
    // Interior sign changes only; a crossing within 1e-6 of an endpoint is
    // the boundary zero itself seen through the integration error.
    int interior = 0;
    for (double c : res.crossings)
        if (c > 1e-6 && c < kPi - 1e-6) ++interior;
    return {res.y[0], interior};
}

double shoot_periodic(double a, double b, double tol) {
    if (!(a < 1.0) || !(b < 1.0)) throw DomainError("shoot_periodic: need a, b < 1");
    auto rhs = [a, b](double y) { return -y + a * std::max(y, 0.0) - b * std::max(-y, 0.0); };
    auto defect = [&](double theta) {
        const State y0{std::cos(theta), std::sin(theta)};
        const IntegrationResult res = integrate(rhs, y0, 2.0 * kPi, tol);
        return std::hypot(res.y[0] - y0[0], res.y[1] - y0[1]);
    };

    // Coarse scan over the initial phase, then golden-section refinement of
    // the best bracket.
    const int scan = 128;
    double best_theta = 0.0, best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < scan; ++i) {
        const double theta = 2.0 * kPi * i / scan;
        const double d = defect(theta);
        if (d < best) {
            best = d;
            best_theta = theta;
        }
    }
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = best_theta - 2.0 * kPi / scan, hi = best_theta + 2.0 * kPi / scan;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = defect(x1), f2 = defect(x2);
    for (int it = 0; it < 60; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = defect(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = defect(x2);
        }
    }
    return std::min({best, f1, f2});
}

std::vector<OdePoint> sample_dirichlet(int m, std::pair<int, int> branch, int n_samples) {
    const auto [p, q] = branch;
    std::vector<OdePoint> out;
    out.reserve(n_samples);
    if (q == 0 || p == 0) {
        // Degenerate m = 1 style branch: a line.  Emit points along it.
        for (int i = 0; i < n_samples; ++i) {
            OdePoint pt;
            pt.family = Family::Dirichlet;
            pt.index = m;
            pt.hump_pos = p;
            pt.hump_neg = q;
            const double free_coord = 0.25 + 3.0 * i / std::max(1, n_samples - 1);
            pt.a = q == 0 ? static_cast<double>(p) * p : free_coord;
            pt.b = q == 0 ? free_coord : static_cast<double>(q) * q;
            out.push_back(pt);
        }
        return out;
    }
    // a in ]p^2, (3m)^2[, geometric spread away from the vertical asymptote.
    const double a_lo = static_cast<double>(p) * p;
    for (int i = 0; i < n_samples; ++i) {
        const double t = (i + 1.0) / (n_samples + 1.0);
        const double a = a_lo + (std::pow(3.0 * m, 2.0) - a_lo) * t * t;
        OdePoint pt;
        pt.family = Family::Dirichlet;
        pt.index = m;
        pt.hump_pos = p;
        pt.hump_neg = q;
        pt.a = a;
        pt.b = dirichlet_b_of_a(m, branch, a);
        out.push_back(pt);
    }
    return out;
}

std::vector<OdePoint> sample_periodic(int n, int n_samples) {
    std::vector<OdePoint> out;
    out.reserve(n_samples);
    const double a_hi = 1.0 - 0.25 * n * n;
    for (int i = 0; i < n_samples; ++i) {
        const double t = (i + 1.0) / (n_samples + 1.0);
        // From just below the admissibility edge down to strongly negative.
        const double a = a_hi - (a_hi - (-9.0 * n * n)) * t * t;
        OdePoint pt;
        pt.family = Family::Periodic;
        pt.index = n;
        pt.hump_pos = n;
        pt.hump_neg = n;
        pt.a = a;
        pt.b = periodic_b_of_a(n, a);
        out.push_back(pt);
    }
    return out;
}

}  // namespace fucik
