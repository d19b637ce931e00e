#include "fucik/curve.hpp"

#include <algorithm>
#include <cmath>

namespace fucik {

namespace {

std::pair<double, double> map_lower(double pole, double mu, double a_hat, double r) {
    if (!(a_hat + mu > 0.0) || !(r * a_hat + mu > 0.0))
        throw DomainError("map_point: a_hat + mu must be positive");
    return {pole + 1.0 / (a_hat + mu), pole + 1.0 / (r * a_hat + mu)};
}

std::pair<double, double> map_upper(double pole, double rho, double a_hat, double r) {
    if (!(a_hat + rho > 0.0) || !(r * a_hat + rho > 0.0))
        throw DomainError("map_point: a_hat + rho must be positive");
    return {pole - 1.0 / (a_hat + rho), pole - 1.0 / (r * a_hat + rho)};
}

}  // namespace

std::pair<double, double> map_point(const ShiftConfigLower& cfg, double a_hat, double r) {
    return map_lower(cfg.lambda_km1 + cfg.eps1, cfg.mu, a_hat, r);
}

std::pair<double, double> map_point(const ShiftConfigUpper& cfg, double a_hat, double r) {
    return map_upper(cfg.lambda_kp1 - cfg.eps3, cfg.rho, a_hat, r);
}

std::pair<double, double> dual_coordinates(const ShiftConfigLower& cfg, double a, double b) {
    const double pole = cfg.lambda_km1 + cfg.eps1;
    if (!(a > pole) || !(b > pole))
        throw DomainError("dual_coordinates: point outside ]p_k, q_k[^2");
    return {1.0 / (a - pole) - cfg.mu, 1.0 / (b - pole) - cfg.mu};
}

std::pair<double, double> dual_coordinates(const ShiftConfigUpper& cfg, double a, double b) {
    const double pole = cfg.lambda_kp1 - cfg.eps3;
    if (!(a < pole) || !(b < pole))
        throw DomainError("dual_coordinates: point outside the upper square");
    return {1.0 / (pole - a) - cfg.rho, 1.0 / (pole - b) - cfg.rho};
}

std::vector<double> default_r_grid(double r_max, int n_r) {
    if (!(r_max > 1.0) || n_r < 2) throw std::invalid_argument("default_r_grid: bad parameters");
    std::vector<double> grid(n_r);
    for (int i = 0; i < n_r; ++i) grid[i] = std::exp(std::log(r_max) * i / (n_r - 1));
    grid.front() = 1.0;
    grid.back() = r_max;
    return grid;
}

namespace {

struct TracedValue {
    double r, a_hat, residual;
    bool converged;
    SpectralField v0;
};

std::string point_flag(double a_hat, bool converged) {
    if (a_hat < 1e-8 || a_hat > 1e8) return "untrusted";
    return converged ? "ok" : "noconv";
}

}  // namespace

Curve trace(int k, Side side, const std::vector<double>& r_grid, double eps_first,
            double eps_second, const TruncationSpec& trunc, const MaximizerConfig& mcfg) {
    if (r_grid.empty() || r_grid.front() < 1.0 - 1e-12)
        throw std::invalid_argument("trace: r_grid must be sorted and start at 1");
    for (std::size_t i = 1; i < r_grid.size(); ++i)
        if (r_grid[i] <= r_grid[i - 1]) throw std::invalid_argument("trace: r_grid not sorted");

    Curve curve;
    curve.k = k;
    curve.side = side;
    curve.eps_first = eps_first;
    curve.eps_second = eps_second;
    curve.trunc = trunc;

    ShiftConfigLower lo;
    ShiftConfigUpper up;
    ShiftedOperator op;
    if (side == Side::Lower) {
        lo = validate_lower(k, eps_first, eps_second, trunc);
        op = ShiftedOperator::lower(lo);
        curve.lambda_k = lo.lambda_k;
        curve.square_lo = lo.lambda_km1 + lo.eps1;
        curve.square_hi = curve.square_lo + 1.0 / lo.mu;
    } else {
        up = validate_upper(k, eps_first, eps_second, trunc);
        op = ShiftedOperator::upper(up);
        curve.lambda_k = up.lambda_k;
        curve.square_hi = up.lambda_kp1 - up.eps3;
        curve.square_lo = curve.square_hi - 1.0 / up.rho;
    }
    const Transform transform(trunc);

    auto solve_at = [&](double r, const SpectralField* warm) {
        const MaximizerResult res = maximize_ratio(op, r, transform, mcfg, warm);
        return TracedValue{r, res.a_hat, res.residual, res.converged, res.v0};
    };

    // Sweep r >= 1 with warm starts; refine where a_hat jumps (the supremum
    // is continuous in r, a jump flags a missed branch) up to 3 levels.
    std::vector<TracedValue> sweep;
    sweep.reserve(r_grid.size());
    for (double r : r_grid)
        sweep.push_back(solve_at(r, sweep.empty() ? nullptr : &sweep.back().v0));

    const double jump_threshold = 0.35;  // on |log(a_hat ratio)| between neighbours
    for (int level = 0; level < 3; ++level) {
        std::vector<TracedValue> refined;
        bool any = false;
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            if (i > 0) {
                const double lo_hat = std::min(sweep[i - 1].a_hat, sweep[i].a_hat);
                const double hi_hat = std::max(sweep[i - 1].a_hat, sweep[i].a_hat);
                if (lo_hat > 0.0 && std::log(hi_hat / lo_hat) > jump_threshold) {
                    const double rm = std::sqrt(sweep[i - 1].r * sweep[i].r);
                    refined.push_back(solve_at(rm, &sweep[i - 1].v0));
                    any = true;
                }
            }
            refined.push_back(sweep[i]);
        }
        sweep = std::move(refined);
        if (!any) break;
    }

    auto emit = [&](double r, double a_hat, double residual, bool converged) {
        CurvePoint p;
        p.r = r;
        p.a_hat = a_hat;
        const auto ab = side == Side::Lower ? map_point(lo, a_hat, r) : map_point(up, a_hat, r);
        p.a = ab.first;
        p.b = ab.second;
        p.residual = residual;
        p.flag = point_flag(a_hat, converged);
        curve.points.push_back(std::move(p));
    };

    // Mirror r > 1 to r < 1 through a_hat(1/r) = r a_hat(r), then emit in
    // ascending r order.
    for (auto it = sweep.rbegin(); it != sweep.rend(); ++it)
        if (it->r > 1.0) emit(1.0 / it->r, it->r * it->a_hat, it->residual, it->converged);
    for (const auto& tv : sweep) emit(tv.r, tv.a_hat, tv.residual, tv.converged);
    return curve;
}

std::string region_name(Region region) {
    switch (region) {
        case Region::BelowC: return "BELOW_C";
        case Region::OnC: return "ON_C";
        case Region::Between: return "BETWEEN";
        case Region::OnD: return "ON_D";
        case Region::AboveD: return "ABOVE_D";
        case Region::Outside: return "OUTSIDE";
    }
    return "OUTSIDE";
}

namespace {

// Max-norm distance from P to the segment A-B: the max of two V-shaped
// piecewise-linear functions of the parameter, minimized at an endpoint, a
// vertex, or a crossing.
double seg_dist_inf(double px, double py, double ax, double ay, double bx, double by) {
    const double dx = bx - ax, dy = by - ay;
    auto value = [&](double t) {
        const double fx = std::abs(ax + t * dx - px);
        const double fy = std::abs(ay + t * dy - py);
        return std::max(fx, fy);
    };
    double candidates[6];
    int n_cand = 0;
    candidates[n_cand++] = 0.0;
    candidates[n_cand++] = 1.0;
    if (dx != 0.0) candidates[n_cand++] = (px - ax) / dx;
    if (dy != 0.0) candidates[n_cand++] = (py - ay) / dy;
    const double u0 = ax - px, v0 = ay - py;
    if (dx - dy != 0.0) candidates[n_cand++] = (v0 - u0) / (dx - dy);
    if (dx + dy != 0.0) candidates[n_cand++] = -(u0 + v0) / (dx + dy);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_cand; ++i) best = std::min(best, value(std::clamp(candidates[i], 0.0, 1.0)));
    return best;
}

struct CurveGeometry {
    // Sorted by a ascending with b descending at ties, so the polyline walks
    // the decreasing graph including its vertical runs (the corner shape of
    // the lambda_k = 1 curves).
    std::vector<std::pair<double, double>> pts;
    double square_lo, square_hi;

    explicit CurveGeometry(const Curve& c) : square_lo(c.square_lo), square_hi(c.square_hi) {
        pts.reserve(c.points.size());
        for (const auto& p : c.points) pts.emplace_back(p.a, p.b);
        std::sort(pts.begin(), pts.end(), [](const auto& x, const auto& y) {
            if (x.first != y.first) return x.first < y.first;
            return x.second > y.second;
        });
    }

    bool in_square(double a, double b) const {
        return a > square_lo && a < square_hi && b > square_lo && b < square_hi;
    }

    double dist_inf(double a, double b) const {
        if (pts.size() == 1)
            return std::max(std::abs(a - pts[0].first), std::abs(b - pts[0].second));
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            best = std::min(best, seg_dist_inf(a, b, pts[i].first, pts[i].second,
                                               pts[i + 1].first, pts[i + 1].second));
        return best;
    }

    // Interpolated curve height f(a); the curve is a decreasing graph, and
    // beyond the sampled range it continues toward the square corners.
    double height(double a) const {
        if (pts.empty()) return square_hi;
        if (a <= pts.front().first) return square_hi;
        if (a >= pts.back().first) return square_lo;
        const auto it = std::partition_point(pts.begin(), pts.end(),
                                             [a](const auto& p) { return p.first < a; });
        const auto [a1, b1] = *(it - 1);
        const auto [a2, b2] = *it;
        if (a2 == a1) return std::min(b1, b2);
        const double t = (a - a1) / (a2 - a1);
        return b1 + t * (b2 - b1);
    }
};

}  // namespace

Region classify(double a, double b, const Curve& curve_c, const Curve& curve_d) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw DomainError("classify: coordinates must be finite");
    const CurveGeometry C(curve_c), D(curve_d);
    const double band = 1e-4;
    const bool in_q = C.in_square(a, b);
    const bool in_r = D.in_square(a, b);
    if (!in_q && !in_r) return Region::Outside;
    if (in_q && C.dist_inf(a, b) <= band) return Region::OnC;
    if (in_r && D.dist_inf(a, b) <= band) return Region::OnD;
    if (in_q && b < C.height(a)) return Region::BelowC;
    if (in_r && b > D.height(a)) return Region::AboveD;
    return Region::Between;
}

}  // namespace fucik
