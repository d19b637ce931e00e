#pragma once

// Tracing the two extremal Fucik curves through (lambda_k, lambda_k).
//
// Lower curve C_k: r sweeps [1, r_max] with warm starts, the r < 1 half
// follows from the exact symmetry a(1/r) = r a(r); map to the (a,b) plane by
//   a = lambda_{k-1} + eps1 + 1/(a_hat + mu),
//   b = lambda_{k-1} + eps1 + 1/(r a_hat + mu),
// staying inside the open square Q_k = ]p_k, p_k + 1/mu[^2.
//
// Upper curve D_k uses a = lambda_{k+1} - eps3 - 1/(a_hat + rho) and the
// square R_k = ]q_k - 1/rho, q_k[^2.  Both curves are graphs of decreasing
// functions b = f(a) (a corner for lambda_k = 1, whose maximizer has fixed
// sign).

#include <string>
#include <vector>

#include "fucik/maximizer.hpp"

namespace fucik {

struct CurvePoint {
    double r = 1.0;
    double a_hat = 0.0;
    double a = 0.0;
    double b = 0.0;
    double residual = 0.0;
    std::string flag = "ok";  // ok | noconv | untrusted | refined
};

struct Curve {
    int k = 1;
    Side side = Side::Lower;
    long lambda_k = 1;
    double eps_first = 0.1;   // eps1 (lower) or eps3 (upper)
    double eps_second = 0.1;  // eps2 (lower) or eps4 (upper)
    double square_lo = 0.0;   // open square of validity, ]lo, hi[^2
    double square_hi = 0.0;
    TruncationSpec trunc;
    std::vector<CurvePoint> points;  // sorted by r
};

std::pair<double, double> map_point(const ShiftConfigLower& cfg, double a_hat, double r);
std::pair<double, double> map_point(const ShiftConfigUpper& cfg, double a_hat, double r);

// Inverse of map_point: (a_hat, b_hat) of a plane point; requires the point
// inside the square.
std::pair<double, double> dual_coordinates(const ShiftConfigLower& cfg, double a, double b);
std::pair<double, double> dual_coordinates(const ShiftConfigUpper& cfg, double a, double b);

// Log-spaced r grid on [1, r_max].
std::vector<double> default_r_grid(double r_max = 100.0, int n_r = 40);

Curve trace(int k, Side side, const std::vector<double>& r_grid, double eps_first,
            double eps_second, const TruncationSpec& trunc, const MaximizerConfig& mcfg);

enum class Region { BelowC, OnC, Between, OnD, AboveD, Outside };

std::string region_name(Region region);

// Position of (a,b) relative to the two curves.  ON bands are 1e-4 in the
// max-norm distance to the interpolated polyline.
Region classify(double a, double b, const Curve& curve_c, const Curve& curve_d);

}  // namespace fucik
