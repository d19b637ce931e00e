#pragma once

// Exact separable Fucik families of the wave operator, used as independent
// oracles for the traced curves.
//
// Dirichlet family (t-independent solutions u = S(s)):
//   -S'' = a S+ - b S-,  S(0) = S(pi) = 0,
//   alternating arches of lengths pi/sqrt(a) (positive) and pi/sqrt(b)
//   (negative); a branch with p positive and q negative arches satisfies
//   p pi/sqrt(a) + q pi/sqrt(b) = pi and passes through a = b = m^2, m = p+q.
//
// Periodic family (u = sin(s) T(t)):
//   T'' + T = a T+ - b T-,  T 2pi-periodic,
//   n (pi/sqrt(1-a) + pi/sqrt(1-b)) = 2 pi through a = b = 1 - n^2.
//
// The closed forms are validated by shooting with an adaptive embedded
// RK45 integrator; sign changes of the solution are located by bisection so
// that the piecewise-linear right side never degrades the order.

#include <utility>
#include <vector>

#include "fucik/errors.hpp"

namespace fucik {

enum class Family { Dirichlet, Periodic };

struct OdePoint {
    Family family = Family::Dirichlet;
    int index = 1;  // m or n
    double a = 0.0;
    double b = 0.0;
    int hump_pos = 1;  // p
    int hump_neg = 0;  // q, |p - q| <= 1
};

// b on the (p,q) branch of the Dirichlet family at abscissa a.  Requires
// p + q = m, |p - q| <= 1, q >= 1 and a > p^2 (the q = 0 branch is the
// vertical line a = p^2 and has no graph representation).
double dirichlet_b_of_a(int m, std::pair<int, int> branch, double a);

// b with n (pi/sqrt(1-a) + pi/sqrt(1-b)) = 2 pi; requires a < 1 - n^2/4.
double periodic_b_of_a(int n, double a);

struct ShootResult {
    double miss = 0.0;   // S(pi)
    int zero_count = 0;  // interior sign changes
};

// Integrate S'' = -a S+ + b S- from S(0) = 0, S'(0) = 1 up to s = pi.
ShootResult shoot_dirichlet(double a, double b, double tol = 1e-10);

// min over unit initial data (T, T')(0) = (cos th, sin th) of the periodic
// defect |(T(2pi) - T(0), T'(2pi) - T'(0))|.
double shoot_periodic(double a, double b, double tol = 1e-10);

// Sampled family branches (closed-form points) for oracle sweeps and CSV
// emission.
std::vector<OdePoint> sample_dirichlet(int m, std::pair<int, int> branch, int n_samples);
std::vector<OdePoint> sample_periodic(int n, int n_samples);

}  // namespace fucik
