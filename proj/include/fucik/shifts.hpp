#pragma once

// Shifted dual operators of the two variational formulations.
//
// Lower curve, fixing lambda_k != 0 and 0 < eps1 < lambda_k - lambda_{k-1}:
//   (Lv) scales each coefficient by 1/(m^2 - n^2 - lambda_{k-1} - eps1),
//   mu  = max{0, -1/(lambda_{k-1}+eps1)} + eps2,
//   nu  = -1/(lambda_{k-1}+eps1) - mu < 0   (kernel eigenvalue of L - mu).
//
// Upper curve, with 0 < eps3 < lambda_{k+1} - lambda_k:
//   (Mv) scales by 1/(lambda_{k+1} - m^2 + n^2 - eps3),
//   rho   = max{0, 1/(lambda_{k+1}-eps3)} + eps4,
//   sigma = 1/(lambda_{k+1}-eps3) - rho < 0.
//
// F(v) = <(L-mu)v, v> (or <(M-rho)v, v>) is diagonal in the eigenbasis.
// G(v) = ||v+||^2 + r ||v-||^2 is evaluated on the collocation grid; its
// gradient 2*analyze(v+ - r v-) is the exact gradient of the discrete G,
// which keeps the truncated maximization internally consistent.

#include <utility>

#include "fucik/spectral.hpp"

namespace fucik {

enum class Side { Lower, Upper };

struct ShiftConfigLower {
    int k = 1;
    long lambda_k = 1;
    long lambda_km1 = 0;
    double eps1 = 0.1;
    double eps2 = 0.1;
    double mu = 0.0;
    double nu = 0.0;
    double delta = 0.0;  // conditioning margin min |m^2-n^2-lambda_{k-1}-eps1|
};

struct ShiftConfigUpper {
    int k = 1;
    long lambda_k = 1;
    long lambda_kp1 = 3;
    double eps3 = 0.1;
    double eps4 = 0.1;
    double rho = 0.0;
    double sigma = 0.0;
    double delta = 0.0;
};

// Validate shift parameters; delta is the minimum divisor magnitude over
// modes up to 4x the truncation bounds.
ShiftConfigLower validate_lower(int k, double eps1, double eps2, const TruncationSpec& trunc);
ShiftConfigUpper validate_upper(int k, double eps3, double eps4, const TruncationSpec& trunc);

// Uniform diagonal view of L - mu and M - rho.
class ShiftedOperator {
  public:
    static ShiftedOperator lower(const ShiftConfigLower& cfg);
    static ShiftedOperator upper(const ShiftConfigUpper& cfg);

    Side side() const { return side_; }
    // lambda_{k-1}+eps1 for Lower, lambda_{k+1}-eps3 for Upper.
    double pole() const { return pole_; }
    // mu or rho.
    double second_shift() const { return shift2_; }
    double delta() const { return delta_; }
    long lambda_k() const { return lambda_k_; }
    int k() const { return k_; }

    // 1/(lambda - pole) resp. 1/(pole - lambda); throws ConditioningFailure
    // when the divisor magnitude falls below delta.
    double resolvent_diag(double lambda) const;
    // resolvent_diag - second shift: the diagonal of L-mu / M-rho.
    double shifted_diag(double lambda) const { return resolvent_diag(lambda) - shift2_; }

    // Largest diagonal entry over the whole spectrum, attained at lambda_k.
    double top_eigenvalue() const;

  private:
    Side side_ = Side::Lower;
    double pole_ = 0.0;
    double shift2_ = 0.0;
    double delta_ = 0.0;
    long lambda_k_ = 0;
    int k_ = 0;
};

SpectralField apply_L(const SpectralField& v, const ShiftConfigLower& cfg);
SpectralField apply_M(const SpectralField& v, const ShiftConfigUpper& cfg);

// F(v) and its gradient 2*(shifted diagonal applied to v).
std::pair<double, SpectralField> F_value_grad(const SpectralField& v, const ShiftedOperator& op,
                                              const Transform& transform);

// G(v) = ||v+||^2 + r ||v-||^2 by quadrature and gradient 2*analyze(v+ - r v-).
std::pair<double, SpectralField> G_value_grad(const SpectralField& v, double r,
                                              const Transform& transform);

double G_value(const GridField& grid, double r, const Transform& transform);

}  // namespace fucik
