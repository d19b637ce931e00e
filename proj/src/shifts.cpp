#include "fucik/shifts.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace fucik {

namespace {

// Smallest |m^2 - n^2 - pole| over modes up to 4x the truncation bounds.
double conditioning_margin(double pole, const TruncationSpec& trunc) {
    double best = std::numeric_limits<double>::infinity();
    const int mb = 4 * trunc.m_max, nb = 4 * std::max(trunc.n_max, 1);
    for (int m = 1; m <= mb; ++m)
        for (int n = 0; n <= nb; ++n) {
            const double lam = static_cast<double>(m) * m - static_cast<double>(n) * n;
            best = std::min(best, std::abs(lam - pole));
        }
    return best;
}

}  // namespace

ShiftConfigLower validate_lower(int k, double eps1, double eps2, const TruncationSpec& trunc) {
    if (k == 0) throw ZeroEigenvalue("validate_lower: lambda_k = 0 is excluded");
    ShiftConfigLower cfg;
    cfg.k = k;
    cfg.lambda_k = lambda_of_index(k);
    cfg.lambda_km1 = lambda_of_index(k - 1);
    const double gap = static_cast<double>(cfg.lambda_k - cfg.lambda_km1);
    if (!(eps1 > 0.0) || !(eps1 < gap))
        throw InvalidEps("validate_lower: need 0 < eps1 < lambda_k - lambda_{k-1} = " +
                         std::to_string(gap));
    const double pole = cfg.lambda_km1 + eps1;
    const double eps2_hi = 1.0 / (gap - eps1) - std::max(0.0, -1.0 / pole);
    if (!(eps2 > 0.0) || !(eps2 < eps2_hi))
        throw InvalidEps("validate_lower: need 0 < eps2 < " + std::to_string(eps2_hi));
    cfg.eps1 = eps1;
    cfg.eps2 = eps2;
    cfg.mu = std::max(0.0, -1.0 / pole) + eps2;
    cfg.nu = -1.0 / pole - cfg.mu;
    cfg.delta = conditioning_margin(pole, trunc);
    if (!(cfg.delta > 0.0))
        throw ConditioningFailure("validate_lower: vanishing resolvent divisor");
    return cfg;
}

ShiftConfigUpper validate_upper(int k, double eps3, double eps4, const TruncationSpec& trunc) {
    if (k == 0) throw ZeroEigenvalue("validate_upper: lambda_k = 0 is excluded");
    ShiftConfigUpper cfg;
    cfg.k = k;
    cfg.lambda_k = lambda_of_index(k);
    cfg.lambda_kp1 = lambda_of_index(k + 1);
    const double gap = static_cast<double>(cfg.lambda_kp1 - cfg.lambda_k);
    if (!(eps3 > 0.0) || !(eps3 < gap))
        throw InvalidEps("validate_upper: need 0 < eps3 < lambda_{k+1} - lambda_k = " +
                         std::to_string(gap));
    const double pole = cfg.lambda_kp1 - eps3;
    const double eps4_hi = 1.0 / (gap - eps3) - std::max(0.0, 1.0 / pole);
    if (!(eps4 > 0.0) || !(eps4 < eps4_hi))
        throw InvalidEps("validate_upper: need 0 < eps4 < " + std::to_string(eps4_hi));
    cfg.eps3 = eps3;
    cfg.eps4 = eps4;
    cfg.rho = std::max(0.0, 1.0 / pole) + eps4;
    cfg.sigma = 1.0 / pole - cfg.rho;
    cfg.delta = conditioning_margin(pole, trunc);
    if (!(cfg.delta > 0.0))
        throw ConditioningFailure("validate_upper: vanishing resolvent divisor");
    return cfg;
}

ShiftedOperator ShiftedOperator::lower(const ShiftConfigLower& cfg) {
    ShiftedOperator op;
    op.side_ = Side::Lower;
    op.pole_ = cfg.lambda_km1 + cfg.eps1;
    op.shift2_ = cfg.mu;
    op.delta_ = cfg.delta;
    op.lambda_k_ = cfg.lambda_k;
    op.k_ = cfg.k;
    return op;
}

ShiftedOperator ShiftedOperator::upper(const ShiftConfigUpper& cfg) {
    ShiftedOperator op;
    op.side_ = Side::Upper;
    op.pole_ = cfg.lambda_kp1 - cfg.eps3;
    op.shift2_ = cfg.rho;
    op.delta_ = cfg.delta;
    op.lambda_k_ = cfg.lambda_k;
    op.k_ = cfg.k;
    return op;
}

double ShiftedOperator::resolvent_diag(double lambda) const {
    const double div = side_ == Side::Lower ? lambda - pole_ : pole_ - lambda;
    if (std::abs(div) < delta_)
        throw ConditioningFailure("resolvent divisor below certified margin delta");
    return 1.0 / div;
}

double ShiftedOperator::top_eigenvalue() const {
    return resolvent_diag(static_cast<double>(lambda_k_)) - shift2_;
}

namespace {

SpectralField apply_resolvent(const SpectralField& v, const ShiftedOperator& op) {
    const ModeSet set = ModeSet::build(v.trunc);
    SpectralField out = v;
    for (int i = 0; i < set.size(); ++i) out.coeffs[i] = v.coeffs[i] * op.resolvent_diag(set.lambda[i]);
    return out;
}

}  // namespace

SpectralField apply_L(const SpectralField& v, const ShiftConfigLower& cfg) {
    return apply_resolvent(v, ShiftedOperator::lower(cfg));
}

SpectralField apply_M(const SpectralField& v, const ShiftConfigUpper& cfg) {
    return apply_resolvent(v, ShiftedOperator::upper(cfg));
}

std::pair<double, SpectralField> F_value_grad(const SpectralField& v, const ShiftedOperator& op,
                                              const Transform& transform) {
    const ModeSet& set = transform.modes();
    SpectralField grad = v;
    double value = 0.0;
    for (int i = 0; i < set.size(); ++i) {
        const double d = op.shifted_diag(set.lambda[i]);
        value += d * v.coeffs[i] * v.coeffs[i];
        grad.coeffs[i] = 2.0 * d * v.coeffs[i];
    }
    return {value, std::move(grad)};
}

double G_value(const GridField& grid, double r, const Transform& transform) {
    const auto& V = grid.values;
    const double pos = V.cwiseMax(0.0).squaredNorm();
    const double neg = (-V).cwiseMax(0.0).squaredNorm();
    return transform.node_weight() * (pos + r * neg);
}

std::pair<double, SpectralField> G_value_grad(const SpectralField& v, double r,
                                              const Transform& transform) {
    if (!(r > 0.0)) throw DomainError("G_value_grad: r must be positive");
    const GridField grid = transform.synthesize(v);
    const double value = G_value(grid, r, transform);
    GridField w;
    w.trunc = grid.trunc;
    // v+ - r v-: derivative field of the integrand, v+ = 0 at exactly 0.
    w.values = grid.values.cwiseMax(0.0) - r * (-grid.values).cwiseMax(0.0);
    SpectralField grad = transform.analyze(w);
    grad.coeffs *= 2.0;
    return {value, std::move(grad)};
}

}  // namespace fucik
