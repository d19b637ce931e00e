#include <doctest.h>

#include <cmath>

#include "fucik/rng.hpp"
#include "fucik/shifts.hpp"

using namespace fucik;

namespace {

const TruncationSpec kTrunc = TruncationSpec::with_bounds(6, 5, 2.0);

SpectralField random_field(const TruncationSpec& trunc, Rng& rng) {
    SpectralField f = SpectralField::zero(trunc);
    for (int i = 0; i < f.coeffs.size(); ++i) f.coeffs[i] = rng.normal();
    return f;
}

}  // namespace

TEST_CASE("validate_lower: k = 1 example") {
    const auto cfg = validate_lower(1, 0.1, 0.1, kTrunc);
    CHECK(cfg.lambda_k == 1);
    CHECK(cfg.lambda_km1 == 0);
    // lambda_{k-1} + eps1 = 0.1 > 0, so mu = eps2 and nu = -1/0.1 - 0.1.
    CHECK(cfg.mu == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(cfg.nu == doctest::Approx(-10.1).epsilon(1e-15));
    CHECK(cfg.delta > 0.0);
    CHECK(cfg.delta <= std::abs(1.0 - 0.1));
}

TEST_CASE("validate_lower: negative eigenvalue sign case") {
    // lambda_k = -3 (k = -1), lambda_{k-1} = -5; pole = -4.5 < 0.
    const auto cfg = validate_lower(-1, 0.5, 0.05, kTrunc);
    CHECK(cfg.lambda_k == -3);
    CHECK(cfg.lambda_km1 == -5);
    CHECK(cfg.mu == doctest::Approx(1.0 / 4.5 + 0.05).epsilon(1e-14));
    CHECK(cfg.nu == doctest::Approx(-0.05).epsilon(1e-12));
    CHECK(cfg.nu < 0.0);
}

TEST_CASE("validate_lower: eps boundary violations") {
    CHECK_THROWS_AS(validate_lower(1, 1.0, 0.1, kTrunc), InvalidEps);  // eps1 = gap
    CHECK_THROWS_AS(validate_lower(1, 0.0, 0.1, kTrunc), InvalidEps);
    CHECK_THROWS_AS(validate_lower(1, 0.1, 2.0, kTrunc), InvalidEps);  // eps2 too large
    CHECK_THROWS_AS(validate_lower(0, 0.1, 0.1, kTrunc), ZeroEigenvalue);
}

TEST_CASE("validate_upper") {
    const auto cfg = validate_upper(1, 0.2, 0.1, kTrunc);
    CHECK(cfg.lambda_kp1 == 3);
    CHECK(cfg.rho == doctest::Approx(1.0 / 2.8 + 0.1).epsilon(1e-14));
    CHECK(cfg.sigma == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK_THROWS_AS(validate_upper(1, 2.0, 0.1, kTrunc), InvalidEps);
    CHECK_THROWS_AS(validate_upper(0, 0.1, 0.1, kTrunc), ZeroEigenvalue);
}

TEST_CASE("apply_L scales coefficients by the resolvent diagonal") {
    const auto cfg = validate_lower(1, 0.1, 0.1, kTrunc);  // pole = 0.1
    const SpectralField e = SpectralField::basis(kTrunc, ModeIndex(2, 1, Parity::Cos));
    const SpectralField Le = apply_L(e, cfg);
    const int idx = ModeSet::build(kTrunc).find(ModeIndex(2, 1, Parity::Cos));
    CHECK(Le.coeffs[idx] == doctest::Approx(1.0 / 2.9).epsilon(1e-14));

    // Kernel mode is scaled by -1/(lambda_{k-1}+eps1).
    const SpectralField k = SpectralField::basis(kTrunc, ModeIndex(1, 1, Parity::Cos));
    const SpectralField Lk = apply_L(k, cfg);
    const int kidx = ModeSet::build(kTrunc).find(ModeIndex(1, 1, Parity::Cos));
    CHECK(Lk.coeffs[kidx] == doctest::Approx(-10.0).epsilon(1e-14));
}

TEST_CASE("apply_L is linear") {
    const auto cfg = validate_lower(2, 0.1, 0.1, kTrunc);
    Rng rng(11);
    const SpectralField f = random_field(kTrunc, rng), g = random_field(kTrunc, rng);
    SpectralField sum = f;
    sum.coeffs += g.coeffs;
    const SpectralField lhs = apply_L(sum, cfg);
    SpectralField rhs = apply_L(f, cfg);
    rhs.coeffs += apply_L(g, cfg).coeffs;
    CHECK((lhs.coeffs - rhs.coeffs).norm() < 1e-13 * rhs.coeffs.norm());
}

TEST_CASE("apply_M") {
    const auto cfg = validate_upper(1, 0.2, 0.1, kTrunc);  // lambda_2 = 3, pole = 2.8
    const SpectralField e = SpectralField::basis(kTrunc, ModeIndex(2, 1, Parity::Cos));
    const SpectralField Me = apply_M(e, cfg);
    const int idx = ModeSet::build(kTrunc).find(ModeIndex(2, 1, Parity::Cos));
    // 1/(lambda_{k+1} - 3 - eps3) with lambda_{k+1} = 4 and eps3 = 0.2 in the
    // spec walkthrough; here lambda_2 = 3 so the divisor is 2.8 - 3 = -0.2.
    CHECK(Me.coeffs[idx] == doctest::Approx(1.0 / (2.8 - 3.0)).epsilon(1e-13));

    const SpectralField k = SpectralField::basis(kTrunc, ModeIndex(2, 2, Parity::Sin));
    const SpectralField Mk = apply_M(k, cfg);
    const int kidx = ModeSet::build(kTrunc).find(ModeIndex(2, 2, Parity::Sin));
    CHECK(Mk.coeffs[kidx] == doctest::Approx(1.0 / 2.8).epsilon(1e-14));
}

TEST_CASE("apply_M matches the spec walkthrough with lambda_{k+1} = 4") {
    // k = 2: lambda_2 = 3, lambda_3 = 4.
    const auto cfg = validate_upper(2, 0.2, 0.1, kTrunc);
    CHECK(cfg.lambda_kp1 == 4);
    const SpectralField e = SpectralField::basis(kTrunc, ModeIndex(2, 1, Parity::Cos));
    const SpectralField Me = apply_M(e, cfg);
    const int idx = ModeSet::build(kTrunc).find(ModeIndex(2, 1, Parity::Cos));
    CHECK(Me.coeffs[idx] == doctest::Approx(1.0 / 0.8).epsilon(1e-14));
}

TEST_CASE("diagonal identity: (box - pole) recovers v from apply_L(v)") {
    const auto cfg = validate_lower(2, 0.3, 0.1, kTrunc);
    Rng rng(5);
    const SpectralField v = random_field(kTrunc, rng);
    const SpectralField Lv = apply_L(v, cfg);
    const ModeSet set = ModeSet::build(kTrunc);
    const double pole = cfg.lambda_km1 + cfg.eps1;
    for (int i = 0; i < set.size(); ++i) {
        const double back = (set.lambda[i] - pole) * Lv.coeffs[i];
        CHECK(back == doctest::Approx(v.coeffs[i]).epsilon(1e-14));
    }
}

TEST_CASE("F on eigenmodes and the kernel") {
    const Transform T(kTrunc);
    const auto cfg = validate_lower(1, 0.1, 0.1, kTrunc);
    const auto op = ShiftedOperator::lower(cfg);

    const SpectralField e = SpectralField::basis(kTrunc, ModeIndex(1, 0, Parity::Cos));
    const auto [Fe, gFe] = F_value_grad(e, op, T);
    CHECK(Fe == doctest::Approx(1.0 / (1.0 - 0.1) - 0.1).epsilon(1e-14));
    CHECK(Fe == doctest::Approx(op.top_eigenvalue()).epsilon(1e-14));

    Rng rng(9);
    SpectralField y = SpectralField::zero(kTrunc);
    const ModeSet set = ModeSet::build(kTrunc);
    for (int i = 0; i < set.size(); ++i)
        if (set.modes[i].m == set.modes[i].n) y.coeffs[i] = rng.normal();
    const auto [Fy, gFy] = F_value_grad(y, op, T);
    CHECK(Fy == doctest::Approx(cfg.nu * y.norm_sq()).epsilon(1e-13));
    CHECK(cfg.nu < 0.0);
}

TEST_CASE("G values and identities") {
    const Transform T(kTrunc);

    // v >= 0 everywhere: G = ||v||^2 and gradG = 2v.
    const SpectralField pos = SpectralField::basis(kTrunc, ModeIndex(1, 0, Parity::Cos));
    const auto [G, gG] = G_value_grad(pos, 3.0, T);
    CHECK(G == doctest::Approx(pos.norm_sq()).epsilon(1e-13));
    CHECK((gG.coeffs - 2.0 * pos.coeffs).norm() < 1e-12);

    Rng rng(17);
    const SpectralField v = random_field(kTrunc, rng);
    // r = 1 collapses G to the squared norm.
    CHECK(G_value_grad(v, 1.0, T).first == doctest::Approx(v.norm_sq()).epsilon(1e-12));

    // G_r(-v) = r G_{1/r}(v), exactly on the shared grid.
    for (double r : {0.5, 2.0, 7.0}) {
        SpectralField neg = v;
        neg.coeffs = -neg.coeffs;
        const double lhs = G_value_grad(neg, r, T).first;
        const double rhs = r * G_value_grad(v, 1.0 / r, T).first;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    }

    // min(1,r) ||v||^2 <= G <= max(1,r) ||v||^2.
    for (double r : {0.25, 1.0, 4.0}) {
        const double g = G_value_grad(v, r, T).first;
        const double n2 = v.norm_sq();
        CHECK(g >= std::min(1.0, r) * n2 * (1 - 1e-12));
        CHECK(g <= std::max(1.0, r) * n2 * (1 + 1e-12));
    }
}

TEST_CASE("gradF and gradG match central finite differences") {
    const Transform T(kTrunc);
    const auto cfg = validate_lower(2, 0.1, 0.1, kTrunc);
    const auto op = ShiftedOperator::lower(cfg);
    Rng rng(23);
    const double h = 1e-6;
    for (int rep = 0; rep < 50; ++rep) {
        const SpectralField v = random_field(kTrunc, rng);
        SpectralField dir = random_field(kTrunc, rng);
        dir.coeffs /= dir.norm();

        SpectralField vp = v, vm = v;
        vp.coeffs += h * dir.coeffs;
        vm.coeffs -= h * dir.coeffs;

        const auto [F, gF] = F_value_grad(v, op, T);
        const double fd_F =
            (F_value_grad(vp, op, T).first - F_value_grad(vm, op, T).first) / (2 * h);
        const double an_F = gF.coeffs.dot(dir.coeffs);
        CHECK(std::abs(fd_F - an_F) <= 1e-6 * std::max(1.0, std::abs(an_F)));

        const double r = 2.5;
        const auto [G, gG] = G_value_grad(v, r, T);
        const double fd_G =
            (G_value_grad(vp, r, T).first - G_value_grad(vm, r, T).first) / (2 * h);
        const double an_G = gG.coeffs.dot(dir.coeffs);
        CHECK(std::abs(fd_G - an_G) <= 1e-6 * std::max(1.0, std::abs(an_G)));
    }
}

TEST_CASE("conditioning guard") {
    const auto cfg = validate_lower(1, 0.1, 0.1, kTrunc);
    auto op = ShiftedOperator::lower(cfg);
    CHECK_THROWS_AS(op.resolvent_diag(cfg.lambda_km1 + cfg.eps1 + cfg.delta / 2),
                    ConditioningFailure);
}
