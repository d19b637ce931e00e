#include "fucik/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fucik {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

ModeIndex::ModeIndex(int m_, int n_, Parity parity_) : m(m_), n(n_), parity(parity_) {
    if (m < 1) throw std::invalid_argument("ModeIndex: m must be >= 1");
    if (n < 0) throw std::invalid_argument("ModeIndex: n must be >= 0");
    if (parity == Parity::Sin && n < 1)
        throw std::invalid_argument("ModeIndex: psi_(m,0) vanishes, sin parity needs n >= 1");
}

long eigenvalue(const ModeIndex& mode) {
    return static_cast<long>(mode.m) * mode.m - static_cast<long>(mode.n) * mode.n;
}

bool lambda_attainable(long lambda) {
    if (lambda == 0) return true;
    if (lambda % 2 != 0) return lambda != -1;
    if (lambda % 4 != 0) return false;
    return lambda != -4;
}

long lambda_of_index(int k) {
    if (k == 0) return 0;
    long lambda = 0;
    int count = 0;
    const int dir = k > 0 ? 1 : -1;
    while (count != k) {
        lambda += dir;
        if (lambda_attainable(lambda)) count += dir;
    }
    return lambda;
}

int index_of_lambda(long lambda) {
    if (!lambda_attainable(lambda))
        throw DomainError("index_of_lambda: " + std::to_string(lambda) + " is not an eigenvalue");
    int k = 0;
    const int dir = lambda > 0 ? 1 : -1;
    for (long v = dir; v != lambda + dir; v += dir)
        if (lambda_attainable(v)) k += dir;
    return k;
}

TruncationSpec::TruncationSpec(int m_max_, int n_max_, int grid_s_, int grid_t_,
                               double oversample_)
    : m_max(m_max_), n_max(n_max_), grid_s(grid_s_), grid_t(grid_t_), oversample(oversample_) {
    validate();
}

TruncationSpec TruncationSpec::with_bounds(int m_max, int n_max, double oversample) {
    TruncationSpec t;
    t.m_max = m_max;
    t.n_max = n_max;
    t.oversample = oversample;
    t.grid_s = std::max(m_max, static_cast<int>(std::ceil(oversample * m_max)));
    t.grid_t = std::max(2 * n_max + 1, static_cast<int>(std::ceil(oversample * 2 * n_max)));
    t.validate();
    return t;
}

void TruncationSpec::validate() const {
    if (m_max < 1 || n_max < 0) throw std::invalid_argument("TruncationSpec: bad mode bounds");
    if (grid_s < 1 || grid_t < 1) throw std::invalid_argument("TruncationSpec: bad grid sizes");
    if (oversample < 1.0) throw std::invalid_argument("TruncationSpec: oversample must be >= 1");
    if (grid_s < oversample * m_max || grid_s < m_max)
        throw std::invalid_argument("TruncationSpec: grid_s below anti-aliasing margin");
    if (grid_t < oversample * 2 * n_max || grid_t < 2 * n_max + 1)
        throw std::invalid_argument("TruncationSpec: grid_t below anti-aliasing margin");
}

ModeSet ModeSet::build(const TruncationSpec& trunc) {
    ModeSet set;
    for (int m = 1; m <= trunc.m_max; ++m) {
        for (int n = 0; n <= trunc.n_max; ++n) {
            set.modes.emplace_back(m, n, Parity::Cos);
            if (n >= 1) set.modes.emplace_back(m, n, Parity::Sin);
        }
    }
    set.lambda.resize(static_cast<int>(set.modes.size()));
    for (int i = 0; i < set.size(); ++i)
        set.lambda[i] = static_cast<double>(eigenvalue(set.modes[i]));
    return set;
}

int ModeSet::find(const ModeIndex& mode) const {
    for (int i = 0; i < size(); ++i)
        if (modes[i] == mode) return i;
    return -1;
}

SpectralField SpectralField::zero(const TruncationSpec& trunc) {
    SpectralField f;
    f.trunc = trunc;
    f.coeffs = Eigen::VectorXd::Zero(ModeSet::build(trunc).size());
    return f;
}

SpectralField SpectralField::basis(const TruncationSpec& trunc, const ModeIndex& mode) {
    SpectralField f = zero(trunc);
    const int idx = ModeSet::build(trunc).find(mode);
    if (idx < 0) throw DomainError("SpectralField::basis: mode outside truncation");
    f.coeffs[idx] = 1.0;
    return f;
}

GridField GridField::zero(const TruncationSpec& trunc) {
    GridField g;
    g.trunc = trunc;
    g.values = Eigen::MatrixXd::Zero(trunc.grid_s, trunc.grid_t);
    return g;
}

Transform::Transform(const TruncationSpec& trunc) : trunc_(trunc), modes_(ModeSet::build(trunc)) {
    trunc.validate();
    const int I = trunc.grid_s, J = trunc.grid_t;
    w_s_ = kPi / (I + 1);
    w_t_ = 2.0 * kPi / J;

    sine_s_.resize(I, trunc.m_max);
    for (int i = 0; i < I; ++i)
        for (int m = 1; m <= trunc.m_max; ++m)
            sine_s_(i, m - 1) = std::sin(m * node_s(i));

    const double c0 = 1.0 / kPi;
    const double cn = std::sqrt(2.0) / kPi;
    trig_cos_.resize(J, trunc.n_max + 1);
    trig_sin_.resize(J, std::max(trunc.n_max, 0));
    for (int j = 0; j < J; ++j) {
        trig_cos_(j, 0) = c0;
        for (int n = 1; n <= trunc.n_max; ++n) {
            trig_cos_(j, n) = cn * std::cos(n * node_t(j));
            trig_sin_(j, n - 1) = cn * std::sin(n * node_t(j));
        }
    }
}

double Transform::node_s(int i) const { return kPi * (i + 1) / (trunc_.grid_s + 1); }
double Transform::node_t(int j) const { return 2.0 * kPi * j / trunc_.grid_t; }

GridField Transform::synthesize(const SpectralField& field) const {
    if (!(field.trunc == trunc_)) throw DomainError("Transform::synthesize: truncation mismatch");
    const int M = trunc_.m_max, N = trunc_.n_max;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(M, N + 1);
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(M, std::max(N, 0));
    int idx = 0;
    for (int m = 1; m <= M; ++m) {
        for (int n = 0; n <= N; ++n) {
            A(m - 1, n) = field.coeffs[idx++];
            if (n >= 1) B(m - 1, n - 1) = field.coeffs[idx++];
        }
    }
    GridField out;
    out.trunc = trunc_;
    Eigen::MatrixXd t_stage = A * trig_cos_.transpose();
    if (N >= 1) t_stage.noalias() += B * trig_sin_.transpose();
    out.values.noalias() = sine_s_ * t_stage;
    return out;
}

SpectralField Transform::analyze(const GridField& grid) const {
    if (!(grid.trunc == trunc_)) throw DomainError("Transform::analyze: truncation mismatch");
    const int M = trunc_.m_max, N = trunc_.n_max;
    const Eigen::MatrixXd s_stage = sine_s_.transpose() * grid.values;  // m_max x grid_t
    const double w = node_weight();
    const Eigen::MatrixXd A = w * (s_stage * trig_cos_);
    Eigen::MatrixXd B;
    if (N >= 1) B = w * (s_stage * trig_sin_);

    SpectralField out;
    out.trunc = trunc_;
    out.coeffs.resize(modes_.size());
    int idx = 0;
    for (int m = 1; m <= M; ++m) {
        for (int n = 0; n <= N; ++n) {
            out.coeffs[idx++] = A(m - 1, n);
            if (n >= 1) out.coeffs[idx++] = B(m - 1, n - 1);
        }
    }
    return out;
}

std::vector<SpectrumEntry> enumerate_spectrum(int m_bound, int n_bound) {
    if (m_bound < 1 || n_bound < 1)
        throw std::invalid_argument("enumerate_spectrum: bounds must be >= 1");
    std::map<long, std::vector<ModeIndex>> table;
    for (int m = 1; m <= m_bound; ++m) {
        for (int n = 0; n <= n_bound; ++n) {
            const long lam = static_cast<long>(m) * m - static_cast<long>(n) * n;
            table[lam].emplace_back(m, n, Parity::Cos);
            if (n >= 1) table[lam].emplace_back(m, n, Parity::Sin);
        }
    }
    std::vector<SpectrumEntry> out;
    out.reserve(table.size());
    for (auto& [lam, modes] : table) {
        SpectrumEntry e;
        e.lambda = lam;
        e.multiplicity = static_cast<int>(modes.size());
        e.modes = std::move(modes);
        out.push_back(std::move(e));
    }
    return out;
}

std::pair<long, long> neighbors(long lambda_k, int m_bound, int n_bound) {
    const auto spectrum = enumerate_spectrum(m_bound, n_bound);
    long below = 0, above = 0;
    bool have_below = false, have_above = false, have_self = false;
    for (const auto& e : spectrum) {
        if (e.lambda == lambda_k) have_self = true;
        if (e.lambda < lambda_k && (!have_below || e.lambda > below)) {
            below = e.lambda;
            have_below = true;
        }
        if (e.lambda > lambda_k && (!have_above || e.lambda < above)) {
            above = e.lambda;
            have_above = true;
        }
    }
    if (!have_self || !have_below || !have_above)
        throw NeighborUnresolved("neighbors: bound box does not attain lambda_k and both sides");
    // Margin rule: every attainable integer strictly between the candidates
    // must already be attained inside the box, otherwise the box is too small.
    for (long v = below + 1; v < above; ++v) {
        if (v == lambda_k) continue;
        if (lambda_attainable(v))
            throw NeighborUnresolved("neighbors: value " + std::to_string(v) +
                                     " attainable outside the bound box");
    }
    return {below, above};
}

std::pair<SpectralField, SpectralField> split(const SpectralField& field) {
    const ModeSet set = ModeSet::build(field.trunc);
    SpectralField x = field, y = field;
    for (int i = 0; i < set.size(); ++i) {
        if (set.modes[i].m == set.modes[i].n)
            x.coeffs[i] = 0.0;
        else
            y.coeffs[i] = 0.0;
    }
    return {x, y};
}

Eigen::MatrixXd Transform::coeff_matrix(const SpectralField& field) const {
    const int M = trunc_.m_max, N = trunc_.n_max;
    Eigen::MatrixXd packed = Eigen::MatrixXd::Zero(M, 2 * N + 1);
    int idx = 0;
    for (int m = 1; m <= M; ++m)
        for (int n = 0; n <= N; ++n) {
            packed(m - 1, n) = field.coeffs[idx++];
            if (n >= 1) packed(m - 1, N + n) = field.coeffs[idx++];
        }
    return packed;
}

SpectralField Transform::from_coeff_matrix(const Eigen::MatrixXd& packed,
                                           const TruncationSpec& trunc) const {
    SpectralField out;
    out.trunc = trunc;
    out.coeffs.resize(modes_.size());
    const int M = trunc_.m_max, N = trunc_.n_max;
    int idx = 0;
    for (int m = 1; m <= M; ++m)
        for (int n = 0; n <= N; ++n) {
            out.coeffs[idx++] = packed(m - 1, n);
            if (n >= 1) out.coeffs[idx++] = packed(m - 1, N + n);
        }
    return out;
}

std::string parity_name(Parity p) { return p == Parity::Cos ? "cos" : "sin"; }

}  // namespace fucik
