#pragma once

// Eigenbasis of the wave operator u_tt - u_ss on ]0,pi[ x T (T = R/2piZ),
// Dirichlet in s, 2pi-periodic in t.  Eigenvalues lambda_(m,n) = m^2 - n^2
// with eigenfunctions
//
//   phi_(m,n) = c_n sin(ms) cos(nt),   m >= 1, n >= 0,
//   psi_(m,n) = c_n sin(ms) sin(nt),   m >= 1, n >= 1,
//
// where c_n normalizes to unit L^2 norm: c_0 = 1/pi, c_n = sqrt(2)/pi for
// n >= 1 (the n = 0 cosine sector integrates to 2pi instead of pi, so a
// single constant cannot normalize both sectors).
//
// The kernel N of the wave operator is spanned by the m = n modes; its
// orthogonal complement within the basis closure is R.
//
// Grid representation: collocation at s_i = pi*i/(grid_s+1), i = 1..grid_s
// and t_j = 2pi*j/grid_t, j = 0..grid_t-1.  With grid_s >= m_max and
// grid_t > 2*n_max the quadrature rule w_s = pi/(grid_s+1), w_t = 2pi/grid_t
// is exact on products of basis functions (discrete sine / Fourier
// orthogonality), so analyze and synthesize are exact inverses on
// band-limited data.

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "fucik/errors.hpp"

namespace fucik {

enum class Parity { Cos, Sin };

struct ModeIndex {
    int m;          // spatial wavenumber, >= 1
    int n;          // temporal wavenumber, >= 0
    Parity parity;  // Cos selects phi, Sin selects psi

    ModeIndex(int m_, int n_, Parity parity_);

    bool operator==(const ModeIndex& o) const {
        return m == o.m && n == o.n && parity == o.parity;
    }
};

// lambda_(m,n) = m^2 - n^2
long eigenvalue(const ModeIndex& mode);

// True iff some (m,n) in N x N0 attains lambda = m^2 - n^2.  Writing
// lambda = (m-n)(m+n): attainable values are 0, every odd integer except -1,
// and every multiple of 4 except -4 (the minus signs fail because m >= 1).
bool lambda_attainable(long lambda);

// k-th eigenvalue in the ordering ... < lambda_-1 < lambda_0 = 0 < lambda_1 < ...
long lambda_of_index(int k);
int index_of_lambda(long lambda);

struct TruncationSpec {
    int m_max = 32;
    int n_max = 32;
    int grid_s = 64;
    int grid_t = 128;
    double oversample = 2.0;

    TruncationSpec() = default;
    TruncationSpec(int m_max_, int n_max_, int grid_s_, int grid_t_, double oversample_);

    // Grid sizes derived from the anti-aliasing margin.
    static TruncationSpec with_bounds(int m_max, int n_max, double oversample = 2.0);

    void validate() const;
    bool operator==(const TruncationSpec& o) const {
        return m_max == o.m_max && n_max == o.n_max && grid_s == o.grid_s &&
               grid_t == o.grid_t && oversample == o.oversample;
    }
};

// All modes of a truncation in the fixed storage order: sorted by
// (m, n, parity) with Cos before Sin.  This order is used by every file
// output.
struct ModeSet {
    std::vector<ModeIndex> modes;
    Eigen::VectorXd lambda;  // per-mode eigenvalue as double

    static ModeSet build(const TruncationSpec& trunc);
    int size() const { return static_cast<int>(modes.size()); }
    // Flat index of a mode, -1 if outside the truncation.
    int find(const ModeIndex& mode) const;
};

struct SpectralField {
    TruncationSpec trunc;
    Eigen::VectorXd coeffs;  // flat, ModeSet order

    static SpectralField zero(const TruncationSpec& trunc);
    static SpectralField basis(const TruncationSpec& trunc, const ModeIndex& mode);

    double norm() const { return coeffs.norm(); }
    double norm_sq() const { return coeffs.squaredNorm(); }
};

struct GridField {
    TruncationSpec trunc;
    Eigen::MatrixXd values;  // grid_s x grid_t, row i <-> s_i, column j <-> t_j

    static GridField zero(const TruncationSpec& trunc);
};

// Collocation transform between the two representations.  Immutable once
// built; safe to share across threads.
class Transform {
  public:
    explicit Transform(const TruncationSpec& trunc);

    GridField synthesize(const SpectralField& field) const;
    SpectralField analyze(const GridField& grid) const;

    double node_weight() const { return w_s_ * w_t_; }
    double quadrature_norm_sq(const GridField& grid) const {
        return node_weight() * grid.values.squaredNorm();
    }
    double quadrature_inner(const GridField& f, const GridField& g) const {
        return node_weight() * f.values.cwiseProduct(g.values).sum();
    }

    const ModeSet& modes() const { return modes_; }
    const TruncationSpec& trunc() const { return trunc_; }
    double node_s(int i) const;  // s_i, i = 0..grid_s-1 (interior nodes)
    double node_t(int j) const;

    // Direct access for hot loops that fuse the two GEMM stages themselves.
    Eigen::MatrixXd coeff_matrix(const SpectralField& field) const;  // modes -> (A | B) packed
    SpectralField from_coeff_matrix(const Eigen::MatrixXd& packed, const TruncationSpec&) const;

  private:
    TruncationSpec trunc_;
    ModeSet modes_;
    Eigen::MatrixXd sine_s_;    // grid_s x m_max: sin(m s_i)
    Eigen::MatrixXd trig_cos_;  // grid_t x (n_max+1): c_n cos(n t_j)
    Eigen::MatrixXd trig_sin_;  // grid_t x n_max: c_n sin(n t_j)
    double w_s_ = 0.0, w_t_ = 0.0;
};

struct SpectrumEntry {
    long lambda = 0;
    std::vector<ModeIndex> modes;  // all basis functions attaining lambda in the box
    int multiplicity = 0;          // == modes.size()
};

// Distinct eigenvalues with m <= m_bound, n <= n_bound, sorted ascending.
std::vector<SpectrumEntry> enumerate_spectrum(int m_bound, int n_bound);

// Adjacent distinct spectrum values around lambda_k.  Throws
// NeighborUnresolved when the bound box cannot certify adjacency (a value
// attainable outside the box would fall in the gap).
std::pair<long, long> neighbors(long lambda_k, int m_bound, int n_bound);

// R/N decomposition: x carries all m != n modes, y the kernel modes m == n.
std::pair<SpectralField, SpectralField> split(const SpectralField& field);

std::string parity_name(Parity p);

}  // namespace fucik
