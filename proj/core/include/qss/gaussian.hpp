#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

// Covariance-matrix algebra for zero-mean Gaussian states in shot-noise
// units: vacuum = identity, quadratures ordered (q1, p1, ..., qn, pn) with
// [q, p] = 2i. Physical states have all symplectic eigenvalues >= 1.

namespace qss {

enum class Quadrature { Q = 0, P = 1 };

class CovarianceMatrix {
public:
    // Validates squareness, even dimension and symmetry (relative 1e-12),
    // then stores the symmetrized matrix.
    explicit CovarianceMatrix(Eigen::MatrixXd m);

    int modes() const { return static_cast<int>(m_.rows()) / 2; }
    const Eigen::MatrixXd& matrix() const { return m_; }

    // 2x2 block coupling modes i and j.
    Eigen::Matrix2d block(int i, int j) const { return m_.block<2, 2>(2 * i, 2 * j); }

    // All symplectic eigenvalues >= 1 - tol.
    bool is_physical(double tol = 1e-9) const;

    static CovarianceMatrix vacuum(int n_modes);
    // Two-mode squeezed vacuum with modulation variance mu = cosh(2r) >= 1.
    static CovarianceMatrix tmsv(double mu);

private:
    Eigen::MatrixXd m_;
};

/// Entropic function h(nu) in bits; h(1) = 0, h(nu) ~ log2(e*nu/2) for large nu.
/// Values in [1 - 1e-9, 1] are clamped to 1; below that throws std::domain_error.
double entropic_h(double nu);

/// Symplectic spectrum of V as |eigenvalues of Omega*V|, deduplicated into one
/// value per mode, sorted descending.
std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& v);

/// Two-mode closed form: nu_pm^2 = (Delta -+ sqrt(Delta^2 - 4 det V)) / 2 with
/// Delta = det A + det B + 2 det C. Returns {nu_plus, nu_minus}.
std::array<double, 2> symplectic_pair_2mode(const CovarianceMatrix& v);

/// Sum of entropic_h over the symplectic spectrum, in bits.
double von_neumann_entropy(const CovarianceMatrix& v);

/// Conditional CM after an ideal homodyne measurement of one quadrature of
/// `mode`: A - C (Pi B Pi)^MP C^T, measured mode removed. Outcome-independent.
CovarianceMatrix homodyne_condition(const CovarianceMatrix& v, int mode, Quadrature quad);

/// Conditional CM after heterodyne detection of `mode`: A - C (B + I)^-1 C^T.
CovarianceMatrix heterodyne_condition(const CovarianceMatrix& v, int mode);

/// Standard symplectic form, interleaved ordering.
Eigen::MatrixXd symplectic_form(int n_modes);

}  // namespace qss
