#include "qss/gaussian.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qss {

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() < 2 || m_.rows() % 2 != 0)
        throw std::invalid_argument("covariance matrix must be square with even dimension");
    const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
    const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * scale)
        throw std::invalid_argument("covariance matrix is not symmetric");
    m_ = ((m_ + m_.transpose()) / 2.0).eval();
}

bool CovarianceMatrix::is_physical(double tol) const {
    for (double nu : symplectic_eigenvalues(*this))
        if (nu < 1.0 - tol) return false;
    return true;
}

CovarianceMatrix CovarianceMatrix::vacuum(int n_modes) {
    return CovarianceMatrix(Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

CovarianceMatrix CovarianceMatrix::tmsv(double mu) {
    if (mu < 1.0) throw std::invalid_argument("tmsv requires mu >= 1");
    const double c = std::sqrt(mu * mu - 1.0);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    m.diagonal() << mu, mu, mu, mu;
    m(0, 2) = c;  m(2, 0) = c;
    m(1, 3) = -c; m(3, 1) = -c;
    return CovarianceMatrix(m);
}

double entropic_h(double nu) {
    if (nu < 1.0 - 1e-9) throw std::domain_error("entropic_h: unphysical eigenvalue nu < 1");
    if (nu <= 1.0 + 1e-15) return 0.0;
    // h = [a ln((a+1/2)/(a-1/2)) + ln(a^2-1/4)/2] / ln 2, a = nu/2; log1p keeps
    // the large-nu cancellation exact.
    const double a = nu / 2.0;
    return (a * std::log1p(1.0 / (a - 0.5)) + 0.5 * std::log(a * a - 0.25)) / M_LN2;
}

Eigen::MatrixXd symplectic_form(int n_modes) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
        w(2 * k, 2 * k + 1) = 1.0;
        w(2 * k + 1, 2 * k) = -1.0;
    }
    return w;
}

std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& v) {
    const int n = v.modes();
    Eigen::EigenSolver<Eigen::MatrixXd> es(symplectic_form(n) * v.matrix(), false);
    std::vector<double> mags(2 * n);
    for (int i = 0; i < 2 * n; ++i) mags[i] = std::abs(es.eigenvalues()[i]);
    // eigenvalues of Omega*V come in +-i nu pairs; adjacent after sorting
    std::sort(mags.begin(), mags.end(), std::greater<>());
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = mags[2 * i];
    return out;
}

std::array<double, 2> symplectic_pair_2mode(const CovarianceMatrix& v) {
    if (v.modes() != 2) throw std::invalid_argument("symplectic_pair_2mode needs a 2-mode CM");
    const Eigen::Matrix2d A = v.block(0, 0);
    const Eigen::Matrix2d B = v.block(1, 1);
    const Eigen::Matrix2d C = v.block(0, 1);
    const double delta = A.determinant() + B.determinant() + 2.0 * C.determinant();
    const double detv = v.matrix().determinant();
    const double disc = std::sqrt(std::max(delta * delta - 4.0 * detv, 0.0));
    const double nup = std::sqrt((delta + disc) / 2.0);
    // stable form for the small root
    const double num = std::sqrt(std::max(2.0 * detv / (delta + disc), 0.0));
    return {nup, num};
}

double von_neumann_entropy(const CovarianceMatrix& v) {
    double s = 0.0;
    for (double nu : symplectic_eigenvalues(v)) {
        if (nu < 1.0 - 1e-9) throw std::domain_error("von_neumann_entropy: unphysical state");
        s += entropic_h(std::max(nu, 1.0));
    }
    return s;
}

namespace {

Eigen::MatrixXd drop_mode(const Eigen::MatrixXd& m, int mode) {
    const int d = static_cast<int>(m.rows());
    Eigen::MatrixXd out(d - 2, d - 2);
    std::vector<int> keep;
    keep.reserve(d - 2);
    for (int i = 0; i < d; ++i)
        if (i != 2 * mode && i != 2 * mode + 1) keep.push_back(i);
    for (size_t r = 0; r < keep.size(); ++r)
        for (size_t c = 0; c < keep.size(); ++c) out(r, c) = m(keep[r], keep[c]);
    return out;
}

}  // namespace

CovarianceMatrix homodyne_condition(const CovarianceMatrix& v, int mode, Quadrature quad) {
    const int n = v.modes();
    if (mode < 0 || mode >= n) throw std::invalid_argument("homodyne_condition: mode out of range");
    if (n < 2) throw std::invalid_argument("homodyne_condition: nothing left after measurement");
    const Eigen::MatrixXd& m = v.matrix();
    const int idx = 2 * mode + static_cast<int>(quad);
    const double b = m(idx, idx);
    Eigen::MatrixXd rest = drop_mode(m, mode);
    if (b > 1e-14) {
        Eigen::VectorXd c(2 * n - 2);
        int r = 0;
        for (int i = 0; i < 2 * n; ++i)
            if (i != 2 * mode && i != 2 * mode + 1) c(r++) = m(i, idx);
        rest -= (c * c.transpose()) / b;
    }
    return CovarianceMatrix(std::move(rest));
}

CovarianceMatrix heterodyne_condition(const CovarianceMatrix& v, int mode) {
    const int n = v.modes();
    if (mode < 0 || mode >= n) throw std::invalid_argument("heterodyne_condition: mode out of range");
    if (n < 2) throw std::invalid_argument("heterodyne_condition: nothing left after measurement");
    const Eigen::MatrixXd& m = v.matrix();
    Eigen::Matrix2d B = m.block<2, 2>(2 * mode, 2 * mode) + Eigen::Matrix2d::Identity();
    Eigen::MatrixXd C(2 * n - 2, 2);
    int r = 0;
    for (int i = 0; i < 2 * n; ++i) {
        if (i == 2 * mode || i == 2 * mode + 1) continue;
        C(r, 0) = m(i, 2 * mode);
        C(r, 1) = m(i, 2 * mode + 1);
        ++r;
    }
    Eigen::MatrixXd rest = drop_mode(m, mode) - C * B.inverse() * C.transpose();
    return CovarianceMatrix(std::move(rest));
}

}  // namespace qss
