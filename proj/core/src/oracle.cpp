#include "qss/oracle.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qss {

namespace {

// expands an n x n mode-mixing matrix to the 2n x 2n symplectic acting
// identically on q and p
Eigen::MatrixXd expand(const Eigen::MatrixXd& s) {
    const int n = static_cast<int>(s.rows());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            out(2 * i, 2 * j) = s(i, j);
            out(2 * i + 1, 2 * j + 1) = s(i, j);
        }
    return out;
}

// mixes mode `a` with a fresh vacuum ancilla on a transmissivity-tau
// beamsplitter and traces the ancilla out
Eigen::MatrixXd tau_beamsplitter(const Eigen::MatrixXd& m, int a, double tau) {
    const int d = static_cast<int>(m.rows());
    Eigen::MatrixXd ext = Eigen::MatrixXd::Identity(d + 2, d + 2);
    ext.topLeftCorner(d, d) = m;
    const int n = d / 2 + 1;
    Eigen::MatrixXd mix = Eigen::MatrixXd::Identity(n, n);
    const double t = std::sqrt(tau), r = std::sqrt(1.0 - tau);
    mix(a, a) = t;      mix(a, n - 1) = r;
    mix(n - 1, a) = -r; mix(n - 1, n - 1) = t;
    const Eigen::MatrixXd s = expand(mix);
    ext = (s * ext * s.transpose()).eval();
    return ext.topLeftCorner(d, d);
}

}  // namespace

std::string PipelineTrace::dump() const {
    std::ostringstream os;
    for (const auto& st : stages) {
        os << "stage " << st.label << " (" << st.cm.modes() << " modes)\n";
        os << st.cm.matrix() << "\n";
    }
    return os.str();
}

OracleResult oracle_reduced_cm(const ProtocolConfig& cfg) {
    cfg.validate();
    const int n = cfg.total_users;
    if (n > 12) throw std::invalid_argument("oracle_reduced_cm: N > 12 exceeds the cost guard");

    // per-port channel dressing, cooperating users first, dummies after
    struct Port { double eta, omega, mu; };
    std::vector<Port> ports;
    std::vector<int> group_sizes;
    for (const auto& g : cfg.groups) {
        double eta = g.distance_km ? std::pow(10.0, -0.02 * *g.distance_km) : g.channel.eta;
        for (int i = 0; i < g.members; ++i) ports.push_back({eta, g.channel.omega, cfg.mu});
        group_sizes.push_back(g.members);
    }
    for (int j = 0; static_cast<int>(ports.size()) < n; j = (j + 1) % cfg.group_count()) {
        const auto& g = cfg.groups[j];
        double eta = g.distance_km ? std::pow(10.0, -0.02 * *g.distance_km) : g.channel.eta;
        ports.push_back({eta, g.channel.omega, 1.0});
    }

    PipelineTrace trace;
    // stage 1: TMSV tensor, modes B_1..B_N, A_1..A_N
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4 * n, 4 * n);
    for (int k = 0; k < n; ++k) {
        const double mu_k = ports[k].mu;
        const double c = std::sqrt(mu_k * mu_k - 1.0);
        const int b = 2 * k, a = 2 * (n + k);
        m(b, b) = m(b + 1, b + 1) = mu_k;
        m(a, a) = m(a + 1, a + 1) = mu_k;
        m(b, a) = m(a, b) = c;
        m(b + 1, a + 1) = m(a + 1, b + 1) = -c;
    }
    trace.stages.push_back({"input", CovarianceMatrix(m)});

    // stage 2: thermal-loss channel on each A mode, V -> X V X^T + Y
    for (int k = 0; k < n; ++k) {
        const int a = 2 * (n + k);
        const double se = std::sqrt(ports[k].eta);
        m.row(a) *= se;  m.row(a + 1) *= se;
        m.col(a) *= se;  m.col(a + 1) *= se;
        const double add = (1.0 - ports[k].eta) * ports[k].omega;
        m(a, a) += add;  m(a + 1, a + 1) += add;
    }
    trace.stages.push_back({"post-channel", CovarianceMatrix(m)});

    // stage 3: relay interferometer on the A modes
    Eigen::MatrixXd mix = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    mix.bottomRightCorner(n, n) = interferometer_matrix(n);
    const Eigen::MatrixXd s = expand(mix);
    m = (s * m * s.transpose()).eval();
    trace.stages.push_back({"post-interferometer", CovarianceMatrix(m)});

    // stage 4: detector beamsplitters
    if (cfg.tau < 1.0) {
        for (int k = 0; k < n; ++k) m = tau_beamsplitter(m, n + k, cfg.tau);
        trace.stages.push_back({"post-detector-loss", CovarianceMatrix(m)});
    }

    // stage 5: q-homodyne A_N..A_2, then p-homodyne A_1 (order is immaterial)
    CovarianceMatrix v{m};
    for (int k = n - 1; k >= 1; --k) v = homodyne_condition(v, n + k, Quadrature::Q);
    v = homodyne_condition(v, n, Quadrature::P);
    trace.stages.push_back({"post-detection", v});

    // stage 6: localization within each cooperating group
    const int coop = cfg.cooperating_users();
    Eigen::MatrixXd loc = Eigen::MatrixXd::Identity(n, n);
    loc.topLeftCorner(coop, coop) = localization_rotation(group_sizes);
    Eigen::MatrixXd sloc = expand(loc.transpose());  // rows v^T pick the group modes
    Eigen::MatrixXd vb = sloc * v.matrix() * sloc.transpose();
    trace.stages.push_back({"post-localization", CovarianceMatrix(vb)});

    // stage 7: keep the last mode of each group, verify the rest decoupled
    const int m_groups = cfg.group_count();
    std::vector<int> eff;
    int off = 0;
    for (int gsz : group_sizes) {
        eff.push_back(off + gsz - 1);
        off += gsz;
    }
    std::vector<bool> is_eff(n, false);
    for (int e : eff) is_eff[e] = true;
    double resid = 0.0;
    for (int d = 0; d < n; ++d) {
        if (is_eff[d]) continue;
        for (int o = 0; o < n; ++o) {
            if (o == d) continue;
            resid = std::max(resid, vb.block<2, 2>(2 * d, 2 * o).cwiseAbs().maxCoeff());
        }
    }
    if (resid > 1e-8)
        throw std::runtime_error("oracle_reduced_cm: discarded modes are correlated (residual " +
                                 std::to_string(resid) + "), pipeline inconsistency");

    Eigen::MatrixXd out(2 * m_groups, 2 * m_groups);
    for (int i = 0; i < m_groups; ++i)
        for (int j = 0; j < m_groups; ++j)
            out.block<2, 2>(2 * i, 2 * j) = vb.block<2, 2>(2 * eff[i], 2 * eff[j]);
    return {CovarianceMatrix(std::move(out)), std::move(trace)};
}

}  // namespace qss
