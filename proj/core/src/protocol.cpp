#include "qss/protocol.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "qss/schemes.hpp"

namespace qss {

void ChannelParams::validate() const {
    if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("channel eta must be in (0, 1]");
    if (omega < 1.0) throw std::invalid_argument("channel omega must be >= 1 SNU");
}

int ProtocolConfig::cooperating_users() const {
    int s = 0;
    for (const auto& g : groups) s += g.members;
    return s;
}

void ProtocolConfig::validate() const {
    if (total_users < 2) throw std::invalid_argument("total_users must be >= 2");
    if (groups.empty()) throw std::invalid_argument("at least one group is required");
    for (const auto& g : groups) {
        if (g.members < 1) throw std::invalid_argument("group members must be >= 1");
        if (g.distance_km) {
            if (*g.distance_km < 0) throw std::invalid_argument("distance_km must be >= 0");
            ChannelParams derived{distance_to_transmissivity(*g.distance_km), g.channel.omega};
            derived.validate();
        } else {
            g.channel.validate();
        }
    }
    if (cooperating_users() > total_users)
        throw std::invalid_argument("sum of group members exceeds total_users");
    if (mu < 1.0) throw std::invalid_argument("modulation mu must be >= 1 SNU");
    if (!(tau > 0.0) || tau > 1.0) throw std::invalid_argument("detector efficiency tau must be in (0, 1]");
    if (!(xi > 0.0) || xi > 1.0) throw std::invalid_argument("reconciliation xi must be in (0, 1]");
}

namespace {

ChannelParams effective_channel(const GroupSpec& g) {
    if (g.distance_km) return {distance_to_transmissivity(*g.distance_km), g.channel.omega};
    return g.channel;
}

}  // namespace

XYZParams channel_params(double mu, const ChannelParams& ch) {
    if (mu < 1.0) throw std::invalid_argument("channel_params: mu must be >= 1");
    ch.validate();
    return {ch.eta * mu + (1.0 - ch.eta) * ch.omega, mu, std::sqrt(ch.eta * (mu * mu - 1.0))};
}

Eigen::MatrixXd interferometer_matrix(int n) {
    if (n < 2) throw std::invalid_argument("interferometer_matrix: need at least 2 ports");
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(n, n);
    r.row(0).setConstant(1.0 / std::sqrt(double(n)));
    for (int k = 2; k <= n; ++k) {
        const double norm = std::sqrt(double(k) * (k - 1));
        for (int i = 0; i < k - 1; ++i) r(k - 1, i) = -1.0 / norm;
        r(k - 1, k - 1) = (k - 1) / norm;
    }
    return r;
}

Eigen::MatrixXd interferometer_cascade(int n) {
    if (n < 2) throw std::invalid_argument("interferometer_cascade: need at least 2 ports");
    // running sum accumulates in slot 0; reflected output of step k lands in slot k-1
    Eigen::MatrixXd m = Eigen::MatrixXd::Identity(n, n);
    for (int k = 2; k <= n; ++k) {
        const double t = std::sqrt(1.0 - 1.0 / k);
        const double rr = std::sqrt(1.0 / k);
        Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n, n);
        g(0, 0) = t;      g(0, k - 1) = rr;
        g(k - 1, 0) = -rr; g(k - 1, k - 1) = t;
        m = g * m;
    }
    return m;
}

CovarianceMatrix full_input_cm(const ProtocolConfig& cfg) {
    cfg.validate();
    const int n = cfg.total_users;
    // per-port dressed parameters, cooperating users first then dummy vacua
    std::vector<XYZParams> port;
    port.reserve(n);
    for (const auto& g : cfg.groups) {
        const auto p = channel_params(cfg.mu, effective_channel(g));
        for (int i = 0; i < g.members; ++i) port.push_back(p);
    }
    int deficit = n - static_cast<int>(port.size());
    for (int j = 0; deficit > 0; j = (j + 1) % cfg.group_count()) {
        port.push_back(channel_params(1.0, effective_channel(cfg.groups[j])));
        --deficit;
    }

    const Eigen::MatrixXd r = interferometer_matrix(n);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4 * n, 4 * n);
    // B block
    for (int i = 0; i < n; ++i) {
        m(2 * i, 2 * i) = port[i].y;
        m(2 * i + 1, 2 * i + 1) = port[i].y;
    }
    // Upsilon_{ij} = z_i R_{ji} Z and Xi = (R X R^T) (x) I
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) x(i, i) = port[i].x;
    const Eigen::MatrixXd xi_block = r * x * r.transpose();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double u = port[i].z * r(j, i);
            m(2 * i, 2 * (n + j)) = u;
            m(2 * i + 1, 2 * (n + j) + 1) = -u;
            m(2 * (n + j), 2 * i) = u;
            m(2 * (n + j) + 1, 2 * i + 1) = -u;
            m(2 * (n + i), 2 * (n + j)) = xi_block(i, j);
            m(2 * (n + i) + 1, 2 * (n + j) + 1) = xi_block(i, j);
        }
    }
    return CovarianceMatrix(std::move(m));
}

Eigen::MatrixXd localization_rotation(const std::vector<int>& group_sizes) {
    int total = 0;
    for (int s : group_sizes) {
        if (s < 1) throw std::invalid_argument("localization_rotation: group sizes must be >= 1");
        total += s;
    }
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(total, total);
    int off = 0;
    for (int s : group_sizes) {
        Eigen::VectorXd v = Eigen::VectorXd::Constant(s, 1.0 / std::sqrt(double(s)));
        Eigen::VectorXd w = v;
        w(s - 1) -= 1.0;  // w = v - e_last
        Eigen::MatrixXd h = Eigen::MatrixXd::Identity(s, s);
        const double wn = w.squaredNorm();
        if (wn > 1e-30) h -= (2.0 / wn) * (w * w.transpose());
        // flip the completion's sign so the 2x2 case matches ((1,-1),(1,1))/sqrt(2)
        h.leftCols(s - 1) *= -1.0;
        g.block(off, off, s, s) = h;
        off += s;
    }
    return g;
}

namespace {

// uniform x-shift implementing the detector-loss substitution
double tau_shift(const ProtocolConfig& cfg) {
    if (cfg.tau >= 1.0) return 0.0;
    const double u = (1.0 - cfg.tau) / cfg.tau;
    if (cfg.full_house()) return u;
    if (cfg.group_count() != 2)
        throw std::invalid_argument("detector loss with dummy users is only defined for two groups");
    // non-full-house bipartite: both Lambda combinations shift by N(1-tau)/tau
    const int n = cfg.total_users;
    return double(n) * u / (2.0 * n - cfg.cooperating_users());
}

}  // namespace

std::vector<XYZParams> detector_loss_transform(const ProtocolConfig& cfg) {
    cfg.validate();
    const double shift = tau_shift(cfg);
    std::vector<XYZParams> out;
    out.reserve(cfg.groups.size());
    for (const auto& g : cfg.groups) {
        XYZParams p = channel_params(cfg.mu, effective_channel(g));
        p.x += shift;
        out.push_back(p);
    }
    return out;
}

CovarianceMatrix bipartite_cm(const ProtocolConfig& cfg) {
    cfg.validate();
    if (cfg.group_count() != 2) throw std::invalid_argument("bipartite_cm requires exactly 2 groups");
    const auto p = detector_loss_transform(cfg);
    const double n = cfg.total_users;
    const double n1 = cfg.groups[0].members, n2 = cfg.groups[1].members;
    const double y = cfg.mu;
    const double lam_q = (n - n1) * p[0].x + (n - n2) * p[1].x;
    const double lam_p = (n - n2) * p[0].x + (n - n1) * p[1].x;
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    m(0, 0) = y - (n - n1) * p[0].z * p[0].z / lam_q;
    m(1, 1) = y - n1 * p[0].z * p[0].z / lam_p;
    m(2, 2) = y - (n - n2) * p[1].z * p[1].z / lam_q;
    m(3, 3) = y - n2 * p[1].z * p[1].z / lam_p;
    const double g = p[0].z * p[1].z * std::sqrt(n1 * n2);
    m(0, 2) = m(2, 0) = g / lam_q;
    m(1, 3) = m(3, 1) = -g / lam_p;
    return CovarianceMatrix(std::move(m));
}

CovarianceMatrix reduced_cm_multipartite(const ProtocolConfig& cfg) {
    cfg.validate();
    const int m_groups = cfg.group_count();
    if (m_groups == 2) return bipartite_cm(cfg);
    if (!cfg.full_house())
        throw std::invalid_argument("dummy users are only supported for two groups");

    const auto p = detector_loss_transform(cfg);
    const double y = cfg.mu;
    auto xprod = [&](int skip_a, int skip_b) {
        double prod = 1.0;
        for (int k = 0; k < m_groups; ++k)
            if (k != skip_a && k != skip_b) prod *= p[k].x;
        return prod;
    };
    double theta_q = 0.0, theta_p = 0.0;
    for (int k = 0; k < m_groups; ++k) {
        theta_q += cfg.groups[k].members * xprod(k, k);
        theta_p += cfg.groups[k].members * p[k].x;
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * m_groups, 2 * m_groups);
    for (int i = 0; i < m_groups; ++i) {
        const double ni = cfg.groups[i].members;
        double num_q = 0.0;
        for (int k = 0; k < m_groups; ++k)
            if (k != i) num_q += cfg.groups[k].members * xprod(k, i);
        m(2 * i, 2 * i) = y - p[i].z * p[i].z * num_q / theta_q;
        m(2 * i + 1, 2 * i + 1) = y - p[i].z * p[i].z * ni / theta_p;
        for (int j = i + 1; j < m_groups; ++j) {
            const double w = p[i].z * p[j].z * std::sqrt(ni * cfg.groups[j].members);
            m(2 * i, 2 * j) = m(2 * j, 2 * i) = w * xprod(i, j) / theta_q;
            m(2 * i + 1, 2 * j + 1) = m(2 * j + 1, 2 * i + 1) = -w / theta_p;
        }
    }
    CovarianceMatrix v{std::move(m)};
    if (!v.is_physical(1e-6))
        throw std::runtime_error("reduced_cm_multipartite: unphysical reduced state (internal error)");
    return v;
}

}  // namespace qss
