#pragma once

#include <optional>
#include <vector>

#include "qss/gaussian.hpp"

// Protocol-state construction: channel-dressed TMSV parameters, the N-port
// relay interferometer, the explicit 2N-mode input CM, entanglement
// localization and the effective M-mode reduced CMs.

namespace qss {

struct ChannelParams {
    double eta = 1.0;    // transmissivity in (0, 1]
    double omega = 1.0;  // thermal noise in SNU, omega = 2*nbar + 1 >= 1
    void validate() const;
};

struct GroupSpec {
    int members = 1;  // cooperating users N_j
    ChannelParams channel;
    std::optional<double> distance_km;  // if set, channel.eta is derived from it
};

struct ProtocolConfig {
    int total_users = 2;           // N, interferometer size
    std::vector<GroupSpec> groups; // sum of members <= N; deficit = dummy users
    double mu = 1.0;               // modulation variance, SNU
    double tau = 1.0;              // homodyne detector efficiency
    double xi = 1.0;               // reconciliation efficiency

    int group_count() const { return static_cast<int>(groups.size()); }
    int cooperating_users() const;
    bool full_house() const { return cooperating_users() == total_users; }
    void validate() const;
};

struct XYZParams {
    double x = 1.0;  // dressed signal variance eta*mu + (1-eta)*omega
    double y = 1.0;  // kept-mode variance, = mu
    double z = 0.0;  // correlation sqrt(eta*(mu^2-1))
};

/// Thermal-loss dressing of a TMSV arm.
XYZParams channel_params(double mu, const ChannelParams& ch);

/// N-port relay interferometer as an N x N orthogonal mode-mixing matrix:
/// row 1 is the balanced sum, row k = [(k-1) A_k - sum_{i<k} A_i]/sqrt(k(k-1)).
/// Acts identically on q and p. Equals the beamsplitter cascade with
/// T_1 = 1, T_k = 1 - 1/k.
Eigen::MatrixXd interferometer_matrix(int n_users);

/// Same matrix assembled as the explicit cascade of two-mode rotations.
Eigen::MatrixXd interferometer_cascade(int n_users);

/// Global 2N-mode input CM after channels and relay interferometer, modes
/// ordered B_1..B_N, A_1..A_N; block form [[y I, Upsilon], [Upsilon^T, Xi]].
/// Dummy ports (cooperating < N) carry mu = 1 vacua at their group channel,
/// appended after the cooperating users group by group.
CovarianceMatrix full_input_cm(const ProtocolConfig& cfg);

/// Block-diagonal orthogonal localization matrix: per group an N_j x N_j
/// orthogonal block whose last column is v = (1,..,1)/sqrt(N_j), built from a
/// Householder reflection (deterministic completion).
Eigen::MatrixXd localization_rotation(const std::vector<int>& group_sizes);

/// Effective M-mode CM V_{M|gamma} of the localized group modes. Closed form;
/// detector efficiency folded in analytically. M >= 3 requires full house;
/// M = 2 delegates to bipartite_cm (which covers dummy users).
CovarianceMatrix reduced_cm_multipartite(const ProtocolConfig& cfg);

/// Two-group closed form [[Delta_1, Gamma'], [Gamma'^T, Delta_2]] with
/// Lambda_{a,b} = a x_1 + b x_2 weighted by (N - N_l); valid for full-house
/// and dummy-user configurations.
CovarianceMatrix bipartite_cm(const ProtocolConfig& cfg);

/// Per-group dressed parameters with the detector-loss substitution applied:
/// full house shifts every x_j by (1-tau)/tau; the bipartite non-full-house
/// rule shifts both Lambda combinations by N(1-tau)/tau. tau = 1 is identity.
std::vector<XYZParams> detector_loss_transform(const ProtocolConfig& cfg);

}  // namespace qss
