#pragma once

#include <limits>

#include "qss/protocol.hpp"

// Secret-key rates: Holevo bound, mutual information, R = xi*I - chi,
// full-house asymptotics, worst-case multipartite and switch rates, and
// modulation optimization.

namespace qss {

enum class RateMode { Exact, AsymptoticFh };
enum class RateStatus { Ok, NoPositiveRate };

struct RateReport {
    double rate = 0.0;                // bits per use, never clamped
    double mutual_information = 0.0;  // bits per use
    double holevo = 0.0;              // bits per use
    double nu_plus = 1.0;             // bipartite: 2-mode spectrum; M>2: spectrum extremes
    double nu_minus = 1.0;
    double nu_cond = 1.0;             // conditional symplectic value (smallest for M>2)
    double mu_used = 1.0;             // SNU; infinity when the asymptotic branch applies
    RateMode mode = RateMode::Exact;
    RateStatus status = RateStatus::Ok;
};

struct HolevoParts {
    double chi;
    double nu_plus, nu_minus, nu_cond;
};

/// chi = h(nu+) + h(nu-) - h(nu_cond) for a two-mode CM; `decoder` selects the
/// heterodyned mode (paper default: group 2, index 1).
HolevoParts holevo_bipartite(const CovarianceMatrix& v2, int decoder = 1);

/// I = log2(Sigma)/2 with Sigma = (1 + det D + tr D)/(1 + det Vc + tr Vc),
/// D the encoder block and Vc its heterodyne-conditioned remainder.
double mutual_information_bipartite(const CovarianceMatrix& v2, int decoder = 1);

/// Exact rate at the configured mu, tau, xi. Delegates to multipartite_rate
/// for more than two groups.
RateReport secret_key_rate(const ProtocolConfig& cfg);

/// Closed-form mu -> infinity limit for full-house bipartite configs with
/// xi = 1 (the limit does not exist otherwise); detector loss via the
/// S/R/L expressions, symmetric channels via the continuity branch.
RateReport asymptotic_rate_fh(const ProtocolConfig& cfg);

struct OptimizeResult {
    double mu_star;  // +inf flags the asymptotic full-house branch
    RateReport report;
};

/// Rate maximized over modulation. Full-house bipartite with xi = 1 is
/// non-decreasing in mu, so the rate is evaluated directly at mu_max and
/// flagged asymptotic; every other shape (dummy users, xi < 1, M > 2) has an
/// interior optimum found by a 64-point log grid plus golden-section
/// refinement (relative mu tolerance 1e-6).
OptimizeResult optimize_modulation(const ProtocolConfig& cfg, double mu_max = 1e6,
                                   bool switch_mode = false);

/// Worst-case M-group rate at the configured mu: R = xi * I_min - chi_max,
/// chi maximized over all M heterodyne conditionings and I minimized over the
/// M(M-1)/2 group pairs (decoder = deeper-indexed group). With `switch_mode`
/// the relay serves each pair alone (full-house bipartite sub-protocol) and
/// the minimum pair rate is reported.
RateReport multipartite_rate(const ProtocolConfig& cfg, bool switch_mode = false);

/// S(V_M) - S(V_M | heterodyne of group `condition_on`).
double holevo_multipartite(const CovarianceMatrix& vm, int condition_on);

inline double rate_infinity() { return std::numeric_limits<double>::infinity(); }

}  // namespace qss
