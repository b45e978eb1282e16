#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qss/rates.hpp"

// Scenario layer: fiber-distance conversion, scheme builders, max-distance
// solving and parameter sweeps.

namespace qss {

/// eta = 10^(-alpha d / 10) for a fiber of alpha dB/km (default 0.2).
double distance_to_transmissivity(double d_km, double alpha_db_per_km = 0.2);
double transmissivity_to_distance(double eta, double alpha_db_per_km = 0.2);

/// Repeaterless point-to-point bound -log2(1 - eta), as a reference column.
/// Returns +inf for eta = 1.
double plob_reference(double eta);

enum class SchemeKind { Bipartite, Y, X, Switch };

/// Builds the standard group layouts. distances_km: bipartite {d1, d2};
/// Y/switch (M in {3,4}) {d_far, d_deep}; X (M = 4) {d_far, d_deep}.
/// noises: per-group omega (size M) or a single shared value. N must divide
/// into M equal groups unless `allow_uneven`.
ProtocolConfig build_scheme(SchemeKind kind, int m_groups, int n_users,
                            const std::vector<double>& distances_km,
                            const std::vector<double>& noises,
                            bool allow_uneven = false);

/// Bipartite "X/Y" splitting: N1 = round(p1 * N) with N1 >= 1 enforced.
std::pair<int, int> split_users(int n_users, double percent_group1);

/// Largest distance of `moving_group` with a positive mu-optimized rate, by
/// bisection to 0.05 km; nullopt when the rate at distance 0 is already
/// non-positive. A 16-point pre-scan guards against multiple crossings.
std::optional<double> max_distance(const ProtocolConfig& cfg_template, int moving_group,
                                   double d_max_cap = 500.0, bool switch_mode = false,
                                   double mu_max = 1e6);

struct SweepSpec {
    ProtocolConfig base;
    std::string axis;   // "group.<i>.distance_km", "group.<i>.omega", "mu", "tau", "xi"
    double lo = 0.0, hi = 1.0;
    int points = 2;
    bool switch_mode = false;
    bool optimize_mu = true;  // otherwise evaluate at base.mu
    double mu_max = 1e6;
};

struct SweepRow {
    double axis_value = 0.0;
    RateReport report;
    double mu_star = 0.0;
    std::string error;  // non-empty marks a failed row
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepRow> rows;
};

/// Applies `axis = value` to a config copy; throws std::invalid_argument for
/// unknown axis paths.
ProtocolConfig apply_axis(const ProtocolConfig& base, const std::string& axis, double value);

/// Evaluates the (optionally mu-optimized) rate on the axis grid. Rows are
/// independent; `jobs` > 1 evaluates them concurrently, output order is
/// always the axis order. Per-row failures land in SweepRow::error.
SweepResult run_sweep(const SweepSpec& spec, int jobs = 1);

}  // namespace qss
