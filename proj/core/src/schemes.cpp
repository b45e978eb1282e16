#include "qss/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace qss {

double distance_to_transmissivity(double d_km, double alpha_db_per_km) {
    if (d_km < 0.0) throw std::invalid_argument("distance must be >= 0");
    return std::pow(10.0, -alpha_db_per_km * d_km / 10.0);
}

double transmissivity_to_distance(double eta, double alpha_db_per_km) {
    if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("eta must be in (0, 1]");
    return -10.0 * std::log10(eta) / alpha_db_per_km;
}

double plob_reference(double eta) {
    if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("plob_reference: eta in (0, 1]");
    if (eta == 1.0) return rate_infinity();
    return -std::log2(1.0 - eta);
}

std::pair<int, int> split_users(int n_users, double percent_group1) {
    if (n_users < 2) throw std::invalid_argument("split_users: need at least 2 users");
    if (!(percent_group1 > 0.0) || percent_group1 >= 100.0)
        throw std::invalid_argument("split_users: percentage must be in (0, 100)");
    int n1 = static_cast<int>(std::lround(percent_group1 / 100.0 * n_users));
    n1 = std::clamp(n1, 1, n_users - 1);
    return {n1, n_users - n1};
}

ProtocolConfig build_scheme(SchemeKind kind, int m_groups, int n_users,
                            const std::vector<double>& distances_km,
                            const std::vector<double>& noises, bool allow_uneven) {
    if (n_users % m_groups != 0 && !allow_uneven)
        throw std::invalid_argument("build_scheme: N not divisible by M (pass an explicit override)");
    auto omega_of = [&](int j) {
        if (noises.size() == 1) return noises[0];
        if (static_cast<int>(noises.size()) == m_groups) return noises[j];
        throw std::invalid_argument("build_scheme: noises must have size 1 or M");
    };
    ProtocolConfig cfg;
    cfg.total_users = n_users;
    const int base = n_users / m_groups;
    int left = n_users;
    std::vector<int> sizes(m_groups, base);
    sizes.back() = left - base * (m_groups - 1);

    auto group_at = [&](int j, double d) {
        GroupSpec g;
        g.members = sizes[j];
        g.distance_km = d;
        g.channel.omega = omega_of(j);
        return g;
    };
    switch (kind) {
        case SchemeKind::Bipartite:
            if (m_groups != 2 || distances_km.size() != 2)
                throw std::invalid_argument("build_scheme: bipartite needs M=2 and {d1, d2}");
            cfg.groups = {group_at(0, distances_km[0]), group_at(1, distances_km[1])};
            break;
        case SchemeKind::Y:
        case SchemeKind::Switch: {
            if ((m_groups != 3 && m_groups != 4) || distances_km.size() != 2)
                throw std::invalid_argument("build_scheme: Y needs M in {3,4} and {d_far, d_deep}");
            for (int j = 0; j < m_groups - 1; ++j) cfg.groups.push_back(group_at(j, distances_km[0]));
            cfg.groups.push_back(group_at(m_groups - 1, distances_km[1]));
            break;
        }
        case SchemeKind::X: {
            if (m_groups != 4 || distances_km.size() != 2)
                throw std::invalid_argument("build_scheme: X needs M=4 and {d_far, d_deep}");
            for (int j = 0; j < 2; ++j) cfg.groups.push_back(group_at(j, distances_km[0]));
            for (int j = 2; j < 4; ++j) cfg.groups.push_back(group_at(j, distances_km[1]));
            break;
        }
    }
    cfg.validate();
    return cfg;
}

namespace {

double optimized_rate_at(const ProtocolConfig& tmpl, int moving_group, double d,
                         bool switch_mode, double mu_max) {
    ProtocolConfig cfg = tmpl;
    cfg.groups.at(moving_group).distance_km = d;
    return optimize_modulation(cfg, mu_max, switch_mode).report.rate;
}

}  // namespace

std::optional<double> max_distance(const ProtocolConfig& cfg_template, int moving_group,
                                   double d_max_cap, bool switch_mode, double mu_max) {
    if (moving_group < 0 || moving_group >= cfg_template.group_count())
        throw std::invalid_argument("max_distance: moving group out of range");
    auto rate = [&](double d) {
        return optimized_rate_at(cfg_template, moving_group, d, switch_mode, mu_max);
    };
    if (rate(0.0) <= 0.0) return std::nullopt;
    if (rate(d_max_cap) > 0.0) return d_max_cap;

    // pre-scan: the bisection assumes a single sign change
    constexpr int kScan = 16;
    int flips = 0;
    bool prev = true;
    double lo = 0.0, hi = d_max_cap;
    for (int i = 1; i <= kScan; ++i) {
        const double d = d_max_cap * i / kScan;
        const bool pos = rate(d) > 0.0;
        if (pos != prev) {
            ++flips;
            if (flips == 1) {
                lo = d_max_cap * (i - 1) / kScan;
                hi = d;
            }
        }
        prev = pos;
    }
    if (flips > 1)
        throw std::runtime_error("max_distance: multiple sign changes in the pre-scan");
    while (hi - lo > 0.05) {
        const double mid = (lo + hi) / 2.0;
        (rate(mid) > 0.0 ? lo : hi) = mid;
    }
    return (lo + hi) / 2.0;
}

ProtocolConfig apply_axis(const ProtocolConfig& base, const std::string& axis, double value) {
    ProtocolConfig cfg = base;
    if (axis == "mu") {
        cfg.mu = value;
        return cfg;
    }
    if (axis == "tau") {
        cfg.tau = value;
        return cfg;
    }
    if (axis == "xi") {
        cfg.xi = value;
        return cfg;
    }
    if (axis.rfind("group.", 0) == 0) {
        const auto rest = axis.substr(6);
        const auto dot = rest.find('.');
        if (dot != std::string::npos) {
            int idx = -1;
            try {
                idx = std::stoi(rest.substr(0, dot)) - 1;
            } catch (const std::exception&) {
                throw std::invalid_argument("unknown sweep axis: " + axis);
            }
            if (idx < 0 || idx >= cfg.group_count())
                throw std::invalid_argument("sweep axis group index out of range: " + axis);
            const auto field = rest.substr(dot + 1);
            if (field == "distance_km") {
                cfg.groups[idx].distance_km = value;
                return cfg;
            }
            if (field == "omega") {
                cfg.groups[idx].channel.omega = value;
                return cfg;
            }
            if (field == "eta") {
                cfg.groups[idx].distance_km.reset();
                cfg.groups[idx].channel.eta = value;
                return cfg;
            }
        }
    }
    throw std::invalid_argument("unknown sweep axis: " + axis);
}

SweepResult run_sweep(const SweepSpec& spec, int jobs) {
    if (spec.points < 2) throw std::invalid_argument("run_sweep: at least 2 points required");
    if (!(spec.lo < spec.hi)) throw std::invalid_argument("run_sweep: need lo < hi");
    spec.base.validate();
    apply_axis(spec.base, spec.axis, spec.lo);  // fail fast on bad axis

    SweepResult result;
    result.spec = spec;
    result.rows.resize(spec.points);

    auto eval_row = [&](int i) {
        SweepRow& row = result.rows[i];
        row.axis_value = spec.lo + (spec.hi - spec.lo) * i / (spec.points - 1);
        try {
            ProtocolConfig cfg = apply_axis(spec.base, spec.axis, row.axis_value);
            if (spec.optimize_mu) {
                OptimizeResult opt = optimize_modulation(cfg, spec.mu_max, spec.switch_mode);
                row.report = opt.report;
                row.mu_star = opt.mu_star;
            } else {
                row.report = (cfg.group_count() > 2 || spec.switch_mode)
                                 ? multipartite_rate(cfg, spec.switch_mode)
                                 : secret_key_rate(cfg);
                row.mu_star = cfg.mu;
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    jobs = std::max(1, jobs);
    if (jobs == 1) {
        for (int i = 0; i < spec.points; ++i) eval_row(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        for (int t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < spec.points; i = next.fetch_add(1)) eval_row(i);
            });
        for (auto& th : pool) th.join();
    }
    return result;
}

}  // namespace qss
