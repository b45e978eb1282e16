#include "qss/rates.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qss/schemes.hpp"

namespace qss {

namespace {

double log2_(double v) { return std::log2(v); }

double sigma_of(const Eigen::Matrix2d& b) {
    return 1.0 + b.determinant() + b.trace();
}

CovarianceMatrix swap_modes(const CovarianceMatrix& v2) {
    Eigen::MatrixXd m(4, 4);
    m.block<2, 2>(0, 0) = v2.block(1, 1);
    m.block<2, 2>(2, 2) = v2.block(0, 0);
    m.block<2, 2>(0, 2) = v2.block(1, 0);
    m.block<2, 2>(2, 0) = v2.block(0, 1);
    return CovarianceMatrix(std::move(m));
}

}  // namespace

HolevoParts holevo_bipartite(const CovarianceMatrix& v2, int decoder) {
    if (v2.modes() != 2) throw std::invalid_argument("holevo_bipartite needs a 2-mode CM");
    if (!v2.is_physical()) throw std::domain_error("holevo_bipartite: unphysical CM");
    const CovarianceMatrix w = (decoder == 0) ? swap_modes(v2) : v2;
    const auto [nup, num] = symplectic_pair_2mode(w);
    const CovarianceMatrix vc = heterodyne_condition(w, 1);
    const double nuc = std::sqrt(std::max(vc.matrix().determinant(), 0.0));
    const double chi = entropic_h(std::max(nup, 1.0)) + entropic_h(std::max(num, 1.0)) -
                       entropic_h(std::max(nuc, 1.0));
    return {chi, nup, num, nuc};
}

double mutual_information_bipartite(const CovarianceMatrix& v2, int decoder) {
    if (v2.modes() != 2) throw std::invalid_argument("mutual_information_bipartite needs a 2-mode CM");
    if (!v2.is_physical()) throw std::domain_error("mutual_information_bipartite: unphysical CM");
    const CovarianceMatrix w = (decoder == 0) ? swap_modes(v2) : v2;
    const CovarianceMatrix vc = heterodyne_condition(w, 1);
    const double sigma = sigma_of(w.block(0, 0)) / sigma_of(vc.block(0, 0));
    return 0.5 * log2_(sigma);
}

namespace {

RateReport rate_from_cm(const CovarianceMatrix& v2, double xi, double mu_used) {
    const auto hol = holevo_bipartite(v2);
    const double mi = mutual_information_bipartite(v2);
    RateReport r;
    r.mutual_information = mi;
    r.holevo = hol.chi;
    r.rate = xi * mi - hol.chi;
    r.nu_plus = hol.nu_plus;
    r.nu_minus = hol.nu_minus;
    r.nu_cond = hol.nu_cond;
    r.mu_used = mu_used;
    r.status = r.rate > 0.0 ? RateStatus::Ok : RateStatus::NoPositiveRate;
    return r;
}

struct FhParams {
    double e1, e2, w1, w2, n1, n2;
};

FhParams fh_params(const ProtocolConfig& cfg) {
    auto ch = [&](const GroupSpec& g) {
        return g.distance_km ? distance_to_transmissivity(*g.distance_km) : g.channel.eta;
    };
    return {ch(cfg.groups[0]), ch(cfg.groups[1]),
            cfg.groups[0].channel.omega, cfg.groups[1].channel.omega,
            double(cfg.groups[0].members), double(cfg.groups[1].members)};
}

// symmetric-channel limit of the asymptotic rate (removable discontinuity of
// the nu_pm expressions), ideal or tau-shifted
RateReport asy_symmetric(const FhParams& q, double tau) {
    if (std::abs(q.w1 - q.w2) > 1e-9)
        throw std::invalid_argument(
            "asymptotic_rate_fh: the symmetric branch requires omega_1 = omega_2");
    const double eta = q.e1, om = q.w1, n1 = q.n1, n2 = q.n2, n = n1 + n2;
    const double c = (1.0 - eta) * om + (1.0 - tau) / tau;
    if (c <= 0.0)  // lossless noiseless corner, rate diverges
        return {rate_infinity(), rate_infinity(), 0.0, 1.0, 1.0, 1.0,
                rate_infinity(), RateMode::AsymptoticFh, RateStatus::Ok};
    const double qi = (n * c + eta * n1) / (eta * n2);
    const double pi = (n * c + eta * n2) / (eta * n1);
    const double nuss = std::sqrt(qi * pi);
    const double rate = log2_(4.0 * eta * std::sqrt(n1 * n2) / (M_E * M_E * c * n)) -
                        0.5 * log2_((1.0 + qi) * (1.0 + pi)) + entropic_h(nuss);
    RateReport r;
    r.rate = rate;
    r.holevo = 0.0;  // I and chi diverge separately; only the difference is reported
    r.mutual_information = rate;
    r.nu_plus = r.nu_minus = rate_infinity();
    r.nu_cond = nuss;
    r.mu_used = rate_infinity();
    r.mode = RateMode::AsymptoticFh;
    r.status = rate > 0.0 ? RateStatus::Ok : RateStatus::NoPositiveRate;
    return r;
}

}  // namespace

RateReport secret_key_rate(const ProtocolConfig& cfg) {
    cfg.validate();
    if (cfg.group_count() > 2) return multipartite_rate(cfg);
    RateReport r = rate_from_cm(bipartite_cm(cfg), cfg.xi, cfg.mu);
    return r;
}

RateReport asymptotic_rate_fh(const ProtocolConfig& cfg) {
    cfg.validate();
    if (cfg.group_count() != 2 || !cfg.full_house())
        throw std::invalid_argument("asymptotic_rate_fh: full-house bipartite configs only");
    if (cfg.xi < 1.0)
        throw std::invalid_argument(
            "asymptotic_rate_fh: the mu -> infinity limit exists only for xi = 1");
    const FhParams q = fh_params(cfg);
    const double tau = cfg.tau;
    if (std::abs(q.e1 - q.e2) < 1e-9) return asy_symmetric(q, tau);

    // S/R/L expressions; tau = 1 reduces them to the lambda/N forms
    const double a1 = 1.0 - tau + tau * q.w1 * (1.0 - q.e1);
    const double a2 = 1.0 - tau + tau * q.w2 * (1.0 - q.e2);
    const double b1 = 1.0 - tau * (1.0 - q.e1) + tau * q.w1 * (1.0 - q.e1);
    const double b2 = 1.0 - tau * (1.0 - q.e2) + tau * q.w2 * (1.0 - q.e2);
    const double s12 = q.n1 * a1 + q.n2 * a2, s21 = q.n2 * a1 + q.n1 * a2;
    const double r12 = q.n1 * a1 + q.n2 * b2, r21 = q.n2 * a1 + q.n1 * b2;
    const double l12 = q.n1 * b1 + q.n2 * b2, l21 = q.n2 * b1 + q.n1 * b2;
    const double de = std::abs(q.e1 - q.e2);
    const double nn = q.n1 * q.n2;
    const double nu_minus = std::sqrt(s12 * s21 / nn) / (tau * de);
    const double nu_ss = std::sqrt(r12 * r21 / nn) / (tau * q.e1);
    const double rate = log2_(2.0 * tau * q.e1 * q.e2 / (M_E * de) * std::sqrt(nn / (l12 * l21))) -
                        entropic_h(std::max(nu_minus, 1.0)) + entropic_h(std::max(nu_ss, 1.0));
    RateReport r;
    r.rate = rate;
    r.mutual_information = rate;
    r.holevo = 0.0;
    r.nu_plus = rate_infinity();
    r.nu_minus = nu_minus;
    r.nu_cond = nu_ss;
    r.mu_used = rate_infinity();
    r.mode = RateMode::AsymptoticFh;
    r.status = rate > 0.0 ? RateStatus::Ok : RateStatus::NoPositiveRate;
    return r;
}

namespace {

RateReport rate_at_mu(const ProtocolConfig& cfg, double mu, bool switch_mode) {
    ProtocolConfig c = cfg;
    c.mu = mu;
    if (c.group_count() > 2 || switch_mode) return multipartite_rate(c, switch_mode);
    return secret_key_rate(c);
}

}  // namespace

OptimizeResult optimize_modulation(const ProtocolConfig& cfg, double mu_max, bool switch_mode) {
    cfg.validate();
    if (mu_max <= 1.0) throw std::invalid_argument("optimize_modulation: mu_max must exceed 1");

    if (switch_mode) {
        // every pair runs its own relay session, so each is optimized alone
        const int m = cfg.group_count();
        if (m < 2) throw std::invalid_argument("optimize_modulation: need at least 2 groups");
        OptimizeResult worst;
        bool first = true;
        for (int a = 0; a < m; ++a) {
            for (int b = a + 1; b < m; ++b) {
                ProtocolConfig pair = cfg;
                pair.groups = {cfg.groups[a], cfg.groups[b]};
                pair.total_users = cfg.groups[a].members + cfg.groups[b].members;
                OptimizeResult r = optimize_modulation(pair, mu_max, false);
                if (first || r.report.rate < worst.report.rate) {
                    worst = r;
                    first = false;
                }
            }
        }
        worst.report.status =
            worst.report.rate > 0.0 ? RateStatus::Ok : RateStatus::NoPositiveRate;
        return worst;
    }

    const bool fh_monotone =
        cfg.full_house() && cfg.xi >= 1.0 && cfg.group_count() == 2;
    if (fh_monotone) {
        // rate is non-decreasing in mu; evaluate at the cap and flag asymptotic
        RateReport r = rate_at_mu(cfg, mu_max, switch_mode);
        r.mode = RateMode::AsymptoticFh;
        return {rate_infinity(), r};
    }

    constexpr int kGrid = 64;
    const double lo = std::log(1.0 + 1e-6), hi = std::log(mu_max);
    double best_rate = -rate_infinity();
    int best_i = 0;
    for (int i = 0; i < kGrid; ++i) {
        const double mu = std::exp(lo + (hi - lo) * i / (kGrid - 1));
        const double r = rate_at_mu(cfg, mu, switch_mode).rate;
        if (r > best_rate) {
            best_rate = r;
            best_i = i;
        }
    }
    double a = lo + (hi - lo) * std::max(best_i - 1, 0) / (kGrid - 1);
    double b = lo + (hi - lo) * std::min(best_i + 1, kGrid - 1) / (kGrid - 1);
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - phi * (b - a), d = a + phi * (b - a);
    double fc = rate_at_mu(cfg, std::exp(c), switch_mode).rate;
    double fd = rate_at_mu(cfg, std::exp(d), switch_mode).rate;
    while (b - a > 1e-6) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - phi * (b - a);
            fc = rate_at_mu(cfg, std::exp(c), switch_mode).rate;
        } else {
            a = c; c = d;  fc = fd;
            d = a + phi * (b - a);
            fd = rate_at_mu(cfg, std::exp(d), switch_mode).rate;
        }
    }
    double mu_star = std::exp((a + b) / 2.0);
    if (rate_at_mu(cfg, mu_star, switch_mode).rate < best_rate)
        mu_star = std::exp(lo + (hi - lo) * best_i / (kGrid - 1));
    RateReport rep = rate_at_mu(cfg, mu_star, switch_mode);
    return {mu_star, rep};
}

double holevo_multipartite(const CovarianceMatrix& vm, int condition_on) {
    if (vm.modes() < 2) throw std::invalid_argument("holevo_multipartite: need at least 2 modes");
    if (!vm.is_physical()) throw std::domain_error("holevo_multipartite: unphysical CM");
    return von_neumann_entropy(vm) - von_neumann_entropy(heterodyne_condition(vm, condition_on));
}

RateReport multipartite_rate(const ProtocolConfig& cfg, bool switch_mode) {
    cfg.validate();
    const int m = cfg.group_count();
    if (m < 2) throw std::invalid_argument("multipartite_rate: need at least 2 groups");
    if (m == 2 && !switch_mode) return secret_key_rate(cfg);

    if (switch_mode) {
        // relay reconfigured per pair: only the pair's users feed it
        RateReport worst;
        bool first = true;
        for (int a = 0; a < m; ++a) {
            for (int b = a + 1; b < m; ++b) {
                ProtocolConfig pair = cfg;
                pair.groups = {cfg.groups[a], cfg.groups[b]};
                pair.total_users = cfg.groups[a].members + cfg.groups[b].members;
                RateReport r = secret_key_rate(pair);
                if (first || r.rate < worst.rate) {
                    worst = r;
                    first = false;
                }
            }
        }
        worst.status = worst.rate > 0.0 ? RateStatus::Ok : RateStatus::NoPositiveRate;
        return worst;
    }

    const CovarianceMatrix vm = reduced_cm_multipartite(cfg);
    const double s_tot = von_neumann_entropy(vm);
    // chi maximized over every conditioning choice, not the distance heuristic
    double chi_max = -rate_infinity();
    double nu_cond_best = 1.0;
    for (int z = 0; z < m; ++z) {
        const CovarianceMatrix vc = heterodyne_condition(vm, z);
        const double chi = s_tot - von_neumann_entropy(vc);
        if (chi > chi_max) {
            chi_max = chi;
            auto spec = symplectic_eigenvalues(vc);
            nu_cond_best = spec.back();
        }
    }
    // mutual information minimized over pairs; decoder = deeper-indexed group
    double i_min = rate_infinity();
    for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
            const CovarianceMatrix vf = heterodyne_condition(vm, b);
            const int ai = a;  // a < b, index unchanged after removing b
            const double sigma =
                sigma_of(vm.block(a, a)) / sigma_of(vf.block(ai, ai));
            i_min = std::min(i_min, 0.5 * log2_(sigma));
        }
    }
    RateReport r;
    r.mutual_information = i_min;
    r.holevo = chi_max;
    r.rate = cfg.xi * i_min - chi_max;
    auto spec = symplectic_eigenvalues(vm);
    r.nu_plus = spec.front();
    r.nu_minus = spec.back();
    r.nu_cond = nu_cond_best;
    r.mu_used = cfg.mu;
    r.status = r.rate > 0.0 ? RateStatus::Ok : RateStatus::NoPositiveRate;
    return r;
}

}  // namespace qss
