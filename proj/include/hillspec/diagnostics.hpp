#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "basic_eq.hpp"
#include "common.hpp"
#include "functionals.hpp"
#include "matrix_spectra.hpp"
#include "potentials.hpp"

namespace hillspec::diagnostics {

enum class parity_t { even, odd };

inline parity_t parse_parity(const std::string& s) {
    if (s == "even") return parity_t::even;
    if (s == "odd") return parity_t::odd;
    throw config_error("unknown parity '" + s + "' (expected even or odd)");
}

inline std::string to_string(parity_t p) {
    return p == parity_t::even ? "even" : "odd";
}

struct Defaults {
    double cap = 50.0;       // max t for a bounded verdict
    double margin = 0.4;     // growth model must beat const by this factor
    double fit_gate = 0.6;   // no verdict from a fit worse than this
    double gamma_floor = 1e-9;
    double guard_eps = 0.1;
    double window = 10.0;    // two-sided comparability window
    double band_lo = 0.9, band_hi = 1.1; // crit3 concentration band
    double angle_floor = 0.1;
    double plateau_tol = 0.2;
};

enum class verdict_t { basis, no_basis, inconclusive };
enum class vote_t { basis, no_basis, abstain };
enum class criterion_t { crit1, crit2, crit3, makin };

inline std::string to_string(verdict_t v) {
    switch (v) {
        case verdict_t::basis: return "basis";
        case verdict_t::no_basis: return "no_basis";
        default: return "inconclusive";
    }
}

inline std::string to_string(vote_t v) {
    switch (v) {
        case vote_t::basis: return "basis";
        case vote_t::no_basis: return "no_basis";
        default: return "abstain";
    }
}

inline std::string to_string(criterion_t c) {
    switch (c) {
        case criterion_t::crit1: return "crit1";
        case criterion_t::crit2: return "crit2";
        case criterion_t::crit3: return "crit3";
        default: return "makin";
    }
}

inline criterion_t parse_criterion(const std::string& s) {
    if (s == "1" || s == "crit1") return criterion_t::crit1;
    if (s == "2" || s == "crit2") return criterion_t::crit2;
    if (s == "3" || s == "crit3") return criterion_t::crit3;
    if (s == "makin") return criterion_t::makin;
    throw config_error("unknown criterion '" + s + "' (expected 1|2|3|makin)");
}

/// Least-squares fit of a single amplitude against the growth models
/// {1, log n, sqrt n, n}, selected by relative residual.
struct TrendFit {
    std::array<double, 4> relres; // const, log, sqrt, linear
    std::array<double, 4> amplitude;
    int winner;

    std::string tag() const {
        static const char* tags[4] = {"bounded", "~log n", "~sqrt n", "~n"};
        return tags[winner];
    }
    double rate() const { return amplitude[winner]; }
};

inline TrendFit trend_fit(const std::vector<int>& ns, const std::vector<double>& ts) {
    if (ns.size() != ts.size()) throw config_error("trend fit: length mismatch");
    if (ns.size() < 3) throw config_error("trend fit needs at least 3 samples");
    for (int n : ns)
        if (n < 2) throw config_error("trend fit needs indices n >= 2");

    auto model = [](int m, int n) -> double {
        switch (m) {
            case 0: return 1.0;
            case 1: return std::log(double(n));
            case 2: return std::sqrt(double(n));
            default: return double(n);
        }
    };
    double tnorm2 = 0.0;
    for (double t : ts) tnorm2 += t * t;

    TrendFit f;
    f.winner = 0;
    for (int m = 0; m < 4; ++m) {
        double sg2 = 0.0, stg = 0.0;
        for (size_t i = 0; i < ns.size(); ++i) {
            double g = model(m, ns[i]);
            sg2 += g * g;
            stg += ts[i] * g;
        }
        double a = stg / sg2;
        double res2 = 0.0;
        for (size_t i = 0; i < ns.size(); ++i) {
            double d = ts[i] - a * model(m, ns[i]);
            res2 += d * d;
        }
        f.amplitude[m] = a;
        f.relres[m] = tnorm2 > 0.0 ? std::sqrt(res2 / tnorm2) : 0.0;
        if (f.relres[m] < f.relres[f.winner]) f.winner = m;
    }
    return f;
}

inline verdict_t classify_trend(const TrendFit& f, double t_max, const Defaults& d = {}) {
    if (f.winner == 0) {
        if (t_max <= d.cap && f.relres[0] <= d.fit_gate) return verdict_t::basis;
        return verdict_t::inconclusive;
    }
    if (f.relres[f.winner] <= d.margin * f.relres[0] && f.relres[f.winner] <= d.fit_gate)
        return verdict_t::no_basis;
    return verdict_t::inconclusive;
}

/// max(|b-/b+|, |b+/b-|); infinity when exactly one vanishes, NaN when both do.
inline double t_ratio(const functionals::BetaEval& be) {
    double bm = std::abs(be.beta_minus), bp = std::abs(be.beta_plus);
    if (bm == 0.0 && bp == 0.0) return std::numeric_limits<double>::quiet_NaN();
    if (bm == 0.0 || bp == 0.0) return std::numeric_limits<double>::infinity();
    return std::max(bm / bp, bp / bm);
}

struct RieszReport {
    criterion_t criterion;
    parity_t parity;
    int n_min, n_max;
    std::vector<int> n_values;
    std::vector<double> t_values;
    verdict_t verdict;
    vote_t vote;
    double sup_estimate;
    std::optional<TrendFit> trend;
    std::vector<std::string> guard_flags;
    std::vector<double> comparability; // crit1: per-n grid constant c
    double window = 0.0;               // makin only
    double ratio_min = 0.0, ratio_max = 0.0;
};

namespace detail2 {

inline std::vector<int> parity_range(parity_t parity, int n_min, int n_max) {
    if (n_min < 1 || n_min > n_max) throw config_error("bad index range");
    std::vector<int> ns;
    int want = parity == parity_t::even ? 0 : 1;
    for (int n = n_min; n <= n_max; ++n)
        if (n % 2 == want) ns.push_back(n);
    if (ns.empty()) throw config_error("index range contains no indices of that parity");
    return ns;
}

inline vote_t vote_from_verdict(verdict_t v) {
    switch (v) {
        case verdict_t::basis: return vote_t::basis;
        case verdict_t::no_basis: return vote_t::no_basis;
        default: return vote_t::abstain;
    }
}

inline void finish_trend_report(RieszReport& rep, const Defaults& d, bool degraded) {
    if (rep.n_values.empty())
        throw compute_error("no usable indices for a trend verdict");
    rep.sup_estimate = *std::max_element(rep.t_values.begin(), rep.t_values.end());
    if (rep.n_values.size() < 3) {
        rep.guard_flags.push_back("fewer than 3 usable indices; no trend verdict");
        rep.verdict = verdict_t::inconclusive;
        rep.vote = vote_t::abstain;
        return;
    }
    rep.trend = trend_fit(rep.n_values, rep.t_values);
    rep.verdict = degraded ? verdict_t::inconclusive
                           : classify_trend(*rep.trend, rep.sup_estimate, d);
    rep.vote = vote_from_verdict(rep.verdict);
}

} // namespace detail2

/// Ratio boundedness at z = 0 plus modulus comparability of each beta over
/// a 16-point grid in the unit disc (radii 1/2 and 1, eight angles).
inline RieszReport criterion1(const potentials::FourierPotential& v, parity_t parity,
                              int n_min, int n_max,
                              functionals::TransferOptions topt = {},
                              const Defaults& d = {}) {
    RieszReport rep;
    rep.criterion = criterion_t::crit1;
    rep.parity = parity;
    rep.n_min = n_min;
    rep.n_max = n_max;
    bool degraded = false;
    for (int n : detail2::parity_range(parity, n_min, n_max)) {
        auto ev0 = functionals::transfer_eval(v, n, cplx(0.0, 0.0), topt);
        if (std::abs(ev0.beta_minus) == 0.0 || std::abs(ev0.beta_plus) == 0.0) {
            rep.guard_flags.push_back("beta vanishes at z=0 for n=" + std::to_string(n));
            degraded = true;
            continue;
        }
        double c = 1.0;
        for (double r : {0.5, 1.0})
            for (int j = 0; j < 8; ++j) {
                double th = 2.0 * M_PI * j / 8.0;
                cplx z = r * cplx(std::cos(th), std::sin(th));
                auto ev = functionals::transfer_eval(v, n, z, topt);
                double qm = std::abs(ev.beta_minus) / std::abs(ev0.beta_minus);
                double qp = std::abs(ev.beta_plus) / std::abs(ev0.beta_plus);
                c = std::max({c, qm, 1.0 / qm, qp, 1.0 / qp});
            }
        rep.n_values.push_back(n);
        rep.t_values.push_back(t_ratio(ev0));
        rep.comparability.push_back(c);
    }
    detail2::finish_trend_report(rep, d, degraded);
    return rep;
}

/// Ratio boundedness at the disc midpoints z*, over the indices whose gap
/// cleared the floor (the matched set M+-).
inline RieszReport criterion2(const std::vector<basic_eq::SpectralPair>& pairs,
                              parity_t parity, const Defaults& d = {}) {
    RieszReport rep;
    rep.criterion = criterion_t::crit2;
    rep.parity = parity;
    rep.n_min = 0;
    rep.n_max = 0;
    for (const auto& sp : pairs) {
        if (std::abs(sp.gamma) <= d.gamma_floor) {
            rep.guard_flags.push_back("gap below floor at n=" + std::to_string(sp.n));
            continue;
        }
        double t = t_ratio(sp.at_star);
        if (!std::isfinite(t)) {
            rep.guard_flags.push_back("degenerate beta ratio at n=" + std::to_string(sp.n));
            continue;
        }
        rep.n_values.push_back(sp.n);
        rep.t_values.push_back(t);
    }
    if (rep.n_values.empty())
        throw compute_error("criterion 2: no indices with a nonzero gap");
    rep.n_min = rep.n_values.front();
    rep.n_max = rep.n_values.back();
    detail2::finish_trend_report(rep, d, false);
    return rep;
}

struct DiscTriple {
    basic_eq::SpectralPair pair;
    cplx mu;
    bool has_mu;
};

/// Dirichlet eigenvalues mu_n picked as the nearest eigenvalue to n^2
/// inside the disc of radius n/4; absent when the disc is empty.
inline std::vector<std::optional<cplx>> dirichlet_mus(const potentials::FourierPotential& v,
                                                      const std::vector<int>& ns, int N,
                                                      double tol_backward = 1e-10) {
    auto sol = matrix_spectra::eigen_all(
        matrix_spectra::build_matrix(v, matrix_spectra::bc_t::dirichlet, N), tol_backward);
    std::vector<std::optional<cplx>> out;
    for (int n : ns) {
        if (n > N / 2)
            throw config_error("index n = " + std::to_string(n) +
                               " outside the reliable zone of truncation N = " +
                               std::to_string(N));
        auto in_disc = matrix_spectra::disc_eigenvalues(sol, n);
        if (in_disc.empty()) {
            out.push_back(std::nullopt);
            continue;
        }
        double c = double(n) * double(n);
        cplx best = in_disc[0];
        for (const auto& lam : in_disc)
            if (std::abs(lam - c) < std::abs(best - c)) best = lam;
        out.push_back(best);
    }
    return out;
}

/// Deviation-to-gap ratio |lambda+ - mu| / |lambda+ - lambda-| over the
/// matched set. Votes basis only when the ratios also concentrate in the
/// unit band; the trend alone is too soft a statistic to vote on.
inline RieszReport criterion3(const std::vector<DiscTriple>& triples, parity_t parity,
                              const Defaults& d = {}) {
    RieszReport rep;
    rep.criterion = criterion_t::crit3;
    rep.parity = parity;
    rep.n_min = 0;
    rep.n_max = 0;
    for (const auto& tr : triples) {
        const auto& sp = tr.pair;
        if (!tr.has_mu) {
            rep.guard_flags.push_back("no Dirichlet eigenvalue in disc n=" +
                                      std::to_string(sp.n));
            continue;
        }
        if (std::abs(sp.gamma) <= d.gamma_floor) {
            rep.guard_flags.push_back("gap below floor at n=" + std::to_string(sp.n));
            continue;
        }
        rep.n_values.push_back(sp.n);
        rep.t_values.push_back(std::abs(sp.lambda_plus - tr.mu) / std::abs(sp.gamma));
    }
    if (rep.n_values.empty())
        throw compute_error("criterion 3: no usable Dirichlet data");
    rep.n_min = rep.n_values.front();
    rep.n_max = rep.n_values.back();
    detail2::finish_trend_report(rep, d, false);
    if (rep.verdict == verdict_t::basis) {
        bool banded = true;
        for (double t : rep.t_values)
            if (t < d.band_lo || t > d.band_hi) banded = false;
        if (!banded) {
            rep.vote = vote_t::abstain;
            rep.guard_flags.push_back("ratio bounded but outside the concentration band");
        }
    }
    return rep;
}

/// Two-sided comparability of V(2n) and V(-2n) within a window.
inline RieszReport makin_check(const potentials::FourierPotential& v, parity_t parity,
                               int n_min, int n_max, double window = 10.0,
                               const Defaults& d = {}) {
    if (window <= 1.0) throw config_error("comparability window must exceed 1");
    RieszReport rep;
    rep.criterion = criterion_t::makin;
    rep.parity = parity;
    rep.n_min = n_min;
    rep.n_max = n_max;
    rep.window = window;
    bool first = true;
    bool all_inside = true;
    for (int n : detail2::parity_range(parity, n_min, n_max)) {
        cplx vp = v.coeff(2LL * n), vm = v.coeff(-2LL * n);
        if (std::abs(vp) == 0.0 || std::abs(vm) == 0.0)
            throw compute_error("coefficient V(+-2n) vanishes at n = " + std::to_string(n));
        double r = std::abs(vp) / std::abs(vm);
        rep.n_values.push_back(n);
        rep.t_values.push_back(std::max(r, 1.0 / r));
        if (first || r < rep.ratio_min) rep.ratio_min = r;
        if (first || r > rep.ratio_max) rep.ratio_max = r;
        first = false;
        if (r < 1.0 / window || r > window) all_inside = false;
    }
    rep.sup_estimate = *std::max_element(rep.t_values.begin(), rep.t_values.end());
    rep.verdict = all_inside ? verdict_t::basis : verdict_t::no_basis;
    rep.vote = detail2::vote_from_verdict(rep.verdict);
    (void)d;
    return rep;
}

enum class law_t {
    gap_61_3,
    dev_plus_61_4,
    dev_minus_61_5,
    dev_mid_61_7,
    gap_50_3,
    dev_plus_50_4,
    dev_minus_50_8,
    dev_mid_500_4,
    beta_sim_V_thm1,
    beta_sim_V_thm2,
    beta_sim_sigma_thm20,
    beta_sim_V_thm22,
};

inline std::string to_string(law_t law) {
    switch (law) {
        case law_t::gap_61_3: return "gap61.3";
        case law_t::dev_plus_61_4: return "dev61.4";
        case law_t::dev_minus_61_5: return "dev61.5";
        case law_t::dev_mid_61_7: return "dev61.7";
        case law_t::gap_50_3: return "gap50.3";
        case law_t::dev_plus_50_4: return "dev50.4";
        case law_t::dev_minus_50_8: return "dev50.8";
        case law_t::dev_mid_500_4: return "dev500.4";
        case law_t::beta_sim_V_thm1: return "beta-thm1";
        case law_t::beta_sim_V_thm2: return "beta-thm2";
        case law_t::beta_sim_sigma_thm20: return "beta-thm20";
        default: return "beta-thm22";
    }
}

inline law_t parse_law(const std::string& s) {
    static const std::pair<const char*, law_t> table[] = {
        {"gap61.3", law_t::gap_61_3},       {"dev61.4", law_t::dev_plus_61_4},
        {"dev61.5", law_t::dev_minus_61_5}, {"dev61.7", law_t::dev_mid_61_7},
        {"gap50.3", law_t::gap_50_3},       {"dev50.4", law_t::dev_plus_50_4},
        {"dev50.8", law_t::dev_minus_50_8}, {"dev500.4", law_t::dev_mid_500_4},
        {"beta-thm1", law_t::beta_sim_V_thm1},
        {"beta-thm2", law_t::beta_sim_V_thm2},
        {"beta-thm20", law_t::beta_sim_sigma_thm20},
        {"beta-thm22", law_t::beta_sim_V_thm22},
    };
    for (const auto& [name, law] : table)
        if (s == name) return law;
    throw config_error("unknown asymptotic law '" + s + "'");
}

struct AsymRow {
    int n;
    std::string label;
    cplx lhs, rhs, ratio;
    double ratio_mod;
    bool degenerate;
};

struct AsymptoticTable {
    law_t law;
    std::vector<AsymRow> rows;
    std::vector<int> dev_ns;      // per-index worst deviations |ratio - 1|
    std::vector<double> devs;
    std::vector<double> devs_mod; // branch-free counterpart
    std::vector<std::string> guard_flags;
    bool refused;
    bool converging;
    bool converging_mod;
    double tol;
};

struct AsymOptions {
    int depth_m = 1;     // partial-sum depth for the sigma law
    int dirichlet_N = 0; // 0: pick from the range
    double plateau_tol = 0.2;
    double guard_eps = 0.1;
    double tol_backward = 1e-10;
    basic_eq::SolveOptions solve;
};

namespace detail2 {

inline bool law_needs_mu(law_t law) {
    switch (law) {
        case law_t::dev_plus_61_4:
        case law_t::dev_minus_61_5:
        case law_t::dev_mid_61_7:
        case law_t::dev_plus_50_4:
        case law_t::dev_minus_50_8:
        case law_t::dev_mid_500_4: return true;
        default: return false;
    }
}

inline bool law_uses_beta_pair(law_t law) {
    switch (law) {
        case law_t::gap_50_3:
        case law_t::dev_plus_50_4:
        case law_t::dev_minus_50_8:
        case law_t::dev_mid_500_4: return true;
        default: return false;
    }
}

inline bool law_is_beta_vs_V(law_t law) {
    switch (law) {
        case law_t::beta_sim_V_thm1:
        case law_t::beta_sim_V_thm2:
        case law_t::beta_sim_V_thm22: return true;
        default: return false;
    }
}

} // namespace detail2

/// Ratio table lhs/rhs for one asymptotic law over an index set. Square
/// roots are branch-matched against the measured gap; deviation laws carry
/// cluster-point guards that refuse the law rather than report nonsense.
inline AsymptoticTable asymptotic_check(law_t law, const potentials::FourierPotential& v,
                                        const std::vector<int>& ns, AsymOptions opt = {}) {
    if (ns.empty()) throw config_error("asymptotic check needs a nonempty index set");
    for (size_t i = 1; i < ns.size(); ++i)
        if (ns[i] <= ns[i - 1]) throw config_error("index set must be strictly increasing");

    AsymptoticTable tab;
    tab.law = law;
    tab.refused = false;
    tab.converging = false;
    tab.converging_mod = false;
    tab.tol = opt.plateau_tol;

    const bool needs_mu = detail2::law_needs_mu(law);
    const bool beta_pair = detail2::law_uses_beta_pair(law);
    const bool beta_vs_V = detail2::law_is_beta_vs_V(law);
    const bool is_gap = law == law_t::gap_61_3 || law == law_t::gap_50_3;
    const bool is_dev_plus = law == law_t::dev_plus_61_4 || law == law_t::dev_plus_50_4;
    const bool is_dev_minus = law == law_t::dev_minus_61_5 || law == law_t::dev_minus_50_8;
    const bool is_dev_mid = law == law_t::dev_mid_61_7 || law == law_t::dev_mid_500_4;

    std::vector<std::optional<cplx>> mus;
    if (needs_mu) {
        int N = opt.dirichlet_N > 0 ? opt.dirichlet_N : std::max(160, 4 * ns.back());
        mus = dirichlet_mus(v, ns, N, opt.tol_backward);
    }

    auto push_row = [&tab](int n, std::string label, cplx lhs, cplx rhs) {
        AsymRow row;
        row.n = n;
        row.label = std::move(label);
        row.lhs = lhs;
        row.rhs = rhs;
        row.degenerate = std::abs(rhs) == 0.0;
        if (row.degenerate) {
            row.ratio = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
            row.ratio_mod = std::numeric_limits<double>::quiet_NaN();
        } else {
            row.ratio = lhs / rhs;
            row.ratio_mod = std::abs(lhs) / std::abs(rhs);
        }
        tab.rows.push_back(row);
    };

    std::vector<cplx> guard_seq; // square-root or pair ratios feeding the guards
    std::vector<int> guard_ns;

    for (size_t idx = 0; idx < ns.size(); ++idx) {
        int n = ns[idx];
        size_t rows_before = tab.rows.size();

        if (beta_vs_V) {
            cplx vp = v.coeff(2LL * n), vm = v.coeff(-2LL * n);
            const cplx zs[4] = {cplx(0, 0), cplx(n / 4.0, 0), cplx(0, n / 4.0),
                                0.5 * double(n) * std::polar(1.0, M_PI / 3.0)};
            static const char* zl[4] = {"z0", "zr", "zi", "ze"};
            functionals::TransferOptions topt;
            topt.J = opt.solve.J;
            topt.K_max = opt.solve.K_max;
            for (int g = 0; g < 4; ++g) {
                auto ev = functionals::transfer_eval(v, n, zs[g], topt);
                push_row(n, std::string(zl[g]) + "-", ev.beta_minus, vm);
                push_row(n, std::string(zl[g]) + "+", ev.beta_plus, vp);
            }
        } else if (law == law_t::beta_sim_sigma_thm20) {
            auto sp = basic_eq::solve_basic(v, n, opt.solve);
            auto sig = functionals::partial_sigma(v, n, sp.z_star, opt.depth_m, opt.solve.J);
            push_row(n, "-", sp.at_star.beta_minus, sig.sigma_minus);
            push_row(n, "+", sp.at_star.beta_plus, sig.sigma_plus);
        } else {
            auto sp = basic_eq::solve_basic(v, n, opt.solve);
            cplx bm, bp;
            if (beta_pair) {
                bm = sp.at_star.beta_minus;
                bp = sp.at_star.beta_plus;
            } else {
                bm = v.coeff(-2LL * n);
                bp = v.coeff(2LL * n);
            }
            cplx s = std::sqrt(bm * bp);
            if (std::abs(sp.gamma - 2.0 * (-s)) < std::abs(sp.gamma - 2.0 * s)) s = -s;

            if (std::abs(bp) > 0.0) {
                guard_seq.push_back(is_dev_mid ? bm / bp : s / bp);
                guard_ns.push_back(n);
            } else if (is_dev_plus || is_dev_minus || is_dev_mid) {
                tab.guard_flags.push_back("guard ratio undefined at n=" + std::to_string(n));
            }

            if (is_gap) {
                push_row(n, "gap", sp.gamma, 2.0 * s);
            } else {
                if (!mus[idx].has_value()) {
                    tab.guard_flags.push_back("no Dirichlet eigenvalue in disc n=" +
                                              std::to_string(n));
                    continue;
                }
                cplx mu = *mus[idx];
                if (is_dev_plus)
                    push_row(n, "dev+", mu - sp.lambda_plus, -0.5 * (bm + bp + 2.0 * s));
                else if (is_dev_minus)
                    push_row(n, "dev-", mu - sp.lambda_minus, -0.5 * (bm + bp - 2.0 * s));
                else
                    push_row(n, "mid", mu - 0.5 * (sp.lambda_plus + sp.lambda_minus),
                             -0.5 * (bm + bp));
            }
        }

        double dev = -1.0, dev_mod = -1.0;
        for (size_t r = rows_before; r < tab.rows.size(); ++r) {
            if (tab.rows[r].degenerate) continue;
            dev = std::max(dev, std::abs(tab.rows[r].ratio - 1.0));
            dev_mod = std::max(dev_mod, std::abs(tab.rows[r].ratio_mod - 1.0));
        }
        if (dev >= 0.0) {
            tab.dev_ns.push_back(n);
            tab.devs.push_back(dev);
            tab.devs_mod.push_back(dev_mod);
        }
    }

    if (is_dev_plus || is_dev_minus || is_dev_mid) {
        cplx excluded = is_dev_minus ? cplx(1.0, 0.0) : cplx(-1.0, 0.0);
        for (size_t i = 0; i < guard_seq.size(); ++i)
            if (std::abs(guard_seq[i] - excluded) < opt.guard_eps) {
                tab.refused = true;
                tab.guard_flags.push_back(
                    "law refused: ratio within " + detail::num_str(opt.guard_eps) + " of " +
                    (is_dev_minus ? "+1" : "-1") + " at n=" + std::to_string(guard_ns[i]));
            }
    }

    if (!tab.refused && tab.devs.size() >= 2) {
        tab.converging = tab.devs.back() <= tab.tol && tab.devs.back() <= tab.devs.front() + 1e-12;
        tab.converging_mod =
            tab.devs_mod.back() <= tab.tol && tab.devs_mod.back() <= tab.devs_mod.front() + 1e-12;
    }
    return tab;
}

struct AngleRow {
    int n;
    double t_star;
    double sin_angle;
};

/// Empirical bridge between the ratio statistic and eigenvector geometry:
/// t_n(z*) against the pair angle of the two disc eigenvectors.
struct AngleReport {
    std::vector<AngleRow> rows;
    std::vector<int> skipped; // indices whose disc pair the oracle cannot resolve
    double max_t;
    double min_angle;
    bool t_bounded;
    bool angle_bounded_below;
    bool consistent;
};

inline AngleReport angle_vs_t(const potentials::FourierPotential& v, parity_t parity,
                              int n_min, int n_max, int N,
                              basic_eq::SolveOptions sopt = {}, const Defaults& d = {}) {
    auto bc = parity == parity_t::even ? matrix_spectra::bc_t::per_plus
                                       : matrix_spectra::bc_t::per_minus;
    auto sol = matrix_spectra::eigen_all(matrix_spectra::build_matrix(v, bc, N));
    AngleReport rep;
    rep.max_t = 0.0;
    rep.min_angle = std::numeric_limits<double>::infinity();
    for (int n : detail2::parity_range(parity, n_min, n_max)) {
        if (n > N / 2)
            throw config_error("index n = " + std::to_string(n) +
                               " outside the reliable zone of truncation N = " +
                               std::to_string(N));
        auto pa = matrix_spectra::pair_angle(sol, n);
        if (pa.degenerate) {
            rep.skipped.push_back(n);
            continue;
        }
        auto sp = basic_eq::solve_basic(v, n, sopt);
        AngleRow row;
        row.n = n;
        row.t_star = t_ratio(sp.at_star);
        row.sin_angle = pa.sin_angle;
        rep.max_t = std::max(rep.max_t, row.t_star);
        rep.min_angle = std::min(rep.min_angle, row.sin_angle);
        rep.rows.push_back(row);
    }
    if (rep.rows.empty()) throw compute_error("no usable indices for the angle table");
    rep.t_bounded = rep.max_t <= d.cap;
    rep.angle_bounded_below = rep.min_angle >= d.angle_floor;
    rep.consistent = rep.t_bounded == rep.angle_bounded_below;
    return rep;
}

} // namespace hillspec::diagnostics
