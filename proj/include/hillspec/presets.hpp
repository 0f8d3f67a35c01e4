#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "basic_eq.hpp"
#include "common.hpp"
#include "diagnostics.hpp"
#include "functionals.hpp"
#include "matrix_spectra.hpp"
#include "potentials.hpp"
#include "report.hpp"
#include "weights.hpp"

namespace hillspec::presets {

inline constexpr const char* presets_version = "1";

/// Pinned ranges and tolerances per preset; every key can be overridden on
/// the command line, unknown keys are rejected.
inline std::vector<std::pair<std::string, std::string>> preset_defaults(const std::string& name) {
    using P = std::vector<std::pair<std::string, std::string>>;
    if (name == "example1")
        return P{{"potential", "example1"},
                 {"even_min", "10"},
                 {"even_max", "60"},
                 {"odd_min", "11"},
                 {"odd_max", "61"},
                 {"window", "3"},
                 {"dirichlet_trunc", "300"},
                 {"dev_mid_ns", "10,20,40"},
                 {"dev_mid_trunc", "240"},
                 {"k_max", "64"},
                 {"tol", "1e-12"}};
    if (name == "example2")
        return P{{"potential", "example2"},
                 {"even_min", "10"},
                 {"even_max", "60"},
                 {"odd_min", "11"},
                 {"odd_max", "61"},
                 {"window", "3"},
                 {"dirichlet_trunc", "300"},
                 {"k_max", "64"},
                 {"tol", "1e-12"}};
    if (name == "ex1")
        return P{{"potential", "ex1:omega=gevpow:c=0.1,gamma=0.5,a=0,xi=1/log,eta=1/log"},
                 {"omega", "gevpow:c=0.1,gamma=0.5,a=0"},
                 {"p_min", "3"},
                 {"p_max", "15"},
                 {"window", "3"},
                 {"dirichlet_trunc", "240"},
                 {"sigma_ns", "11,21,31"},
                 {"sigma_depth", "1"},
                 {"k_max", "100"},
                 {"tol", "1e-12"}};
    if (name == "ex2")
        return P{{"potential", "ex2:omega=gevpow:c=0.1,gamma=0.5,a=0,xi=1/log,eta=1/log"},
                 {"omega", "gevpow:c=0.1,gamma=0.5,a=0"},
                 {"p_min", "3"},
                 {"p_max", "15"},
                 {"window", "3"},
                 {"dirichlet_trunc", "240"},
                 {"k_max", "100"},
                 {"tol", "1e-12"}};
    if (name == "sawtooth")
        return P{{"potential", "sawtooth:m=0"},
                 {"ns", "10,20,40"},
                 {"dirichlet_trunc", "160"},
                 {"plateau_tol", "0.2"},
                 {"k_max", "64"},
                 {"tol", "1e-12"}};
    if (name == "mathieu")
        return P{{"potential", "mathieu"},
                 {"n_min", "2"},
                 {"n_max", "12"},
                 {"truncations", "120,160"},
                 {"cross_tol", "1e-6"},
                 {"stab_tol", "1e-8"},
                 {"dirichlet_trunc", "160"},
                 {"angle_trunc", "160"},
                 {"beta_n", "10"},
                 {"k_max", "64"},
                 {"tol", "1e-12"}};
    throw config_error("unknown preset '" + name + "'");
}

class ParamSet {
  public:
    ParamSet(const std::string& preset,
             const std::vector<std::pair<std::string, std::string>>& overrides)
        : items_(preset_defaults(preset)) {
        for (const auto& [k, v] : overrides) {
            bool found = false;
            for (auto& [dk, dv] : items_)
                if (dk == k) {
                    dv = v;
                    found = true;
                    break;
                }
            if (!found)
                throw config_error("preset '" + preset + "' has no parameter '" + k + "'");
        }
    }

    const std::string& str(const std::string& key) const {
        for (const auto& [k, v] : items_)
            if (k == key) return v;
        throw config_error("missing preset parameter '" + key + "'");
    }
    int integer(const std::string& key) const {
        return (int)detail::parse_int(str(key), "preset parameter " + key);
    }
    double real(const std::string& key) const {
        return detail::parse_double(str(key), "preset parameter " + key);
    }
    std::vector<int> int_list(const std::string& key) const {
        std::vector<int> out;
        std::string cur;
        for (char c : str(key) + ",") {
            if (c == ',') {
                if (!cur.empty())
                    out.push_back((int)detail::parse_int(cur, "preset parameter " + key));
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (out.empty()) throw config_error("empty list in preset parameter " + key);
        return out;
    }
    const std::vector<std::pair<std::string, std::string>>& items() const { return items_; }

  private:
    std::vector<std::pair<std::string, std::string>> items_;
};

namespace detail4 {

inline std::vector<int> range_ns(int lo, int hi, diagnostics::parity_t parity) {
    return diagnostics::detail2::parity_range(parity, lo, hi);
}

inline std::vector<basic_eq::SpectralPair> solve_range(const potentials::FourierPotential& v,
                                                       const std::vector<int>& ns,
                                                       basic_eq::SolveOptions opt) {
    std::vector<basic_eq::SpectralPair> out;
    out.reserve(ns.size());
    for (int n : ns) out.push_back(basic_eq::solve_basic(v, n, opt));
    return out;
}

inline std::vector<diagnostics::DiscTriple> attach_mus(
    const potentials::FourierPotential& v, const std::vector<basic_eq::SpectralPair>& pairs,
    int N) {
    std::vector<int> ns;
    for (const auto& p : pairs) ns.push_back(p.n);
    auto mus = diagnostics::dirichlet_mus(v, ns, N);
    std::vector<diagnostics::DiscTriple> out;
    for (size_t i = 0; i < pairs.size(); ++i) {
        diagnostics::DiscTriple tr;
        tr.pair = pairs[i];
        tr.has_mu = mus[i].has_value();
        tr.mu = tr.has_mu ? *mus[i] : cplx(0.0, 0.0);
        out.push_back(tr);
    }
    return out;
}

inline void absorb_flags(report::ReportEnvelope& env, const std::string& where,
                         const std::vector<std::string>& flags) {
    for (const auto& f : flags) env.warnings.push_back(where + ": " + f);
}

inline void add_riesz(report::ReportEnvelope& env, const diagnostics::RieszReport& rep) {
    absorb_flags(env,
                 diagnostics::to_string(rep.criterion) + "[" + diagnostics::to_string(rep.parity) +
                     "]",
                 rep.guard_flags);
    env.sections.push_back(report::riesz_table(rep));
}

inline void add_asym(report::ReportEnvelope& env, const diagnostics::AsymptoticTable& tab,
                     bool with_devs = true) {
    absorb_flags(env, diagnostics::to_string(tab.law), tab.guard_flags);
    env.sections.push_back(report::asym_table(tab));
    if (with_devs) env.sections.push_back(report::deviation_summary_table(tab));
}

/// Vote matrix across criteria; non-abstaining votes must agree per parity.
inline report::Table consistency_table(
    const std::vector<const diagnostics::RieszReport*>& reps) {
    report::Table t;
    t.kind = "consistency";
    bool agree = true;
    for (diagnostics::parity_t parity : {diagnostics::parity_t::even, diagnostics::parity_t::odd}) {
        bool any = false;
        diagnostics::vote_t ref = diagnostics::vote_t::abstain;
        for (const auto* r : reps) {
            if (r->parity != parity || r->vote == diagnostics::vote_t::abstain) continue;
            if (!any) {
                ref = r->vote;
                any = true;
            } else if (r->vote != ref) {
                agree = false;
            }
        }
    }
    t.add_meta("agree", agree ? "true" : "false");
    t.columns = {{"criterion", report::vtype_t::text},
                 {"parity", report::vtype_t::text},
                 {"verdict", report::vtype_t::text},
                 {"vote", report::vtype_t::text}};
    for (const auto* r : reps)
        t.add_row({report::Value::text(diagnostics::to_string(r->criterion)),
                   report::Value::text(diagnostics::to_string(r->parity)),
                   report::Value::text(diagnostics::to_string(r->verdict)),
                   report::Value::text(diagnostics::to_string(r->vote))});
    return t;
}

inline report::Table normalized_beta_table(const std::vector<basic_eq::SpectralPair>& pairs,
                                           const weights::WeightSeq& omega) {
    report::Table t;
    t.kind = "normalized-beta";
    double lo = 0.0, hi = 0.0;
    bool first = true;
    t.columns = {{"p", report::vtype_t::integer},      {"n", report::vtype_t::integer},
                 {"norm_minus", report::vtype_t::real}, {"norm_plus", report::vtype_t::real},
                 {"t_star", report::vtype_t::real}};
    for (const auto& sp : pairs) {
        int p = (sp.n - 1) / 2;
        double scale = double(p) * omega.value(4LL * p);
        double nm = std::abs(sp.at_star.beta_minus) * scale;
        double np = std::abs(sp.at_star.beta_plus) * scale;
        for (double x : {nm, np}) {
            if (first || x < lo) lo = x;
            if (first || x > hi) hi = x;
            first = false;
        }
        t.add_row({report::Value::integer(p), report::Value::integer(sp.n),
                   report::Value::real(nm), report::Value::real(np),
                   report::Value::real(diagnostics::t_ratio(sp.at_star))});
    }
    t.add_meta("min", detail::num_str(lo));
    t.add_meta("max", detail::num_str(hi));
    t.add_meta("window", detail::num_str(lo > 0.0 ? hi / lo : 0.0));
    return t;
}

} // namespace detail4

inline report::ReportEnvelope run_preset(
    const std::string& name, const std::vector<std::pair<std::string, std::string>>& overrides) {
    using namespace diagnostics;
    ParamSet params(name, overrides);

    report::ReportEnvelope env;
    env.timestamp = report::now_iso8601();
    env.config.emplace_back("command", "reproduce");
    env.config.emplace_back("preset", name);
    env.config.emplace_back("presets_version", presets_version);
    for (const auto& [k, v] : params.items()) env.config.emplace_back(k, v);

    auto v = potentials::parse_potential_spec(params.str("potential"));
    basic_eq::SolveOptions sopt;
    sopt.K_max = params.integer("k_max");
    sopt.tol = params.real("tol");
    functionals::TransferOptions topt;
    topt.K_max = sopt.K_max;
    topt.tol_rel = sopt.tol;
    Defaults defaults;

    if (name == "example1" || name == "example2") {
        bool is1 = name == "example1";
        int dir_N = params.integer("dirichlet_trunc");
        double window = params.real("window");
        std::vector<RieszReport> reps;

        for (parity_t parity : {parity_t::even, parity_t::odd}) {
            int lo = params.integer(parity == parity_t::even ? "even_min" : "odd_min");
            int hi = params.integer(parity == parity_t::even ? "even_max" : "odd_max");
            auto ns = detail4::range_ns(lo, hi, parity);
            reps.push_back(criterion1(v, parity, lo, hi, topt, defaults));
            auto pairs = detail4::solve_range(v, ns, sopt);
            reps.push_back(criterion2(pairs, parity, defaults));
            bool with_crit3 = is1 || parity == parity_t::even;
            if (with_crit3)
                reps.push_back(criterion3(detail4::attach_mus(v, pairs, dir_N), parity, defaults));
            reps.push_back(makin_check(v, parity, lo, hi, window, defaults));
        }
        for (const auto& r : reps) detail4::add_riesz(env, r);

        if (is1) {
            AsymOptions aopt;
            aopt.dirichlet_N = params.integer("dev_mid_trunc");
            aopt.solve = sopt;
            auto tab = asymptotic_check(law_t::dev_mid_61_7, v, params.int_list("dev_mid_ns"), aopt);
            detail4::add_asym(env, tab);
        }
        std::vector<const RieszReport*> ptrs;
        for (const auto& r : reps) ptrs.push_back(&r);
        env.sections.push_back(detail4::consistency_table(ptrs));
        return env;
    }

    if (name == "ex1" || name == "ex2") {
        int p_min = params.integer("p_min"), p_max = params.integer("p_max");
        if (p_min < 1 || p_min > p_max) throw config_error("bad p range");
        std::vector<int> ns;
        for (int p = p_min; p <= p_max; ++p) ns.push_back(2 * p + 1);
        auto omega = weights::parse_weight_spec(params.str("omega"));
        int dir_N = params.integer("dirichlet_trunc");
        double window = params.real("window");

        std::vector<RieszReport> reps;
        reps.push_back(criterion1(v, parity_t::odd, ns.front(), ns.back(), topt, defaults));
        auto pairs = detail4::solve_range(v, ns, sopt);
        reps.push_back(criterion2(pairs, parity_t::odd, defaults));
        reps.push_back(
            criterion3(detail4::attach_mus(v, pairs, dir_N), parity_t::odd, defaults));
        reps.push_back(makin_check(v, parity_t::odd, ns.front(), ns.back(), window, defaults));
        for (const auto& r : reps) detail4::add_riesz(env, r);

        env.sections.push_back(detail4::normalized_beta_table(pairs, omega));
        if (name == "ex1") {
            AsymOptions aopt;
            aopt.depth_m = params.integer("sigma_depth");
            aopt.solve = sopt;
            auto tab =
                asymptotic_check(law_t::beta_sim_sigma_thm20, v, params.int_list("sigma_ns"), aopt);
            detail4::add_asym(env, tab, false);
        }
        std::vector<const RieszReport*> ptrs;
        for (const auto& r : reps) ptrs.push_back(&r);
        env.sections.push_back(detail4::consistency_table(ptrs));
        return env;
    }

    if (name == "sawtooth") {
        auto ns = params.int_list("ns");
        AsymOptions aopt;
        aopt.dirichlet_N = params.integer("dirichlet_trunc");
        aopt.plateau_tol = params.real("plateau_tol");
        aopt.solve = sopt;
        for (law_t law : {law_t::gap_61_3, law_t::dev_plus_61_4, law_t::dev_minus_61_5,
                          law_t::dev_mid_61_7, law_t::beta_sim_V_thm1})
            detail4::add_asym(env, asymptotic_check(law, v, ns, aopt));
        return env;
    }

    if (name == "mathieu") {
        int n_min = params.integer("n_min"), n_max = params.integer("n_max");
        std::vector<int> ns;
        for (int n = n_min; n <= n_max; ++n) ns.push_back(n);
        auto pairs = detail4::solve_range(v, ns, sopt);
        env.sections.push_back(report::solve_table(pairs));

        auto cv = basic_eq::cross_validate(v, ns, params.int_list("truncations"),
                                           params.real("cross_tol"), sopt,
                                           params.real("stab_tol"));
        env.sections.push_back(report::cross_validation_table(cv));

        int dir_N = params.integer("dirichlet_trunc");
        for (parity_t parity : {parity_t::even, parity_t::odd}) {
            std::vector<basic_eq::SpectralPair> side;
            for (const auto& p : pairs)
                if ((p.n % 2 == 0) == (parity == parity_t::even)) side.push_back(p);
            auto rep = criterion3(detail4::attach_mus(v, side, dir_N), parity, defaults);
            detail4::add_riesz(env, rep);
        }

        auto ang = angle_vs_t(v, parity_t::even, n_min, n_max, params.integer("angle_trunc"),
                              sopt, defaults);
        for (int sn : ang.skipped)
            env.warnings.push_back("angle: unresolved disc pair skipped at n = " +
                                   std::to_string(sn));
        env.sections.push_back(report::angle_table(ang));

        int bn = params.integer("beta_n");
        functionals::TransferOptions bopt = topt;
        bopt.keep_terms = true;
        auto be = functionals::transfer_eval(v, bn, cplx(0.0, 0.0), bopt);
        env.sections.push_back(report::beta_table(be));
        env.sections.push_back(report::beta_terms_table(be));
        return env;
    }

    throw config_error("unknown preset '" + name + "'");
}

} // namespace hillspec::presets
