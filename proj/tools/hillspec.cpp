#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "hillspec/basic_eq.hpp"
#include "hillspec/common.hpp"
#include "hillspec/diagnostics.hpp"
#include "hillspec/functionals.hpp"
#include "hillspec/matrix_spectra.hpp"
#include "hillspec/potentials.hpp"
#include "hillspec/presets.hpp"
#include "hillspec/report.hpp"
#include "hillspec/weights.hpp"

namespace {

using namespace hillspec;

void emit(const report::ReportEnvelope& env, const std::string& format,
          const std::string& path) {
    std::string text =
        format == "csv" ? report::to_csv_text(env) : report::to_json_text(env);
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot open output file '" + path + "'");
    out << text;
}

cplx parse_z(const std::string& s) {
    auto pos = s.find(',');
    if (pos == std::string::npos)
        throw config_error("--z expects <re>,<im>");
    return {detail::parse_double(s.substr(0, pos), "--z"),
            detail::parse_double(s.substr(pos + 1), "--z")};
}

std::pair<std::string, std::string> parse_set(const std::string& s) {
    auto pos = s.find('=');
    if (pos == std::string::npos) throw config_error("--set expects key=value");
    return {s.substr(0, pos), s.substr(pos + 1)};
}

int cmd_spectrum(const std::string& pot, const std::string& bc_s, int n_min, int n_max,
                 int trunc, double tol, const std::string& out, const std::string& file) {
    auto v = potentials::parse_potential_spec(pot);
    auto bc = matrix_spectra::parse_bc(bc_s);
    auto sol = matrix_spectra::eigen_all(matrix_spectra::build_matrix(v, bc, trunc), tol);
    auto matches = matrix_spectra::match_discs(sol, bc, trunc, n_min, n_max);

    report::ReportEnvelope env;
    env.timestamp = report::now_iso8601();
    env.config = {{"command", "spectrum"}, {"potential", pot},
                  {"bc", bc_s},            {"n_min", std::to_string(n_min)},
                  {"n_max", std::to_string(n_max)}, {"trunc", std::to_string(trunc)},
                  {"tol", detail::num_str(tol)},    {"out", out}};
    for (const auto& m : matches)
        if (!m.matched)
            env.warnings.push_back("disc n=" + std::to_string(m.n) + ": expected " +
                                   std::to_string(m.expected) + " eigenvalues, found " +
                                   std::to_string(m.eigenvalues.size()));
    env.sections.push_back(report::spectrum_table(matches, bc, trunc));
    emit(env, out, file);
    return 0;
}

int cmd_beta(const std::string& pot, int n, const std::string& z_s, long long radius_j,
             int depth, double tol, bool per_term) {
    auto v = potentials::parse_potential_spec(pot);
    functionals::TransferOptions opt;
    opt.J = radius_j;
    opt.K_max = depth;
    opt.tol_rel = tol;
    opt.keep_terms = per_term;
    auto be = functionals::transfer_eval(v, n, parse_z(z_s), opt);

    report::ReportEnvelope env;
    env.timestamp = report::now_iso8601();
    env.config = {{"command", "beta"},
                  {"potential", pot},
                  {"n", std::to_string(n)},
                  {"z", z_s},
                  {"radius_j", std::to_string(radius_j)},
                  {"depth", std::to_string(depth)},
                  {"tol", detail::num_str(tol)}};
    env.sections.push_back(report::beta_table(be));
    if (per_term) env.sections.push_back(report::beta_terms_table(be));
    emit(env, "json", "");
    return 0;
}

int cmd_solve(const std::string& pot, int n_min, int n_max, bool cross, int trunc) {
    auto v = potentials::parse_potential_spec(pot);
    if (n_min < 1 || n_min > n_max) throw config_error("bad index range");
    std::vector<int> ns;
    for (int n = n_min; n <= n_max; ++n) ns.push_back(n);
    std::vector<basic_eq::SpectralPair> pairs;
    for (int n : ns) pairs.push_back(basic_eq::solve_basic(v, n));

    report::ReportEnvelope env;
    env.timestamp = report::now_iso8601();
    env.config = {{"command", "solve"},
                  {"potential", pot},
                  {"n_min", std::to_string(n_min)},
                  {"n_max", std::to_string(n_max)}};
    if (cross) {
        env.config.emplace_back("trunc", std::to_string(trunc));
        env.config.emplace_back("cross_tol", "1e-6");
    }
    env.sections.push_back(report::solve_table(pairs));
    if (cross) {
        std::vector<int> ladder = {(3 * trunc) / 4, trunc};
        auto cv = basic_eq::cross_validate(v, ns, ladder, 1e-6);
        if (!cv.pass) env.warnings.push_back("cross-validation failed");
        if (!cv.stable) env.warnings.push_back("matrix oracle not stable across truncations");
        env.sections.push_back(report::cross_validation_table(cv));
    }
    emit(env, "json", "");
    return 0;
}

int cmd_riesz(const std::string& pot, const std::string& parity_s, const std::string& crit_s,
              int n_min, int n_max, double window, bool assert_basis) {
    auto v = potentials::parse_potential_spec(pot);
    auto parity = diagnostics::parse_parity(parity_s);
    auto crit = diagnostics::parse_criterion(crit_s);
    diagnostics::Defaults d;

    diagnostics::RieszReport rep;
    switch (crit) {
        case diagnostics::criterion_t::crit1:
            rep = diagnostics::criterion1(v, parity, n_min, n_max, {}, d);
            break;
        case diagnostics::criterion_t::crit2:
        case diagnostics::criterion_t::crit3: {
            auto ns = diagnostics::detail2::parity_range(parity, n_min, n_max);
            std::vector<basic_eq::SpectralPair> pairs;
            for (int n : ns) pairs.push_back(basic_eq::solve_basic(v, n));
            if (crit == diagnostics::criterion_t::crit2) {
                rep = diagnostics::criterion2(pairs, parity, d);
            } else {
                int N = std::max(160, 5 * n_max);
                std::vector<diagnostics::DiscTriple> triples;
                auto mus = diagnostics::dirichlet_mus(v, ns, N);
                for (size_t i = 0; i < pairs.size(); ++i)
                    triples.push_back({pairs[i], mus[i].value_or(cplx(0.0, 0.0)),
                                       mus[i].has_value()});
                rep = diagnostics::criterion3(triples, parity, d);
            }
            break;
        }
        default:
            rep = diagnostics::makin_check(v, parity, n_min, n_max, window, d);
            break;
    }

    report::ReportEnvelope env;
    env.timestamp = report::now_iso8601();
    env.config = {{"command", "riesz"},
                  {"potential", pot},
                  {"parity", parity_s},
                  {"criterion", crit_s},
                  {"n_min", std::to_string(n_min)},
                  {"n_max", std::to_string(n_max)},
                  {"window", detail::num_str(window)}};
    for (const auto& f : rep.guard_flags) env.warnings.push_back(f);
    env.sections.push_back(report::riesz_table(rep));
    emit(env, "json", "");
    if (assert_basis && rep.verdict == diagnostics::verdict_t::no_basis) return 4;
    return 0;
}

int cmd_asym(const std::string& pot, const std::string& law_s, int n_min, int n_max) {
    auto v = potentials::parse_potential_spec(pot);
    auto law = diagnostics::parse_law(law_s);
    if (n_min < 1 || n_min > n_max) throw config_error("bad index range");
    std::vector<int> ns;
    for (int n = n_min; n <= n_max; ++n) ns.push_back(n);
    auto tab = diagnostics::asymptotic_check(law, v, ns);

    report::ReportEnvelope env;
    env.timestamp = report::now_iso8601();
    env.config = {{"command", "asym"},
                  {"potential", pot},
                  {"law", law_s},
                  {"n_min", std::to_string(n_min)},
                  {"n_max", std::to_string(n_max)}};
    for (const auto& f : tab.guard_flags) env.warnings.push_back(f);
    env.sections.push_back(report::asym_table(tab));
    env.sections.push_back(report::deviation_summary_table(tab));
    emit(env, "json", "");
    return 0;
}

int cmd_weights(const std::string& family, const std::string& check, long long kmax) {
    auto W = weights::parse_weight_spec(family);
    report::ReportEnvelope env;
    env.timestamp = report::now_iso8601();
    env.config = {{"command", "weights"},
                  {"family", family},
                  {"check", check},
                  {"kmax", std::to_string(kmax)}};

    if (check == "sub") {
        env.sections.push_back(report::submult_table(
            weights::submultiplicativity_check(W, kmax), family));
    } else if (check == "slow") {
        env.sections.push_back(report::slow_increase_table(
            weights::slow_increase_constant(W, kmax), family));
    } else if (check == "subexp") {
        env.sections.push_back(
            report::subexp_table(weights::subexponential_type(W, kmax), family));
    } else if (check == "concave") {
        env.sections.push_back(
            report::concavity_table(weights::concavity_check(W, 2, kmax), family));
    } else if (check == "factorize" || check.rfind("factorize:", 0) == 0) {
        std::string omega_spec = "log";
        if (check.rfind("factorize:", 0) == 0) {
            std::string rest = check.substr(10);
            if (rest.rfind("omega=", 0) != 0)
                throw config_error("--check factorize takes :omega=<weightspec>");
            omega_spec = rest.substr(6);
        }
        auto omega = weights::parse_weight_spec(omega_spec);
        auto rep = weights::factorize(W, omega, kmax);
        if (rep.omega_diverging)
            env.warnings.push_back("omega slow-increase constant still growing on the range");
        if (!rep.converged) env.warnings.push_back("factorization sum not converged");
        env.sections.push_back(report::factorize_table(rep, family, omega_spec));
    } else {
        throw config_error("unknown check '" + check +
                           "' (expected sub|slow|subexp|concave|factorize[:omega=...])");
    }
    emit(env, "json", "");
    return 0;
}

int cmd_reproduce(const std::string& preset, const std::vector<std::string>& sets) {
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const auto& s : sets) overrides.push_back(parse_set(s));
    auto env = presets::run_preset(preset, overrides);
    emit(env, "json", "");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral diagnostics for Hill operators with weighted-space potentials"};
    app.require_subcommand(1);

    std::string pot, bc, out = "json", file, z_s, parity, crit, law, family, check, preset;
    int n = 0, n_min = 0, n_max = 0, trunc = 0, depth = 64;
    long long radius_j = 0, kmax = 0;
    double tol = 1e-10, window = 10.0;
    bool per_term = false, cross = false, assert_basis = false;
    std::vector<std::string> sets;

    auto* sp = app.add_subcommand("spectrum", "Disc eigenvalues of the truncated operator");
    sp->add_option("--potential", pot)->required();
    sp->add_option("--bc", bc)->required()->check(CLI::IsMember({"per+", "per-", "dir"}));
    sp->add_option("--n-min", n_min)->required();
    sp->add_option("--n-max", n_max)->required();
    sp->add_option("--trunc", trunc)->required();
    sp->add_option("--tol", tol)->required();
    sp->add_option("--out", out)->required()->check(CLI::IsMember({"json", "csv"}));
    sp->add_option("--file", file);

    auto* bt = app.add_subcommand("beta", "Transfer-series functionals at one point");
    bt->add_option("--potential", pot)->required();
    bt->add_option("--n", n)->required();
    bt->add_option("--z", z_s)->required();
    bt->add_option("--radius-j", radius_j)->required();
    bt->add_option("--depth", depth)->required();
    bt->add_option("--tol", tol)->required();
    bt->add_flag("--per-term", per_term);

    auto* sv = app.add_subcommand("solve", "Disc eigenvalue pairs from the reduced equation");
    sv->add_option("--potential", pot)->required();
    sv->add_option("--n-min", n_min)->required();
    sv->add_option("--n-max", n_max)->required();
    sv->add_flag("--cross-validate", cross);
    sv->add_option("--trunc", trunc);

    auto* rz = app.add_subcommand("riesz", "Riesz basis criteria over an index range");
    rz->add_option("--potential", pot)->required();
    rz->add_option("--parity", parity)->required()->check(CLI::IsMember({"even", "odd"}));
    rz->add_option("--criterion", crit)->required()->check(CLI::IsMember({"1", "2", "3", "makin"}));
    rz->add_option("--n-min", n_min)->required();
    rz->add_option("--n-max", n_max)->required();
    rz->add_option("--window", window);
    rz->add_flag("--assert-basis", assert_basis);

    auto* as = app.add_subcommand("asym", "Asymptotic law ratio tables");
    as->add_option("--potential", pot)->required();
    as->add_option("--law", law)->required();
    as->add_option("--n-min", n_min)->required();
    as->add_option("--n-max", n_max)->required();

    auto* wt = app.add_subcommand("weights", "Weight family checks");
    wt->add_option("--family", family)->required();
    wt->add_option("--check", check)->required();
    wt->add_option("--kmax", kmax)->required();

    auto* rp = app.add_subcommand("reproduce", "Run a pinned reproduction preset");
    rp->add_option("preset", preset)
        ->required()
        ->check(CLI::IsMember({"example1", "example2", "ex1", "ex2", "sawtooth", "mathieu"}));
    rp->add_option("--set", sets, "key=value parameter override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (sp->parsed()) return cmd_spectrum(pot, bc, n_min, n_max, trunc, tol, out, file);
        if (bt->parsed()) return cmd_beta(pot, n, z_s, radius_j, depth, tol, per_term);
        if (sv->parsed()) {
            if (cross && trunc <= 0)
                throw hillspec::config_error("--cross-validate needs --trunc");
            return cmd_solve(pot, n_min, n_max, cross, trunc);
        }
        if (rz->parsed()) return cmd_riesz(pot, parity, crit, n_min, n_max, window, assert_basis);
        if (as->parsed()) return cmd_asym(pot, law, n_min, n_max);
        if (wt->parsed()) return cmd_weights(family, check, kmax);
        if (rp->parsed()) return cmd_reproduce(preset, sets);
        return 2;
    } catch (const hillspec::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const hillspec::compute_error& e) {
        std::cerr << "computation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "computation error: " << e.what() << "\n";
        return 3;
    }
}
