#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "common.hpp"
#include "functionals.hpp"
#include "matrix_spectra.hpp"
#include "potentials.hpp"

namespace hillspec::basic_eq {

struct SolveOptions {
    long long J = 0;
    int K_max = 64;
    double tol = 1e-12;
    int max_iter = 80;
};

/// The two periodic/antiperiodic eigenvalues in disc n obtained from the
/// reduced equation (z - alpha(z))^2 = beta-(z) beta+(z), plus the transfer
/// data re-evaluated at the midpoint z*.
struct SpectralPair {
    int n;
    cplx z_minus, z_plus, z_star;
    cplx lambda_minus, lambda_plus;
    cplx gamma;          // lambda+ - lambda-, zero when double_root
    double residual;     // worst |(z-alpha)^2 - beta- beta+| at the roots
    bool double_root;
    int iters_minus, iters_plus;
    functionals::BetaEval at_star;
};

/// Fixed-point solve z <- alpha(z) +- sqrt(beta-(z) beta+(z)) from z = 0,
/// square-root branch continued along the iteration. Real root pairs are
/// canonicalized to z- <= z+.
inline SpectralPair solve_basic(const potentials::FourierPotential& v, int n,
                                SolveOptions opt = {}) {
    functionals::TransferOptions topt;
    topt.J = opt.J;
    topt.K_max = opt.K_max;

    cplx roots[2];
    double resid[2];
    int iters[2];
    bool doubled = false;
    for (int s = 0; s < 2; ++s) {
        double sgn = s == 0 ? 1.0 : -1.0;
        cplx z(0.0, 0.0);
        std::optional<cplx> w_old;
        bool converged = false;
        int it = 0;
        cplx w(0.0, 0.0);
        for (; it < opt.max_iter; ++it) {
            auto ev = functionals::transfer_eval(v, n, z, topt);
            w = std::sqrt(ev.beta_minus * ev.beta_plus);
            if (w_old && std::abs(-w - *w_old) < std::abs(w - *w_old)) w = -w;
            w_old = w;
            cplx z_new = ev.alpha + sgn * w;
            if (std::abs(z_new) >= double(n) / 4.0)
                throw compute_error("root escaped the disc |z| < n/4 at n = " +
                                    std::to_string(n));
            if (std::abs(z_new - z) < opt.tol) {
                z = z_new;
                converged = true;
                break;
            }
            z = z_new;
        }
        if (!converged)
            throw compute_error("basic equation fixed point did not converge at n = " +
                                std::to_string(n));
        auto ev = functionals::transfer_eval(v, n, z, topt);
        resid[s] = std::abs((z - ev.alpha) * (z - ev.alpha) -
                            ev.beta_minus * ev.beta_plus);
        double prod = std::abs(ev.beta_minus * ev.beta_plus);
        if (resid[s] > 10.0 * opt.tol * std::max(1.0, std::sqrt(prod)))
            throw compute_error("basic equation residual " + detail::num_str(resid[s]) +
                                " out of tolerance at n = " + std::to_string(n));
        if (std::abs(w) <= opt.tol) doubled = true;
        roots[s] = z;
        iters[s] = it + 1;
    }

    cplx zp = roots[0], zm = roots[1];
    int itp = iters[0], itm = iters[1];
    if (std::abs(zp.imag()) < 1e-10 && std::abs(zm.imag()) < 1e-10 && zm.real() > zp.real()) {
        std::swap(zp, zm);
        std::swap(itp, itm);
    }

    SpectralPair out;
    out.n = n;
    out.z_minus = zm;
    out.z_plus = zp;
    out.z_star = 0.5 * (zm + zp);
    double nn = double(n) * double(n);
    out.lambda_minus = cplx(nn, 0.0) + zm;
    out.lambda_plus = cplx(nn, 0.0) + zp;
    out.double_root = doubled;
    out.gamma = doubled ? cplx(0.0, 0.0) : out.lambda_plus - out.lambda_minus;
    out.residual = std::max(resid[0], resid[1]);
    out.iters_minus = itm;
    out.iters_plus = itp;
    out.at_star = functionals::transfer_eval(v, n, out.z_star, topt);
    return out;
}

/// A priori localization radius in the singular picture v = Q':
/// eps = C1 (sum_{|k| >= sqrt n} |Q(k)|^2)^{1/2} + C2/sqrt(n), and the disc
/// radius is n [eps + sqrt((eps + 2|Q(-2n)|)(eps + 2|Q(2n)|))].
struct RhoBound {
    int n;
    double eps;
    double bound;
};

inline RhoBound rho_bound(const potentials::FourierPotential& v, int n,
                          double C1 = 1.0, double C2 = 1.0) {
    if (n < 2) throw config_error("rho bound needs n >= 2");
    long long k0 = (long long)std::ceil(std::sqrt(double(n)));
    k0 += k0 % 2;
    long long k_scan = std::max<long long>(4LL * n, 4096);
    detail::kahan sum, last_octave;
    for (long long k = k0; k <= k_scan; k += 2) {
        double q2 = std::norm(v.q_coeff(k)) + std::norm(v.q_coeff(-k));
        sum.add(q2);
        if (2 * k > k_scan) last_octave.add(q2);
    }
    if (last_octave.value() > 0.05 * sum.value())
        throw compute_error("q-representation not square-summable on the scanned range");
    double eps = C1 * std::sqrt(sum.value()) + C2 / std::sqrt(double(n));
    double qm = std::abs(v.q_coeff(-2LL * n));
    double qp = std::abs(v.q_coeff(2LL * n));
    RhoBound r;
    r.n = n;
    r.eps = eps;
    r.bound = double(n) * (eps + std::sqrt((eps + 2.0 * qm) * (eps + 2.0 * qp)));
    return r;
}

struct CrossValidationRow {
    int n;
    cplx series_minus, series_plus;
    cplx matrix_a, matrix_b; // disc eigenvalues, matched order
    double delta;            // worst matched discrepancy
    bool pass;
    bool double_root;
};

struct CrossValidationReport {
    std::vector<int> truncations;
    std::vector<CrossValidationRow> rows;
    double max_delta;
    double stability_delta; // worst disc movement across the last refinement
    bool stable;
    bool pass;
};

/// Dual-route check: the series roots n^2 + z-+ against the two disc
/// eigenvalues of the truncated periodic sections, matched by the cheaper
/// of the two pairings, with a truncation-stability probe alongside.
inline CrossValidationReport cross_validate(const potentials::FourierPotential& v,
                                            const std::vector<int>& ns,
                                            const std::vector<int>& truncations,
                                            double tol, SolveOptions opt = {},
                                            double stab_tol = 0.0) {
    if (stab_tol <= 0.0) stab_tol = tol;
    if (ns.empty()) throw config_error("cross validation needs a nonempty index set");
    if (truncations.size() < 2)
        throw config_error("cross validation needs at least two truncations");
    CrossValidationReport rep;
    rep.truncations = truncations;
    rep.max_delta = 0.0;
    rep.stability_delta = 0.0;
    rep.stable = true;
    rep.pass = true;

    bool need_even = false, need_odd = false;
    for (int n : ns) (n % 2 == 0 ? need_even : need_odd) = true;
    std::vector<matrix_spectra::Eigensolution> sols_even, sols_odd;
    for (int N : truncations) {
        if (need_even)
            sols_even.push_back(matrix_spectra::eigen_all(
                matrix_spectra::build_matrix(v, matrix_spectra::bc_t::per_plus, N)));
        if (need_odd)
            sols_odd.push_back(matrix_spectra::eigen_all(
                matrix_spectra::build_matrix(v, matrix_spectra::bc_t::per_minus, N)));
    }

    for (int n : ns) {
        if (n > truncations.back() / 2)
            throw config_error("index n = " + std::to_string(n) +
                               " outside the reliable zone of the largest truncation");
        const auto& ladder = (n % 2 == 0) ? sols_even : sols_odd;
        std::vector<cplx> last = matrix_spectra::disc_eigenvalues(ladder.back(), n);
        std::vector<cplx> prev = matrix_spectra::disc_eigenvalues(ladder[ladder.size() - 2], n);
        if (last.size() != 2)
            throw compute_error("disc n = " + std::to_string(n) + " holds " +
                                std::to_string(last.size()) +
                                " matrix eigenvalues, expected 2");
        if (prev.size() != last.size()) {
            rep.stable = false;
        } else {
            for (size_t i = 0; i < last.size(); ++i)
                rep.stability_delta =
                    std::max(rep.stability_delta, std::abs(last[i] - prev[i]));
            if (rep.stability_delta >= stab_tol) rep.stable = false;
        }

        auto sp = solve_basic(v, n, opt);
        CrossValidationRow row;
        row.n = n;
        row.series_minus = sp.lambda_minus;
        row.series_plus = sp.lambda_plus;
        row.double_root = sp.double_root;
        // minimal-sum pairing of the two candidate assignments
        double direct = std::abs(sp.lambda_minus - last[0]) + std::abs(sp.lambda_plus - last[1]);
        double swapped = std::abs(sp.lambda_minus - last[1]) + std::abs(sp.lambda_plus - last[0]);
        if (swapped < direct) std::swap(last[0], last[1]);
        row.matrix_a = last[0];
        row.matrix_b = last[1];
        row.delta = std::max(std::abs(sp.lambda_minus - last[0]),
                             std::abs(sp.lambda_plus - last[1]));
        row.pass = row.delta < tol;
        rep.max_delta = std::max(rep.max_delta, row.delta);
        if (!row.pass) rep.pass = false;
        rep.rows.push_back(row);
    }
    if (!rep.stable) rep.pass = false;
    return rep;
}

} // namespace hillspec::basic_eq
