#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "common.hpp"
#include "potentials.hpp"

namespace hillspec::functionals {

struct TransferOptions {
    long long J = 0;       // 0 = automatic
    int K_max = 64;
    double tol_rel = 1e-12;
    bool keep_terms = false;
};

/// One evaluation of the reduced 2x2 data at (n, z): the diagonal functional
/// alpha and the two off-diagonal functionals beta-, beta+ obtained from the
/// Neumann series of the off-block transfer operator.
struct BetaEval {
    int n = 0;
    cplx z;
    cplx alpha, beta_minus, beta_plus;
    long long J = 0;
    int depth = 0;        // number of series terms accumulated
    double ratio = 0.0;   // decay estimate from the last two nonzero terms
    double tail_bound = 0.0;
    std::vector<cplx> s11, s12, s21; // per-term data when keep_terms
};

/// Default truncation radius: generous multiple of n, widened for trig
/// polynomials so that no admissible chain escapes the index window.
inline long long default_radius(const potentials::FourierPotential& v, int n, int K_max) {
    long long m = v.support().value_or(0);
    long long J = std::max<long long>(8LL * n, 2LL * n + 4 * m + 8);
    if (v.support()) J = std::max(J, n + (static_cast<long long>(K_max) + 2) * m + 4);
    return J;
}

inline BetaEval transfer_eval(const potentials::FourierPotential& v, int n, cplx z,
                              TransferOptions opt = {}) {
    if (n < 1) throw config_error("transfer evaluation needs n >= 1");
    if (std::abs(z) > double(n) / 2.0 * (1.0 + 1e-12))
        throw config_error("transfer evaluation outside the domain |z| <= n/2");
    if (opt.K_max < 1) throw config_error("transfer depth must be >= 1");
    long long J = opt.J > 0 ? opt.J : default_radius(v, n, opt.K_max);
    if (J < 2LL * n + 2) throw config_error("truncation radius must satisfy J >= 2n + 2");

    // admissible indices: j = n (mod 2), j != +-n, |j| <= J
    std::vector<long long> js;
    js.reserve(size_t(J));
    for (long long j = -J + ((J + n) % 2 == 0 ? 0 : 1); j <= J; j += 2)
        if (j != n && j != -n) js.push_back(j);
    size_t m = js.size();

    // coefficient cache on the even window [-2J, 2J]
    std::vector<cplx> vc(size_t(2 * J) + 1);
    for (long long a = -2 * J; a <= 2 * J; a += 2)
        vc[size_t(a + 2 * J) / 2] = v.coeff(a);
    auto V = [&](long long a) -> const cplx& { return vc[size_t(a + 2 * J) / 2]; };

    std::vector<cplx> d(m), up(m), um(m), wp(m), wm(m);
    for (size_t i = 0; i < m; ++i) {
        long long j = js[i];
        d[i] = cplx(double(n) * double(n) - double(j) * double(j), 0.0) + z;
        up[i] = V(j + n) / d[i];
        um[i] = V(j - n) / d[i];
        wp[i] = V(n - j);
        wm[i] = V(-n - j);
    }

    long long band = v.support().value_or(std::numeric_limits<long long>::max());
    auto apply_T = [&](const std::vector<cplx>& x, std::vector<cplx>& y) {
        for (size_t i = 0; i < m; ++i) {
            long long j = js[i];
            cplx acc(0.0, 0.0);
            size_t lo = 0, hi = m;
            if (band != std::numeric_limits<long long>::max()) {
                lo = size_t(std::lower_bound(js.begin(), js.end(), j - band) - js.begin());
                hi = size_t(std::upper_bound(js.begin(), js.end(), j + band) - js.begin());
            }
            for (size_t q = lo; q < hi; ++q) acc += V(j - js[q]) * x[q];
            y[i] = acc / d[i];
        }
    };

    BetaEval ev;
    ev.n = n;
    ev.z = z;
    ev.J = J;
    ev.beta_minus = V(-2 * n);
    ev.beta_plus = V(2 * n);
    ev.alpha = cplx(0.0, 0.0);

    std::vector<cplx> xp = up, xm = um, buf(m);
    std::vector<double> mags;
    int below = 0;
    for (int k = 1; k <= opt.K_max; ++k) {
        cplx S21(0, 0), S12(0, 0), S11(0, 0);
        for (size_t i = 0; i < m; ++i) {
            S21 += wp[i] * xp[i];
            S12 += wm[i] * xm[i];
            S11 += wm[i] * xp[i];
        }
        ev.alpha += S11;
        ev.beta_minus += S12;
        ev.beta_plus += S21;
        ev.depth = k;
        if (opt.keep_terms) {
            ev.s11.push_back(S11);
            ev.s12.push_back(S12);
            ev.s21.push_back(S21);
        }
        mags.push_back(std::max({std::abs(S11), std::abs(S12), std::abs(S21)}));
        double scale = std::max({std::abs(ev.alpha), std::abs(ev.beta_minus),
                                 std::abs(ev.beta_plus), 1e-300});
        if (mags.back() < opt.tol_rel * scale) {
            if (++below >= 3) break;
        } else {
            below = 0;
        }
        if (k < opt.K_max) {
            apply_T(xp, buf);
            xp.swap(buf);
            apply_T(xm, buf);
            xm.swap(buf);
        }
    }

    // decay estimate from the last two nonzero magnitudes; structural zeros
    // may interleave (trig polynomials), so allow gaps and take the per-step
    // geometric mean
    ev.ratio = std::numeric_limits<double>::quiet_NaN();
    double last_nonzero = 0.0;
    {
        size_t i = mags.size();
        while (i-- > 0)
            if (mags[i] > 0.0) { last_nonzero = mags[i]; break; }
        if (last_nonzero > 0.0) {
            size_t hi = i;
            while (i-- > 0) {
                if (mags[i] > 0.0) {
                    ev.ratio = std::pow(mags[hi] / mags[i], 1.0 / double(hi - i));
                    break;
                }
            }
        }
    }
    if (std::isnan(ev.ratio) || !(ev.ratio < 1.0))
        ev.tail_bound = last_nonzero;
    else
        ev.tail_bound = last_nonzero * ev.ratio / (1.0 - ev.ratio);
    // convergence is only enforced for adaptive runs, never for exact-depth
    // partial sums (tol_rel = 0)
    if (opt.tol_rel > 0.0 && below < 3 && ev.depth == opt.K_max) {
        double scale = std::max({std::abs(ev.alpha), std::abs(ev.beta_minus),
                                 std::abs(ev.beta_plus), 1e-300});
        if (ev.ratio >= 1.0)
            throw compute_error("transfer series not converging at depth " +
                                std::to_string(ev.depth) + " (ratio " +
                                detail::num_str(ev.ratio) + ")");
        if (!mags.empty() && mags.back() > 1e-6 * scale)
            throw compute_error("transfer series still large at K_max = " +
                                std::to_string(opt.K_max));
    }
    return ev;
}

struct SigmaPartial {
    int m;
    cplx sigma_minus, sigma_plus; // V(-+2n) + first m series terms
};

/// Finite partial sums of the beta series, exact to depth m (no adaptive stop).
inline SigmaPartial partial_sigma(const potentials::FourierPotential& v, int n, cplx z,
                                  int m, long long J = 0) {
    if (m < 0) throw config_error("partial sum depth must be >= 0");
    SigmaPartial s;
    s.m = m;
    if (m == 0) {
        s.sigma_minus = v.coeff(-2LL * n);
        s.sigma_plus = v.coeff(2LL * n);
        return s;
    }
    TransferOptions opt;
    opt.J = J;
    opt.K_max = m;
    opt.tol_rel = 0.0; // run to the exact depth
    auto ev = transfer_eval(v, n, z, opt);
    s.sigma_minus = ev.beta_minus;
    s.sigma_plus = ev.beta_plus;
    return s;
}

/// sum over j = n (mod 2), j != +-n of |n^2 - j^2|^{-beta}, beta in (1/2, 1].
/// Direct compensated sum to a large window plus an analytic power tail.
inline double sum_inverse_gap(int n, double beta) {
    if (n < 2) throw config_error("inverse gap sum needs n >= 2");
    if (!(beta > 0.5) || !(beta <= 1.0))
        throw config_error("inverse gap sum needs beta in (1/2, 1]");
    long long J = std::max<long long>(100000, 1000LL * n);
    detail::kahan acc;
    long long start = -J + ((J + n) % 2 == 0 ? 0 : 1);
    for (long long j = start; j <= J; j += 2) {
        if (j == n || j == -n) continue;
        double g = std::abs(double(n) * double(n) - double(j) * double(j));
        acc.add(std::pow(g, -beta));
    }
    // tail: 2 * sum_{j > J, parity} (j^2 - n^2)^{-beta}, density 1/2, via the
    // binomial series of (1 - (n/j)^2)^{-beta}
    double tail = 0.0;
    double c = 1.0;
    for (int t = 0; t < 12; ++t) {
        if (t > 0) c *= (beta + double(t - 1)) / double(t);
        double e = 2.0 * beta + 2.0 * t - 1.0;
        tail += c * std::pow(double(n), 2 * t) * std::pow(double(J + 1), -e) / e;
    }
    double value = acc.value() + tail;
    if (beta == 1.0) {
        double bound = 2.0 * std::log(6.0 * double(n)) / double(n);
        if (value > bound)
            throw compute_error("inverse gap sum exceeds its logarithmic bound");
    }
    return value;
}

/// Geometric remainder of the weighted series bound: r = 4 norm A C log(6n)/n
/// must be a contraction; the depth-K remainder is norm r^{K+1}/(1-r).
inline double tail_bound_weighted(double norm, double A, double C, int n, int K) {
    if (!(norm >= 0.0)) throw config_error("tail bound needs norm >= 0");
    if (!(A >= 1.0) || !(C >= 1.0)) throw config_error("tail bound needs A, C >= 1");
    if (n < 2 || K < 0) throw config_error("tail bound needs n >= 2, K >= 0");
    double r = 4.0 * norm * A * C * std::log(6.0 * double(n)) / double(n);
    if (!(r < 0.5))
        throw compute_error("no contraction: r = " + detail::num_str(r) +
                            " >= 1/2 at n = " + std::to_string(n));
    return norm * std::pow(r, K + 1) / (1.0 - r);
}

} // namespace hillspec::functionals
