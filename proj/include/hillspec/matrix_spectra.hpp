#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "common.hpp"
#include "potentials.hpp"

namespace hillspec::matrix_spectra {

enum class bc_t { per_plus, per_minus, dirichlet };

inline const char* to_string(bc_t bc) {
    switch (bc) {
        case bc_t::per_plus: return "per+";
        case bc_t::per_minus: return "per-";
        default: return "dir";
    }
}

inline bc_t parse_bc(const std::string& s) {
    if (s == "per+") return bc_t::per_plus;
    if (s == "per-") return bc_t::per_minus;
    if (s == "dir") return bc_t::dirichlet;
    throw config_error("unknown boundary condition '" + s + "' (per+|per-|dir)");
}

/// Finite section of the Hill operator in the exponential (periodic cases)
/// or sine (Dirichlet) basis.
struct TruncatedOperator {
    bc_t bc;
    int N;                        // truncation parameter
    std::vector<long long> basis; // exponential mode k, or sine index n
    Eigen::MatrixXcd mat;
};

/// Builds the finite section. per+: modes k even, |k| <= 2N (dim 2N+1);
/// per-: k odd, |k| <= 2N+1 (dim 2N+2); dir: sine indices 1..N with entries
/// n^2 d_{nm} + (V(n-m)+V(m-n)-V(n+m)-V(-n-m))/2, exactly zero for odd n-m.
inline TruncatedOperator build_matrix(const potentials::FourierPotential& v, bc_t bc, int N) {
    if (N < 4) throw config_error("matrix truncation needs N >= 4");
    TruncatedOperator T;
    T.bc = bc;
    T.N = N;
    if (bc == bc_t::dirichlet) {
        T.basis.resize(size_t(N));
        std::iota(T.basis.begin(), T.basis.end(), 1);
        T.mat = Eigen::MatrixXcd::Zero(N, N);
        for (int i = 0; i < N; ++i) {
            long long n = T.basis[size_t(i)];
            for (int j = 0; j < N; ++j) {
                long long m = T.basis[size_t(j)];
                cplx val(0.0, 0.0);
                if (detail::is_even(n - m))
                    val = 0.5 * (v.coeff(n - m) + v.coeff(m - n) -
                                 v.coeff(n + m) - v.coeff(-n - m));
                if (i == j) val += cplx(double(n) * double(n), 0.0);
                T.mat(i, j) = val;
            }
        }
        return T;
    }
    long long lo = (bc == bc_t::per_plus) ? -2LL * N : -(2LL * N + 1);
    long long hi = -lo;
    for (long long k = lo; k <= hi; k += 2) T.basis.push_back(k);
    int dim = int(T.basis.size());
    T.mat = Eigen::MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            cplx val = v.coeff(T.basis[size_t(i)] - T.basis[size_t(j)]);
            if (i == j) {
                double k = double(T.basis[size_t(i)]);
                val += cplx(k * k, 0.0);
            }
            T.mat(i, j) = val;
        }
    return T;
}

struct Eigensolution {
    std::vector<cplx> values;    // sorted by (re, im)
    Eigen::MatrixXcd vectors;    // unit columns, aligned with values
    double max_backward_error;
};

/// Full dense eigendecomposition with a per-pair backward error certificate
/// ||T u - lambda u|| / (||T||_inf ||u||) <= tol.
inline Eigensolution eigen_all(const TruncatedOperator& T, double tol_backward = 1e-10) {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(T.mat, true);
    if (solver.info() != Eigen::Success)
        throw compute_error("eigendecomposition failed to converge");
    int dim = int(T.mat.rows());
    double norm = T.mat.cwiseAbs().rowwise().sum().maxCoeff();
    if (norm == 0.0) norm = 1.0;
    std::vector<int> order(static_cast<size_t>(dim));
    std::iota(order.begin(), order.end(), 0);
    const auto& vals = solver.eigenvalues();
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (vals[a].real() != vals[b].real()) return vals[a].real() < vals[b].real();
        return vals[a].imag() < vals[b].imag();
    });
    Eigensolution out;
    out.values.resize(size_t(dim));
    out.vectors.resize(dim, dim);
    out.max_backward_error = 0.0;
    for (int c = 0; c < dim; ++c) {
        int s = order[size_t(c)];
        out.values[size_t(c)] = vals[s];
        out.vectors.col(c) = solver.eigenvectors().col(s);
        double unorm = out.vectors.col(c).norm();
        double resid = (T.mat * out.vectors.col(c) - vals[s] * out.vectors.col(c)).norm();
        double be = resid / (norm * (unorm > 0 ? unorm : 1.0));
        out.max_backward_error = std::max(out.max_backward_error, be);
    }
    if (out.max_backward_error > tol_backward)
        throw compute_error("eigen backward error " +
                            detail::num_str(out.max_backward_error) +
                            " exceeds tolerance " + detail::num_str(tol_backward));
    return out;
}

/// Eigenvalues inside the disc |lambda - n^2| < n/4, sorted by (re, im).
inline std::vector<cplx> disc_eigenvalues(const Eigensolution& sol, int n,
                                          double radius = 0.0) {
    double r = radius > 0 ? radius : double(n) / 4.0;
    std::vector<cplx> out;
    for (const auto& l : sol.values)
        if (std::abs(l - cplx(double(n) * double(n), 0.0)) < r) out.push_back(l);
    return out;
}

struct DiscMatch {
    int n;
    std::vector<cplx> eigenvalues;
    int expected;
    int cluster_multiplicity; // largest coincidence cluster (1e-9 relative)
    bool matched;             // count equals the expected count
};

/// Localization bookkeeping over an index range. per+ counts even n only,
/// per- odd n only, Dirichlet every n; expected 2 eigenvalues per periodic
/// disc and 1 per Dirichlet disc. Indices must stay within the reliable
/// zone n <= N/2.
inline std::vector<DiscMatch> match_discs(const Eigensolution& sol, bc_t bc, int N,
                                          int n_min, int n_max) {
    if (n_min < 1 || n_max < n_min) throw config_error("bad disc range");
    if (n_max > N / 2)
        throw config_error("disc range exceeds reliable zone n <= N/2 (N = " +
                           std::to_string(N) + ")");
    std::vector<DiscMatch> out;
    for (int n = n_min; n <= n_max; ++n) {
        bool even = (n % 2 == 0);
        if (bc == bc_t::per_plus && !even) continue;
        if (bc == bc_t::per_minus && even) continue;
        DiscMatch m;
        m.n = n;
        m.eigenvalues = disc_eigenvalues(sol, n);
        m.expected = (bc == bc_t::dirichlet) ? 1 : 2;
        m.cluster_multiplicity = 1;
        for (size_t i = 0; i < m.eigenvalues.size(); ++i) {
            int c = 1;
            for (size_t j = 0; j < m.eigenvalues.size(); ++j)
                if (j != i && std::abs(m.eigenvalues[i] - m.eigenvalues[j]) <=
                                  1e-9 * std::max(1.0, std::abs(m.eigenvalues[i])))
                    ++c;
            m.cluster_multiplicity = std::max(m.cluster_multiplicity, c);
        }
        m.matched = int(m.eigenvalues.size()) == m.expected;
        out.push_back(std::move(m));
    }
    return out;
}

struct PairAngle {
    int n;
    bool degenerate;   // coincident pair: angle not defined
    double inner_abs;  // |<u1, u2>| for unit eigenvectors
    double sin_angle;
    cplx lambda1, lambda2;
};

/// Angle between the two eigenvectors localized in disc n of a periodic
/// section. Degenerate (clustered) pairs are reported, not computed.
inline PairAngle pair_angle(const Eigensolution& sol, int n) {
    auto in_disc = [&](const cplx& l) {
        return std::abs(l - cplx(double(n) * double(n), 0.0)) < double(n) / 4.0;
    };
    std::vector<int> idx;
    for (int i = 0; i < int(sol.values.size()); ++i)
        if (in_disc(sol.values[size_t(i)])) idx.push_back(i);
    if (idx.size() != 2)
        throw compute_error("disc n = " + std::to_string(n) + " holds " +
                            std::to_string(idx.size()) + " eigenvalues, expected 2");
    PairAngle a;
    a.n = n;
    a.lambda1 = sol.values[size_t(idx[0])];
    a.lambda2 = sol.values[size_t(idx[1])];
    if (std::abs(a.lambda1 - a.lambda2) <= 1e-9 * std::max(1.0, std::abs(a.lambda1))) {
        a.degenerate = true;
        a.inner_abs = std::numeric_limits<double>::quiet_NaN();
        a.sin_angle = std::numeric_limits<double>::quiet_NaN();
        return a;
    }
    a.degenerate = false;
    Eigen::VectorXcd u1 = sol.vectors.col(idx[0]).normalized();
    Eigen::VectorXcd u2 = sol.vectors.col(idx[1]).normalized();
    a.inner_abs = std::abs(u1.dot(u2)); // conjugating inner product
    a.sin_angle = std::sqrt(std::max(0.0, 1.0 - a.inner_abs * a.inner_abs));
    return a;
}

struct ConvergenceProbe {
    std::vector<int> truncations;
    std::vector<std::vector<cplx>> disc_eigs; // per truncation, sorted
    double last_delta;                        // between the two largest sections
    bool stable;
};

/// Tracks the disc-n eigenvalues along a truncation ladder; stable when the
/// last refinement moved them less than tol and the count at the largest
/// section matches the boundary condition.
inline ConvergenceProbe convergence_probe(const potentials::FourierPotential& v, bc_t bc,
                                          int n, const std::vector<int>& Ns, double tol) {
    if (Ns.size() < 2) throw config_error("convergence probe needs at least two truncations");
    ConvergenceProbe p;
    p.truncations = Ns;
    for (int N : Ns) {
        if (n > N / 2)
            throw config_error("probe index n = " + std::to_string(n) +
                               " outside reliable zone of N = " + std::to_string(N));
        auto sol = eigen_all(build_matrix(v, bc, N));
        p.disc_eigs.push_back(disc_eigenvalues(sol, n));
    }
    int expected = (bc == bc_t::dirichlet) ? 1 : 2;
    const auto& last = p.disc_eigs.back();
    const auto& prev = p.disc_eigs[p.disc_eigs.size() - 2];
    if (int(last.size()) != expected)
        throw compute_error("disc n = " + std::to_string(n) + " holds " +
                            std::to_string(last.size()) + " eigenvalues at N = " +
                            std::to_string(Ns.back()) + ", expected " +
                            std::to_string(expected));
    p.last_delta = std::numeric_limits<double>::infinity();
    if (last.size() == prev.size()) {
        double d = 0.0;
        for (size_t i = 0; i < last.size(); ++i)
            d = std::max(d, std::abs(last[i] - prev[i]));
        p.last_delta = d;
    }
    p.stable = p.last_delta < tol;
    return p;
}

} // namespace hillspec::matrix_spectra
