#include <catch2/catch_amalgamated.hpp>

#include <hillspec/functionals.hpp>

#include <cmath>
#include <vector>

using namespace hillspec;
using namespace hillspec::functionals;
using potentials::FourierPotential;
using Catch::Approx;

namespace {

// dense reimplementation of the chain sums, no banding, no caching
struct BruteChains {
    std::vector<cplx> s11, s12, s21;
    cplx alpha, beta_minus, beta_plus;
};

BruteChains brute_chains(const FourierPotential& v, int n, cplx z, long long J, int K) {
    std::vector<long long> js;
    for (long long j = -J; j <= J; ++j)
        if ((j - n) % 2 == 0 && j != n && j != -n) js.push_back(j);
    size_t m = js.size();
    std::vector<cplx> d(m), up(m), um(m);
    for (size_t i = 0; i < m; ++i) {
        d[i] = cplx(double(n) * double(n) - double(js[i]) * double(js[i]), 0.0) + z;
        up[i] = v.coeff(js[i] + n) / d[i];
        um[i] = v.coeff(js[i] - n) / d[i];
    }
    auto step = [&](const std::vector<cplx>& x) {
        std::vector<cplx> y(m);
        for (size_t i = 0; i < m; ++i) {
            cplx acc(0.0, 0.0);
            for (size_t q = 0; q < m; ++q) acc += v.coeff(js[i] - js[q]) * x[q];
            y[i] = acc / d[i];
        }
        return y;
    };
    BruteChains out;
    out.beta_minus = v.coeff(-2LL * n);
    out.beta_plus = v.coeff(2LL * n);
    out.alpha = cplx(0.0, 0.0);
    std::vector<cplx> xp = up, xm = um;
    for (int k = 1; k <= K; ++k) {
        cplx S21(0, 0), S12(0, 0), S11(0, 0);
        for (size_t i = 0; i < m; ++i) {
            S21 += v.coeff(n - js[i]) * xp[i];
            S12 += v.coeff(-n - js[i]) * xm[i];
            S11 += v.coeff(-n - js[i]) * xp[i];
        }
        out.s11.push_back(S11);
        out.s12.push_back(S12);
        out.s21.push_back(S21);
        out.alpha += S11;
        out.beta_minus += S12;
        out.beta_plus += S21;
        xp = step(xp);
        xm = step(xm);
    }
    return out;
}

} // namespace

TEST_CASE("transfer evaluation matches a dense reimplementation", "[functionals]") {
    TransferOptions opt;
    opt.K_max = 6;
    opt.tol_rel = 0.0; // exact depth
    opt.keep_terms = true;

    SECTION("banded path (finite support)") {
        auto v = FourierPotential::mathieu();
        opt.J = 60;
        auto ev = transfer_eval(v, 5, cplx(0.3, 0.2), opt);
        auto br = brute_chains(v, 5, cplx(0.3, 0.2), 60, 6);
        for (int k = 0; k < 6; ++k) {
            REQUIRE(std::abs(ev.s11[size_t(k)] - br.s11[size_t(k)]) < 1e-15);
            REQUIRE(std::abs(ev.s12[size_t(k)] - br.s12[size_t(k)]) < 1e-15);
            REQUIRE(std::abs(ev.s21[size_t(k)] - br.s21[size_t(k)]) < 1e-15);
        }
        REQUIRE(std::abs(ev.alpha - br.alpha) < 1e-15);
        REQUIRE(std::abs(ev.beta_minus - br.beta_minus) < 1e-15);
        REQUIRE(std::abs(ev.beta_plus - br.beta_plus) < 1e-15);
    }
    SECTION("plain path (infinite support)") {
        auto v = FourierPotential::sawtooth_smooth(0);
        opt.J = 44;
        auto ev = transfer_eval(v, 5, cplx(-0.4, 0.1), opt);
        auto br = brute_chains(v, 5, cplx(-0.4, 0.1), 44, 6);
        for (int k = 0; k < 6; ++k) {
            REQUIRE(std::abs(ev.s12[size_t(k)] - br.s12[size_t(k)]) < 1e-15);
            REQUIRE(std::abs(ev.s21[size_t(k)] - br.s21[size_t(k)]) < 1e-15);
        }
        REQUIRE(std::abs(ev.beta_plus - br.beta_plus) < 1e-15);
    }
}

TEST_CASE("trig polynomial chains vanish until they can reach", "[functionals]") {
    auto v = FourierPotential::mathieu();
    TransferOptions opt;
    opt.K_max = 12;
    opt.tol_rel = 0.0;
    opt.keep_terms = true;
    auto ev = transfer_eval(v, 10, cplx(0.0, 0.0), opt);

    // a k-term chain moves at most 2(k+1); crossing from -n to n needs k >= 9
    for (int k = 1; k <= 8; ++k) {
        REQUIRE(std::abs(ev.s21[size_t(k - 1)]) <= 1e-14);
        REQUIRE(std::abs(ev.s12[size_t(k - 1)]) <= 1e-14);
    }
    REQUIRE(std::abs(ev.s21[8]) > 0.0);
    REQUIRE(std::abs(ev.s12[8]) > 0.0);

    SECTION("first diagonal term is the closed two-point sum") {
        // j = -n +- 2: 1/(4n-4) - 1/(4n+4) = 1/(2(n^2-1))
        REQUIRE(std::abs(ev.s11[0] - cplx(1.0 / 198.0, 0.0)) < 1e-12);
        auto ev3 = transfer_eval(v, 3, cplx(0.0, 0.0), opt);
        REQUIRE(std::abs(ev3.s11[0] - cplx(0.0625, 0.0)) < 1e-14);
        REQUIRE(std::abs(ev3.s21[0]) == 0.0);
        REQUIRE(std::abs(ev3.s12[0]) == 0.0);
    }
    SECTION("adaptive stop survives the structural zeros") {
        TransferOptions ad;
        ad.K_max = 64;
        ad.tol_rel = 1e-12;
        auto ea = transfer_eval(v, 10, cplx(0.0, 0.0), ad);
        // must not bail out inside the vanishing prefix of the off-diagonal
        REQUIRE(ea.depth > 9);
        REQUIRE(std::abs(ea.beta_plus) > 0.0);
        REQUIRE(ea.tail_bound < 1e-12 * std::abs(ea.alpha));
    }
}

TEST_CASE("conjugation symmetry for real potentials", "[functionals]") {
    for (auto v : {FourierPotential::mathieu(), FourierPotential::sawtooth_smooth(0)}) {
        for (double zr : {0.0, 0.7, -1.1}) {
            auto ev = transfer_eval(v, 9, cplx(zr, 0.0));
            REQUIRE(std::abs(ev.beta_minus - std::conj(ev.beta_plus)) <
                    1e-14 * std::max(1.0, std::abs(ev.beta_plus)));
        }
    }
}

TEST_CASE("truncation radius defaults and growth stability", "[functionals]") {
    REQUIRE(default_radius(FourierPotential::sawtooth_smooth(0), 10, 64) == 80);
    // finite support widens the window so no admissible chain is cut
    REQUIRE(default_radius(FourierPotential::mathieu(), 10, 64) ==
            10 + 66LL * 2 + 4);

    SECTION("enlarging J moves the result by less than the tail bound") {
        for (int n : {5, 10, 20}) {
            auto v = FourierPotential::sawtooth_smooth(0);
            TransferOptions a, b;
            a.J = 16LL * n;
            b.J = 16LL * n + 2 * n;
            auto ea = transfer_eval(v, n, cplx(0.0, 0.0), a);
            auto eb = transfer_eval(v, n, cplx(0.0, 0.0), b);
            double window_escape = 1.0 / std::pow(double(a.J), 2); // new couplings
            REQUIRE(std::abs(ea.beta_plus - eb.beta_plus) <=
                    ea.tail_bound + window_escape);
            REQUIRE(std::abs(ea.alpha - eb.alpha) <= ea.tail_bound + window_escape);
        }
        // full-support windows: nothing can escape, values are unchanged
        auto v = FourierPotential::mathieu();
        TransferOptions a, b;
        b.J = default_radius(v, 10, 64) + 20;
        auto ea = transfer_eval(v, 10, cplx(0.0, 0.0), a);
        auto eb = transfer_eval(v, 10, cplx(0.0, 0.0), b);
        REQUIRE(std::abs(ea.beta_plus - eb.beta_plus) <= 1e-16);
        REQUIRE(std::abs(ea.alpha - eb.alpha) <= 1e-16);
    }
}

TEST_CASE("transfer evaluation guards", "[functionals]") {
    auto v = FourierPotential::mathieu();
    REQUIRE_THROWS_AS(transfer_eval(v, 0, cplx(0, 0)), config_error);
    REQUIRE_THROWS_AS(transfer_eval(v, 8, cplx(4.1, 0.0)), config_error);
    // the closed boundary |z| = n/2 stays inside the domain
    REQUIRE_NOTHROW(transfer_eval(v, 8, cplx(4.0, 0.0)));
    REQUIRE_NOTHROW(transfer_eval(v, 8, 4.0 * std::exp(cplx(0.0, 1.0472))));
    TransferOptions small;
    small.J = 17;
    REQUIRE_THROWS_AS(transfer_eval(v, 8, cplx(0, 0), small), config_error);
    TransferOptions zero_depth;
    zero_depth.K_max = 0;
    REQUIRE_THROWS_AS(transfer_eval(v, 8, cplx(0, 0), zero_depth), config_error);
}

TEST_CASE("partial sums at fixed depth", "[functionals]") {
    auto v = FourierPotential::sawtooth_smooth(0);
    SECTION("depth zero is the bare coefficient pair") {
        auto s = partial_sigma(v, 7, cplx(0.0, 0.0), 0);
        REQUIRE(s.sigma_minus == v.coeff(-14));
        REQUIRE(s.sigma_plus == v.coeff(14));
    }
    SECTION("depth one adds the first chain term") {
        TransferOptions opt;
        opt.K_max = 1;
        opt.tol_rel = 0.0;
        opt.keep_terms = true;
        auto ev = transfer_eval(v, 7, cplx(0.0, 0.0), opt);
        auto s = partial_sigma(v, 7, cplx(0.0, 0.0), 1);
        REQUIRE(std::abs(s.sigma_minus - (v.coeff(-14) + ev.s12[0])) < 1e-16);
        REQUIRE(std::abs(s.sigma_plus - (v.coeff(14) + ev.s21[0])) < 1e-16);
    }
    SECTION("vanishing prefix of a trig polynomial") {
        auto s = partial_sigma(FourierPotential::mathieu(), 7, cplx(0.0, 0.0), 1);
        REQUIRE(s.sigma_minus == cplx(0.0, 0.0));
        REQUIRE(s.sigma_plus == cplx(0.0, 0.0));
    }
    REQUIRE_THROWS_AS(partial_sigma(v, 7, cplx(0, 0), -1), config_error);
}

TEST_CASE("inverse gap sums", "[functionals]") {
    SECTION("logarithmic bound at beta = 1") {
        for (int n : {10, 100, 1000}) {
            double s = sum_inverse_gap(n, 1.0);
            REQUIRE(s > 0.0);
            REQUIRE(s <= 2.0 * std::log(6.0 * double(n)) / double(n));
        }
    }
    SECTION("decreases in n, increases as beta drops") {
        REQUIRE(sum_inverse_gap(100, 1.0) < sum_inverse_gap(10, 1.0));
        REQUIRE(sum_inverse_gap(50, 0.8) > sum_inverse_gap(50, 1.0));
    }
    REQUIRE_THROWS_AS(sum_inverse_gap(1, 1.0), config_error);
    REQUIRE_THROWS_AS(sum_inverse_gap(10, 0.5), config_error);
    REQUIRE_THROWS_AS(sum_inverse_gap(10, 1.1), config_error);
}

TEST_CASE("weighted tail bound", "[functionals]") {
    double r = 4.0 * std::log(600.0) / 100.0;
    REQUIRE(r == Approx(0.2558772).epsilon(1e-6));
    double b = tail_bound_weighted(1.0, 1.0, 1.0, 100, 1);
    REQUIRE(b == Approx(r * r / (1.0 - r)).epsilon(1e-12));
    REQUIRE(b == Approx(0.0879871).epsilon(1e-5));
    // deeper truncation shrinks geometrically
    REQUIRE(tail_bound_weighted(1.0, 1.0, 1.0, 100, 3) == Approx(b * r * r).epsilon(1e-12));
    REQUIRE_THROWS_AS(tail_bound_weighted(30.0, 1.0, 1.0, 100, 1), compute_error);
    REQUIRE_THROWS_AS(tail_bound_weighted(-1.0, 1.0, 1.0, 100, 1), config_error);
    REQUIRE_THROWS_AS(tail_bound_weighted(1.0, 0.5, 1.0, 100, 1), config_error);
    REQUIRE_THROWS_AS(tail_bound_weighted(1.0, 1.0, 1.0, 1, 1), config_error);
}
