#pragma once

#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "common.hpp"
#include "weights.hpp"

namespace hillspec::potentials {

enum class family_t {
    trig_table, sawtooth_smooth, mathieu, example1, example2, ex1, ex2,
    singular_from_q, alpha_class
};

/// Named nonnegative coefficient rule used by the ex1/ex2/alpha constructions:
///   "1/log"     -> 1/log(arg + 2)
///   "1/sqrt"    -> 1/sqrt(arg + 2)
///   "const:<c>" -> c  (c >= 0)
class Rule {
public:
    static Rule inv_log() {
        return Rule("1/log", [](long long p) { return 1.0 / std::log(double(p) + 2.0); });
    }
    static Rule inv_sqrt() {
        return Rule("1/sqrt", [](long long p) { return 1.0 / std::sqrt(double(p) + 2.0); });
    }
    static Rule constant(double c) {
        if (!(c >= 0.0)) throw config_error("const rule needs c >= 0");
        return Rule("const:" + detail::num_str(c), [c](long long) { return c; });
    }
    static Rule parse(const std::string& s) {
        if (s == "1/log") return inv_log();
        if (s == "1/sqrt") return inv_sqrt();
        if (s.rfind("const:", 0) == 0)
            return constant(detail::parse_double(s.substr(6), "const rule"));
        throw config_error("unknown coefficient rule '" + s + "'");
    }

    double operator()(long long arg) const { return f_(arg); }
    const std::string& spec() const { return spec_; }

private:
    Rule(std::string spec, std::function<double(long long)> f)
        : spec_(std::move(spec)), f_(std::move(f)) {}
    std::string spec_;
    std::function<double(long long)> f_;
};

/// A potential given through its Fourier coefficients V(k), k in 2Z, for the
/// convention v(x) = sum V(k) exp(ikx) on [0, pi].
class FourierPotential {
public:
    /// v = 2 cos 2x: V(2) = V(-2) = 1.
    static FourierPotential mathieu() {
        return FourierPotential(family_t::mathieu, "mathieu", 2,
                                [](long long k) {
                                    return (k == 2 || k == -2) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
                                });
    }

    /// m-fold antiderivative chain of the sawtooth x - pi/2:
    /// V(k) = (i/k)(ik)^{-m}, V(0) = 0.
    static FourierPotential sawtooth_smooth(int m) {
        if (m < 0) throw config_error("sawtooth smoothing order must be >= 0");
        return FourierPotential(
            family_t::sawtooth_smooth, "sawtooth:m=" + std::to_string(m), std::nullopt,
            [m](long long k) {
                if (k == 0) return cplx(0.0, 0.0);
                cplx ik(0.0, double(k));
                return (cplx(0.0, 1.0) / double(k)) * std::pow(ik, -double(m));
            });
    }

    static FourierPotential from_trig_table(const std::string& path);

    /// V(k) = eta(k)/Omega(k) with eta(2n) = log(n)/n and eta(-2n) equal to
    /// log(n)/n for even n but log(n)^2/n for odd n.
    static FourierPotential example1(const weights::WeightSeq& omega) {
        return FourierPotential(
            family_t::example1, "example1:omega=" + omega.spec(), std::nullopt,
            [omega](long long k) {
                if (k == 0) return cplx(0.0, 0.0);
                long long n = (k < 0 ? -k : k) / 2;
                double eta;
                if (k > 0)
                    eta = std::log(double(n)) / double(n);
                else
                    eta = (n % 2 == 0) ? std::log(double(n)) / double(n)
                                       : std::pow(std::log(double(n)), 2) / double(n);
                return cplx(eta / omega.value(k), 0.0);
            });
    }

    /// V(2n) = 1; V(-2n) = 1/sqrt(n) for even n, 1 for odd n; V(0) = 0.
    static FourierPotential example2() {
        return FourierPotential(family_t::example2, "example2", std::nullopt,
                                [](long long k) {
                                    if (k == 0) return cplx(0.0, 0.0);
                                    if (k > 0) return cplx(1.0, 0.0);
                                    long long n = -k / 2;
                                    return (n % 2 == 0) ? cplx(1.0 / std::sqrt(double(n)), 0.0)
                                                        : cplx(1.0, 0.0);
                                });
    }

    /// Antiperiodic Riesz-basis construction:
    /// V(+-2) = +-1/Omega(2), V(+-4p) = +-1/Omega(4p),
    /// V(4p+2) = xi_p/(p Omega(4p+2)), V(-4p-2) = -eta_p/(p Omega(4p+2)).
    static FourierPotential ex1(const weights::WeightSeq& omega, Rule xi, Rule eta) {
        std::string spec = "ex1:omega=" + omega.spec() + ",xi=" + xi.spec() +
                           ",eta=" + eta.spec();
        return FourierPotential(
            family_t::ex1, std::move(spec), std::nullopt,
            [omega, xi, eta](long long k) {
                if (k == 0) return cplx(0.0, 0.0);
                long long a = k < 0 ? -k : k;
                if (a % 4 == 0 || a == 2) {
                    double val = 1.0 / omega.value(a);
                    return cplx(k > 0 ? val : -val, 0.0);
                }
                long long p = (a - 2) / 4;
                if (p < 1) return cplx(0.0, 0.0);
                if (k > 0) return cplx(xi(p) / (double(p) * omega.value(a)), 0.0);
                return cplx(-eta(p) / (double(p) * omega.value(a)), 0.0);
            });
    }

    /// No-basis variant of ex1: the positive side of the 4p lattice is damped
    /// by 1/log(4p), breaking the two-sided comparability.
    static FourierPotential ex2(const weights::WeightSeq& omega, Rule xi, Rule eta) {
        std::string spec = "ex2:omega=" + omega.spec() + ",xi=" + xi.spec() +
                           ",eta=" + eta.spec();
        return FourierPotential(
            family_t::ex2, std::move(spec), std::nullopt,
            [omega, xi, eta](long long k) {
                if (k == 0) return cplx(0.0, 0.0);
                long long a = k < 0 ? -k : k;
                if (a == 2) {
                    double val = 1.0 / omega.value(2);
                    return cplx(k > 0 ? val : -val, 0.0);
                }
                if (a % 4 == 0) {
                    if (k > 0) return cplx(1.0 / (std::log(double(a)) * omega.value(a)), 0.0);
                    return cplx(-1.0 / omega.value(a), 0.0);
                }
                long long p = (a - 2) / 4;
                if (p < 1) return cplx(0.0, 0.0);
                if (k > 0)
                    return cplx(xi(p) / (double(p) * std::log(4.0 * double(p)) * omega.value(a)),
                                0.0);
                return cplx(-eta(p) / (double(p) * omega.value(a)), 0.0);
            });
    }

    /// v = Q' distributionally: V(k) = i k Q(k) from a CSV table of Q.
    static FourierPotential singular_from_qfile(const std::string& path);

    /// V(k) = |k|^alpha q(k), q(k) = rule(|k|)/Omega(k), alpha in (0, 1/2).
    static FourierPotential alpha_class(double alpha, const weights::WeightSeq& omega, Rule q) {
        if (!(alpha > 0.0) || !(alpha < 0.5))
            throw config_error("alpha class needs alpha in (0, 1/2)");
        std::string spec = "alpha:alpha=" + detail::num_str(alpha) +
                           ",omega=" + omega.spec() + ",q=" + q.spec();
        return FourierPotential(
            family_t::alpha_class, std::move(spec), std::nullopt,
            [alpha, omega, q](long long k) {
                if (k == 0) return cplx(0.0, 0.0);
                long long a = k < 0 ? -k : k;
                return cplx(std::pow(double(a), alpha) * q(a) / omega.value(a), 0.0);
            });
    }

    /// V(k); k must be even.
    cplx coeff(long long k) const {
        if (!detail::is_even(k))
            throw config_error("potential coefficient at odd index " + std::to_string(k));
        if (support_ && (k > *support_ || k < -*support_)) return cplx(0.0, 0.0);
        return v_(k);
    }

    /// Q(k) = V(k)/(ik) for k != 0; the primitive in the singular picture.
    cplx q_coeff(long long k) const {
        if (k == 0) return cplx(0.0, 0.0);
        if (q_) return (*q_)(k);
        return coeff(k) / (cplx(0.0, 1.0) * double(k));
    }

    std::optional<long long> support() const { return support_; }
    family_t family() const { return family_; }
    const std::string& spec() const { return spec_; }

    /// True when V(-k) = conj(V(k)) on the scanned range (real-valued v).
    bool is_hermitian(long long k_scan = 256) const {
        for (long long k = 2; k <= k_scan; k += 2) {
            cplx d = coeff(-k) - std::conj(coeff(k));
            double s = std::abs(coeff(k)) + std::abs(coeff(-k));
            if (std::abs(d) > 1e-12 * std::max(1.0, s)) return false;
        }
        return true;
    }

private:
    FourierPotential(family_t f, std::string spec, std::optional<long long> support,
                     std::function<cplx(long long)> v)
        : family_(f), spec_(std::move(spec)), support_(support), v_(std::move(v)) {}

    family_t family_;
    std::string spec_;
    std::optional<long long> support_;
    std::function<cplx(long long)> v_;
    std::shared_ptr<std::function<cplx(long long)>> q_;
};

namespace detail2 {

inline std::map<long long, cplx> load_coeff_csv(const std::string& path,
                                                const char* header) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open coefficient table '" + path + "'");
    std::string line;
    auto strip = [](std::string s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
        return s;
    };
    if (!std::getline(in, line) || strip(line) != header)
        throw config_error("coefficient table '" + path + "' must start with header '" +
                           std::string(header) + "'");
    std::map<long long, cplx> rows;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty()) continue;
        size_t c1 = line.find(',');
        size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c2 == std::string::npos)
            throw config_error("coefficient table '" + path + "' line " +
                               std::to_string(lineno) + ": expected three columns");
        long long k = hillspec::detail::parse_int(line.substr(0, c1), "coefficient k");
        double re = hillspec::detail::parse_double(line.substr(c1 + 1, c2 - c1 - 1),
                                                   "coefficient re");
        double im = hillspec::detail::parse_double(line.substr(c2 + 1), "coefficient im");
        if (!hillspec::detail::is_even(k))
            throw config_error("coefficient table '" + path + "': odd index " +
                               std::to_string(k));
        if (!rows.emplace(k, cplx(re, im)).second)
            throw config_error("coefficient table '" + path + "': duplicate k = " +
                               std::to_string(k));
    }
    return rows;
}

} // namespace detail2

inline FourierPotential FourierPotential::from_trig_table(const std::string& path) {
    auto rows = detail2::load_coeff_csv(path, "k,re,im");
    long long bound = 0;
    for (const auto& [k, v] : rows) bound = std::max(bound, k < 0 ? -k : k);
    auto table = std::make_shared<std::map<long long, cplx>>(std::move(rows));
    return FourierPotential(family_t::trig_table, "trig:" + path, bound,
                            [table](long long k) {
                                auto it = table->find(k);
                                return it == table->end() ? cplx(0.0, 0.0) : it->second;
                            });
}

inline FourierPotential FourierPotential::singular_from_qfile(const std::string& path) {
    auto rows = detail2::load_coeff_csv(path, "k,re,im");
    long long bound = 0;
    for (const auto& [k, v] : rows) bound = std::max(bound, k < 0 ? -k : k);
    auto table = std::make_shared<std::map<long long, cplx>>(std::move(rows));
    FourierPotential p(family_t::singular_from_q, "qfile:" + path, bound,
                       [table](long long k) {
                           auto it = table->find(k);
                           if (it == table->end() || k == 0) return cplx(0.0, 0.0);
                           return cplx(0.0, 1.0) * double(k) * it->second;
                       });
    p.q_ = std::make_shared<std::function<cplx(long long)>>(
        [table](long long k) {
            auto it = table->find(k);
            return it == table->end() ? cplx(0.0, 0.0) : it->second;
        });
    return p;
}

// ---------------------------------------------------------------------------

struct WeightedNormReport {
    double norm;            // sup over 0 < |k| <= k_max of |V(k)| Omega(k)
    long long attained_k;   // signed k attaining the sup
    std::vector<std::pair<long long, double>> r_samples;  // dyadic samples of |V| Omega
    std::vector<std::pair<long long, double>> tail_sup;   // m -> sup_{|k| >= m} |V| Omega
    bool decays_to_zero;    // tail sup at k_max/2 under 5% of the norm
};

inline WeightedNormReport weighted_norm(const FourierPotential& v,
                                        const weights::WeightSeq& W, long long k_max) {
    if (k_max < 8) throw config_error("weighted norm needs k_max >= 8");
    k_max -= k_max % 2;
    std::vector<double> r(size_t(k_max / 2) + 1, 0.0); // index |k|/2, max over signs
    WeightedNormReport rep;
    rep.norm = 0.0;
    rep.attained_k = 0;
    for (long long k = 2; k <= k_max; k += 2) {
        double om = W.value(k);
        double rp = std::abs(v.coeff(k)) * om;
        double rm = std::abs(v.coeff(-k)) * om;
        r[size_t(k / 2)] = std::max(rp, rm);
        if (rp > rep.norm) { rep.norm = rp; rep.attained_k = k; }
        if (rm > rep.norm) { rep.norm = rm; rep.attained_k = -k; }
    }
    // suffix suprema at dyadic marks
    std::vector<double> suffix(r.size() + 1, 0.0);
    for (size_t i = r.size(); i-- > 1;)
        suffix[i] = std::max(r[i], suffix[i + 1]);
    for (long long m = 2; m <= k_max; m *= 2) {
        rep.r_samples.emplace_back(m, r[size_t(m / 2)]);
        rep.tail_sup.emplace_back(m, suffix[size_t(m / 2)]);
    }
    double half_tail = suffix[size_t(k_max / 4)];
    rep.decays_to_zero = half_tail <= 0.05 * rep.norm;
    return rep;
}

/// Partial Fourier sum at the given points, harmonics |k| <= k_max.
inline std::vector<cplx> sample(const FourierPotential& v, const std::vector<double>& x,
                                long long k_max) {
    long long bound = k_max;
    if (v.support()) bound = std::min(bound, *v.support());
    std::vector<cplx> out(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        detail::kahan re, im;
        cplx v0 = v.coeff(0);
        re.add(v0.real());
        im.add(v0.imag());
        for (long long k = 2; k <= bound; k += 2) {
            for (long long s : {k, -k}) {
                cplx term = v.coeff(s) * std::exp(cplx(0.0, double(s) * x[i]));
                re.add(term.real());
                im.add(term.imag());
            }
        }
        out[i] = cplx(re.value(), im.value());
    }
    return out;
}

/// Parses the potential mini-language:
///   mathieu | sawtooth:m=<int> | trig:<path> | example1[:omega=<weightspec>]
///   | example2 | ex1:omega=<weightspec>[,xi=<rule>,eta=<rule>] | ex2:...
///   | alpha:alpha=<f64>,omega=<weightspec>,q=<rule> | qfile:<path>
/// Nested weight specs are consumed up to the next top-level key.
inline FourierPotential parse_potential_spec(const std::string& spec) {
    size_t colon = spec.find(':');
    std::string fam = spec.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);

    if (fam == "mathieu") {
        if (!rest.empty()) throw config_error("mathieu takes no parameters");
        return FourierPotential::mathieu();
    }
    if (fam == "example2") {
        if (!rest.empty()) throw config_error("example2 takes no parameters");
        return FourierPotential::example2();
    }
    if (fam == "sawtooth") {
        long long m = 0;
        if (!rest.empty()) {
            auto p = detail::parse_params(rest, "sawtooth spec");
            if (p.size() != 1 || !p.count("m"))
                throw config_error("sawtooth takes only m=<int>");
            m = detail::parse_int(p["m"], "sawtooth m");
        }
        return FourierPotential::sawtooth_smooth(int(m));
    }
    if (fam == "trig") {
        if (rest.empty()) throw config_error("trig potential needs a path");
        return FourierPotential::from_trig_table(rest);
    }
    if (fam == "qfile") {
        if (rest.empty()) throw config_error("qfile potential needs a path");
        return FourierPotential::singular_from_qfile(rest);
    }
    if (fam == "example1") {
        // pinned default weight for the weighted-space example
        if (rest.empty())
            return FourierPotential::example1(
                weights::WeightSeq::gevrey_over_power(1.0, 0.5, 1.1));
        auto kv = detail::split_keyed(rest, {"omega"}, "example1 spec");
        return FourierPotential::example1(weights::parse_weight_spec(kv.at("omega")));
    }
    if (fam == "ex1" || fam == "ex2") {
        auto kv = detail::split_keyed(rest, {"omega", "xi", "eta"}, fam + " spec");
        if (!kv.count("omega")) throw config_error(fam + " needs omega=<weightspec>");
        auto omega = weights::parse_weight_spec(kv.at("omega"));
        Rule xi = kv.count("xi") ? Rule::parse(kv.at("xi")) : Rule::inv_log();
        Rule eta = kv.count("eta") ? Rule::parse(kv.at("eta")) : Rule::inv_log();
        return fam == "ex1" ? FourierPotential::ex1(omega, xi, eta)
                            : FourierPotential::ex2(omega, xi, eta);
    }
    if (fam == "alpha") {
        auto kv = detail::split_keyed(rest, {"alpha", "omega", "q"}, "alpha spec");
        if (!kv.count("alpha") || !kv.count("omega") || !kv.count("q"))
            throw config_error("alpha potential needs alpha=, omega=, q=");
        return FourierPotential::alpha_class(
            detail::parse_double(kv.at("alpha"), "alpha"),
            weights::parse_weight_spec(kv.at("omega")), Rule::parse(kv.at("q")));
    }
    throw config_error("unknown potential family '" + fam + "'");
}

} // namespace hillspec::potentials
