#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <utility>
#include <vector>

#include "common.hpp"

namespace hillspec::weights {

enum class family_t { unit, sobolev, gevrey, gevrey_over_power, log_weight, table, derived };

/// Rule-based weights are evaluated lazily with memoization up to this index;
/// beyond it evaluation is refused.
inline constexpr long long k_eval_limit = 1LL << 21;

/// Even two-sided weight sequence Omega(k), k in 2Z, with Omega(0) = 1.
/// Values are kept in the log domain: h(k) = log Omega(k). All families are
/// symmetric in k, so only |k| matters.
class WeightSeq {
public:
    WeightSeq() { *this = unit(); }

    static WeightSeq unit() {
        return WeightSeq(family_t::unit, "unit", k_eval_limit,
                         [](long long) { return 0.0; });
    }

    static WeightSeq sobolev(double a) {
        return WeightSeq(family_t::sobolev, "sobolev:a=" + detail::num_str(a),
                         k_eval_limit, [a](long long k) {
                             return k == 0 ? 0.0 : a * std::log(double(k));
                         });
    }

    static WeightSeq gevrey(double c, double gamma) {
        if (!(c > 0.0) || !(gamma > 0.0) || !(gamma < 1.0))
            throw config_error("gevrey weight needs c > 0 and gamma in (0,1)");
        return WeightSeq(family_t::gevrey,
                         "gevrey:c=" + detail::num_str(c) + ",gamma=" + detail::num_str(gamma),
                         k_eval_limit, [c, gamma](long long k) {
                             return k == 0 ? 0.0 : c * std::pow(double(k), gamma);
                         });
    }

    /// Omega(k) = exp(c |k|^gamma) / |k|^a.
    static WeightSeq gevrey_over_power(double c, double gamma, double a) {
        if (!(c > 0.0) || !(gamma > 0.0) || !(gamma < 1.0))
            throw config_error("gevpow weight needs c > 0 and gamma in (0,1)");
        return WeightSeq(family_t::gevrey_over_power,
                         "gevpow:c=" + detail::num_str(c) + ",gamma=" + detail::num_str(gamma) +
                             ",a=" + detail::num_str(a),
                         k_eval_limit, [c, gamma, a](long long k) {
                             if (k == 0) return 0.0;
                             return c * std::pow(double(k), gamma) - a * std::log(double(k));
                         });
    }

    /// Omega(k) = log(e |k|) = 1 + log |k|.
    static WeightSeq log_weight() {
        return WeightSeq(family_t::log_weight, "log", k_eval_limit, [](long long k) {
            return k == 0 ? 0.0 : std::log1p(std::log(double(k)));
        });
    }

    /// Loads a CSV table "k,omega" with even k >= 0; the sequence is mirrored
    /// to negative k. Coverage must be contiguous in steps of 2 and the table
    /// must be positive and nondecreasing (hard requirement for tables only).
    static WeightSeq from_table(const std::string& path);

    /// num/den pointwise; used by factorize for the co-factor.
    static WeightSeq quotient(const WeightSeq& num, const WeightSeq& den) {
        WeightSeq q(family_t::derived,
                    "quotient(" + num.spec_ + "/" + den.spec_ + ")",
                    std::min(num.k_limit_, den.k_limit_),
                    [num, den](long long k) { return num.log_value(k) - den.log_value(k); });
        return q;
    }

    /// h(k) = log Omega(k). k must be even with |k| <= k_limit().
    double log_value(long long k) const {
        if (!detail::is_even(k))
            throw config_error("weight evaluated at odd index " + std::to_string(k));
        long long a = k < 0 ? -k : k;
        if (a > k_limit_)
            throw config_error("weight index " + std::to_string(k) + " beyond limit " +
                               std::to_string(k_limit_));
        if (a == 0) return 0.0;
        if (table_) return (*table_)[size_t(a / 2)];
        {
            std::lock_guard<std::mutex> lock(memo_->m);
            auto it = memo_->vals.find(a);
            if (it != memo_->vals.end()) return it->second;
        }
        double v = h_(a);
        {
            std::lock_guard<std::mutex> lock(memo_->m);
            memo_->vals.emplace(a, v);
        }
        return v;
    }

    /// Omega(k) = exp(h(k)); refuses values that overflow a double.
    double value(long long k) const {
        double h = log_value(k);
        if (h > 700.0)
            throw compute_error("weight overflow at k = " + std::to_string(k) +
                                " (log value " + detail::num_str(h) + ")");
        return std::exp(h);
    }

    family_t family() const { return family_; }
    const std::string& spec() const { return spec_; }
    long long k_limit() const { return k_limit_; }

    /// Largest even K <= k_max with Omega nondecreasing on [0, K].
    /// Diagnostic for rule families; gevrey_over_power with a > 0 dips below 1.
    long long monotone_up_to(long long k_max) const {
        double prev = 0.0;
        for (long long k = 2; k <= k_max; k += 2) {
            double h = log_value(k);
            if (h < prev - 1e-12) return k - 2;
            prev = h;
        }
        return k_max;
    }

private:
    struct memo_t {
        std::mutex m;
        std::unordered_map<long long, double> vals;
    };

    WeightSeq(family_t f, std::string spec, long long limit, std::function<double(long long)> h)
        : family_(f), spec_(std::move(spec)), k_limit_(limit), h_(std::move(h)),
          memo_(std::make_shared<memo_t>()) {}

    family_t family_;
    std::string spec_;
    long long k_limit_;
    std::function<double(long long)> h_;           // abs even index -> h
    std::shared_ptr<std::vector<double>> table_;   // table family only, h at k = 0,2,4,...
    std::shared_ptr<memo_t> memo_;
};

inline WeightSeq WeightSeq::from_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open weight table '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw config_error("empty weight table '" + path + "'");
    auto strip = [](std::string s) {
        while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
        return s;
    };
    if (strip(line) != "k,omega")
        throw config_error("weight table '" + path + "' must start with header 'k,omega'");
    std::map<long long, double> rows;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty()) continue;
        size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw config_error("weight table '" + path + "' line " + std::to_string(lineno) +
                               ": expected 'k,omega'");
        long long k = detail::parse_int(line.substr(0, comma), "weight table k");
        double om = detail::parse_double(line.substr(comma + 1), "weight table omega");
        if (!detail::is_even(k))
            throw config_error("weight table '" + path + "': odd index " + std::to_string(k));
        long long a = k < 0 ? -k : k;
        if (!(om > 0.0))
            throw config_error("weight table '" + path + "': omega must be positive at k = " +
                               std::to_string(k));
        auto [it, fresh] = rows.emplace(a, om);
        if (!fresh && std::abs(it->second - om) > 1e-14 * std::abs(om))
            throw config_error("weight table '" + path + "': conflicting values at |k| = " +
                               std::to_string(a));
    }
    if (auto it = rows.find(0); it != rows.end()) {
        if (std::abs(it->second - 1.0) > 1e-14)
            throw config_error("weight table '" + path + "': Omega(0) must be 1");
        rows.erase(it);
    }
    if (rows.empty()) throw config_error("weight table '" + path + "' has no entries");
    long long kmax = rows.rbegin()->first;
    auto tab = std::make_shared<std::vector<double>>(size_t(kmax / 2) + 1, 0.0);
    double prev = 1.0;
    for (long long k = 2; k <= kmax; k += 2) {
        auto it = rows.find(k);
        if (it == rows.end())
            throw config_error("weight table '" + path + "': missing k = " + std::to_string(k) +
                               " (coverage must be contiguous)");
        if (it->second < prev * (1.0 - 1e-14))
            throw config_error("weight table '" + path + "': not nondecreasing at k = " +
                               std::to_string(k));
        (*tab)[size_t(k / 2)] = std::log(it->second);
        prev = it->second;
    }
    WeightSeq w(family_t::table, "table:" + path, kmax,
                [](long long) { return 0.0; });
    w.table_ = tab;
    return w;
}

/// Parses the weight mini-language:
///   unit | sobolev:a=<f64> | gevrey:c=<f64>,gamma=<f64>
///   | gevpow:c=<f64>,gamma=<f64>,a=<f64> | log | table:<path>
inline WeightSeq parse_weight_spec(const std::string& spec) {
    size_t colon = spec.find(':');
    std::string fam = spec.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto need = [&](const std::map<std::string, std::string>& p,
                    const std::string& key) -> double {
        auto it = p.find(key);
        if (it == p.end())
            throw config_error("weight spec '" + spec + "' missing parameter '" + key + "'");
        return detail::parse_double(it->second, "weight spec");
    };
    auto check_extra = [&](const std::map<std::string, std::string>& p,
                           std::initializer_list<const char*> allowed) {
        for (const auto& [k, v] : p)
            if (std::find_if(allowed.begin(), allowed.end(),
                             [&](const char* a) { return k == a; }) == allowed.end())
                throw config_error("weight spec '" + spec + "': unknown parameter '" + k + "'");
    };
    if (fam == "unit" || fam == "log") {
        if (!rest.empty())
            throw config_error("weight family '" + fam + "' takes no parameters");
        return fam == "unit" ? WeightSeq::unit() : WeightSeq::log_weight();
    }
    if (fam == "table") {
        if (rest.empty()) throw config_error("table weight needs a path");
        return WeightSeq::from_table(rest);
    }
    auto params = detail::parse_params(rest, "weight spec '" + spec + "'");
    if (fam == "sobolev") {
        check_extra(params, {"a"});
        return WeightSeq::sobolev(need(params, "a"));
    }
    if (fam == "gevrey") {
        check_extra(params, {"c", "gamma"});
        return WeightSeq::gevrey(need(params, "c"), need(params, "gamma"));
    }
    if (fam == "gevpow") {
        check_extra(params, {"c", "gamma", "a"});
        return WeightSeq::gevrey_over_power(need(params, "c"), need(params, "gamma"),
                                            need(params, "a"));
    }
    throw config_error("unknown weight family '" + fam + "'");
}

// ---------------------------------------------------------------------------
// checks

struct SubmultReport {
    enum class kind_t { exact, almost, fail } kind;
    double C;               // exp(max defect), 1.0 when exact
    double max_defect;      // max of h(k+m) - h(k) - h(m)
    long long wit_k, wit_m; // attaining pair
    long long k_max;
    double last_octave_growth; // relative growth of C in the top octave
};

/// Scans even pairs 2 <= k <= m with k + m <= 2 k_max. "exact" means the
/// defect never exceeds zero (1e-10 slack); "almost" a finite plateaued C;
/// "fail" when C still grows by more than 5% in the last octave.
inline SubmultReport submultiplicativity_check(const WeightSeq& W, long long k_max) {
    if (k_max < 8) throw config_error("submultiplicativity check needs k_max >= 8");
    if (2 * k_max > W.k_limit())
        throw config_error("submultiplicativity check needs evaluations up to 2*k_max");
    double best = -std::numeric_limits<double>::infinity();
    double best_half = best;
    long long wk = 0, wm = 0;
    std::vector<double> h(size_t(2 * k_max) + 1, 0.0);
    for (long long k = 2; k <= 2 * k_max; k += 2)
        h[size_t(k)] = W.log_value(k);
    for (long long k = 2; k <= k_max; k += 2) {
        for (long long m = k; m <= k_max; m += 2) {
            double d = h[size_t(k + m)] - h[size_t(k)] - h[size_t(m)];
            if (d > best) { best = d; wk = k; wm = m; }
            if (k + m <= k_max && d > best_half) best_half = d;
        }
    }
    SubmultReport r;
    r.max_defect = best;
    r.wit_k = wk;
    r.wit_m = wm;
    r.k_max = k_max;
    r.last_octave_growth =
        std::isfinite(best_half) ? std::exp(best - best_half) - 1.0 : 0.0;
    if (best <= 1e-10) {
        r.kind = SubmultReport::kind_t::exact;
        r.C = 1.0;
    } else {
        r.C = std::exp(best);
        r.kind = r.last_octave_growth > 0.05 ? SubmultReport::kind_t::fail
                                             : SubmultReport::kind_t::almost;
    }
    return r;
}

struct SlowIncreaseReport {
    double A;              // sup Omega(2k)/Omega(k) on the scanned range
    long long attained_k;
    bool diverging;        // still growing >5% in the top octave
    std::vector<std::pair<long long, double>> octave_max; // (k block start, block max ratio)
};

inline SlowIncreaseReport slow_increase_constant(const WeightSeq& W, long long k_max) {
    if (k_max < 8) throw config_error("slow increase check needs k_max >= 8");
    double best = -std::numeric_limits<double>::infinity();
    double best_half = best;
    long long at = 0;
    SlowIncreaseReport r;
    long long block = 2;
    double block_best = -std::numeric_limits<double>::infinity();
    for (long long k = 2; k <= k_max / 2; k += 2) {
        double d = W.log_value(2 * k) - W.log_value(k);
        if (d > best) { best = d; at = k; }
        if (k <= k_max / 4 && d > best_half) best_half = d;
        if (k >= 2 * block) {
            r.octave_max.emplace_back(block, std::exp(block_best));
            block *= 2;
            block_best = -std::numeric_limits<double>::infinity();
        }
        block_best = std::max(block_best, d);
    }
    if (std::isfinite(block_best)) r.octave_max.emplace_back(block, std::exp(block_best));
    r.A = std::exp(best);
    r.attained_k = at;
    r.diverging = std::isfinite(best_half) && std::exp(best - best_half) > 1.05;
    return r;
}

struct SubexpReport {
    double estimate; // h(k_max)/k_max
    std::vector<std::pair<long long, double>> octave_values; // (2^j, h(2^j)/2^j)
};

/// Subexponential type estimate h(k)/k along dyadic k; tends to 0 exactly for
/// weights of subexponential growth.
inline SubexpReport subexponential_type(const WeightSeq& W, long long k_max) {
    if (k_max < 16) throw config_error("subexponential check needs k_max >= 16");
    SubexpReport r;
    for (long long k = 8; 2 * k <= k_max; k *= 2)
        r.octave_values.emplace_back(k, W.log_value(k) / double(k));
    long long last = k_max - (k_max % 2);
    r.estimate = W.log_value(last) / double(last);
    r.octave_values.emplace_back(last, r.estimate);
    return r;
}

struct ConcavityReport {
    bool pass;
    long long first_violation_k; // 0 when pass
    double max_defect;           // max second difference of h
};

inline ConcavityReport concavity_check(const WeightSeq& W, long long k_from, long long k_max) {
    if (k_from < 2 || k_max < k_from + 4)
        throw config_error("concavity check needs 2 <= k_from and k_max >= k_from + 4");
    ConcavityReport r{true, 0, -std::numeric_limits<double>::infinity()};
    for (long long k = k_from; k + 4 <= k_max; k += 2) {
        double d = W.log_value(k + 4) - 2.0 * W.log_value(k + 2) + W.log_value(k);
        if (d > r.max_defect) r.max_defect = d;
        if (d > 1e-12 && r.pass) {
            r.pass = false;
            r.first_violation_k = k;
        }
    }
    return r;
}

struct FactorizationReport {
    WeightSeq omega;
    WeightSeq omega_tilde;       // W / omega
    double A;                    // slow increase constant of omega
    bool omega_diverging;
    double M;                    // sum over even k != 0 of 1/(|k| omega(k)), with tail
    double M_partial;
    double tail;
    bool converged;              // tail < 1e-6 * partial
    SubmultReport tilde_submult;
};

/// Splits W = omega * (W/omega) and checks the pair: omega must increase
/// slowly with a convergent mass sum M, the co-factor should be (almost)
/// submultiplicative.
inline FactorizationReport factorize(const WeightSeq& W, const WeightSeq& omega,
                                     long long k_max) {
    if (k_max < 64) throw config_error("factorize needs k_max >= 64");
    k_max -= k_max % 2;
    FactorizationReport r{omega, WeightSeq::quotient(W, omega), 0.0, false,
                          0.0, 0.0, 0.0, false,
                          SubmultReport{}};
    auto slow = slow_increase_constant(omega, std::min(k_max, omega.k_limit() / 2));
    r.A = slow.A;
    r.omega_diverging = slow.diverging;

    detail::kahan acc;
    for (long long k = 2; k <= k_max; k += 2)
        acc.add(2.0 / (double(k) * omega.value(k)));
    r.M_partial = acc.value();

    auto term = [&](long long k) { return 1.0 / (double(k) * omega.value(k)); };
    double ratio = term(k_max / 2) / term(k_max);
    double a_eff = std::log2(ratio) - 1.0;
    if (a_eff <= 0.0)
        throw compute_error("factorize: mass sum for omega diverges on the scanned range");
    r.tail = term(k_max) * double(k_max) / a_eff;
    r.M = r.M_partial + r.tail;
    r.converged = r.tail < 1e-6 * r.M_partial;

    r.tilde_submult = submultiplicativity_check(r.omega_tilde, std::min(k_max, 2048LL));
    return r;
}

inline std::string to_string(SubmultReport::kind_t k) {
    switch (k) {
        case SubmultReport::kind_t::exact: return "exact";
        case SubmultReport::kind_t::almost: return "almost";
        default: return "fail";
    }
}

} // namespace hillspec::weights
