#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hillspec {

using cplx = std::complex<double>;

/// Invalid specification, malformed input file or parameter outside its
/// documented domain. The CLI maps this to exit code 2.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: non-convergent series or iteration, unstable matrix
/// oracle, violated post-condition. The CLI maps this to exit code 3.
struct compute_error : std::runtime_error {
    explicit compute_error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

/// Compensated (Kahan) accumulator for long real sums.
class kahan {
public:
    void add(double x) {
        double y = x - c_;
        double t = sum_ + y;
        c_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

inline bool is_even(long long k) { return (k % 2) == 0; }

/// Shortest round-trip decimal form of a double.
inline std::string num_str(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s, const std::string& ctx) {
    double v{};
    const char* b = s.data();
    const char* e = b + s.size();
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e)
        throw config_error("invalid number '" + s + "' in " + ctx);
    return v;
}

inline long long parse_int(const std::string& s, const std::string& ctx) {
    long long v{};
    const char* b = s.data();
    const char* e = b + s.size();
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e)
        throw config_error("invalid integer '" + s + "' in " + ctx);
    return v;
}

/// Splits "key=value,key=value" where values never contain commas.
inline std::map<std::string, std::string> parse_params(const std::string& s,
                                                       const std::string& ctx) {
    std::map<std::string, std::string> out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t comma = s.find(',', pos);
        std::string item = s.substr(pos, comma == std::string::npos ? std::string::npos
                                                                    : comma - pos);
        size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw config_error("expected key=value in " + ctx + ", got '" + item + "'");
        out[item.substr(0, eq)] = item.substr(eq + 1);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

/// Splits a parameter list whose values may themselves contain ':' and ','
/// (nested specs). A new entry starts only where a known key is followed
/// by '=' at the start of the string or right after a comma.
inline std::map<std::string, std::string> split_keyed(
    const std::string& s, const std::vector<std::string>& keys, const std::string& ctx) {
    std::map<std::string, std::string> out;
    std::string cur_key;
    size_t val_begin = 0;
    size_t pos = 0;
    auto flush = [&](size_t end) {
        if (cur_key.empty()) return;
        out[cur_key] = s.substr(val_begin, end - val_begin);
    };
    while (pos <= s.size()) {
        bool boundary = (pos == 0) || (pos > 0 && pos <= s.size() && s[pos - 1] == ',');
        if (boundary) {
            for (const auto& key : keys) {
                if (s.compare(pos, key.size(), key) == 0 &&
                    pos + key.size() < s.size() && s[pos + key.size()] == '=') {
                    flush(pos == 0 ? 0 : pos - 1);
                    cur_key = key;
                    val_begin = pos + key.size() + 1;
                    break;
                }
            }
            if (pos == 0 && cur_key.empty())
                throw config_error("expected one of the keys for " + ctx + " in '" + s + "'");
        }
        ++pos;
    }
    flush(s.size());
    return out;
}

} // namespace detail
} // namespace hillspec
