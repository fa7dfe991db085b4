#include "hierfed/cost.hpp"

#include <algorithm>
#include <sstream>

namespace hierfed {

using boost::multiprecision::cpp_int;

namespace {

cpp_int pow10(int e) {
    cpp_int p = 1;
    for (int i = 0; i < e; ++i) p *= 10;
    return p;
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

/// z + nu_i over nu_i, i.e. |Gamma_i| / (|Gamma_i| - z).
Rational share_factor(const Topology& t, std::size_t client) {
    return Rational(static_cast<long long>(t.gamma(client).size()), static_cast<long long>(t.nu(client)));
}

/// Symbols a client puts on UE-to-BS links for its shares.
std::uint64_t padded_share_cost(std::size_t z, std::size_t nu, std::size_t d) {
    return static_cast<std::uint64_t>(z + nu) * ceil_div(d, nu);
}

}  // namespace

std::string to_decimal(const Rational& value, int significant) {
    if (value == 0) return "0";
    if (value < 0) return "-" + to_decimal(-value, significant);
    const cpp_int num = boost::multiprecision::numerator(value);
    const cpp_int den = boost::multiprecision::denominator(value);

    // e = floor(log10(value))
    int e = 0;
    if (num >= den) {
        cpp_int ip = num / den;
        while (ip >= 10) {
            ip /= 10;
            ++e;
        }
    } else {
        cpp_int scaled = num;
        while (scaled < den) {
            scaled *= 10;
            --e;
        }
    }
    const int k = significant - 1 - e;  // decimal places kept
    cpp_int n = num;
    cpp_int dd = den;
    if (k >= 0) {
        n *= pow10(k);
    } else {
        dd *= pow10(-k);
    }
    cpp_int digits = (2 * n + dd) / (2 * dd);  // round half up

    std::string s = digits.str();
    if (k <= 0) return s + std::string(static_cast<std::size_t>(-k), '0');
    if (s.size() <= static_cast<std::size_t>(k)) s.insert(0, static_cast<std::size_t>(k) - s.size() + 1, '0');
    s.insert(s.size() - static_cast<std::size_t>(k), ".");
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
    return s;
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

std::uint64_t predict_c_ue(const Topology& t, std::size_t d) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < t.n_clients(); ++i) total += padded_share_cost(t.z_bs(), t.nu(i), d) + d;
    return total;
}

std::uint64_t predict_c_bs(const Topology& t, std::size_t d) { return static_cast<std::uint64_t>(d) * (t.n_bs() - 1); }

std::uint64_t predict_c_bsf(const Topology& t, std::size_t d) {
    std::uint64_t total = d;
    for (const auto& p : group_by_pattern(t)) {
        total += padded_share_cost(t.z_bs(), p.pattern.size() - t.z_bs(), d);
    }
    return total;
}

Rational predict_c_min(const Topology& t, std::size_t d) {
    Rational sum = 0;
    Rational max = 0;
    for (std::size_t i = 0; i < t.n_clients(); ++i) {
        const Rational f = share_factor(t, i);
        sum += f;
        max = std::max(max, f);
    }
    return Rational(static_cast<long long>(d)) * (max + sum);
}

Rational predict_c_min_curve(std::size_t n_clients, std::size_t n_bs, std::size_t z_bs, std::size_t nu,
                              std::size_t d) {
    const Rational nd = Rational(static_cast<long long>(n_clients)) * static_cast<long long>(d);
    return nd * (Rational(static_cast<long long>(z_bs + nu), static_cast<long long>(nu)) +
                 Rational(static_cast<long long>(n_bs), static_cast<long long>(n_clients)));
}

LooseBounds predict_loose_bounds(std::size_t n_clients, std::size_t n_bs, std::size_t z_bs, std::size_t d) {
    if (z_bs >= n_bs) throw CostError("loose bounds need z_bs < B");
    const auto n = static_cast<long long>(n_clients);
    const auto b = static_cast<long long>(n_bs);
    const auto z = static_cast<long long>(z_bs);
    const Rational dd(static_cast<long long>(d));
    return {dd * (Rational(n + b) + Rational((n + 1) * b, b - z)), dd * Rational(n + b + 2 * n * (z + 1))};
}

Rational ratio_bound(std::size_t n_clients, std::size_t n_bs, std::size_t z_bs) {
    return Rational(3) + Rational(static_cast<long long>(n_bs) - static_cast<long long>(z_bs),
                                  static_cast<long long>(n_clients) + 1);
}

Rational compute_beta(const Topology& t, const CostReport& measured, std::size_t d) {
    const auto n = static_cast<long long>(t.n_clients());
    const auto b = static_cast<long long>(t.n_bs());
    const auto dd = static_cast<long long>(d);
    std::uint64_t share_sum = 0;
    for (std::size_t i = 0; i < t.n_clients(); ++i) share_sum += padded_share_cost(t.z_bs(), t.nu(i), d);
    const Rational beta = (Rational(cpp_int(measured.c_total)) - dd * n - dd * b) / Rational(cpp_int(share_sum));
    if (beta < Rational(n + 1, n) || beta > 2) {
        throw CostError("beta = " + to_decimal(beta) + " outside [(N+1)/N, 2]: cost accounting is inconsistent");
    }
    return beta;
}

CostReport measure(const MessageLog& log) {
    CostReport r;
    r.c_ue = log.symbols(LinkClass::UeToBs);
    r.c_bs = log.symbols(LinkClass::BsToBs);
    r.c_bsf = log.symbols(LinkClass::BsToFederator);
    r.c_total = r.c_ue + r.c_bs + r.c_bsf;
    return r;
}

CostReport measure(const MessageLog& log, const Topology& t) {
    CostReport r = measure(log);
    const std::size_t d = log.header().d;
    r.predicted_c_ue = predict_c_ue(t, d);
    r.predicted_c_bs = predict_c_bs(t, d);
    r.predicted_c_bsf = predict_c_bsf(t, d);
    r.c_min = predict_c_min(t, d);
    const auto loose = predict_loose_bounds(t.n_clients(), t.n_bs(), t.z_bs(), d);
    r.loose_lower = loose.lower;
    r.loose_upper = loose.upper;
    r.beta = compute_beta(t, r, d);
    Rational share_sum = 0;
    for (std::size_t i = 0; i < t.n_clients(); ++i) share_sum += share_factor(t, i);
    r.tight_value = Rational(static_cast<long long>(d)) *
                    (Rational(static_cast<long long>(t.n_clients() + t.n_bs())) + r.beta * share_sum);
    r.ratio_bound = ratio_bound(t.n_clients(), t.n_bs(), t.z_bs());
    return r;
}

std::vector<SweepRow> sweep_costs(std::size_t n_clients, std::size_t n_bs, std::size_t z_bs, std::size_t d,
                                 std::size_t nu_lo, std::size_t nu_hi) {
    if (n_clients == 0 || d == 0) throw CostError("sweep needs N >= 1 and d >= 1");
    if (nu_lo == 0 || nu_lo > nu_hi) throw CostError("sweep needs 1 <= nu_lo <= nu_hi");
    if (nu_hi + z_bs > n_bs) {
        throw CostError("infeasible nu range: nu + z_bs = " + std::to_string(nu_hi + z_bs) + " exceeds B = " +
                        std::to_string(n_bs));
    }
    const auto n = static_cast<long long>(n_clients);
    const Rational b_over_n(static_cast<long long>(n_bs), n);
    const Rational beta_min(n + 1, n);
    std::vector<SweepRow> rows;
    for (std::size_t nu = nu_lo; nu <= nu_hi; ++nu) {
        const Rational factor(static_cast<long long>(z_bs + nu), static_cast<long long>(nu));
        // Every term carries d, so normalising by N d removes it.
        SweepRow row{nu,
                     factor * beta_min,  // d (f + N f) / (N d)
                     predict_c_min_curve(n_clients, n_bs, z_bs, nu, d) / (Rational(n) * static_cast<long long>(d)),
                     1 + b_over_n + beta_min * factor,
                     1 + b_over_n + 2 * factor};
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream os;
    os << "nu,c_min_norm,tight_lower_norm,upper_norm\n";
    for (const auto& r : rows) {
        os << r.nu << ',' << to_decimal(r.c_min_norm) << ',' << to_decimal(r.tight_lower_norm) << ','
           << to_decimal(r.upper_norm) << '\n';
    }
    return os.str();
}

}  // namespace hierfed
