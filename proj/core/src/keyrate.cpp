#include "mpqkd/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mpqkd/errors.hpp"

namespace mpqkd {

double binary_entropy(double x)
{
    if (!(x >= 0.0 && x <= 1.0))
        throw InvalidArgument("binary_entropy argument outside [0, 1]");
    if (x == 0.0 || x == 1.0)
        return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

namespace {

double max_entropy(const std::vector<double>& qs)
{
    double m = 0.0;
    for (double q : qs)
        m = std::max(m, binary_entropy(q));
    return m;
}

} // namespace

double asymptotic_rate(const ErrorRates& rates)
{
    return 1.0 - binary_entropy(rates.q_x) - max_entropy(rates.q_ab);
}

KeyRateReport select_leader(const std::map<std::size_t, ErrorRates>& per_leader)
{
    if (per_leader.empty())
        throw InvalidArgument("select_leader needs at least one candidate");
    const double qx = per_leader.begin()->second.q_x;
    const ErrorRates* best = nullptr;
    std::size_t best_leader = 0;
    double best_key = 0.0;
    for (const auto& [leader, rates] : per_leader) {
        if (std::abs(rates.q_x - qx) > 1e-12)
            throw InvalidArgument("q_x differs between leader choices");
        double key = max_entropy(rates.q_ab);
        if (!best || key < best_key) {
            best = &rates;
            best_leader = leader;
            best_key = key;
        }
    }
    KeyRateReport r;
    r.leader = best_leader;
    r.rates = *best;
    r.r_asymptotic = asymptotic_rate(*best);
    r.r_clamped = std::clamp(r.r_asymptotic, 0.0, 1.0);
    return r;
}

KeyRateReport select_star_leader(std::span<const double> leg_gammas)
{
    if (leg_gammas.size() < 2)
        throw InvalidArgument("star needs at least two legs");
    std::map<std::size_t, ErrorRates> per;
    std::vector<double> bobs;
    for (std::size_t a = 0; a < leg_gammas.size(); ++a) {
        bobs.clear();
        for (std::size_t i = 0; i < leg_gammas.size(); ++i)
            if (i != a)
                bobs.push_back(leg_gammas[i]);
        per.emplace(a, star_error_rates(leg_gammas[a], bobs));
    }
    // products taken in different orders can differ in the last ulp
    const double qx = per.at(0).q_x;
    for (auto& [a, r] : per)
        r.q_x = qx;
    return select_leader(per);
}

double expected_round_rate(const KeyRateReport& report, double q, std::size_t n_nonleaf)
{
    if (n_nonleaf < 1)
        throw InvalidArgument("a distribution structure has at least one measuring node");
    if (!(q >= 0.0 && q <= 1.0))
        throw InvalidArgument("q outside [0, 1]");
    return std::pow(q, static_cast<double>(n_nonleaf)) * report.r_clamped;
}

double expected_round_rate(const KeyRateReport& report, std::span<const double> node_q)
{
    if (node_q.empty())
        throw InvalidArgument("a distribution structure has at least one measuring node");
    double f = 1.0;
    for (double q : node_q)
        f *= q;
    return f * report.r_clamped;
}

double pairwise_rate_proxy(double gamma_p, std::size_t n_links, double q)
{
    if (n_links < 1)
        throw InvalidArgument("pairwise_rate_proxy needs at least one link");
    double r = std::max(0.0, 1.0 - 2.0 * binary_entropy((1.0 - gamma_p) / 2.0));
    return std::pow(q, static_cast<double>(n_links - 1)) * r;
}

} // namespace mpqkd
