#include "irsa/degree.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "irsa/errors.hpp"

namespace irsa {

namespace {

constexpr double kSumTolerance = 1e-12;

double checked_sum(const std::map<int, double>& probs, const char* what) {
    if (probs.empty()) throw std::invalid_argument(std::string(what) + ": empty distribution");
    double sum = 0.0;
    for (const auto& [d, p] : probs) {
        if (d < 0) throw std::invalid_argument(std::string(what) + ": negative degree");
        if (!(p >= 0.0))
            throw std::invalid_argument(std::string(what) + ": negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
        throw std::invalid_argument(std::string(what) + ": probabilities do not sum to 1");
    return sum;
}

void drop_zero_entries(std::map<int, double>& probs) {
    for (auto it = probs.begin(); it != probs.end();) {
        if (it->second == 0.0)
            it = probs.erase(it);
        else
            ++it;
    }
}

}  // namespace

DegreeDistribution::DegreeDistribution(std::map<int, double> probs) : probs_(std::move(probs)) {
    checked_sum(probs_, "DegreeDistribution");
    drop_zero_entries(probs_);
    if (probs_.empty())
        throw std::invalid_argument("DegreeDistribution: empty distribution");
    for (const auto& [d, p] : probs_) avg_degree_ += d * p;
    if (!(avg_degree_ > 0.0))
        throw std::invalid_argument("DegreeDistribution: average degree must be positive");
}

DegreeDistribution DegreeDistribution::single(int degree) {
    return DegreeDistribution({{degree, 1.0}});
}

double DegreeDistribution::prob(int degree) const {
    const auto it = probs_.find(degree);
    return it == probs_.end() ? 0.0 : it->second;
}

double DegreeDistribution::eval(double x) const {
    double value = 0.0;
    for (const auto& [d, p] : probs_) value += p * std::pow(x, d);
    return value;
}

EdgeDistribution::EdgeDistribution(std::map<int, double> probs) : probs_(std::move(probs)) {
    checked_sum(probs_, "EdgeDistribution");
    drop_zero_entries(probs_);
    if (probs_.empty() || probs_.begin()->first < 1)
        throw std::invalid_argument("EdgeDistribution: degrees must be >= 1");
}

double EdgeDistribution::prob(int degree) const {
    const auto it = probs_.find(degree);
    return it == probs_.end() ? 0.0 : it->second;
}

double EdgeDistribution::eval(double x) const {
    double value = 0.0;
    for (const auto& [d, p] : probs_) value += p * std::pow(x, d - 1);
    return value;
}

EdgeDistribution to_edge_perspective(const DegreeDistribution& dist) {
    std::map<int, double> edge;
    const double mean = dist.avg_degree();
    for (const auto& [d, p] : dist.probs()) {
        if (d == 0) continue;  // degree-0 nodes carry no edges
        edge[d] = d * p / mean;
    }
    return EdgeDistribution(std::move(edge));
}

DegreeDistribution to_node_perspective(const EdgeDistribution& dist) {
    std::map<int, double> node;
    double norm = 0.0;
    for (const auto& [d, p] : dist.probs()) norm += p / d;
    for (const auto& [d, p] : dist.probs()) node[d] = p / d / norm;
    return DegreeDistribution(std::move(node));
}

EdgeDistribution poisson_slot_edge_dist(double offered, int c_max) {
    if (!(offered > 0.0)) throw std::invalid_argument("poisson_slot_edge_dist: offered must be > 0");
    // rho_c is the Poisson(offered) pmf shifted to c >= 1
    std::map<int, double> probs;
    double pmf = std::exp(-offered);  // k = c-1 = 0
    double cum = 0.0;
    const int limit = c_max > 0 ? c_max : 1 << 20;
    int c = 1;
    for (; c <= limit; ++c) {
        if (pmf > 0.0) probs[c] = pmf;
        cum += pmf;
        if (c_max == 0 && 1.0 - cum < 1e-13 && c > offered) break;
        pmf *= offered / c;  // next k = c
    }
    if (1.0 - cum > 1e-12)
        throw NumericalError("poisson_slot_edge_dist: truncated tail mass exceeds 1e-12");
    for (auto& [d, p] : probs) p /= cum;
    return EdgeDistribution(std::move(probs));
}

DegreeDistribution binomial_slot_dist(int m, int n, const DegreeDistribution& burst) {
    if (m < 1 || n < 1) throw std::invalid_argument("binomial_slot_dist: m, n must be >= 1");
    const double eps = burst.avg_degree() / n;
    if (eps > 1.0)
        throw std::invalid_argument("binomial_slot_dist: average degree exceeds slot count");
    std::map<int, double> probs;
    if (eps == 1.0) {
        probs[m] = 1.0;
        return DegreeDistribution(std::move(probs));
    }
    // log-domain pmf; entries below double underflow are structurally absent
    const double log_eps = std::log(eps);
    const double log_1meps = std::log1p(-eps);
    const double lg_m1 = std::lgamma(m + 1.0);
    double sum = 0.0;
    for (int c = 0; c <= m; ++c) {
        const double lp = lg_m1 - std::lgamma(c + 1.0) - std::lgamma(m - c + 1.0) +
                          c * log_eps + (m - c) * log_1meps;
        if (lp < -745.0) continue;
        const double p = std::exp(lp);
        probs[c] = p;
        sum += p;
    }
    for (auto& [c, p] : probs) p /= sum;
    return DegreeDistribution(std::move(probs));
}

namespace {

// one polynomial term: optional coefficient, optional "* ", "x^d" or "x"
std::pair<int, double> parse_term(const std::string& term) {
    if (term.find('-') != std::string::npos)
        throw ParseError("polynomial term '" + term + "': negative coefficient");
    double coef = 1.0;
    std::size_t pos = 0;
    // skip leading whitespace
    while (pos < term.size() && std::isspace(static_cast<unsigned char>(term[pos]))) ++pos;
    if (pos == term.size()) throw ParseError("empty polynomial term");
    if (term[pos] != 'x') {
        std::size_t parsed = 0;
        try {
            coef = std::stod(term.substr(pos), &parsed);
        } catch (const std::exception&) {
            throw ParseError("polynomial term '" + term + "': malformed coefficient");
        }
        pos += parsed;
        if (!std::isfinite(coef))
            throw ParseError("polynomial term '" + term + "': malformed coefficient");
        while (pos < term.size() && (std::isspace(static_cast<unsigned char>(term[pos])) ||
                                     term[pos] == '*'))
            ++pos;
    }
    if (pos == term.size() || term[pos] != 'x')
        throw ParseError("polynomial term '" + term + "': expected 'x'");
    ++pos;
    long degree = 1;
    if (pos < term.size() && term[pos] == '^') {
        ++pos;
        std::size_t parsed = 0;
        try {
            degree = std::stol(term.substr(pos), &parsed);
        } catch (const std::exception&) {
            throw ParseError("polynomial term '" + term + "': malformed exponent");
        }
        pos += parsed;
    }
    while (pos < term.size() && std::isspace(static_cast<unsigned char>(term[pos]))) ++pos;
    if (pos != term.size())
        throw ParseError("polynomial term '" + term + "': trailing characters");
    if (degree < 1) throw ParseError("polynomial term '" + term + "': degree must be >= 1");
    return {static_cast<int>(degree), coef};
}

std::string format_coefficient(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    return buf;
}

}  // namespace

DegreeDistribution parse_polynomial(const std::string& text, double* renorm_delta) {
    const auto last = text.find_last_not_of(" \t");
    if (last != std::string::npos && text[last] == '+')
        throw ParseError("polynomial '" + text + "': trailing '+'");
    std::map<int, double> probs;
    std::string term;
    std::stringstream stream(text);
    bool any = false;
    while (std::getline(stream, term, '+')) {
        if (term.find_first_not_of(" \t") == std::string::npos)
            throw ParseError("polynomial '" + text + "': empty term");
        const auto [degree, coef] = parse_term(term);
        if (probs.count(degree))
            throw ParseError("polynomial '" + text + "': duplicate degree " +
                             std::to_string(degree));
        probs[degree] = coef;
        any = true;
    }
    if (!any) throw ParseError("polynomial '" + text + "': no terms");
    double sum = 0.0;
    for (const auto& [d, p] : probs) sum += p;
    if (std::abs(sum - 1.0) > 1e-6)
        throw ParseError("polynomial '" + text + "': coefficients sum to " +
                         std::to_string(sum) + ", expected 1 within 1e-6");
    if (renorm_delta) *renorm_delta = std::abs(sum - 1.0);
    for (auto& [d, p] : probs) p /= sum;
    return DegreeDistribution(std::move(probs));
}

std::string format_polynomial(const DegreeDistribution& dist) {
    std::string out;
    for (const auto& [d, p] : dist.probs()) {
        if (!out.empty()) out += " + ";
        if (p != 1.0) {
            out += format_coefficient(p);
            out += ' ';
        }
        out += d == 1 ? "x" : "x^" + std::to_string(d);
    }
    return out;
}

}  // namespace irsa
