#pragma once

#include <map>
#include <string>

namespace irsa {

// Node-perspective degree pmf {Lambda_d}. Stored sparsely: optimized burst
// distributions have only a handful of support points. Immutable after
// construction; safe to share across threads.
class DegreeDistribution {
public:
    // Validates: degrees >= 0, probabilities >= 0, sum within 1e-12 of 1,
    // positive mean. Zero-probability entries are dropped.
    explicit DegreeDistribution(std::map<int, double> probs);

    static DegreeDistribution single(int degree);

    const std::map<int, double>& probs() const { return probs_; }
    double prob(int degree) const;
    double avg_degree() const { return avg_degree_; }
    double rate() const { return 1.0 / avg_degree_; }
    int min_degree() const { return probs_.begin()->first; }
    int max_degree() const { return probs_.rbegin()->first; }

    // Lambda(x) = sum_d Lambda_d x^d
    double eval(double x) const;

private:
    std::map<int, double> probs_;
    double avg_degree_ = 0.0;
};

// Edge-perspective pmf (lambda_d for burst nodes, rho_c for slot nodes).
// Degrees are >= 1: an edge is always attached to something.
class EdgeDistribution {
public:
    explicit EdgeDistribution(std::map<int, double> probs);

    const std::map<int, double>& probs() const { return probs_; }
    double prob(int degree) const;
    int min_degree() const { return probs_.begin()->first; }
    int max_degree() const { return probs_.rbegin()->first; }

    // lambda(x) = sum_d lambda_d x^(d-1)
    double eval(double x) const;

private:
    std::map<int, double> probs_;
};

// lambda_d = d Lambda_d / avg_degree (same formula converts slot-side P to rho).
EdgeDistribution to_edge_perspective(const DegreeDistribution& dist);

// Inverse map: Lambda_d proportional to lambda_d / d.
DegreeDistribution to_node_perspective(const EdgeDistribution& dist);

// Edge-perspective slot degree distribution in the m -> infinity limit:
// rho_c = exp(-offered) offered^(c-1) / (c-1)!, truncated and renormalized.
// c_max == 0 selects the truncation point adaptively (tail mass < 1e-13).
EdgeDistribution poisson_slot_edge_dist(double offered, int c_max = 0);

// Node-perspective slot degree pmf for a finite frame: m users with burst
// distribution `burst` over n slots, P_c = C(m,c) eps^c (1-eps)^(m-c) with
// eps = avg_degree / n.
DegreeDistribution binomial_slot_dist(int m, int n, const DegreeDistribution& burst);

// Text form "0.59 x^2 + 0.27 x^3 + 0.02 x^5 + 0.12 x^16". Coefficients must
// be nonnegative and sum to 1 within 1e-6; the parsed pmf is renormalized to
// sum exactly 1 and the pre-normalization deviation |sum - 1| is written to
// *renorm_delta when provided.
DegreeDistribution parse_polynomial(const std::string& text, double* renorm_delta = nullptr);

std::string format_polynomial(const DegreeDistribution& dist);

}  // namespace irsa
