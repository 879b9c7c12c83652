#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "esr/linalg.hpp"
#include "esr/observables.hpp"

// Pure states and operational mixtures. A mixture is a concrete weighted
// list of pure preparations; two decompositions with the same standard
// density are different values, and they acquire property-indexed
// conditional densities that the standard density cannot express.

namespace esr {

struct PureState {
    CVector vector;

    explicit PureState(CVector v);
    static PureState basis(std::size_t dim, std::size_t index) { return PureState(CVector::basis(dim, index)); }

    std::size_t dim() const { return vector.dim(); }
    CMatrix density() const { return outer(vector, vector); }
};

class OperationalMixture {
public:
    struct Component {
        double weight;
        PureState state;
    };

    explicit OperationalMixture(std::vector<Component> components);
    static OperationalMixture pure(PureState s) { return OperationalMixture({{1.0, std::move(s)}}); }

    const std::vector<Component>& components() const { return components_; }
    std::size_t size() const { return components_.size(); }
    std::size_t dim() const { return components_.front().state.dim(); }

private:
    std::vector<Component> components_;
};

// rho_S = sum_j p_j |psi_j><psi_j|
CMatrix standard_density(const OperationalMixture& m);

// p_S^d(F) = sum_j p_j p_{S_j}^d(F), for a0-free x. Throws std::domain_error
// naming the component whose detection probability is undefined.
double mixture_detection_probability(const OperationalMixture& m, const GeneralizedObservable& g,
                                     const OutcomeSet& x, double tol = 1e-12);

// Bayes weights p_j p_{S_j}^d(F) / p_S^d(F); they sum to 1.
std::vector<double> conditional_weights(const OperationalMixture& m, const GeneralizedObservable& g,
                                        const OutcomeSet& x, double tol = 1e-12);

// rho_S(F): the property-indexed density of the detected subensemble.
CMatrix conditional_density(const OperationalMixture& m, const GeneralizedObservable& g,
                            const OutcomeSet& x, double tol = 1e-12);

// p_S(F) = Tr[rho_S(F) P(X)]
double mixture_conditional_probability(const OperationalMixture& m, const GeneralizedObservable& g,
                                       const OutcomeSet& x, double tol = 1e-12);

// p_S^t((A0,X)) = sum_j p_j <psi_j|T_{psi_j}(X)|psi_j>, any outcome set.
double mixture_overall_probability(const OperationalMixture& m, const GeneralizedObservable& g,
                                   const OutcomeSet& x);

struct EquivalenceResult {
    bool equivalent = true;
    // witness of the first disagreement, when not equivalent
    std::size_t observable_index = 0;
    OutcomeSet witness_set;
    double lhs = 0.0;
    double rhs = 0.0;
};

// Probabilistic equivalence over a supplied finite family of observables,
// quantifying over every outcome set of each.
EquivalenceResult probabilistically_equivalent(const OperationalMixture& a, const OperationalMixture& b,
                                               std::span<const GeneralizedObservable> observables,
                                               double tol = 1e-9);

} // namespace esr
