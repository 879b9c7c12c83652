#include "esr/states.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace esr {

namespace {
constexpr double kUnitTol = 1e-10;
constexpr double kWeightTol = 1e-12;
} // namespace

PureState::PureState(CVector v) : vector(std::move(v)) {
    if (vector.dim() == 0) throw std::invalid_argument("pure state: empty vector");
    if (std::abs(vector.norm() - 1.0) > kUnitTol) throw std::invalid_argument("pure state: vector is not unit");
}

OperationalMixture::OperationalMixture(std::vector<Component> components)
    : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("mixture: needs at least one component");
    double total = 0.0;
    for (const Component& c : components_) {
        if (c.weight <= 0.0) throw std::invalid_argument("mixture: component weights must be positive");
        if (c.state.dim() != components_.front().state.dim())
            throw std::invalid_argument("mixture: component dimensions differ");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > kWeightTol) throw std::invalid_argument("mixture: weights must sum to 1");
}

CMatrix standard_density(const OperationalMixture& m) {
    CMatrix rho = CMatrix::zero(m.dim(), m.dim());
    for (const auto& c : m.components()) rho += cplx(c.weight) * c.state.density();
    return rho;
}

double mixture_detection_probability(const OperationalMixture& m, const GeneralizedObservable& g,
                                     const OutcomeSet& x, double tol) {
    double p = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) {
        const auto& c = m.components()[j];
        try {
            p += c.weight * property_detection_probability(g, c.state.vector, x, tol);
        } catch (const std::domain_error&) {
            throw std::domain_error("component " + std::to_string(j) +
                                    " has zero quantum probability; detection probability undefined");
        }
    }
    return p;
}

std::vector<double> conditional_weights(const OperationalMixture& m, const GeneralizedObservable& g,
                                        const OutcomeSet& x, double tol) {
    const double pd = mixture_detection_probability(m, g, x, tol);
    if (pd <= tol) throw std::domain_error("no object detected; conditional state undefined");
    std::vector<double> w(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) {
        const auto& c = m.components()[j];
        w[j] = c.weight * property_detection_probability(g, c.state.vector, x, tol) / pd;
    }
    return w;
}

CMatrix conditional_density(const OperationalMixture& m, const GeneralizedObservable& g,
                            const OutcomeSet& x, double tol) {
    const std::vector<double> w = conditional_weights(m, g, x, tol);
    CMatrix rho = CMatrix::zero(m.dim(), m.dim());
    for (std::size_t j = 0; j < m.size(); ++j)
        rho += cplx(w[j]) * m.components()[j].state.density();
    return rho;
}

double mixture_conditional_probability(const OperationalMixture& m, const GeneralizedObservable& g,
                                       const OutcomeSet& x, double tol) {
    return (conditional_density(m, g, x, tol) * pv_projector(g, x)).trace().real();
}

double mixture_overall_probability(const OperationalMixture& m, const GeneralizedObservable& g,
                                   const OutcomeSet& x) {
    double p = 0.0;
    for (const auto& c : m.components()) p += c.weight * overall_probability(g, c.state.vector, x);
    return p;
}

EquivalenceResult probabilistically_equivalent(const OperationalMixture& a, const OperationalMixture& b,
                                               std::span<const GeneralizedObservable> observables,
                                               double tol) {
    if (a.dim() != b.dim()) throw std::invalid_argument("equivalence: mixture dimensions differ");
    EquivalenceResult res;
    for (std::size_t gi = 0; gi < observables.size(); ++gi) {
        const GeneralizedObservable& g = observables[gi];
        if (g.dim() != a.dim()) throw std::invalid_argument("equivalence: observable dimension differs");
        for (const OutcomeSet& x : all_outcome_sets(g.n_outcomes())) {
            const double pa = mixture_overall_probability(a, g, x);
            const double pb = mixture_overall_probability(b, g, x);
            if (std::abs(pa - pb) > tol) {
                res.equivalent = false;
                res.observable_index = gi;
                res.witness_set = x;
                res.lhs = pa;
                res.rhs = pb;
                return res;
            }
        }
    }
    return res;
}

} // namespace esr
