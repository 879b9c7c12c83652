#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "esr/linalg.hpp"

// Discrete observables extended with a no-registration outcome. Every
// generalized observable is represented, per pure state, by a commutative
// family of positive effects built from the base projectors and a
// detection-probability model.

namespace esr {

struct DiscreteObservable {
    std::vector<double> outcomes;    // pairwise distinct
    std::vector<CMatrix> projectors; // orthogonal, idempotent, complete
    std::size_t dim = 0;

    DiscreteObservable(std::vector<double> outcomes_, std::vector<CMatrix> projectors_);

    // Builds outcomes/projectors from the spectral decomposition of a
    // Hermitian operator.
    static DiscreteObservable from_operator(const CMatrix& h, double tol = 1e-9);

    std::size_t n_outcomes() const { return outcomes.size(); }
};

// The map (state, outcome index) -> detection probability in [0,1]. The
// functional form is a free parameter of the theory, so it is injectable:
// uniform, per-outcome, or an arbitrary pure rule.
class DetectionModel {
public:
    using Rule = std::function<double(const CVector&, std::size_t)>;

    static DetectionModel uniform(double p);
    static DetectionModel per_outcome(std::vector<double> values);
    static DetectionModel state_dependent(Rule rule);

    // Detection probability for outcome index n (0-based into the base
    // outcome list). Throws std::domain_error if the rule leaves [0,1].
    double value(const CVector& psi, std::size_t n) const;

    bool is_uniform() const { return kind_ == Kind::uniform; }
    double uniform_value() const { return values_.front(); }

private:
    enum class Kind { uniform, per_outcome, state_dependent };
    DetectionModel(Kind kind, std::vector<double> values, Rule rule);

    Kind kind_;
    std::vector<double> values_;
    Rule rule_;
};

struct GeneralizedObservable {
    DiscreteObservable base;
    double no_registration; // a0, not among base outcomes
    DetectionModel detection;

    GeneralizedObservable(DiscreteObservable base_, double a0, DetectionModel detection_);

    std::size_t dim() const { return base.dim; }
    std::size_t n_outcomes() const { return base.n_outcomes(); }
};

// A finite stand-in for the Borel set X of a property (A0, X): only
// membership of each outcome matters. Base outcomes are referenced by index.
class OutcomeSet {
public:
    OutcomeSet() = default;
    OutcomeSet(bool contains_a0, std::vector<std::size_t> base_indices);

    static OutcomeSet empty() { return OutcomeSet(); }
    static OutcomeSet a0_only() { return OutcomeSet(true, {}); }
    static OutcomeSet base(std::vector<std::size_t> indices) { return OutcomeSet(false, std::move(indices)); }
    static OutcomeSet singleton_base(std::size_t index) { return OutcomeSet(false, {index}); }
    static OutcomeSet full(std::size_t n_outcomes);

    bool contains_a0() const { return contains_a0_; }
    bool contains_base(std::size_t index) const;
    const std::vector<std::size_t>& base_indices() const { return indices_; }
    bool is_empty() const { return !contains_a0_ && indices_.empty(); }

    OutcomeSet with_a0() const;
    // Xi_0 \ X for an observable with n_outcomes base outcomes.
    OutcomeSet complement(std::size_t n_outcomes) const;
    bool disjoint_from(const OutcomeSet& other) const;
    OutcomeSet set_union(const OutcomeSet& other) const;

    std::string label(const GeneralizedObservable& g) const;

    bool operator==(const OutcomeSet& other) const = default;

private:
    bool contains_a0_ = false;
    std::vector<std::size_t> indices_; // sorted, unique
};

// All 2^(K+1) outcome sets of an observable with K base outcomes.
std::vector<OutcomeSet> all_outcome_sets(std::size_t n_outcomes);

// Per-outcome overall probabilities; base outcomes in declared order, the
// no-registration outcome last.
struct OutcomeDistribution {
    std::vector<double> base;
    double a0 = 0.0;

    double total() const;
};

// P^A(X) = sum of base projectors with index in x (a0 carries no projector).
CMatrix pv_projector(const GeneralizedObservable& g, const OutcomeSet& x);

// The state-parametrized effect T_psi(X): sum of detection-weighted
// projectors over x, or its complement form when a0 is in x.
CMatrix effect(const GeneralizedObservable& g, const CVector& psi, const OutcomeSet& x);

OutcomeDistribution outcome_probabilities(const GeneralizedObservable& g, const CVector& psi);

// <psi|T_psi(X)|psi>
double overall_probability(const GeneralizedObservable& g, const CVector& psi, const OutcomeSet& x);

// a0 + sum_n (a_n - a0) * p^d_n * <psi|P_n|psi>
double expectation(const GeneralizedObservable& g, const CVector& psi);

// p^d(F) = <psi|T_psi(X)|psi> / <psi|P(X)|psi> for a0-free x. Throws
// std::domain_error when the property has zero quantum probability.
double property_detection_probability(const GeneralizedObservable& g, const CVector& psi,
                                      const OutcomeSet& x, double tol = 1e-12);

} // namespace esr
