#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "esr/observables.hpp"
#include "esr/states.hpp"

// State transformations induced by idealized nondestructive measurements:
// the state-parametrized collapse rule for pure states, its lift to
// operational mixtures with Bayes-reweighted components, nonselective
// measurement, sequential joint probabilities, and the pointer-coupling
// evolution whose partial trace reproduces the nonselective density.

namespace esr {

enum class Branch { yes, no };

// monostate = "not set" (default-constructed records)
using StateValue = std::variant<std::monostate, PureState, OperationalMixture>;

// Audit record of one measurement step.
struct MeasurementRecord {
    std::string observable;
    OutcomeSet outcome_set;
    Branch branch = Branch::yes;
    double probability = 0.0;
    StateValue pre_state;
    StateValue post_state;
};

// A single outcome of a generalized observable: either the no-registration
// outcome or a base outcome by index.
struct Outcome {
    bool is_a0 = false;
    std::size_t base_index = 0;

    static Outcome a0() { return {true, 0}; }
    static Outcome base(std::size_t i) { return {false, i}; }
    OutcomeSet as_set() const { return is_a0 ? OutcomeSet::a0_only() : OutcomeSet::singleton_base(base_index); }
};

// Pure-state collapse: v = T_psi(X) psi for the yes branch, the complement
// set for the no branch, normalized. Throws std::domain_error on a
// zero-probability branch.
PureState gpp_apply(const GeneralizedObservable& g, const PureState& s, const OutcomeSet& x,
                    Branch branch, double tol = 1e-12);

// Mixture collapse: components collapse via gpp_apply, weights reweighted by
// Bayes with the per-component overall probabilities; zero-probability
// components are pruned. Throws std::domain_error when the branch as a whole
// is impossible.
OperationalMixture glp_apply(const GeneralizedObservable& g, const OperationalMixture& m,
                             const OutcomeSet& x, Branch branch, double tol = 1e-12);

// Mixture over all collapse branches, weighted by the outcome probabilities;
// branches with probability <= tol are dropped.
OperationalMixture nonselective_measure(const GeneralizedObservable& g, const PureState& s,
                                        double tol = 1e-12);

// p(a,b) for measuring gA first and gB second. A zero-probability first
// branch yields 0, not an error.
double sequential_joint_probability(const GeneralizedObservable& ga, const GeneralizedObservable& gb,
                                    const PureState& s, const Outcome& a, const Outcome& b);

// Pointer coupling of a system observable to an apparatus register:
// outcome a_n drives the pointer to |n>, no detection leaves it at |0>.
struct ApparatusCoupling {
    GeneralizedObservable system_obs;
    std::size_t apparatus_dim;
    std::vector<CVector> pointer_basis; // |0>, |1>, ..., orthonormal
    std::vector<double> theta;          // phase of each detected branch
    double phi0 = 0.0;                  // phase of the no-detection branch

    // Canonical basis, zero phases.
    ApparatusCoupling(GeneralizedObservable obs, std::size_t apparatus_dim_);
    ApparatusCoupling(GeneralizedObservable obs, std::size_t apparatus_dim_,
                      std::vector<CVector> pointer_basis_, std::vector<double> theta_, double phi0_);
};

// |Psi> = sum_n alpha_n (P_n|psi>)|n> + beta_0 |psi_F0>|0> on the
// system (x) apparatus space; unit by the normalization identity.
CVector apparatus_evolve(const ApparatusCoupling& c, const PureState& s);

// max-abs entry norm of Tr_M |Psi><Psi| - standard_density(nonselective).
double verify_partial_trace_consistency(const ApparatusCoupling& c, const PureState& s);

} // namespace esr
