#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "esr/dynamics.hpp"
#include "esr/observables.hpp"
#include "esr/states.hpp"

// Two-party scenarios with trichotomic generalized observables (outcomes
// +1, -1 and no-registration outcome 0): product expectations, the
// classical and modified BCHSH functionals, and the uniform
// detection-efficiency bound.

namespace esr {

// A spin direction as a unit vector on the Bloch sphere.
struct BlochVector {
    double x = 0.0, y = 0.0, z = 1.0;

    BlochVector() = default;
    BlochVector(double x_, double y_, double z_);
    static BlochVector from_polar(double theta, double phi = 0.0);

    double dot(const BlochVector& o) const { return x * o.x + y * o.y + z * o.z; }
};

// n.sigma with projectors (I +- n.sigma)/2
CMatrix spin_operator(const BlochVector& n);

struct LocalGenObservable {
    std::vector<double> outcomes;    // exactly {+1, -1}
    std::vector<CMatrix> projectors; // local projectors, P_{+1} then P_{-1}
    DetectionModel detection;        // evaluated on the compound state
    int side;                        // 1 or 2
    std::string label;
    BlochVector axis;                // setting direction (spin observables)

    LocalGenObservable(std::vector<CMatrix> projectors_, DetectionModel detection_, int side_,
                       std::string label_);
    static LocalGenObservable spin(const BlochVector& axis, DetectionModel detection, int side,
                                   std::string label);

    std::size_t local_dim() const { return projectors.front().rows(); }
};

struct BellScenario {
    PureState state; // on d1*d2
    std::size_t d1, d2;
    LocalGenObservable a, a_prime; // side 1
    LocalGenObservable b, b_prime; // side 2
    // Diagnostics only: evaluate side-2 detection on the collapsed state
    // instead of the pre-measurement compound state (non-noncontextual).
    bool contextual_detection = false;

    BellScenario(PureState state_, std::size_t d1_, std::size_t d2_, LocalGenObservable a_,
                 LocalGenObservable a_prime_, LocalGenObservable b_, LocalGenObservable b_prime_);

    // Singlet-state scenario with spin settings in uniform detection p on
    // all four observables.
    static BellScenario singlet(const BlochVector& a, const BlochVector& a_prime,
                                const BlochVector& b, const BlochVector& b_prime,
                                DetectionModel detection);

    BellScenario with_uniform_detection(double p) const;
};

// (|01> - |10>)/sqrt(2)
PureState singlet_state();

// Lift a local observable to a generalized observable on the compound
// space (a0 = 0, projectors P(x)I or I(x)P).
GeneralizedObservable lift_local(const LocalGenObservable& lo, std::size_t d1, std::size_t d2);

enum class SideASetting { a, a_prime };
enum class SideBSetting { b, b_prime };

// E(A0,B0): separated-system closed form with noncontextual detection
// (side-2 values taken on the pre-measurement compound state).
double joint_expectation(const BellScenario& sc, SideASetting sa, SideBSetting sb);

// Same expectation assembled from sequential joint probabilities of the
// dynamics module; agrees with joint_expectation when the noncontextual
// rule is active.
double joint_expectation_sequential(const BellScenario& sc, SideASetting sa, SideBSetting sb);

// <Psi|A(x)B|Psi> for the underlying dichotomic observables.
double quantum_correlation(const BellScenario& sc, SideASetting sa, SideBSetting sb);

// |E(a,b)-E(a,b')| + |E(a',b)+E(a',b')| on the generalized observables.
double modified_bchsh_lhs(const BellScenario& sc);

// Quantum CHSH combination of the scenario's settings.
double quantum_chsh(const BellScenario& sc);

// Finite deterministic hidden-variable model over the four settings.
struct LHVModel {
    std::vector<double> weights;              // nonnegative, sum 1
    std::vector<std::array<int, 2>> values_a; // per lambda: A(a), A(a')
    std::vector<std::array<int, 2>> values_b; // per lambda: B(b), B(b')

    LHVModel(std::vector<double> weights_, std::vector<std::array<int, 2>> values_a_,
             std::vector<std::array<int, 2>> values_b_);

    std::size_t size() const { return weights.size(); }
};

// |E(a,b)-E(a,b')| + |E(a',b)+E(a',b')| with E from the hidden-variable
// table; <= 2 for every valid model.
double classical_bchsh_lhs(const LHVModel& model);

struct EfficiencyBound {
    double quantum_chsh = 0.0; // Q at the scenario settings
    double p_star = 1.0;       // largest uniform p with LHS <= 2
    double closed_form = 1.0;  // min(1, sqrt(2/Q))
    double bisection = 1.0;    // root of p -> modified LHS - 2
    bool vacuous = false;      // Q <= 2: every p is admissible
};

// Largest uniform detection probability for which the modified BCHSH
// functional stays within the classical bound.
EfficiencyBound max_uniform_efficiency(const BellScenario& sc);

} // namespace esr
