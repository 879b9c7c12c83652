#include "esr/bell.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace esr {

namespace {
constexpr double kUnitTol = 1e-10;
} // namespace

BlochVector::BlochVector(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {
    const double n = std::sqrt(x * x + y * y + z * z);
    if (std::abs(n - 1.0) > 1e-9) {
        if (n <= 1e-300) throw std::invalid_argument("bloch vector: zero direction");
        x /= n;
        y /= n;
        z /= n;
    }
}

BlochVector BlochVector::from_polar(double theta, double phi) {
    return BlochVector(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                       std::cos(theta));
}

CMatrix spin_operator(const BlochVector& n) {
    CMatrix m(2, 2);
    m(0, 0) = n.z;
    m(0, 1) = cplx(n.x, -n.y);
    m(1, 0) = cplx(n.x, n.y);
    m(1, 1) = -n.z;
    return m;
}

LocalGenObservable::LocalGenObservable(std::vector<CMatrix> projectors_, DetectionModel detection_,
                                       int side_, std::string label_)
    : outcomes{+1.0, -1.0},
      projectors(std::move(projectors_)),
      detection(std::move(detection_)),
      side(side_),
      label(std::move(label_)) {
    if (projectors.size() != 2) throw std::invalid_argument("local observable: two projectors required");
    if (side != 1 && side != 2) throw std::invalid_argument("local observable: side must be 1 or 2");
}

LocalGenObservable LocalGenObservable::spin(const BlochVector& axis, DetectionModel detection,
                                            int side, std::string label) {
    const CMatrix op = spin_operator(axis);
    const CMatrix id = CMatrix::identity(2);
    const CMatrix p_plus = cplx(0.5) * (id + op);
    const CMatrix p_minus = cplx(0.5) * (id - op);
    LocalGenObservable lo({p_plus, p_minus}, std::move(detection), side, std::move(label));
    lo.axis = axis;
    return lo;
}

BellScenario::BellScenario(PureState state_, std::size_t d1_, std::size_t d2_, LocalGenObservable a_,
                           LocalGenObservable a_prime_, LocalGenObservable b_,
                           LocalGenObservable b_prime_)
    : state(std::move(state_)),
      d1(d1_),
      d2(d2_),
      a(std::move(a_)),
      a_prime(std::move(a_prime_)),
      b(std::move(b_)),
      b_prime(std::move(b_prime_)) {
    if (state.dim() != d1 * d2) throw std::invalid_argument("scenario: state dimension is not d1*d2");
    if (a.side != 1 || a_prime.side != 1 || b.side != 2 || b_prime.side != 2)
        throw std::invalid_argument("scenario: settings assigned to the wrong side");
    if (a.local_dim() != d1 || a_prime.local_dim() != d1 || b.local_dim() != d2 ||
        b_prime.local_dim() != d2)
        throw std::invalid_argument("scenario: local observable dimension mismatch");
}

PureState singlet_state() {
    CVector v(4);
    v[1] = 1.0 / std::sqrt(2.0);
    v[2] = -1.0 / std::sqrt(2.0);
    return PureState(std::move(v));
}

BellScenario BellScenario::singlet(const BlochVector& a, const BlochVector& a_prime,
                                   const BlochVector& b, const BlochVector& b_prime,
                                   DetectionModel detection) {
    return BellScenario(singlet_state(), 2, 2,
                        LocalGenObservable::spin(a, detection, 1, "a"),
                        LocalGenObservable::spin(a_prime, detection, 1, "a'"),
                        LocalGenObservable::spin(b, detection, 2, "b"),
                        LocalGenObservable::spin(b_prime, detection, 2, "b'"));
}

BellScenario BellScenario::with_uniform_detection(double p) const {
    BellScenario sc = *this;
    const DetectionModel d = DetectionModel::uniform(p);
    sc.a.detection = d;
    sc.a_prime.detection = d;
    sc.b.detection = d;
    sc.b_prime.detection = d;
    return sc;
}

GeneralizedObservable lift_local(const LocalGenObservable& lo, std::size_t d1, std::size_t d2) {
    std::vector<CMatrix> lifted;
    lifted.reserve(lo.projectors.size());
    for (const CMatrix& p : lo.projectors)
        lifted.push_back(lo.side == 1 ? tensor_product(p, CMatrix::identity(d2))
                                      : tensor_product(CMatrix::identity(d1), p));
    return GeneralizedObservable(DiscreteObservable(lo.outcomes, std::move(lifted)), 0.0, lo.detection);
}

namespace {

const LocalGenObservable& pick(const BellScenario& sc, SideASetting sa) {
    return sa == SideASetting::a ? sc.a : sc.a_prime;
}

const LocalGenObservable& pick(const BellScenario& sc, SideBSetting sb) {
    return sb == SideBSetting::b ? sc.b : sc.b_prime;
}

// Detection model whose values are frozen at a fixed state.
DetectionModel freeze_detection(const DetectionModel& d, const CVector& at, std::size_t n_outcomes) {
    std::vector<double> values(n_outcomes);
    for (std::size_t n = 0; n < n_outcomes; ++n) values[n] = d.value(at, n);
    return DetectionModel::per_outcome(std::move(values));
}

} // namespace

double joint_expectation(const BellScenario& sc, SideASetting sa, SideBSetting sb) {
    const GeneralizedObservable ga = lift_local(pick(sc, sa), sc.d1, sc.d2);
    const GeneralizedObservable gb = lift_local(pick(sc, sb), sc.d1, sc.d2);
    const CVector& psi = sc.state.vector;
    double e = 0.0;
    for (std::size_t n = 0; n < ga.n_outcomes(); ++n)
        for (std::size_t p = 0; p < gb.n_outcomes(); ++p) {
            const double term = ga.detection.value(psi, n) * gb.detection.value(psi, p) *
                                quadratic_form(ga.base.projectors[n] * gb.base.projectors[p], psi).real();
            e += ga.base.outcomes[n] * gb.base.outcomes[p] * term;
        }
    return e;
}

double joint_expectation_sequential(const BellScenario& sc, SideASetting sa, SideBSetting sb) {
    const GeneralizedObservable ga = lift_local(pick(sc, sa), sc.d1, sc.d2);
    GeneralizedObservable gb = lift_local(pick(sc, sb), sc.d1, sc.d2);
    if (!sc.contextual_detection) {
        // noncontextuality: the side-1 collapse must not change side-2
        // detection values, so freeze them at the pre-measurement state
        gb.detection = freeze_detection(gb.detection, sc.state.vector, gb.n_outcomes());
    }
    double e = 0.0;
    for (std::size_t n = 0; n < ga.n_outcomes(); ++n)
        for (std::size_t p = 0; p < gb.n_outcomes(); ++p) {
            // a0 = b0 = 0 annihilates every term involving no registration
            const double joint = sequential_joint_probability(ga, gb, sc.state, Outcome::base(n),
                                                              Outcome::base(p));
            e += ga.base.outcomes[n] * gb.base.outcomes[p] * joint;
        }
    return e;
}

double quantum_correlation(const BellScenario& sc, SideASetting sa, SideBSetting sb) {
    const GeneralizedObservable ga = lift_local(pick(sc, sa), sc.d1, sc.d2);
    const GeneralizedObservable gb = lift_local(pick(sc, sb), sc.d1, sc.d2);
    const CVector& psi = sc.state.vector;
    double e = 0.0;
    for (std::size_t n = 0; n < ga.n_outcomes(); ++n)
        for (std::size_t p = 0; p < gb.n_outcomes(); ++p)
            e += ga.base.outcomes[n] * gb.base.outcomes[p] *
                 quadratic_form(ga.base.projectors[n] * gb.base.projectors[p], psi).real();
    return e;
}

namespace {

double bchsh_combine(double e_ab, double e_abp, double e_apb, double e_apbp) {
    return std::abs(e_ab - e_abp) + std::abs(e_apb + e_apbp);
}

} // namespace

double modified_bchsh_lhs(const BellScenario& sc) {
    return bchsh_combine(joint_expectation(sc, SideASetting::a, SideBSetting::b),
                         joint_expectation(sc, SideASetting::a, SideBSetting::b_prime),
                         joint_expectation(sc, SideASetting::a_prime, SideBSetting::b),
                         joint_expectation(sc, SideASetting::a_prime, SideBSetting::b_prime));
}

double quantum_chsh(const BellScenario& sc) {
    return bchsh_combine(quantum_correlation(sc, SideASetting::a, SideBSetting::b),
                         quantum_correlation(sc, SideASetting::a, SideBSetting::b_prime),
                         quantum_correlation(sc, SideASetting::a_prime, SideBSetting::b),
                         quantum_correlation(sc, SideASetting::a_prime, SideBSetting::b_prime));
}

LHVModel::LHVModel(std::vector<double> weights_, std::vector<std::array<int, 2>> values_a_,
                   std::vector<std::array<int, 2>> values_b_)
    : weights(std::move(weights_)), values_a(std::move(values_a_)), values_b(std::move(values_b_)) {
    if (weights.empty() || weights.size() != values_a.size() || weights.size() != values_b.size())
        throw std::invalid_argument("lhv model: table sizes do not match");
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("lhv model: weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("lhv model: weights must sum to 1");
    for (std::size_t l = 0; l < weights.size(); ++l)
        for (int s = 0; s < 2; ++s)
            if (std::abs(values_a[l][s]) != 1 || std::abs(values_b[l][s]) != 1)
                throw std::invalid_argument("lhv model: values must be +1 or -1");
}

double classical_bchsh_lhs(const LHVModel& model) {
    double e[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    for (std::size_t l = 0; l < model.size(); ++l)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                e[i][j] += model.weights[l] * model.values_a[l][i] * model.values_b[l][j];
    return bchsh_combine(e[0][0], e[0][1], e[1][0], e[1][1]);
}

EfficiencyBound max_uniform_efficiency(const BellScenario& sc) {
    EfficiencyBound bound;
    bound.quantum_chsh = quantum_chsh(sc);
    if (bound.quantum_chsh <= 2.0) {
        bound.vacuous = true;
        return bound;
    }
    bound.closed_form = std::min(1.0, std::sqrt(2.0 / bound.quantum_chsh));
    // p -> modified LHS is nondecreasing on [0,1]; bisect for LHS = 2
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double lhs = modified_bchsh_lhs(sc.with_uniform_detection(mid));
        (lhs <= 2.0 ? lo : hi) = mid;
        if (hi - lo <= 1e-12) break;
    }
    bound.bisection = 0.5 * (lo + hi);
    bound.p_star = bound.closed_form;
    return bound;
}

} // namespace esr
