#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <stdexcept>

#include "esr/states.hpp"
#include "test_support.hpp"

using namespace esr;

namespace {

DiscreteObservable sigma_z_base() {
    CMatrix p0(2, 2), p1(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    return DiscreteObservable({+1.0, -1.0}, {p0, p1});
}

PureState ket0() { return PureState::basis(2, 0); }
PureState ket1() { return PureState::basis(2, 1); }

PureState ket_plus() {
    CVector v(2);
    v[0] = v[1] = 1.0 / std::sqrt(2.0);
    return PureState(v);
}

PureState ket_minus() {
    CVector v(2);
    v[0] = 1.0 / std::sqrt(2.0);
    v[1] = -1.0 / std::sqrt(2.0);
    return PureState(v);
}

PureState ket_yplus() {
    CVector v(2);
    v[0] = 1.0 / std::sqrt(2.0);
    v[1] = cplx(0.0, 1.0) / std::sqrt(2.0);
    return PureState(v);
}

PureState ket_yminus() {
    CVector v(2);
    v[0] = 1.0 / std::sqrt(2.0);
    v[1] = cplx(0.0, -1.0) / std::sqrt(2.0);
    return PureState(v);
}

} // namespace

TEST_CASE("standard density") {
    const OperationalMixture single = OperationalMixture::pure(ket_plus());
    CHECK(test::matrix_close(standard_density(single), ket_plus().density(), 0.0));

    const OperationalMixture zbasis({{0.5, ket0()}, {0.5, ket1()}});
    const OperationalMixture xbasis({{0.5, ket_plus()}, {0.5, ket_minus()}});
    const CMatrix half = cplx(0.5) * CMatrix::identity(2);
    CHECK(test::matrix_close(standard_density(zbasis), half, 1e-15));
    // same density, different operational definition
    CHECK(test::matrix_close(standard_density(xbasis), half, 1e-15));
}

TEST_CASE("mixture construction rejects bad weights") {
    CHECK_THROWS_AS(OperationalMixture({{0.5, ket0()}, {0.6, ket1()}}), std::invalid_argument);
    CHECK_THROWS_AS(OperationalMixture({{1.0, ket0()}, {0.0, ket1()}}), std::invalid_argument);
    CHECK_THROWS_AS(OperationalMixture({}), std::invalid_argument);
    CHECK_THROWS_AS(PureState(CVector(3)), std::invalid_argument);
}

TEST_CASE("mixture detection probability") {
    const OutcomeSet plus = OutcomeSet::singleton_base(0);

    // all components uniform p -> p
    GeneralizedObservable gu(sigma_z_base(), 0.0, DetectionModel::uniform(0.3));
    const OperationalMixture m({{0.5, ket_plus()}, {0.5, ket_minus()}});
    CHECK(test::close(mixture_detection_probability(m, gu, plus), 0.3, 1e-14));

    // states |0>, |+> with per-outcome (0.8, 0.5), X={+1}: both components
    // see the same 0.8, so the mixture value is 0.8
    GeneralizedObservable g(sigma_z_base(), 0.0, DetectionModel::per_outcome({0.8, 0.5}));
    const OperationalMixture m2({{0.5, ket0()}, {0.5, ket_plus()}});
    CHECK(test::close(mixture_detection_probability(m2, g, plus), 0.8, 1e-14));

    // convex combination of per-component values 0.8 and 0.4
    GeneralizedObservable gsd(
        sigma_z_base(), 0.0,
        DetectionModel::state_dependent([](const CVector& psi, std::size_t) {
            return std::norm(psi[0]) > 0.5 ? 0.8 : 0.4;
        }));
    const OperationalMixture m3({{0.5, ket0()}, {0.5, ket1()}});
    // |1> has no support on {+1}: undefined for that component
    CHECK_THROWS_AS(mixture_detection_probability(m3, gsd, plus), std::domain_error);
    CHECK(test::close(mixture_detection_probability(m3, gsd, OutcomeSet::base({0, 1})), 0.6, 1e-14));
}

TEST_CASE("conditional density: worked diag(2/3,1/3) case") {
    // detection 0.8 on |0>, 0.4 on |1> for F = (A0, {+1,-1})
    GeneralizedObservable g(
        sigma_z_base(), 0.0,
        DetectionModel::state_dependent([](const CVector& psi, std::size_t) {
            return std::norm(psi[0]) > 0.5 ? 0.8 : 0.4;
        }));
    const OperationalMixture m({{0.5, ket0()}, {0.5, ket1()}});
    const OutcomeSet both = OutcomeSet::base({0, 1});

    const auto w = conditional_weights(m, g, both);
    CHECK(test::close(w[0], 2.0 / 3.0, 1e-14));
    CHECK(test::close(w[1], 1.0 / 3.0, 1e-14));

    CMatrix expected(2, 2);
    expected(0, 0) = 2.0 / 3.0;
    expected(1, 1) = 1.0 / 3.0;
    CHECK(test::matrix_close(conditional_density(m, g, both), expected, 1e-14));

    // p_S(F) for X={+1} from the reweighted density: 2/3 vs the quantum 1/2
    const OutcomeSet plus = OutcomeSet::singleton_base(0);
    const double quantum = (standard_density(m) * pv_projector(g, plus)).trace().real();
    CHECK(test::close(quantum, 0.5, 1e-14));
    const CMatrix rho_f = conditional_density(m, g, plus.set_union(OutcomeSet::singleton_base(1)));
    CHECK(test::close((rho_f * pv_projector(g, plus)).trace().real(), 2.0 / 3.0, 1e-14));
}

TEST_CASE("conditional density reduces to the standard one for equal detection") {
    auto rng = test::make_rng(31);
    const OperationalMixture m = test::random_mixture(rng, 3, 3);
    const DiscreteObservable base = test::random_observable(rng, 3, 2);
    GeneralizedObservable g(base, -1.0, DetectionModel::uniform(0.37));
    for (const OutcomeSet& x : all_outcome_sets(base.n_outcomes())) {
        if (x.contains_a0() || x.is_empty()) continue;
        bool supported = true;
        for (const auto& c : m.components())
            supported = supported && quadratic_form(pv_projector(g, x), c.state.vector).real() > 1e-9;
        if (!supported) continue;
        CHECK(test::matrix_close(conditional_density(m, g, x), standard_density(m), 1e-11));
    }
}

TEST_CASE("single pure component: conditional density is the pure density") {
    auto rng = test::make_rng(32);
    const PureState psi(test::random_unit_vector(rng, 2));
    const OperationalMixture m = OperationalMixture::pure(psi);
    GeneralizedObservable g(sigma_z_base(), 0.0, DetectionModel::per_outcome({0.8, 0.5}));
    const OutcomeSet plus = OutcomeSet::singleton_base(0);
    if (std::norm(psi.vector[0]) > 1e-6) {
        CHECK(test::matrix_close(conditional_density(m, g, plus), psi.density(), 1e-12));
        // Born value (assumption AX)
        CHECK(test::close(mixture_conditional_probability(m, g, plus), std::norm(psi.vector[0]), 1e-12));
    }
}

TEST_CASE("mixture overall probability") {
    GeneralizedObservable g(sigma_z_base(), 0.0, DetectionModel::per_outcome({0.8, 0.5}));
    const OperationalMixture m({{0.5, ket_plus()}, {0.5, ket0()}});
    CHECK(test::close(mixture_overall_probability(m, g, OutcomeSet::full(2)), 1.0, 1e-14));
    // mean of the two pure-state values 0.4 and 0.8
    CHECK(test::close(mixture_overall_probability(m, g, OutcomeSet::singleton_base(0)), 0.6, 1e-14));
    const OperationalMixture single = OperationalMixture::pure(ket_plus());
    CHECK(test::close(mixture_overall_probability(single, g, OutcomeSet::a0_only()), 0.35, 1e-14));
}

TEST_CASE("overall = detection * conditional for random mixtures") {
    auto rng = test::make_rng(33);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t dim = 2 + trial % 3;
        const OperationalMixture m = test::random_mixture(rng, dim, 3);
        const DiscreteObservable base = test::random_observable(rng, dim, 3);
        GeneralizedObservable g(base, -1.0, test::random_detection_model(rng, base.n_outcomes()));
        for (const OutcomeSet& x : all_outcome_sets(base.n_outcomes())) {
            if (x.contains_a0() || x.is_empty()) continue;
            bool supported = true;
            for (const auto& c : m.components())
                supported = supported && quadratic_form(pv_projector(g, x), c.state.vector).real() > 1e-6;
            if (!supported) continue;
            const auto w = conditional_weights(m, g, x);
            double wsum = 0.0;
            for (double wi : w) wsum += wi;
            CHECK(test::close(wsum, 1.0, 1e-12)); // Bayes normalization
            const double lhs = mixture_overall_probability(m, g, x);
            const double rhs =
                mixture_detection_probability(m, g, x) * mixture_conditional_probability(m, g, x);
            CHECK(test::close(lhs, rhs, 1e-10));
        }
    }
}

TEST_CASE("probabilistic equivalence in the Gleason regime") {
    const OperationalMixture zbasis({{0.5, ket0()}, {0.5, ket1()}});
    const OperationalMixture xbasis({{0.5, ket_plus()}, {0.5, ket_minus()}});

    std::vector<GeneralizedObservable> family;
    family.emplace_back(sigma_z_base(), 0.0, DetectionModel::uniform(1.0));
    CMatrix sx(2, 2);
    sx(0, 1) = 1.0;
    sx(1, 0) = 1.0;
    family.emplace_back(DiscreteObservable::from_operator(sx), 0.0, DetectionModel::uniform(1.0));

    CHECK(probabilistically_equivalent(zbasis, zbasis, family).equivalent);
    CHECK(probabilistically_equivalent(zbasis, xbasis, family).equivalent);

    // a state-dependent model (p^d = 1 on |0>,|1>, 0.5 on |+>,|->) separates them
    std::vector<GeneralizedObservable> sharp;
    sharp.emplace_back(sigma_z_base(), 0.0,
                       DetectionModel::state_dependent([](const CVector& psi, std::size_t) {
                           return std::abs(std::norm(psi[0]) - std::norm(psi[1]));
                       }));
    const EquivalenceResult res = probabilistically_equivalent(zbasis, xbasis, sharp);
    CHECK_FALSE(res.equivalent);
    CHECK(res.observable_index == 0);
    CHECK(std::abs(res.lhs - res.rhs) > 0.1);
}

TEST_CASE("regression: equivalent mixtures with distinct conditional families") {
    // sigma_S != sigma_T, probabilistically equivalent under uniform models
    // (same standard density), but a state-dependent model yields different
    // conditional densities.
    const OperationalMixture mx({{0.5, ket_plus()}, {0.5, ket_minus()}});
    const OperationalMixture my({{0.5, ket_yplus()}, {0.5, ket_yminus()}});

    std::vector<GeneralizedObservable> uniform_family;
    uniform_family.emplace_back(sigma_z_base(), 0.0, DetectionModel::uniform(0.7));
    CHECK(probabilistically_equivalent(mx, my, uniform_family).equivalent);

    // p^d = 0.5 + 0.25<sigma_x> + 0.25<sigma_y>
    GeneralizedObservable g(
        sigma_z_base(), 0.0, DetectionModel::state_dependent([](const CVector& psi, std::size_t) {
            const cplx cross = std::conj(psi[0]) * psi[1];
            return 0.5 + 0.5 * cross.real() + 0.5 * cross.imag();
        }));
    const OutcomeSet both = OutcomeSet::base({0, 1});
    const CMatrix rho_x = conditional_density(mx, g, both);
    const CMatrix rho_y = conditional_density(my, g, both);
    CHECK((rho_x - rho_y).max_abs() > 0.2);
    // while the standard densities coincide
    CHECK(test::matrix_close(standard_density(mx), standard_density(my), 1e-14));
}
