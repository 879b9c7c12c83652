#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "esr/bell.hpp"
#include "esr/parallel.hpp"
#include "test_support.hpp"

using namespace esr;

namespace {

constexpr double kPi = std::numbers::pi;

// z-x plane settings at the Tsirelson angles 0, 90, 45, 135 degrees
BellScenario tsirelson_scenario(DetectionModel d) {
    return BellScenario::singlet(BlochVector::from_polar(0.0), BlochVector::from_polar(kPi / 2),
                                 BlochVector::from_polar(kPi / 4), BlochVector::from_polar(3 * kPi / 4),
                                 std::move(d));
}

} // namespace

TEST_CASE("quantum correlation of the singlet is -a.b") {
    auto rng = test::make_rng(51);
    std::uniform_real_distribution<double> angle(0.0, kPi);
    for (int trial = 0; trial < 50; ++trial) {
        const double ta = angle(rng), pa = 2 * angle(rng);
        const double tb = angle(rng), pb = 2 * angle(rng);
        const BlochVector a = BlochVector::from_polar(ta, pa);
        const BlochVector b = BlochVector::from_polar(tb, pb);
        const BellScenario sc = BellScenario::singlet(a, a, b, b, DetectionModel::uniform(1.0));
        const double e = quantum_correlation(sc, SideASetting::a, SideBSetting::b);
        CHECK(test::close(e, -a.dot(b), 1e-12));
        // independent oracle: direct 4x4 quadratic form
        CHECK(test::close(e, test::singlet_correlation_oracle(a.x, a.y, a.z, b.x, b.y, b.z), 1e-12));
    }
}

TEST_CASE("quantum correlation special angles") {
    const BlochVector z = BlochVector::from_polar(0.0);
    const BlochVector x = BlochVector::from_polar(kPi / 2);
    const BlochVector diag = BlochVector::from_polar(kPi / 4);
    const DetectionModel ideal = DetectionModel::uniform(1.0);
    CHECK(test::close(quantum_correlation(BellScenario::singlet(z, x, z, x, ideal), SideASetting::a,
                                          SideBSetting::b),
                      -1.0, 1e-14));
    CHECK(test::close(quantum_correlation(BellScenario::singlet(z, z, x, x, ideal), SideASetting::a,
                                          SideBSetting::b),
                      0.0, 1e-14));
    CHECK(test::close(quantum_correlation(BellScenario::singlet(z, z, diag, diag, ideal),
                                          SideASetting::a, SideBSetting::b),
                      -std::sqrt(2.0) / 2.0, 1e-14));
}

TEST_CASE("joint expectation: ideal detection equals the quantum correlation") {
    const BellScenario sc = tsirelson_scenario(DetectionModel::uniform(1.0));
    for (auto sa : {SideASetting::a, SideASetting::a_prime})
        for (auto sb : {SideBSetting::b, SideBSetting::b_prime})
            CHECK(test::close(joint_expectation(sc, sa, sb), quantum_correlation(sc, sa, sb), 1e-13));
}

TEST_CASE("joint expectation: uniform(0) kills every term") {
    const BellScenario sc = tsirelson_scenario(DetectionModel::uniform(0.0));
    CHECK(joint_expectation(sc, SideASetting::a, SideBSetting::b) == 0.0);
}

TEST_CASE("joint expectation factorizes as -p^2 a.b on the singlet") {
    auto rng = test::make_rng(52);
    std::uniform_real_distribution<double> angle(0.0, kPi);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const BlochVector a = BlochVector::from_polar(angle(rng), 2 * angle(rng));
        const BlochVector b = BlochVector::from_polar(angle(rng), 2 * angle(rng));
        const double p = unif(rng);
        const BellScenario sc = BellScenario::singlet(a, a, b, b, DetectionModel::uniform(p));
        CHECK(test::close(joint_expectation(sc, SideASetting::a, SideBSetting::b), -p * p * a.dot(b),
                          1e-12));
    }
}

TEST_CASE("O_R factorization holds for per-observable uniform detection") {
    auto rng = test::make_rng(53);
    std::uniform_real_distribution<double> angle(0.0, kPi);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        BellScenario sc = tsirelson_scenario(DetectionModel::uniform(1.0));
        const double pa = unif(rng), pb = unif(rng);
        sc.a.detection = DetectionModel::uniform(pa);
        sc.b.detection = DetectionModel::uniform(pb);
        const double e = joint_expectation(sc, SideASetting::a, SideBSetting::b);
        const double q = quantum_correlation(sc, SideASetting::a, SideBSetting::b);
        CHECK(test::close(e, pa * pb * q, 1e-12));
        CHECK(std::abs(e) <= 1.0 + 1e-12);
    }
}

TEST_CASE("modified BCHSH at the Tsirelson angles") {
    CHECK(test::close(modified_bchsh_lhs(tsirelson_scenario(DetectionModel::uniform(1.0))),
                      2.0 * std::sqrt(2.0), 1e-12));
    // p = 2^(-1/4): the functional returns exactly to the classical bound
    const double p_star = std::pow(2.0, -0.25);
    CHECK(test::close(modified_bchsh_lhs(tsirelson_scenario(DetectionModel::uniform(p_star))), 2.0,
                      1e-9));
    CHECK(modified_bchsh_lhs(tsirelson_scenario(DetectionModel::uniform(0.0))) == 0.0);
    // coexistence: p = 0.84 < 2^(-1/4) stays within the bound
    CHECK(modified_bchsh_lhs(tsirelson_scenario(DetectionModel::uniform(0.84))) <= 2.0);
}

TEST_CASE("modified BCHSH is nondecreasing in the uniform detection probability") {
    const BellScenario sc = tsirelson_scenario(DetectionModel::uniform(1.0));
    double prev = 0.0;
    for (int i = 0; i <= 20; ++i) {
        const double lhs = modified_bchsh_lhs(sc.with_uniform_detection(i / 20.0));
        CHECK(lhs >= prev - 1e-12);
        prev = lhs;
    }
}

TEST_CASE("sequential assembly agrees with the closed form") {
    auto rng = test::make_rng(54);
    std::uniform_real_distribution<double> angle(0.0, kPi);
    for (int trial = 0; trial < 20; ++trial) {
        BellScenario sc = BellScenario::singlet(
            BlochVector::from_polar(angle(rng), 2 * angle(rng)),
            BlochVector::from_polar(angle(rng), 2 * angle(rng)),
            BlochVector::from_polar(angle(rng), 2 * angle(rng)),
            BlochVector::from_polar(angle(rng), 2 * angle(rng)), DetectionModel::uniform(1.0));
        // a state-dependent model makes the noncontextual freeze observable
        sc.b.detection = DetectionModel::state_dependent([](const CVector& psi, std::size_t n) {
            return 0.3 + 0.4 * std::norm(psi[n % psi.dim()]);
        });
        sc.a.detection = DetectionModel::uniform(0.9);
        for (auto sa : {SideASetting::a, SideASetting::a_prime})
            for (auto sb : {SideBSetting::b, SideBSetting::b_prime})
                CHECK(test::close(joint_expectation_sequential(sc, sa, sb),
                                  joint_expectation(sc, sa, sb), 1e-10));
    }
}

TEST_CASE("contextual diagnostics mode differs for state-dependent models") {
    BellScenario sc = tsirelson_scenario(DetectionModel::uniform(1.0));
    // nonlinear in the amplitudes: branch-averaging the collapsed states
    // cannot reproduce the pre-measurement value
    sc.b.detection = DetectionModel::state_dependent([](const CVector& psi, std::size_t) {
        const double w = std::norm(psi[1]);
        return 0.2 + 0.6 * w * w;
    });
    const double noncontextual = joint_expectation_sequential(sc, SideASetting::a, SideBSetting::b);
    sc.contextual_detection = true;
    const double contextual = joint_expectation_sequential(sc, SideASetting::a, SideBSetting::b);
    CHECK(std::abs(noncontextual - contextual) > 1e-3);
}

TEST_CASE("classical BCHSH: deterministic extremal models reach exactly 2") {
    // single lambda, A = +1 everywhere, B = +1 everywhere
    const LHVModel all_plus({1.0}, {{1, 1}}, {{1, 1}});
    CHECK(test::close(classical_bchsh_lhs(all_plus), 2.0, 0.0));
    // A identically +1, B(b) = +1, B(b') = -1
    const LHVModel mixed({1.0}, {{1, 1}}, {{1, -1}});
    CHECK(test::close(classical_bchsh_lhs(mixed), 2.0, 0.0));
}

TEST_CASE("classical BCHSH never exceeds 2 on random models") {
    Rng rng(55);
    for (int trial = 0; trial < 2000; ++trial)
        CHECK(classical_bchsh_lhs(par::random_lhv_model(rng, 10)) <= 2.0 + 1e-12);
}

TEST_CASE("LHV model validation") {
    CHECK_THROWS_AS(LHVModel({0.5, 0.6}, {{1, 1}, {1, 1}}, {{1, 1}, {1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(LHVModel({1.0}, {{2, 1}}, {{1, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(LHVModel({-0.5, 1.5}, {{1, 1}, {1, 1}}, {{1, 1}, {1, 1}}), std::invalid_argument);
}

TEST_CASE("max uniform efficiency at the Tsirelson angles is 2^(-1/4)") {
    const EfficiencyBound bound = max_uniform_efficiency(tsirelson_scenario(DetectionModel::uniform(1.0)));
    CHECK_FALSE(bound.vacuous);
    CHECK(test::close(bound.quantum_chsh, 2.0 * std::sqrt(2.0), 1e-12));
    CHECK(test::close(bound.closed_form, std::pow(2.0, -0.25), 1e-12));
    CHECK(test::close(bound.bisection, bound.closed_form, 1e-9));
    // the 0.841 ceiling, to three decimals
    CHECK(test::close(bound.p_star, 0.841, 1e-3));
}

TEST_CASE("max uniform efficiency is vacuous at classical settings") {
    // a = b settings give |E| <= 2 trivially
    const BlochVector z = BlochVector::from_polar(0.0);
    const BellScenario sc = BellScenario::singlet(z, z, z, z, DetectionModel::uniform(1.0));
    const EfficiencyBound bound = max_uniform_efficiency(sc);
    CHECK(bound.vacuous);
    CHECK(bound.p_star == 1.0);
}

TEST_CASE("max uniform efficiency for Q = 2.5 is sqrt(0.8)") {
    // z-x plane settings a=0, a'=90deg, b=phi, b'=phi+90deg give
    // Q = 2(cos phi + sin phi); solve for Q = 2.5
    const double phi = std::asin(2.5 / (2.0 * std::sqrt(2.0))) - kPi / 4.0;
    const BellScenario sc = BellScenario::singlet(
        BlochVector::from_polar(0.0), BlochVector::from_polar(kPi / 2), BlochVector::from_polar(phi),
        BlochVector::from_polar(phi + kPi / 2), DetectionModel::uniform(1.0));
    const EfficiencyBound bound = max_uniform_efficiency(sc);
    CHECK(test::close(bound.quantum_chsh, 2.5, 1e-12));
    CHECK(test::close(bound.closed_form, std::sqrt(0.8), 1e-12));
    CHECK(test::close(bound.bisection, std::sqrt(0.8), 1e-9));
    // the bound verifies: LHS at p* is the classical 2
    CHECK(test::close(modified_bchsh_lhs(sc.with_uniform_detection(bound.p_star)), 2.0, 1e-8));
}

TEST_CASE("scenario validation") {
    const DetectionModel d = DetectionModel::uniform(1.0);
    auto a = LocalGenObservable::spin(BlochVector::from_polar(0.0), d, 1, "a");
    auto b = LocalGenObservable::spin(BlochVector::from_polar(0.0), d, 2, "b");
    CHECK_THROWS_AS(BellScenario(singlet_state(), 2, 2, a, b, b, b), std::invalid_argument);
    CHECK_THROWS_AS(LocalGenObservable::spin(BlochVector::from_polar(0.0), d, 3, "c"),
                    std::invalid_argument);
    CHECK_THROWS_AS(BlochVector(0.0, 0.0, 0.0), std::invalid_argument);
}
