#include "esr/observables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace esr {

namespace {

constexpr double kProjectorTol = 1e-10;
constexpr double kUnitTol = 1e-10;

void check_state(const GeneralizedObservable& g, const CVector& psi) {
    if (psi.dim() != g.dim()) throw std::invalid_argument("state dimension does not match observable");
    if (std::abs(psi.norm() - 1.0) > kUnitTol) throw std::invalid_argument("state vector is not unit");
}

void check_set(const GeneralizedObservable& g, const OutcomeSet& x) {
    for (std::size_t i : x.base_indices())
        if (i >= g.n_outcomes()) throw std::invalid_argument("outcome set references an unknown outcome");
}

} // namespace

DiscreteObservable::DiscreteObservable(std::vector<double> outcomes_, std::vector<CMatrix> projectors_)
    : outcomes(std::move(outcomes_)), projectors(std::move(projectors_)) {
    if (outcomes.empty() || outcomes.size() != projectors.size())
        throw std::invalid_argument("observable: outcomes and projectors must be nonempty and match");
    dim = projectors.front().rows();
    for (std::size_t i = 0; i < outcomes.size(); ++i)
        for (std::size_t j = i + 1; j < outcomes.size(); ++j)
            if (outcomes[i] == outcomes[j]) throw std::invalid_argument("observable: outcomes must be distinct");
    CMatrix sum = CMatrix::zero(dim, dim);
    for (const CMatrix& p : projectors) {
        if (p.rows() != dim || p.cols() != dim)
            throw std::invalid_argument("observable: projector dimension mismatch");
        if (!p.is_hermitian(kProjectorTol)) throw std::invalid_argument("observable: projector not Hermitian");
        if ((p * p - p).max_abs() > kProjectorTol)
            throw std::invalid_argument("observable: projector not idempotent");
        sum += p;
    }
    for (std::size_t i = 0; i < projectors.size(); ++i)
        for (std::size_t j = i + 1; j < projectors.size(); ++j)
            if ((projectors[i] * projectors[j]).max_abs() > kProjectorTol)
                throw std::invalid_argument("observable: projectors not mutually orthogonal");
    if ((sum - CMatrix::identity(dim)).max_abs() > kProjectorTol)
        throw std::invalid_argument("observable: projectors do not sum to the identity");
}

DiscreteObservable DiscreteObservable::from_operator(const CMatrix& h, double tol) {
    SpectralDecomposition sd = spectral_decompose(h, tol);
    return DiscreteObservable(std::move(sd.eigenvalues), std::move(sd.projectors));
}

DetectionModel::DetectionModel(Kind kind, std::vector<double> values, Rule rule)
    : kind_(kind), values_(std::move(values)), rule_(std::move(rule)) {}

DetectionModel DetectionModel::uniform(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("detection probability must lie in [0,1]");
    return DetectionModel(Kind::uniform, {p}, nullptr);
}

DetectionModel DetectionModel::per_outcome(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("per-outcome detection list is empty");
    for (double p : values)
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("detection probability must lie in [0,1]");
    return DetectionModel(Kind::per_outcome, std::move(values), nullptr);
}

DetectionModel DetectionModel::state_dependent(Rule rule) {
    if (!rule) throw std::invalid_argument("state-dependent detection rule is empty");
    return DetectionModel(Kind::state_dependent, {}, std::move(rule));
}

double DetectionModel::value(const CVector& psi, std::size_t n) const {
    double p = 0.0;
    switch (kind_) {
        case Kind::uniform: p = values_.front(); break;
        case Kind::per_outcome:
            if (n >= values_.size())
                throw std::invalid_argument("per-outcome detection model has no value for this outcome");
            p = values_[n];
            break;
        case Kind::state_dependent: p = rule_(psi, n); break;
    }
    if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("detection rule returned a value outside [0,1]");
    return p;
}

GeneralizedObservable::GeneralizedObservable(DiscreteObservable base_, double a0, DetectionModel detection_)
    : base(std::move(base_)), no_registration(a0), detection(std::move(detection_)) {
    for (double a : base.outcomes)
        if (a == a0) throw std::invalid_argument("no-registration outcome must not be a base outcome");
}

OutcomeSet::OutcomeSet(bool contains_a0, std::vector<std::size_t> base_indices)
    : contains_a0_(contains_a0), indices_(std::move(base_indices)) {
    std::sort(indices_.begin(), indices_.end());
    indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

OutcomeSet OutcomeSet::full(std::size_t n_outcomes) {
    std::vector<std::size_t> all(n_outcomes);
    for (std::size_t i = 0; i < n_outcomes; ++i) all[i] = i;
    return OutcomeSet(true, std::move(all));
}

bool OutcomeSet::contains_base(std::size_t index) const {
    return std::binary_search(indices_.begin(), indices_.end(), index);
}

OutcomeSet OutcomeSet::with_a0() const { return OutcomeSet(true, indices_); }

OutcomeSet OutcomeSet::complement(std::size_t n_outcomes) const {
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n_outcomes; ++i)
        if (!contains_base(i)) rest.push_back(i);
    return OutcomeSet(!contains_a0_, std::move(rest));
}

bool OutcomeSet::disjoint_from(const OutcomeSet& other) const {
    if (contains_a0_ && other.contains_a0_) return false;
    for (std::size_t i : indices_)
        if (other.contains_base(i)) return false;
    return true;
}

OutcomeSet OutcomeSet::set_union(const OutcomeSet& other) const {
    std::vector<std::size_t> merged = indices_;
    merged.insert(merged.end(), other.indices_.begin(), other.indices_.end());
    return OutcomeSet(contains_a0_ || other.contains_a0_, std::move(merged));
}

std::string OutcomeSet::label(const GeneralizedObservable& g) const {
    std::ostringstream out;
    out << "{";
    bool first = true;
    if (contains_a0_) {
        out << "a0";
        first = false;
    }
    for (std::size_t i : indices_) {
        if (!first) out << ",";
        out << g.base.outcomes.at(i);
        first = false;
    }
    out << "}";
    return out.str();
}

std::vector<OutcomeSet> all_outcome_sets(std::size_t n_outcomes) {
    std::vector<OutcomeSet> sets;
    const std::size_t count = std::size_t{1} << (n_outcomes + 1);
    sets.reserve(count);
    for (std::size_t mask = 0; mask < count; ++mask) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n_outcomes; ++i)
            if (mask & (std::size_t{1} << i)) idx.push_back(i);
        sets.emplace_back((mask >> n_outcomes) & 1, std::move(idx));
    }
    return sets;
}

double OutcomeDistribution::total() const {
    double t = a0;
    for (double p : base) t += p;
    return t;
}

CMatrix pv_projector(const GeneralizedObservable& g, const OutcomeSet& x) {
    check_set(g, x);
    CMatrix p = CMatrix::zero(g.dim(), g.dim());
    for (std::size_t i : x.base_indices()) p += g.base.projectors[i];
    return p;
}

CMatrix effect(const GeneralizedObservable& g, const CVector& psi, const OutcomeSet& x) {
    check_state(g, psi);
    check_set(g, x);
    if (!x.contains_a0()) {
        CMatrix t = CMatrix::zero(g.dim(), g.dim());
        for (std::size_t n : x.base_indices())
            t += cplx(g.detection.value(psi, n)) * g.base.projectors[n];
        return t;
    }
    CMatrix t = CMatrix::identity(g.dim());
    for (std::size_t n = 0; n < g.n_outcomes(); ++n)
        if (!x.contains_base(n)) t -= cplx(g.detection.value(psi, n)) * g.base.projectors[n];
    return t;
}

OutcomeDistribution outcome_probabilities(const GeneralizedObservable& g, const CVector& psi) {
    check_state(g, psi);
    OutcomeDistribution dist;
    dist.base.resize(g.n_outcomes());
    double missed = 0.0;
    for (std::size_t n = 0; n < g.n_outcomes(); ++n) {
        const double pd = g.detection.value(psi, n);
        const double quantum = quadratic_form(g.base.projectors[n], psi).real();
        dist.base[n] = pd * quantum;
        missed += (1.0 - pd) * quantum;
    }
    dist.a0 = missed;
    return dist;
}

double overall_probability(const GeneralizedObservable& g, const CVector& psi, const OutcomeSet& x) {
    return quadratic_form(effect(g, psi, x), psi).real();
}

double expectation(const GeneralizedObservable& g, const CVector& psi) {
    check_state(g, psi);
    double e = g.no_registration;
    for (std::size_t n = 0; n < g.n_outcomes(); ++n) {
        const double quantum = quadratic_form(g.base.projectors[n], psi).real();
        e += (g.base.outcomes[n] - g.no_registration) * g.detection.value(psi, n) * quantum;
    }
    return e;
}

double property_detection_probability(const GeneralizedObservable& g, const CVector& psi,
                                      const OutcomeSet& x, double tol) {
    if (x.contains_a0())
        throw std::invalid_argument("detection probability is defined for a0-free outcome sets only");
    const double quantum = quadratic_form(pv_projector(g, x), psi).real();
    if (quantum <= tol)
        throw std::domain_error("property has zero quantum probability; detection probability undefined");
    return overall_probability(g, psi, x) / quantum;
}

} // namespace esr
