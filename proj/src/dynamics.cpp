#include "esr/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace esr {

PureState gpp_apply(const GeneralizedObservable& g, const PureState& s, const OutcomeSet& x,
                    Branch branch, double tol) {
    const OutcomeSet& target = branch == Branch::yes ? x : x.complement(g.n_outcomes());
    const CVector image = effect(g, s.vector, target) * s.vector;
    if (image.norm() <= tol) throw std::domain_error("branch has zero probability; post-state undefined");
    return PureState(image.normalized());
}

OperationalMixture glp_apply(const GeneralizedObservable& g, const OperationalMixture& m,
                             const OutcomeSet& x, Branch branch, double tol) {
    const OutcomeSet target = branch == Branch::yes ? x : x.complement(g.n_outcomes());
    std::vector<double> branch_probs(m.size());
    double total = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) {
        branch_probs[j] = overall_probability(g, m.components()[j].state.vector, target);
        total += m.components()[j].weight * branch_probs[j];
    }
    if (total <= tol) throw std::domain_error("branch impossible");
    std::vector<OperationalMixture::Component> out;
    double kept = 0.0;
    for (std::size_t j = 0; j < m.size(); ++j) {
        const double w = m.components()[j].weight * branch_probs[j] / total;
        if (m.components()[j].weight * branch_probs[j] <= tol) continue; // prune zero-measure branches
        out.push_back({w, gpp_apply(g, m.components()[j].state, target, Branch::yes, tol)});
        kept += w;
    }
    if (out.empty()) throw std::domain_error("branch impossible");
    for (auto& c : out) c.weight /= kept;
    return OperationalMixture(std::move(out));
}

OperationalMixture nonselective_measure(const GeneralizedObservable& g, const PureState& s, double tol) {
    const OutcomeDistribution dist = outcome_probabilities(g, s.vector);
    std::vector<OperationalMixture::Component> out;
    double kept = 0.0;
    for (std::size_t n = 0; n < dist.base.size(); ++n) {
        if (dist.base[n] <= tol) continue;
        out.push_back({dist.base[n], gpp_apply(g, s, OutcomeSet::singleton_base(n), Branch::yes, tol)});
        kept += dist.base[n];
    }
    if (dist.a0 > tol) {
        out.push_back({dist.a0, gpp_apply(g, s, OutcomeSet::a0_only(), Branch::yes, tol)});
        kept += dist.a0;
    }
    for (auto& c : out) c.weight /= kept;
    return OperationalMixture(std::move(out));
}

double sequential_joint_probability(const GeneralizedObservable& ga, const GeneralizedObservable& gb,
                                    const PureState& s, const Outcome& a, const Outcome& b) {
    const OutcomeSet xa = a.as_set();
    const double pa = overall_probability(ga, s.vector, xa);
    if (pa <= 1e-15) return 0.0;
    const PureState mid = gpp_apply(ga, s, xa, Branch::yes);
    return pa * overall_probability(gb, mid.vector, b.as_set());
}

namespace {

void check_pointer_basis(const std::vector<CVector>& basis, std::size_t apparatus_dim,
                         std::size_t needed) {
    if (basis.size() < needed)
        throw std::invalid_argument("apparatus: pointer basis must cover every outcome plus rest");
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis[i].dim() != apparatus_dim)
            throw std::invalid_argument("apparatus: pointer vector dimension mismatch");
        for (std::size_t j = i; j < basis.size(); ++j) {
            const cplx ip = basis[i].inner(basis[j]);
            const cplx expected = i == j ? cplx(1.0) : cplx(0.0);
            if (std::abs(ip - expected) > 1e-10)
                throw std::invalid_argument("apparatus: pointer basis not orthonormal");
        }
    }
}

} // namespace

ApparatusCoupling::ApparatusCoupling(GeneralizedObservable obs, std::size_t apparatus_dim_)
    : system_obs(std::move(obs)), apparatus_dim(apparatus_dim_) {
    const std::size_t needed = system_obs.n_outcomes() + 1;
    if (apparatus_dim < needed)
        throw std::invalid_argument("apparatus dimension must be at least the number of outcomes + 1");
    for (std::size_t i = 0; i < needed; ++i) pointer_basis.push_back(CVector::basis(apparatus_dim, i));
    theta.assign(system_obs.n_outcomes(), 0.0);
}

ApparatusCoupling::ApparatusCoupling(GeneralizedObservable obs, std::size_t apparatus_dim_,
                                     std::vector<CVector> pointer_basis_, std::vector<double> theta_,
                                     double phi0_)
    : system_obs(std::move(obs)),
      apparatus_dim(apparatus_dim_),
      pointer_basis(std::move(pointer_basis_)),
      theta(std::move(theta_)),
      phi0(phi0_) {
    const std::size_t needed = system_obs.n_outcomes() + 1;
    if (apparatus_dim < needed)
        throw std::invalid_argument("apparatus dimension must be at least the number of outcomes + 1");
    check_pointer_basis(pointer_basis, apparatus_dim, needed);
    if (theta.size() != system_obs.n_outcomes())
        throw std::invalid_argument("apparatus: one phase per detected outcome required");
}

CVector apparatus_evolve(const ApparatusCoupling& c, const PureState& s) {
    const GeneralizedObservable& g = c.system_obs;
    if (s.dim() != g.dim()) throw std::invalid_argument("apparatus: state dimension mismatch");
    const OutcomeDistribution dist = outcome_probabilities(g, s.vector);
    CVector psi_compound(g.dim() * c.apparatus_dim);
    for (std::size_t n = 0; n < g.n_outcomes(); ++n) {
        const double pd = g.detection.value(s.vector, n);
        if (pd <= 0.0) continue;
        const cplx alpha = std::sqrt(pd) * std::exp(cplx(0.0, c.theta[n]));
        psi_compound += tensor_product(alpha * (g.base.projectors[n] * s.vector),
                                       c.pointer_basis[n + 1]);
    }
    if (dist.a0 > 1e-15) {
        // ||T({a0}) psi|| >= p^t(F0) by Cauchy-Schwarz, so this cannot throw
        const PureState rest = gpp_apply(g, s, OutcomeSet::a0_only(), Branch::yes, 1e-15);
        const cplx beta = std::sqrt(dist.a0) * std::exp(cplx(0.0, c.phi0));
        psi_compound += tensor_product(beta * rest.vector, c.pointer_basis[0]);
    }
    return psi_compound;
}

double verify_partial_trace_consistency(const ApparatusCoupling& c, const PureState& s) {
    const CVector compound = apparatus_evolve(c, s);
    const CMatrix reduced = partial_trace(outer(compound, compound), c.system_obs.dim(),
                                          c.apparatus_dim, 0);
    const CMatrix rho_tilde = standard_density(nonselective_measure(c.system_obs, s));
    return (reduced - rho_tilde).max_abs();
}

} // namespace esr
