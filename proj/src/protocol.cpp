#include "esr/protocol.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace esr {

std::size_t sample_index(Rng& rng, std::span<const double> probs) {
    const double u = rng.uniform01();
    double cum = 0.0;
    std::size_t argmax = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] > best) {
            best = probs[i];
            argmax = i;
        }
        cum += probs[i];
        if (u < cum) return i;
    }
    if (best <= 0.0) throw std::domain_error("sample_index: distribution has no mass");
    return argmax;
}

std::size_t step_slot_count(const ProtocolStep& step) {
    return step.kind == ProtocolStep::Kind::measure ? step.observable.n_outcomes() + 1 : 2;
}

std::string slot_label(const ProtocolStep& step, std::size_t slot) {
    if (step.kind == ProtocolStep::Kind::select) return slot == 0 ? "yes" : "no";
    if (slot == step.observable.n_outcomes()) return "a0";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", step.observable.base.outcomes.at(slot));
    return std::string(buf);
}

namespace {

OutcomeSet slot_set(const ProtocolStep& step, std::size_t slot) {
    return slot == step.observable.n_outcomes() ? OutcomeSet::a0_only()
                                                : OutcomeSet::singleton_base(slot);
}

} // namespace

std::vector<double> step_distribution(const ProtocolStep& step, const StateValue& state) {
    const GeneralizedObservable& g = step.observable;
    if (step.kind == ProtocolStep::Kind::measure) {
        std::vector<double> probs(g.n_outcomes() + 1, 0.0);
        if (const auto* pure = std::get_if<PureState>(&state)) {
            const OutcomeDistribution dist = outcome_probabilities(g, pure->vector);
            for (std::size_t n = 0; n < dist.base.size(); ++n) probs[n] = dist.base[n];
            probs.back() = dist.a0;
        } else {
            const auto& mix = std::get<OperationalMixture>(state);
            for (std::size_t n = 0; n < g.n_outcomes(); ++n)
                probs[n] = mixture_overall_probability(mix, g, OutcomeSet::singleton_base(n));
            probs.back() = mixture_overall_probability(mix, g, OutcomeSet::a0_only());
        }
        return probs;
    }
    double p_yes = 0.0;
    if (const auto* pure = std::get_if<PureState>(&state))
        p_yes = overall_probability(g, pure->vector, step.set);
    else
        p_yes = mixture_overall_probability(std::get<OperationalMixture>(state), g, step.set);
    p_yes = std::clamp(p_yes, 0.0, 1.0);
    return {p_yes, 1.0 - p_yes};
}

StateValue step_collapse(const ProtocolStep& step, const StateValue& state, std::size_t slot,
                         double tol) {
    const GeneralizedObservable& g = step.observable;
    OutcomeSet x;
    Branch branch = Branch::yes;
    if (step.kind == ProtocolStep::Kind::measure) {
        x = slot_set(step, slot);
    } else {
        x = step.set;
        branch = slot == 0 ? Branch::yes : Branch::no;
    }
    if (const auto* pure = std::get_if<PureState>(&state))
        return gpp_apply(g, *pure, x, branch, tol);
    return glp_apply(g, std::get<OperationalMixture>(state), x, branch, tol);
}

namespace {

void walk(const Protocol& protocol, const StateValue& state, std::size_t depth, double path_prob,
          std::vector<int>& path, double prune_tol, AnalyticProtocolResult& out) {
    if (depth == protocol.steps.size()) {
        if (!path.empty()) out.sequences.emplace_back(path, path_prob);
        return;
    }
    const ProtocolStep& step = protocol.steps[depth];
    const std::vector<double> probs = step_distribution(step, state);
    for (std::size_t slot = 0; slot < probs.size(); ++slot) {
        const double mass = path_prob * probs[slot];
        out.step_marginals[depth][slot] += mass;
        if (mass <= prune_tol || probs[slot] <= 0.0) continue;
        StateValue next = step_collapse(step, state, slot);
        MeasurementRecord rec;
        rec.observable = step.observable_name;
        rec.outcome_set = step.kind == ProtocolStep::Kind::measure ? slot_set(step, slot) : step.set;
        rec.branch = step.kind == ProtocolStep::Kind::select && slot == 1 ? Branch::no : Branch::yes;
        rec.probability = probs[slot];
        rec.pre_state = state;
        rec.post_state = next;
        out.records.push_back(std::move(rec));
        path.push_back(static_cast<int>(slot));
        walk(protocol, next, depth + 1, mass, path, prune_tol, out);
        path.pop_back();
    }
}

} // namespace

AnalyticProtocolResult run_protocol_analytic(const Protocol& protocol, double prune_tol) {
    AnalyticProtocolResult out;
    out.step_marginals.resize(protocol.steps.size());
    for (std::size_t i = 0; i < protocol.steps.size(); ++i)
        out.step_marginals[i].assign(step_slot_count(protocol.steps[i]), 0.0);
    std::vector<int> path;
    walk(protocol, protocol.initial, 0, 1.0, path, prune_tol, out);
    std::sort(out.sequences.begin(), out.sequences.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

void McCounts::merge(const McCounts& other) {
    samples += other.samples;
    if (step_counts.empty()) step_counts.assign(other.step_counts.begin(), other.step_counts.end());
    else
        for (std::size_t i = 0; i < step_counts.size(); ++i)
            for (std::size_t s = 0; s < step_counts[i].size(); ++s)
                step_counts[i][s] += other.step_counts[i][s];
    for (const auto& [path, count] : other.sequences) sequences[path] += count;
}

McCounts run_protocol_batch(const Protocol& protocol, std::uint64_t samples, std::uint64_t seed) {
    McCounts counts;
    counts.samples = samples;
    counts.step_counts.resize(protocol.steps.size());
    for (std::size_t i = 0; i < protocol.steps.size(); ++i)
        counts.step_counts[i].assign(step_slot_count(protocol.steps[i]), 0);
    Rng rng(seed);
    std::vector<int> path(protocol.steps.size());
    for (std::uint64_t s = 0; s < samples; ++s) {
        StateValue state = protocol.initial;
        for (std::size_t depth = 0; depth < protocol.steps.size(); ++depth) {
            const ProtocolStep& step = protocol.steps[depth];
            const std::vector<double> probs = step_distribution(step, state);
            const std::size_t slot = sample_index(rng, probs);
            counts.step_counts[depth][slot] += 1;
            path[depth] = static_cast<int>(slot);
            if (depth + 1 < protocol.steps.size()) state = step_collapse(step, state, slot);
        }
        if (!path.empty()) counts.sequences[path] += 1;
    }
    return counts;
}

} // namespace esr
