#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "esr/dynamics.hpp"
#include "esr/rng.hpp"

// Measurement protocols: a named initial state threaded through a sequence
// of measure/select steps, evaluated either exactly (branch enumeration) or
// by seeded sampling.

namespace esr {

struct ProtocolStep {
    enum class Kind { measure, select };

    Kind kind;
    std::string observable_name;
    GeneralizedObservable observable;
    // select only:
    OutcomeSet set;
    Branch branch;

    static ProtocolStep measure(std::string name, GeneralizedObservable g) {
        return {Kind::measure, std::move(name), std::move(g), OutcomeSet::empty(), Branch::yes};
    }
    static ProtocolStep select(std::string name, GeneralizedObservable g, OutcomeSet x, Branch b) {
        return {Kind::select, std::move(name), std::move(g), std::move(x), b};
    }
};

struct Protocol {
    std::string name;
    std::string state_name;
    StateValue initial;
    std::vector<ProtocolStep> steps;
};

// Slot order per step: a measure step has one slot per base outcome in
// declared order followed by the no-registration outcome; a select step has
// slot 0 = yes, slot 1 = no.
std::size_t step_slot_count(const ProtocolStep& step);
std::string slot_label(const ProtocolStep& step, std::size_t slot);

// Outcome distribution of one step at a given state, in slot order.
std::vector<double> step_distribution(const ProtocolStep& step, const StateValue& state);

// Collapse after observing the given slot.
StateValue step_collapse(const ProtocolStep& step, const StateValue& state, std::size_t slot,
                         double tol = 1e-15);

struct AnalyticProtocolResult {
    std::vector<std::vector<double>> step_marginals;          // [step][slot]
    std::vector<std::pair<std::vector<int>, double>> sequences; // full paths, lexicographic
    std::vector<MeasurementRecord> records;
};

// Exact enumeration of every branch; branches below prune_tol (absolute
// path probability) are dropped.
AnalyticProtocolResult run_protocol_analytic(const Protocol& protocol, double prune_tol = 1e-12);

struct McCounts {
    std::uint64_t samples = 0;
    std::vector<std::vector<std::uint64_t>> step_counts;      // [step][slot]
    std::map<std::vector<int>, std::uint64_t> sequences;

    void merge(const McCounts& other);
};

// One sampling batch with its own generator; deterministic in (protocol, seed).
McCounts run_protocol_batch(const Protocol& protocol, std::uint64_t samples, std::uint64_t seed);

} // namespace esr
