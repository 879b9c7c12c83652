#include "esr/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <utility>

namespace esr {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw config_error(path + ": " + what);
}

const json& require(const json& node, const std::string& key, const std::string& path) {
    if (!node.is_object() || !node.contains(key)) fail(path, "missing key '" + key + "'");
    return node.at(key);
}

double as_number(const json& node, const std::string& path) {
    if (!node.is_number()) fail(path, "expected a number");
    return node.get<double>();
}

std::uint64_t as_uint(const json& node, const std::string& path) {
    if (node.is_number_unsigned()) return node.get<std::uint64_t>();
    if (node.is_number_integer() && node.get<std::int64_t>() >= 0)
        return static_cast<std::uint64_t>(node.get<std::int64_t>());
    fail(path, "expected a nonnegative integer");
}

cplx parse_complex(const json& node, const std::string& path) {
    if (node.is_number()) return cplx(node.get<double>(), 0.0);
    if (node.is_array() && node.size() == 2 && node[0].is_number() && node[1].is_number())
        return cplx(node[0].get<double>(), node[1].get<double>());
    fail(path, "expected a real number or [re, im] pair");
}

CVector parse_vector(const json& node, const std::string& path) {
    if (!node.is_array() || node.empty()) fail(path, "expected a nonempty array of entries");
    CVector v(node.size());
    for (std::size_t i = 0; i < node.size(); ++i)
        v[i] = parse_complex(node[i], path + "[" + std::to_string(i) + "]");
    return v;
}

CMatrix parse_matrix(const json& node, const std::string& path) {
    if (!node.is_array() || node.empty()) fail(path, "expected a nonempty array of rows");
    const std::size_t rows = node.size();
    const std::size_t cols = node[0].is_array() ? node[0].size() : 0;
    if (cols == 0) fail(path, "expected rows to be nonempty arrays");
    CMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const json& row = node[i];
        if (!row.is_array() || row.size() != cols) fail(path, "ragged matrix rows");
        for (std::size_t j = 0; j < cols; ++j)
            m(i, j) = parse_complex(row[j], path + "[" + std::to_string(i) + "]");
    }
    return m;
}

BlochVector parse_axis(const json& node, const std::string& path) {
    if (!node.is_array() || node.size() != 3) fail(path, "expected an [x, y, z] axis");
    try {
        return BlochVector(as_number(node[0], path), as_number(node[1], path), as_number(node[2], path));
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

DetectionModel parse_detection(const json& node, const std::string& path) {
    if (!node.is_object()) fail(path, "expected a detection model object");
    try {
        if (node.contains("uniform")) return DetectionModel::uniform(as_number(node.at("uniform"), path));
        if (node.contains("per_outcome")) {
            const json& arr = node.at("per_outcome");
            if (!arr.is_array() || arr.empty()) fail(path, "per_outcome must be a nonempty array");
            std::vector<double> values;
            for (const json& p : arr) values.push_back(as_number(p, path + ".per_outcome"));
            return DetectionModel::per_outcome(std::move(values));
        }
        if (node.contains("projector_weighted")) {
            // p^d_n(psi) = floor + scale * <psi|P_n|psi>; the projector list
            // is bound when the observable is assembled, so stash the rule
            // parameters here and let the caller finish it.
            fail(path, "projector_weighted is only valid inside an observable definition");
        }
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    fail(path, "unknown detection model (use uniform | per_outcome | projector_weighted)");
}

// Detection model bound to a concrete projector family:
// p^d_n(psi) = floor + scale * <psi|P_n|psi>, kept inside [0,1] by
// validating the endpoints.
DetectionModel parse_detection_for(const json& node, const std::string& path,
                                   const DiscreteObservable& base) {
    if (node.is_object() && node.contains("projector_weighted")) {
        const json& pw = node.at("projector_weighted");
        const double floor = as_number(require(pw, "floor", path), path + ".floor");
        const double scale = as_number(require(pw, "scale", path), path + ".scale");
        if (floor < 0.0 || floor > 1.0 || floor + scale < 0.0 || floor + scale > 1.0)
            fail(path, "projector_weighted endpoints must stay in [0,1]");
        std::vector<CMatrix> projectors = base.projectors;
        return DetectionModel::state_dependent(
            [floor, scale, projectors](const CVector& psi, std::size_t n) {
                return floor + scale * quadratic_form(projectors.at(n), psi).real();
            });
    }
    return parse_detection(node, path);
}

CMatrix pauli(const std::string& which, const std::string& path) {
    CMatrix m(2, 2);
    if (which == "x") {
        m(0, 1) = 1.0;
        m(1, 0) = 1.0;
    } else if (which == "y") {
        m(0, 1) = cplx(0.0, -1.0);
        m(1, 0) = cplx(0.0, 1.0);
    } else if (which == "z") {
        m(0, 0) = 1.0;
        m(1, 1) = -1.0;
    } else {
        fail(path, "pauli must be one of x, y, z");
    }
    return m;
}

DiscreteObservable parse_base(const json& node, const std::string& path) {
    try {
        if (node.contains("pauli")) {
            const CMatrix op = pauli(node.at("pauli").get<std::string>(), path + ".pauli");
            const SpectralDecomposition sd = spectral_decompose(op, 1e-9);
            // outcomes (+1, -1) in that order
            return DiscreteObservable({sd.eigenvalues[1], sd.eigenvalues[0]},
                                      {sd.projectors[1], sd.projectors[0]});
        }
        if (node.contains("axis")) {
            const CMatrix op = spin_operator(parse_axis(node.at("axis"), path + ".axis"));
            const SpectralDecomposition sd = spectral_decompose(op, 1e-9);
            return DiscreteObservable({sd.eigenvalues[1], sd.eigenvalues[0]},
                                      {sd.projectors[1], sd.projectors[0]});
        }
        if (node.contains("operator")) {
            const CMatrix op = parse_matrix(node.at("operator"), path + ".operator");
            return DiscreteObservable::from_operator(op, 1e-9);
        }
        if (node.contains("outcomes") && node.contains("projectors")) {
            std::vector<double> outcomes;
            for (const json& a : node.at("outcomes"))
                outcomes.push_back(as_number(a, path + ".outcomes"));
            std::vector<CMatrix> projectors;
            for (std::size_t i = 0; i < node.at("projectors").size(); ++i)
                projectors.push_back(
                    parse_matrix(node.at("projectors")[i], path + ".projectors[" + std::to_string(i) + "]"));
            return DiscreteObservable(std::move(outcomes), std::move(projectors));
        }
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
    fail(path, "observable base needs pauli | axis | operator | outcomes+projectors");
}

OutcomeSet parse_outcome_set(const json& node, const std::string& path,
                             const GeneralizedObservable& g) {
    if (!node.is_object()) fail(path, "expected an outcome set object {a0?, base?}");
    bool a0 = false;
    if (node.contains("a0")) {
        if (!node.at("a0").is_boolean()) fail(path, "a0 must be a boolean");
        a0 = node.at("a0").get<bool>();
    }
    std::vector<std::size_t> base;
    if (node.contains("base")) {
        if (!node.at("base").is_array()) fail(path, "base must be an array of outcome indices");
        for (const json& idx : node.at("base")) {
            const std::uint64_t i = as_uint(idx, path + ".base");
            if (i >= g.n_outcomes()) fail(path, "base index " + std::to_string(i) + " out of range");
            base.push_back(static_cast<std::size_t>(i));
        }
    }
    return OutcomeSet(a0, std::move(base));
}

} // namespace

std::string fnv1a64_hex(const std::string& data) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return std::string(buf);
}

ScenarioConfig parse_config(const json& doc, std::optional<std::uint64_t> cli_seed,
                            std::optional<std::uint64_t> env_seed) {
    if (!doc.is_object()) throw config_error("config: top level must be an object");
    if (!doc.contains("esr_config")) throw config_error("config: missing version header 'esr_config'");
    if (!doc.at("esr_config").is_number_integer() || doc.at("esr_config").get<int>() != 1)
        throw config_error("esr_config: unsupported version (expected 1)");

    ScenarioConfig cfg;
    cfg.canonical = doc;
    cfg.config_hash = fnv1a64_hex(doc.dump());

    if (doc.contains("seed")) cfg.seed = as_uint(doc.at("seed"), "seed");
    if (env_seed) {
        cfg.seed = *env_seed;
        cfg.seed_source = "env:ESR_SEED";
    }
    if (cli_seed) {
        cfg.seed = *cli_seed;
        cfg.seed_source = "cli";
    }
    if (doc.contains("samples")) {
        cfg.samples = as_uint(doc.at("samples"), "samples");
        if (cfg.samples == 0) throw config_error("samples: must be at least 1");
    }
    if (doc.contains("mc")) {
        const json& mc = doc.at("mc");
        if (mc.contains("batch_size")) {
            cfg.mc_batch_size = as_uint(mc.at("batch_size"), "mc.batch_size");
            if (cfg.mc_batch_size == 0) throw config_error("mc.batch_size: must be positive");
        }
        if (mc.contains("max_z_fraction"))
            cfg.max_z_fraction = as_number(mc.at("max_z_fraction"), "mc.max_z_fraction");
    }

    // states: two passes so mixtures can reference pure states by name
    if (doc.contains("states")) {
        const json& states = doc.at("states");
        if (!states.is_object()) throw config_error("states: expected an object of named states");
        for (const auto& [name, node] : states.items()) {
            const std::string path = "states." + name;
            if (node.contains("mixture")) continue;
            try {
                if (node.contains("vector")) {
                    cfg.states.emplace(name, PureState(parse_vector(node.at("vector"), path).normalized()));
                } else if (node.contains("builder")) {
                    const std::string builder = node.at("builder").get<std::string>();
                    if (builder == "singlet") {
                        cfg.states.emplace(name, singlet_state());
                    } else if (builder == "basis") {
                        const std::uint64_t dim = as_uint(require(node, "dim", path), path + ".dim");
                        const std::uint64_t index = as_uint(require(node, "index", path), path + ".index");
                        if (index >= dim) fail(path, "basis index out of range");
                        cfg.states.emplace(name, PureState::basis(dim, index));
                    } else if (builder == "bloch") {
                        const double theta = as_number(require(node, "theta", path), path + ".theta");
                        const double phi = node.contains("phi") ? as_number(node.at("phi"), path + ".phi") : 0.0;
                        CVector v(2);
                        v[0] = std::cos(theta / 2.0);
                        v[1] = std::exp(cplx(0.0, phi)) * std::sin(theta / 2.0);
                        cfg.states.emplace(name, PureState(v));
                    } else {
                        fail(path, "unknown builder (use singlet | basis | bloch)");
                    }
                } else {
                    fail(path, "state needs vector | builder | mixture");
                }
            } catch (const std::invalid_argument& e) {
                fail(path, e.what());
            }
        }
        for (const auto& [name, node] : states.items()) {
            if (!node.contains("mixture")) continue;
            const std::string path = "states." + name;
            const json& comps = node.at("mixture");
            if (!comps.is_array() || comps.empty()) fail(path, "mixture must be a nonempty array");
            std::vector<OperationalMixture::Component> components;
            for (std::size_t i = 0; i < comps.size(); ++i) {
                const std::string cpath = path + ".mixture[" + std::to_string(i) + "]";
                const double weight = as_number(require(comps[i], "weight", cpath), cpath + ".weight");
                const std::string ref = require(comps[i], "state", cpath).get<std::string>();
                const auto it = cfg.states.find(ref);
                if (it == cfg.states.end()) fail(cpath, "unknown state '" + ref + "'");
                const auto* pure = std::get_if<PureState>(&it->second);
                if (!pure) fail(cpath, "mixture components must be pure states");
                components.push_back({weight, *pure});
            }
            try {
                cfg.states.emplace(name, OperationalMixture(std::move(components)));
            } catch (const std::invalid_argument& e) {
                fail(path, e.what());
            }
        }
    }

    if (doc.contains("observables")) {
        const json& observables = doc.at("observables");
        if (!observables.is_object()) throw config_error("observables: expected an object");
        for (const auto& [name, node] : observables.items()) {
            const std::string path = "observables." + name;
            DiscreteObservable base = parse_base(require(node, "base", path), path + ".base");
            const double a0 = node.contains("a0") ? as_number(node.at("a0"), path + ".a0") : 0.0;
            DetectionModel detection =
                parse_detection_for(require(node, "detection", path), path + ".detection", base);
            try {
                cfg.observables.emplace(name,
                                        GeneralizedObservable(std::move(base), a0, std::move(detection)));
            } catch (const std::invalid_argument& e) {
                fail(path, e.what());
            }
        }
    }

    auto find_state = [&](const std::string& ref, const std::string& path) -> const StateValue& {
        const auto it = cfg.states.find(ref);
        if (it == cfg.states.end()) fail(path, "unknown state '" + ref + "'");
        return it->second;
    };
    auto find_observable = [&](const std::string& ref,
                               const std::string& path) -> const GeneralizedObservable& {
        const auto it = cfg.observables.find(ref);
        if (it == cfg.observables.end()) fail(path, "unknown observable '" + ref + "'");
        return it->second;
    };
    auto state_dim = [](const StateValue& s) {
        return std::holds_alternative<PureState>(s) ? std::get<PureState>(s).dim()
                                                    : std::get<OperationalMixture>(s).dim();
    };

    if (doc.contains("protocols")) {
        const json& protocols = doc.at("protocols");
        if (!protocols.is_object()) throw config_error("protocols: expected an object");
        for (const auto& [name, node] : protocols.items()) {
            const std::string path = "protocols." + name;
            Protocol protocol;
            protocol.name = name;
            protocol.state_name = require(node, "state", path).get<std::string>();
            protocol.initial = find_state(protocol.state_name, path + ".state");
            const json& steps = require(node, "steps", path);
            if (!steps.is_array()) fail(path + ".steps", "expected an array");
            for (std::size_t i = 0; i < steps.size(); ++i) {
                const std::string spath = path + ".steps[" + std::to_string(i) + "]";
                const json& step = steps[i];
                if (step.contains("measure")) {
                    const std::string ref = step.at("measure").get<std::string>();
                    const GeneralizedObservable& g = find_observable(ref, spath);
                    if (g.dim() != state_dim(protocol.initial))
                        fail(spath, "observable dimension does not match the protocol state");
                    protocol.steps.push_back(ProtocolStep::measure(ref, g));
                } else if (step.contains("select")) {
                    const json& sel = step.at("select");
                    const std::string ref = require(sel, "observable", spath).get<std::string>();
                    const GeneralizedObservable& g = find_observable(ref, spath);
                    if (g.dim() != state_dim(protocol.initial))
                        fail(spath, "observable dimension does not match the protocol state");
                    const OutcomeSet set = parse_outcome_set(require(sel, "set", spath), spath + ".set", g);
                    Branch branch = Branch::yes;
                    if (sel.contains("branch")) {
                        const std::string b = sel.at("branch").get<std::string>();
                        if (b == "no") branch = Branch::no;
                        else if (b != "yes") fail(spath + ".branch", "branch must be yes or no");
                    }
                    protocol.steps.push_back(ProtocolStep::select(ref, g, set, branch));
                } else {
                    fail(spath, "step needs measure | select");
                }
            }
            cfg.protocols.push_back(std::move(protocol));
        }
    }

    if (doc.contains("scenario")) {
        const json& sc = doc.at("scenario");
        const std::string path = "scenario";
        const std::string ref = require(sc, "state", path).get<std::string>();
        const StateValue& sv = find_state(ref, path + ".state");
        const auto* pure = std::get_if<PureState>(&sv);
        if (!pure) fail(path + ".state", "scenario state must be pure");
        if (pure->dim() != 4) fail(path + ".state", "scenario state must live on 2x2 dimensions");
        auto parse_setting = [&](const char* key, int side) {
            const json& node = require(sc, key, path);
            const std::string spath = path + "." + key;
            const BlochVector axis = parse_axis(require(node, "axis", spath), spath + ".axis");
            DetectionModel detection = parse_detection(require(node, "detection", spath), spath + ".detection");
            return LocalGenObservable::spin(axis, std::move(detection), side, key);
        };
        try {
            cfg.scenario.emplace(*pure, 2, 2, parse_setting("a", 1), parse_setting("a_prime", 1),
                                 parse_setting("b", 2), parse_setting("b_prime", 2));
        } catch (const std::invalid_argument& e) {
            fail(path, e.what());
        }
    }

    if (doc.contains("sweep")) {
        const json& sw = doc.at("sweep");
        const double from = as_number(require(sw, "from", "sweep"), "sweep.from");
        const double to = as_number(require(sw, "to", "sweep"), "sweep.to");
        const double step = as_number(require(sw, "step", "sweep"), "sweep.step");
        if (step <= 0.0 || to < from) throw config_error("sweep: need step > 0 and to >= from");
        if (from < 0.0 || to > 1.0) throw config_error("sweep: grid must stay within [0,1]");
        for (double p = from; p <= to + 1e-12; p += step) cfg.sweep_grid.push_back(std::min(p, 1.0));
    }

    if (doc.contains("conditional_density")) {
        const json& tasks = doc.at("conditional_density");
        if (!tasks.is_array()) throw config_error("conditional_density: expected an array");
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            const std::string path = "conditional_density[" + std::to_string(i) + "]";
            const json& task = tasks[i];
            ConditionalDensityTask out;
            out.state_name = require(task, "state", path).get<std::string>();
            out.observable_name = require(task, "observable", path).get<std::string>();
            const StateValue& sv = find_state(out.state_name, path + ".state");
            const GeneralizedObservable& g = find_observable(out.observable_name, path + ".observable");
            if (g.dim() != state_dim(sv)) fail(path, "observable dimension does not match the state");
            if (!std::holds_alternative<OperationalMixture>(sv))
                fail(path + ".state", "conditional densities are defined for mixtures");
            const json& sets = require(task, "sets", path);
            if (!sets.is_array() || sets.empty()) fail(path + ".sets", "expected a nonempty array");
            for (std::size_t k = 0; k < sets.size(); ++k) {
                const OutcomeSet set =
                    parse_outcome_set(sets[k], path + ".sets[" + std::to_string(k) + "]", g);
                if (set.contains_a0())
                    fail(path + ".sets[" + std::to_string(k) + "]",
                         "conditional densities are defined for a0-free properties");
                out.sets.push_back(set);
            }
            cfg.conditional_density.push_back(std::move(out));
        }
    }

    if (doc.contains("apparatus_checks")) {
        const json& tasks = doc.at("apparatus_checks");
        if (!tasks.is_array()) throw config_error("apparatus_checks: expected an array");
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            const std::string path = "apparatus_checks[" + std::to_string(i) + "]";
            const json& task = tasks[i];
            ApparatusCheckTask out;
            out.state_name = require(task, "state", path).get<std::string>();
            out.observable_name = require(task, "observable", path).get<std::string>();
            const StateValue& sv = find_state(out.state_name, path + ".state");
            const GeneralizedObservable& g = find_observable(out.observable_name, path + ".observable");
            if (!std::holds_alternative<PureState>(sv))
                fail(path + ".state", "apparatus checks take a pure state");
            if (g.dim() != state_dim(sv)) fail(path, "observable dimension does not match the state");
            cfg.apparatus_checks.push_back(std::move(out));
        }
    }

    return cfg;
}

ScenarioConfig load_config(const std::string& path, std::optional<std::uint64_t> cli_seed) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw config_error(std::string("config parse error: ") + e.what());
    }
    std::optional<std::uint64_t> env_seed;
    if (const char* env = std::getenv("ESR_SEED")) {
        try {
            env_seed = std::stoull(env);
        } catch (...) {
            throw config_error("ESR_SEED: not a valid unsigned integer");
        }
    }
    return parse_config(doc, cli_seed, env_seed);
}

} // namespace esr
