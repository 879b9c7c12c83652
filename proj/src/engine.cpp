#include "esr/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "esr/parallel.hpp"
#include "esr/version.hpp"

namespace esr {

using nlohmann::json;

namespace {

constexpr double kApparatusTol = 1e-10;
constexpr double kBisectionAgreementTol = 1e-9;
constexpr double kBoundVerifyTol = 1e-8;

std::string sanitize(const std::string& name) {
    std::string out = name;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') c = '_';
    return out;
}

void provenance(std::ostringstream& out, const ScenarioConfig& cfg, const std::string& mode) {
    out << "esr " << mode << " report\n";
    out << "version: " << kToolVersion << "\n";
    out << "config: " << cfg.config_hash << "\n";
    out << "seed: " << cfg.seed << " (source: " << cfg.seed_source << ")\n";
    out << "generator: " << Rng::algorithm() << "\n";
}

json state_to_json(const StateValue& state) {
    json j;
    if (const auto* pure = std::get_if<PureState>(&state)) {
        j["type"] = "pure";
        json v = json::array();
        for (const cplx& e : pure->vector.entries()) v.push_back({e.real(), e.imag()});
        j["vector"] = std::move(v);
    } else if (const auto* mix = std::get_if<OperationalMixture>(&state)) {
        j["type"] = "mixture";
        json comps = json::array();
        for (const auto& c : mix->components()) {
            json v = json::array();
            for (const cplx& e : c.state.vector.entries()) v.push_back({e.real(), e.imag()});
            comps.push_back({{"weight", c.weight}, {"vector", std::move(v)}});
        }
        j["components"] = std::move(comps);
    }
    return j;
}

std::string record_to_json_line(const MeasurementRecord& rec, const std::string& protocol,
                                const GeneralizedObservable& g) {
    json j;
    j["protocol"] = protocol;
    j["observable"] = rec.observable;
    j["set"] = rec.outcome_set.label(g);
    j["branch"] = rec.branch == Branch::yes ? "yes" : "no";
    j["probability"] = rec.probability;
    j["pre"] = state_to_json(rec.pre_state);
    j["post"] = state_to_json(rec.post_state);
    return j.dump();
}

std::string step_heading(const ProtocolStep& step) {
    std::ostringstream out;
    if (step.kind == ProtocolStep::Kind::measure) {
        out << "measure " << step.observable_name;
    } else {
        out << "select " << step.observable_name << " " << step.set.label(step.observable) << " "
            << (step.branch == Branch::yes ? "yes" : "no");
    }
    return out.str();
}

std::string path_label(const Protocol& protocol, const std::vector<int>& path) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i) out += ";";
        out += slot_label(protocol.steps[i], static_cast<std::size_t>(path[i]));
    }
    return out;
}

// setting angles in degrees, for the frozen CSV columns
std::pair<double, double> axis_angles(const LocalGenObservable& lo) {
    const double deg = 180.0 / std::numbers::pi;
    const double theta = std::acos(std::clamp(lo.axis.z, -1.0, 1.0)) * deg;
    double phi = std::atan2(lo.axis.y, lo.axis.x) * deg;
    if (std::abs(phi) < 1e-300) phi = 0.0; // normalize -0
    return {theta, phi};
}

std::string scenario_angle_columns(const BellScenario& sc) {
    std::string out;
    for (const LocalGenObservable* lo : {&sc.a, &sc.a_prime, &sc.b, &sc.b_prime}) {
        const auto [theta, phi] = axis_angles(*lo);
        out += fmt_double(theta) + "," + fmt_double(phi) + ",";
    }
    return out;
}

} // namespace

RunReport run_analytic(const ScenarioConfig& cfg) {
    RunReport report;
    std::ostringstream out;
    provenance(out, cfg, "analytic");

    for (const Protocol& protocol : cfg.protocols) {
        const AnalyticProtocolResult result = run_protocol_analytic(protocol);
        out << "\n[protocol " << protocol.name << "] state " << protocol.state_name << ", "
            << protocol.steps.size() << " step" << (protocol.steps.size() == 1 ? "" : "s") << "\n";
        CsvTable table{"analytic_" + sanitize(protocol.name),
                       "protocol,step,kind,observable,outcome,probability",
                       {}};
        for (std::size_t i = 0; i < protocol.steps.size(); ++i) {
            const ProtocolStep& step = protocol.steps[i];
            out << "  step " << i + 1 << ": " << step_heading(step) << "\n";
            for (std::size_t slot = 0; slot < result.step_marginals[i].size(); ++slot) {
                const std::string label = slot_label(step, slot);
                const double p = result.step_marginals[i][slot];
                out << "    " << label << ": " << fmt_double(p) << "\n";
                table.rows.push_back(protocol.name + "," + std::to_string(i + 1) + "," +
                                     (step.kind == ProtocolStep::Kind::measure ? "measure" : "select") +
                                     "," + step.observable_name + "," + label + "," + fmt_double(p));
            }
        }
        report.tables.push_back(std::move(table));
        if (protocol.steps.size() > 1) {
            CsvTable seqs{"sequences_" + sanitize(protocol.name), "protocol,path,probability", {}};
            out << "  sequences:\n";
            for (const auto& [path, p] : result.sequences) {
                const std::string label = path_label(protocol, path);
                out << "    " << label << ": " << fmt_double(p) << "\n";
                seqs.rows.push_back(protocol.name + "," + label + "," + fmt_double(p));
            }
            report.tables.push_back(std::move(seqs));
        }
        for (std::size_t r = 0; r < result.records.size(); ++r) {
            const MeasurementRecord& rec = result.records[r];
            // find the step observable for labeling; records carry names
            const GeneralizedObservable* g = nullptr;
            for (const ProtocolStep& step : protocol.steps)
                if (step.observable_name == rec.observable) g = &step.observable;
            if (g) report.record_lines.push_back(record_to_json_line(rec, protocol.name, *g));
        }
    }

    if (cfg.scenario) {
        const BellScenario& sc = *cfg.scenario;
        out << "\n[bell scenario]\n";
        CsvTable table{"bell_expectations", "setting_a,setting_b,E,quantum", {}};
        const std::pair<SideASetting, std::string> as[] = {{SideASetting::a, "a"},
                                                           {SideASetting::a_prime, "a'"}};
        const std::pair<SideBSetting, std::string> bs[] = {{SideBSetting::b, "b"},
                                                           {SideBSetting::b_prime, "b'"}};
        for (const auto& [sa, la] : as)
            for (const auto& [sb, lb] : bs) {
                const double e = joint_expectation(sc, sa, sb);
                const double q = quantum_correlation(sc, sa, sb);
                out << "  E(" << la << "," << lb << ") = " << fmt_double(e)
                    << "  (quantum " << fmt_double(q) << ")\n";
                table.rows.push_back(la + "," + lb + "," + fmt_double(e) + "," + fmt_double(q));
            }
        out << "  modified BCHSH lhs = " << fmt_double(modified_bchsh_lhs(sc)) << "\n";
        out << "  quantum CHSH = " << fmt_double(quantum_chsh(sc)) << "\n";
        report.tables.push_back(std::move(table));
    }

    for (const ConditionalDensityTask& task : cfg.conditional_density) {
        const auto& mix = std::get<OperationalMixture>(cfg.states.at(task.state_name));
        const GeneralizedObservable& g = cfg.observables.at(task.observable_name);
        out << "\n[conditional density " << task.state_name << " / " << task.observable_name << "]\n";
        std::string header = "property";
        for (std::size_t j = 0; j < mix.size(); ++j) header += ",w" + std::to_string(j + 1);
        CsvTable table{"conditional_density_" + sanitize(task.state_name) + "_" +
                           sanitize(task.observable_name),
                       header,
                       {}};
        for (const OutcomeSet& set : task.sets) {
            const std::string label = set.label(g);
            try {
                const std::vector<double> w = conditional_weights(mix, g, set);
                out << "  property " << label << ": weights (";
                std::string row = label;
                for (std::size_t j = 0; j < w.size(); ++j) {
                    out << (j ? ", " : "") << fmt_double(w[j]);
                    row += "," + fmt_double(w[j]);
                }
                out << ")\n";
                table.rows.push_back(std::move(row));
            } catch (const std::domain_error& e) {
                out << "  property " << label << ": undefined (" << e.what() << ")\n";
            }
        }
        report.tables.push_back(std::move(table));
    }

    if (!cfg.apparatus_checks.empty()) {
        out << "\n[apparatus consistency]\n";
        CsvTable table{"apparatus_checks", "state,observable,residual", {}};
        for (const ApparatusCheckTask& task : cfg.apparatus_checks) {
            const auto& pure = std::get<PureState>(cfg.states.at(task.state_name));
            const GeneralizedObservable& g = cfg.observables.at(task.observable_name);
            const ApparatusCoupling coupling(g, g.n_outcomes() + 1);
            const double residual = verify_partial_trace_consistency(coupling, pure);
            const bool ok = residual <= kApparatusTol;
            out << "  " << task.state_name << " / " << task.observable_name
                << ": residual = " << fmt_double(residual) << (ok ? "" : "  EXCEEDS 1e-10") << "\n";
            if (!ok) report.numerical_failure = true;
            table.rows.push_back(task.state_name + "," + task.observable_name + "," +
                                 fmt_double(residual));
        }
        report.tables.push_back(std::move(table));
    }

    report.text = out.str();
    return report;
}

RunReport run_monte_carlo(const ScenarioConfig& cfg) {
    RunReport report;
    std::ostringstream out;
    provenance(out, cfg, "monte-carlo");
    out << "samples: " << cfg.samples << "\n";
    out << "batch size: " << cfg.mc_batch_size << " (substream seed = seed xor batch-index)\n";

    std::size_t z_total = 0;
    std::size_t z_breaches = 0;

    for (const Protocol& protocol : cfg.protocols) {
        const AnalyticProtocolResult analytic = run_protocol_analytic(protocol);
        const McCounts counts = par::run_protocol_mc(protocol, cfg.samples, cfg.seed, cfg.mc_batch_size);
        const double n = static_cast<double>(counts.samples);

        out << "\n[protocol " << protocol.name << "] state " << protocol.state_name
            << ", N = " << counts.samples << "\n";
        CsvTable table{"mc_" + sanitize(protocol.name),
                       "protocol,step,kind,observable,outcome,probability,count,frequency,z",
                       {}};
        double max_dev = 0.0;
        for (std::size_t i = 0; i < protocol.steps.size(); ++i) {
            const ProtocolStep& step = protocol.steps[i];
            out << "  step " << i + 1 << ": " << step_heading(step) << "\n";
            for (std::size_t slot = 0; slot < analytic.step_marginals[i].size(); ++slot) {
                const std::string label = slot_label(step, slot);
                const double p = analytic.step_marginals[i][slot];
                const std::uint64_t count = counts.step_counts[i][slot];
                const double freq = static_cast<double>(count) / n;
                max_dev = std::max(max_dev, std::abs(freq - p));
                std::string z_text = "";
                if (p > 0.0 && p < 1.0) {
                    const double z = (freq - p) * std::sqrt(n / (p * (1.0 - p)));
                    z_text = fmt_double(z);
                    ++z_total;
                    if (std::abs(z) > 3.0) ++z_breaches;
                    out << "    " << label << ": p = " << fmt_double(p) << ", count = " << count
                        << ", freq = " << fmt_double(freq) << ", z = " << z_text << "\n";
                } else {
                    out << "    " << label << ": p = " << fmt_double(p) << ", count = " << count
                        << ", freq = " << fmt_double(freq) << "\n";
                }
                table.rows.push_back(protocol.name + "," + std::to_string(i + 1) + "," +
                                     (step.kind == ProtocolStep::Kind::measure ? "measure" : "select") +
                                     "," + step.observable_name + "," + label + "," + fmt_double(p) +
                                     "," + std::to_string(count) + "," + fmt_double(freq) + "," + z_text);
            }
        }
        out << "  max |freq - p| = " << fmt_double(max_dev) << "\n";
        report.tables.push_back(std::move(table));

        if (protocol.steps.size() > 1) {
            CsvTable seqs{"mc_sequences_" + sanitize(protocol.name),
                          "protocol,path,probability,count,frequency",
                          {}};
            // analytic sequence probabilities for reference, zero-filled for
            // paths that were never sampled analytically
            std::map<std::vector<int>, double> expected;
            for (const auto& [path, p] : analytic.sequences) expected[path] = p;
            for (const auto& [path, count] : counts.sequences) {
                const std::string label = path_label(protocol, path);
                const double p = expected.count(path) ? expected.at(path) : 0.0;
                seqs.rows.push_back(protocol.name + "," + label + "," + fmt_double(p) + "," +
                                    std::to_string(count) + "," +
                                    fmt_double(static_cast<double>(count) / n));
            }
            report.tables.push_back(std::move(seqs));
        }
    }

    const double fraction = z_total ? static_cast<double>(z_breaches) / static_cast<double>(z_total) : 0.0;
    out << "\nz summary: " << z_breaches << " of " << z_total << " outcomes beyond |z| = 3 (fraction "
        << fmt_double(fraction) << ", allowed " << fmt_double(cfg.max_z_fraction) << ")\n";
    if (fraction > cfg.max_z_fraction) {
        out << "MONTE CARLO SOUNDNESS BREACH\n";
        report.numerical_failure = true;
    }

    report.text = out.str();
    return report;
}

RunReport run_bchsh_sweep(const ScenarioConfig& cfg) {
    if (!cfg.scenario) throw config_error("bchsh-sweep requires a scenario section");
    if (cfg.sweep_grid.empty()) throw config_error("bchsh-sweep requires a sweep section");
    RunReport report;
    std::ostringstream out;
    provenance(out, cfg, "bchsh-sweep");

    const BellScenario& sc = *cfg.scenario;
    const std::vector<par::SweepRow> rows = par::sweep_uniform_detection(sc, cfg.sweep_grid);
    const std::string angles = scenario_angle_columns(sc);
    CsvTable table{"sweep",
                   "theta_a_deg,phi_a_deg,theta_ap_deg,phi_ap_deg,theta_b_deg,phi_b_deg,"
                   "theta_bp_deg,phi_bp_deg,p,E_ab,E_abp,E_apb,E_apbp,modified_lhs,within_bound",
                   {}};
    out << "\n[uniform detection sweep] " << rows.size() << " points\n";
    std::optional<std::pair<double, double>> flip;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const par::SweepRow& row = rows[i];
        table.rows.push_back(angles + fmt_double(row.p) + "," + fmt_double(row.e_ab) + "," +
                             fmt_double(row.e_abp) + "," + fmt_double(row.e_apb) + "," +
                             fmt_double(row.e_apbp) + "," + fmt_double(row.modified_lhs) + "," +
                             (row.within_bound ? "1" : "0"));
        if (i > 0 && rows[i - 1].within_bound && !row.within_bound)
            flip = {rows[i - 1].p, row.p};
    }
    out << "  p = " << fmt_double(rows.front().p)
        << ": lhs = " << fmt_double(rows.front().modified_lhs) << "\n";
    out << "  p = " << fmt_double(rows.back().p)
        << ": lhs = " << fmt_double(rows.back().modified_lhs) << "\n";
    if (flip)
        out << "  bound flag flips between p = " << fmt_double(flip->first) << " and p = "
            << fmt_double(flip->second) << "\n";
    else
        out << "  bound flag does not flip on this grid\n";
    report.tables.push_back(std::move(table));
    report.text = out.str();
    return report;
}

RunReport run_bound_search(const ScenarioConfig& cfg) {
    if (!cfg.scenario) throw config_error("bound-search requires a scenario section");
    RunReport report;
    std::ostringstream out;
    provenance(out, cfg, "bound-search");

    const BellScenario& sc = *cfg.scenario;
    const EfficiencyBound bound = max_uniform_efficiency(sc);
    out << "\n[detection efficiency bound]\n";
    out << "  quantum CHSH Q = " << fmt_double(bound.quantum_chsh) << "\n";
    double lhs_at_p_star = 0.0;
    if (bound.vacuous) {
        out << "  Q <= 2: the bound is vacuous, every uniform detection probability is admissible\n";
        out << "  p* = 1\n";
    } else {
        lhs_at_p_star = modified_bchsh_lhs(sc.with_uniform_detection(bound.p_star));
        out << "  closed form p* = " << fmt_double(bound.closed_form) << "\n";
        out << "  bisection p*   = " << fmt_double(bound.bisection) << "\n";
        const double gap = std::abs(bound.closed_form - bound.bisection);
        out << "  |closed - bisection| = " << fmt_double(gap) << " (tolerance "
            << fmt_double(kBisectionAgreementTol) << ")\n";
        out << "  modified lhs at p* = " << fmt_double(lhs_at_p_star) << " (|lhs - 2| tolerance "
            << fmt_double(kBoundVerifyTol) << ")\n";
        if (gap > kBisectionAgreementTol || std::abs(lhs_at_p_star - 2.0) > kBoundVerifyTol) {
            out << "BOUND VERIFICATION FAILED\n";
            report.numerical_failure = true;
        }
    }
    CsvTable table{"bound", "quantum_chsh,p_star,closed_form,bisection,lhs_at_p_star,vacuous", {}};
    table.rows.push_back(fmt_double(bound.quantum_chsh) + "," + fmt_double(bound.p_star) + "," +
                         fmt_double(bound.closed_form) + "," + fmt_double(bound.bisection) + "," +
                         fmt_double(lhs_at_p_star) + "," + (bound.vacuous ? "1" : "0"));
    report.tables.push_back(std::move(table));
    report.text = out.str();
    return report;
}

} // namespace esr
