#include "causalog/cli.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "causalog/errors.hpp"
#include "causalog/grounder.hpp"
#include "causalog/parser.hpp"
#include "causalog/printer.hpp"
#include "causalog/process_sim.hpp"
#include "causalog/wf_engine.hpp"

namespace causalog {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Flags {
    std::string theory, input, format;
    std::int64_t max_new = 8, max_steps = 1000, max_elements = 64;
    std::uint64_t seed = 0;
    bool seed_given = false, dump_ground = false, eliminate_new = false;
    int jobs = 0;
};

std::string rules_to_json(const std::vector<GuardedRule>& rules, const GroundTree& tree) {
    using json = nlohmann::ordered_json;
    json arr = json::array();
    for (const auto& r : rules) {
        json commitments = json::array();
        for (const auto& c : r.commitments) {
            const auto& cp = tree.choice_points[c.cp];
            commitments.push_back({{"choice", cp.key()}, {"kind", to_string(cp.kind)}, {"option", cp.render_option(c.option)}});
        }
        json row;
        row["head"] = r.head.render();
        row["guard"] = print_formula(r.guard);
        row["commitments"] = commitments;
        arr.push_back(row);
    }
    json out;
    out["rules"] = arr;
    return out.dump();
}

int cmd_models(const Flags& f, std::ostream& out) {
    Theory t = parse_theory(read_file(f.theory));
    Structure exo = load_structure(read_file(f.input), t.vocabulary, endogenous_predicates(t));
    if (f.dump_ground) {
        GroundTree tree = ground_theory(t, default_extension(exo, t.vocabulary, endogenous_predicates(t)));
        out << rules_to_json(flatten(tree), tree) << "\n";
        return kExitOk;
    }
    Budget b;
    b.max_new = f.max_new;
    b.max_elements = f.max_elements;
    b.jobs = f.jobs;
    ModelSet ms = enumerate_models(t, exo, b);
    if (f.format == "text") {
        for (const auto& m : ms.models) out << render_state(m.structure) << "\n";
        out << ms.models.size() << " model(s)" << (ms.budget_hit ? " (incomplete: " + ms.budget_message + ")" : "") << "\n";
    } else {
        out << model_set_to_json(ms, t.vocabulary) << "\n";
    }
    return ms.budget_hit ? kExitBudget : kExitOk;
}

int cmd_trace(const Flags& f, std::ostream& out, std::ostream& err) {
    Theory t = parse_theory(read_file(f.theory));
    Structure exo = load_structure(read_file(f.input), t.vocabulary, endogenous_predicates(t));
    SimOptions opts;
    opts.max_new = f.max_new;
    opts.max_steps = f.max_steps;
    if (f.format == "dot") {
        out << processes_to_dot(enumerate_processes(t, exo, opts));
        return kExitOk;
    }
    std::uint64_t seed = f.seed;
    if (!f.seed_given) {
        seed = std::random_device{}();
        err << "seed " << seed << "\n";
    }
    Trace tr = simulate(t, exo, seed, opts);
    out << (f.format == "json" ? trace_to_json(tr, t.vocabulary) + "\n" : trace_to_text(tr));
    return kExitOk;
}

int cmd_check(const Flags& f, std::ostream& out) {
    Theory t = parse_theory(read_file(f.theory));
    Structure m = load_model(read_file(f.input), t.vocabulary);
    Budget b;
    b.max_new = f.max_new;
    b.max_elements = f.max_elements;
    b.jobs = f.jobs;
    CheckResult r = check_model(t, m, b);
    if (r.is_model) {
        out << "model\n";
        if (r.witness) out << "witness: " << r.witness->render() << "\n";
        return kExitOk;
    }
    out << "not a model\n";
    for (const auto& d : r.diagnostics) out << "  " << d << "\n";
    return kExitNotModel;
}

int cmd_transform(const Flags& f, std::ostream& out) {
    Theory t = parse_theory(read_file(f.theory));
    if (f.eliminate_new) t = eliminate_new(t).theory;
    out << print_theory(t);
    return kExitOk;
}

int cmd_diff(const Flags& f, std::ostream& out) {
    Theory t = parse_theory(read_file(f.theory));
    Structure exo = load_structure(read_file(f.input), t.vocabulary, endogenous_predicates(t));
    Budget b;
    b.max_new = f.max_new;
    b.max_elements = f.max_elements;
    b.jobs = f.jobs;
    SimOptions opts;
    opts.max_new = f.max_new;
    opts.max_steps = f.max_steps;
    DiffReport d = compare_with_wf(t, exo, b, opts);
    if (f.format == "text") {
        out << (d.agree ? "engines agree" : "engines disagree") << "\n";
        for (const auto& s : d.only_process) out << "  only process: " << render_state(s) << "\n";
        for (const auto& s : d.only_wf) out << "  only wf: " << render_state(s) << "\n";
    } else {
        out << diff_to_json(d, t.vocabulary) << "\n";
    }
    if (d.budget_hit) return kExitBudget;
    return d.agree ? kExitOk : kExitDisagree;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"causalog: models, traces and checks for causal theories"};
    app.require_subcommand(1);
    Flags f;

    auto add_budget = [&](CLI::App* sub) {
        sub->add_option("--max-new", f.max_new, "creation budget")->check(CLI::NonNegativeNumber);
        sub->add_option("--max-elements", f.max_elements, "domain size budget")->check(CLI::PositiveNumber);
        sub->add_option("--max-steps", f.max_steps, "process step budget")->check(CLI::PositiveNumber);
        sub->add_option("--jobs", f.jobs, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    };

    auto* models = app.add_subcommand("models", "enumerate the models of a theory");
    models->add_option("theory", f.theory)->required();
    models->add_option("structure", f.input)->required();
    models->add_option("--format", f.format)->check(CLI::IsMember({"json", "text"}));
    models->add_flag("--dump-ground", f.dump_ground, "print the guarded rules instead");
    add_budget(models);

    auto* trace = app.add_subcommand("trace", "simulate one causal process");
    trace->add_option("theory", f.theory)->required();
    trace->add_option("structure", f.input)->required();
    auto* seed_opt = trace->add_option("--seed", f.seed);
    trace->add_option("--format", f.format)->check(CLI::IsMember({"json", "text", "dot"}));
    add_budget(trace);

    auto* check = app.add_subcommand("check", "decide whether a structure is a model");
    check->add_option("theory", f.theory)->required();
    check->add_option("model", f.input)->required();
    add_budget(check);

    auto* transform = app.add_subcommand("transform", "rewrite a theory");
    transform->add_option("theory", f.theory)->required();
    transform->add_flag("--eliminate-new", f.eliminate_new, "replace NEW by SELECT plus unicity sentences");

    auto* diff = app.add_subcommand("diff", "compare process finals with well-founded models");
    diff->add_option("theory", f.theory)->required();
    diff->add_option("structure", f.input)->required();
    diff->add_option("--format", f.format)->check(CLI::IsMember({"json", "text"}));
    add_budget(diff);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kExitInputError;
    }
    f.seed_given = seed_opt->count() > 0;

    try {
        if (models->parsed()) return cmd_models(f, out);
        if (trace->parsed()) return cmd_trace(f, out, err);
        if (check->parsed()) return cmd_check(f, out);
        if (transform->parsed()) return cmd_transform(f, out);
        if (diff->parsed()) return cmd_diff(f, out);
    } catch (const BudgetExceeded& e) {
        err << "budget exceeded: " << e.what() << "\n";
        return kExitBudget;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}

}  // namespace causalog
