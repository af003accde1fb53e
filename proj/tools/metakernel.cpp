// metakernel — command-line front end for the metamodelling kernel.
//
// Exit status: 0 clean, 1 validation/conformance findings, 2 usage or
// processing errors. Machine-readable output goes to stdout, human
// diagnostics to stderr.

#include "metakernel/clones.hpp"
#include "metakernel/constraints.hpp"
#include "metakernel/evolution.hpp"
#include "metakernel/merge.hpp"
#include "metakernel/metamodel.hpp"
#include "metakernel/model.hpp"
#include "metakernel/syntax.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using namespace metakernel;

bool color_enabled() {
    const char* value = std::getenv("METAKERNEL_COLOR");
    return value && std::string(value) == "1";
}

const char* severity_word(Severity severity) {
    return severity == Severity::Error ? "error" : "warning";
}

void print_human(const Diagnostic& diag) {
    bool color = color_enabled();
    const char* tint = diag.severity == Severity::Error ? "\033[31m" : "\033[33m";
    if (color) std::cerr << tint;
    std::cerr << severity_word(diag.severity) << ": " << diag.location << ": " << diag.message;
    if (color) std::cerr << "\033[0m";
    std::cerr << "\n";
}

// one stdout line per diagnostic, machine-parsable
void print_machine(const Diagnostic& diag) {
    std::cout << "DIAG " << severity_word(diag.severity) << " " << diag.location << " "
              << diag.message << "\n";
}

int report_diagnostics(const Diagnostics& diagnostics) {
    for (const auto& diag : diagnostics) {
        print_machine(diag);
        print_human(diag);
    }
    bool errors = false;
    for (const auto& diag : diagnostics) errors = errors || diag.severity == Severity::Error;
    return diagnostics.empty() ? 0 : errors ? 1 : 0;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw KernelError(Errc::UsageError, "cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw KernelError(Errc::UsageError, "cannot write " + path);
    out << content;
}

Metamodel load_metamodel(const std::string& path) { return parse_metamodel(read_file(path)); }

Model load_model(const std::string& path, const Metamodel& mm) {
    return parse_model(read_file(path), mm);
}

EntityId resolve_or_fail(const Model& model, const std::string& path) {
    auto id = resolve_entity_path(model, path);
    if (!id) throw KernelError(Errc::UnknownEntity, "no entity at path '" + path + "'");
    return *id;
}

int cmd_validate(const std::string& mm_path) {
    Diagnostics diagnostics;
    parse_metamodel_lenient(read_file(mm_path), diagnostics);
    return report_diagnostics(diagnostics);
}

int cmd_check(const std::string& model_path, const std::string& mm_path, bool skip_constraints) {
    Metamodel mm = load_metamodel(mm_path);
    Model model = load_model(model_path, mm);
    Diagnostics diagnostics =
        skip_constraints ? check_structure(model, mm) : check_conformance(model, mm);
    return report_diagnostics(diagnostics);
}

int cmd_constraints(const std::string& model_path, const std::string& mm_path) {
    Metamodel mm = load_metamodel(mm_path);
    Model model = load_model(model_path, mm);

    Diagnostics structural = check_structure(model, mm);
    if (!structural.empty()) {
        std::cerr << "error: structural conformance must pass before constraint evaluation\n";
        return report_diagnostics(structural);
    }

    WellFormedness wf = eval_all(model, mm);
    for (const auto& result : wf.results) {
        std::cout << "RESULT " << result.constraint_name << " "
                  << (result.overall ? "PASS" : "FAIL") << " " << result.violations.size()
                  << "\n";
        for (const auto& violation : result.violations) {
            std::cout << "CONSTRAINT " << result.constraint_name << " VIOLATED at "
                      << entity_path(model, violation.context) << "\n";
            if (!violation.detail.empty())
                std::cerr << "note: " << entity_path(model, violation.context) << ": "
                          << violation.detail << "\n";
        }
    }
    return wf.verdict ? 0 : 1;
}

int cmd_clone(const std::string& model_path, const std::string& mm_path,
              const std::string& prototype_path, const std::string& parent_path,
              const std::string& out_path) {
    Metamodel mm = load_metamodel(mm_path);
    Model model = load_model(model_path, mm);
    EntityId prototype = resolve_or_fail(model, prototype_path);
    std::optional<EntityId> parent;
    if (parent_path != "/") parent = resolve_or_fail(model, parent_path);
    EntityId produced = clone(model, mm, prototype, parent);
    write_file(out_path, serialize_model(model));
    std::cout << "CLONE " << entity_path(model, produced) << "\n";
    return 0;
}

int cmd_clone_tree(const std::string& model_path, const std::string& mm_path) {
    Metamodel mm = load_metamodel(mm_path);
    Model model = load_model(model_path, mm);
    for (const auto& map : model.clone_registry.maps) {
        std::cout << (map.kind == DerivationKind::Clone ? "CLONE " : "SUBPROTOTYPE ")
                  << entity_path(model, map.prototype_root) << " -> "
                  << entity_path(model, map.derived_root) << " pairs="
                  << map.entity_pairs.size() << " links=" << map.link_pairs.size() << "\n";
    }
    return 0;
}

int cmd_merge(const std::string& left_path, const std::string& right_path,
              const std::string& spec_path, const std::string& out_path,
              const std::string& report_path) {
    Metamodel left = load_metamodel(left_path);
    Metamodel right = load_metamodel(right_path);
    EquivalenceSpec spec = parse_equivalence_spec(read_file(spec_path));

    MergeResult result = merge(left, right, spec);
    write_file(out_path, serialize_metamodel(result.metamodel));

    std::string report_text;
    for (const auto& produced : result.report.produced_classes) {
        std::cout << "PRODUCED " << produced << "\n";
        report_text += "PRODUCED " + produced + "\n";
    }
    for (const auto& rewrite : result.report.rewritten_constraints) {
        std::string subs;
        for (const auto& [from, to] : rewrite.substitutions) subs += " " + from + "->" + to;
        std::cout << "REWRITTEN " << rewrite.constraint << subs << "\n";
        report_text += "REWRITTEN " + rewrite.constraint + subs + "\n";
    }
    for (const auto& flagged : result.report.flagged_constraints) {
        std::cout << "FLAGGED " << flagged.constraint << " " << flagged.reason << "\n";
        report_text += "FLAGGED " + flagged.constraint + " " + flagged.reason + "\n";
    }
    if (!report_path.empty()) write_file(report_path, report_text);
    return 0;
}

int cmd_evolve_report(const std::string& old_path, const std::string& new_path,
                      const std::string& model_path) {
    Metamodel v1 = load_metamodel(old_path);
    Metamodel v2 = load_metamodel(new_path);
    Model model = load_model(model_path, v1);

    std::vector<ImpactEntry> entries = evolution_report(model, v1, v2);
    for (const auto& entry : entries) {
        std::cout << "IMPACT " << impact_name(entry.impact) << " " << entry.element << "\n";
        std::cerr << impact_name(entry.impact) << ": " << entry.element << ": " << entry.message;
        if (!entry.cause.empty()) std::cerr << " [" << entry.cause << "]";
        std::cerr << "\n";
    }
    return entries.empty() ? 0 : 1;
}

int cmd_lint(const std::string& model_path, const std::string& mm_path) {
    Metamodel mm = load_metamodel(mm_path);
    Model model = load_model(model_path, mm);
    Diagnostics warnings = lint_syntax_overrides(model, mm);
    for (const auto& diag : warnings) {
        print_machine(diag);
        print_human(diag);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"metakernel — metamodelling kernel"};
    app.require_subcommand(1);

    std::string mm_path;
    std::string model_path;
    std::string left_path;
    std::string right_path;
    std::string spec_path;
    std::string out_path;
    std::string report_path;
    std::string prototype_path;
    std::string parent_path;
    bool skip_constraints = false;

    auto* validate = app.add_subcommand("validate", "validate a metamodel file");
    validate->add_option("metamodel", mm_path)->required();

    auto* check = app.add_subcommand("check", "check model conformance");
    check->add_option("model", model_path)->required();
    check->add_option("metamodel", mm_path)->required();
    check->add_flag("--skip-constraints", skip_constraints);

    auto* constraints = app.add_subcommand("constraints", "constraint evaluation");
    auto* constraints_eval = constraints->add_subcommand("eval", "evaluate all constraints");
    constraints_eval->add_option("model", model_path)->required();
    constraints_eval->add_option("metamodel", mm_path)->required();

    auto* clone_cmd = app.add_subcommand("clone", "clone a prototype subtree");
    auto* clone_tree = clone_cmd->add_subcommand("tree", "list registered derivations");
    clone_tree->add_option("model", model_path)->required();
    clone_tree->add_option("metamodel", mm_path)->required();
    clone_cmd->add_option("model", model_path);
    clone_cmd->add_option("metamodel", mm_path);
    clone_cmd->add_option("prototype", prototype_path);
    clone_cmd->add_option("parent", parent_path);
    clone_cmd->add_option("-o,--output", out_path);

    auto* merge_cmd = app.add_subcommand("merge", "merge two metamodels");
    merge_cmd->add_option("left", left_path)->required();
    merge_cmd->add_option("right", right_path)->required();
    merge_cmd->add_option("spec", spec_path)->required();
    merge_cmd->add_option("-o,--output", out_path)->required();
    merge_cmd->add_option("--report", report_path);

    auto* evolve = app.add_subcommand("evolve", "metamodel evolution tools");
    auto* evolve_report = evolve->add_subcommand("report", "model impact of an evolution");
    evolve_report->add_option("old", left_path)->required();
    evolve_report->add_option("new", right_path)->required();
    evolve_report->add_option("model", model_path)->required();

    auto* lint = app.add_subcommand("lint", "warn about concrete-syntax overrides");
    lint->add_option("model", model_path)->required();
    lint->add_option("metamodel", mm_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        if (error.get_exit_code() == 0) return app.exit(error);  // --help
        std::cerr << "usage error: " << error.what() << "\n";
        return 2;
    }

    try {
        if (validate->parsed()) return cmd_validate(mm_path);
        if (check->parsed()) return cmd_check(model_path, mm_path, skip_constraints);
        if (constraints->parsed()) {
            if (!constraints_eval->parsed()) {
                std::cerr << "usage error: expected 'constraints eval'\n";
                return 2;
            }
            return cmd_constraints(model_path, mm_path);
        }
        if (clone_cmd->parsed()) {
            if (clone_tree->parsed()) return cmd_clone_tree(model_path, mm_path);
            if (model_path.empty() || mm_path.empty() || prototype_path.empty() ||
                parent_path.empty() || out_path.empty()) {
                std::cerr << "usage error: clone <model> <metamodel> <prototype> <parent> -o "
                             "<output>\n";
                return 2;
            }
            return cmd_clone(model_path, mm_path, prototype_path, parent_path, out_path);
        }
        if (merge_cmd->parsed())
            return cmd_merge(left_path, right_path, spec_path, out_path, report_path);
        if (evolve->parsed()) {
            if (!evolve_report->parsed()) {
                std::cerr << "usage error: expected 'evolve report'\n";
                return 2;
            }
            return cmd_evolve_report(left_path, right_path, model_path);
        }
        if (lint->parsed()) return cmd_lint(model_path, mm_path);
    } catch (const metakernel::KernelError& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 2;
    } catch (const std::exception& error) {
        std::cerr << "internal error: " << error.what() << "\n";
        return 2;
    }
    return 2;
}
