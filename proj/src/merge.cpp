#include "metakernel/merge.hpp"

#include "metakernel/constraints.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace metakernel {

const char* merge_mode_name(MergeMode mode) {
    switch (mode) {
        case MergeMode::Identity: return "identity";
        case MergeMode::InterfaceInheritance: return "interface";
        case MergeMode::ImplementationInheritance: return "implementation";
    }
    return "?";
}

namespace {

std::set<std::string> all_names(const Metamodel& mm) {
    std::set<std::string> names;
    for (const auto& cls : mm.classes) names.insert(cls.name);
    for (const auto& assoc : mm.associations) names.insert(assoc.name);
    return names;
}

std::set<std::string> class_names(const Metamodel& mm) {
    std::set<std::string> names;
    for (const auto& cls : mm.classes) names.insert(cls.name);
    return names;
}

void add_attribute_union(std::vector<AttributeDef>& into, const std::vector<AttributeDef>& from,
                         const std::string& merged_name) {
    for (const auto& attr : from) {
        auto it = std::find_if(into.begin(), into.end(),
                               [&](const AttributeDef& a) { return a.name == attr.name; });
        if (it == into.end()) {
            into.push_back(attr);
        } else if (!(*it == attr)) {
            throw KernelError(Errc::MergeConflict, "attribute '" + attr.name + "' of '" +
                                                       merged_name +
                                                       "' has conflicting definitions");
        }
    }
}

void add_containment_union(std::vector<ContainmentRule>& into,
                           const std::vector<ContainmentRule>& from) {
    for (const auto& rule : from)
        if (std::find(into.begin(), into.end(), rule) == into.end()) into.push_back(rule);
}

void rename_class_refs(Metamodel& mm, const std::string& from, const std::string& to) {
    for (auto& cls : mm.classes) {
        for (auto& super : cls.superclasses)
            if (super == from) super = to;
        // a rename can fold two entries together
        std::vector<std::string> supers;
        for (auto& super : cls.superclasses)
            if (std::find(supers.begin(), supers.end(), super) == supers.end())
                supers.push_back(super);
        cls.superclasses = std::move(supers);

        for (auto& rule : cls.containments)
            if (rule.child_class == from) rule.child_class = to;
        std::vector<ContainmentRule> rules;
        for (auto& rule : cls.containments)
            if (std::find(rules.begin(), rules.end(), rule) == rules.end()) rules.push_back(rule);
        cls.containments = std::move(rules);
    }
    for (auto& assoc : mm.associations)
        for (auto& role : assoc.roles)
            if (role.endpoint_class == from) role.endpoint_class = to;
}

struct Merger {
    Metamodel result;
    MergeReport report;
    // original context class -> merged name, for constraint rewriting
    std::map<std::string, std::string> identity_renames;
    // context classes consumed by an inheritance-mode entry -> produced class
    std::map<std::string, std::pair<MergeMode, std::string>> inheritance_touch;
    std::set<std::string> own_widened;

    MetaClass& class_at(const std::string& name) {
        for (auto& cls : result.classes)
            if (cls.name == name) return cls;
        throw KernelError(Errc::UnknownClassInSpec, "no class '" + name + "'");
    }

    void ensure_fresh(const std::string& name) {
        if (all_names(result).count(name))
            throw KernelError(Errc::NameCollision,
                              "merged class name '" + name + "' is already taken");
        if (!is_identifier(name) || is_reserved_word(name))
            throw KernelError(Errc::NameCollision,
                              "merged class name '" + name + "' is not a usable identifier");
    }

    // An abstract feature-free class that widens role endpoint E so the new
    // interface-inheriting class can participate without picking up any of
    // E's attributes or containment admissions.
    std::string widened_endpoint(const std::string& endpoint) {
        std::string base = endpoint + "_iface";
        std::string name = base;
        for (int i = 2; all_names(result).count(name) && !own_widened.count(name); ++i)
            name = base + std::to_string(i);
        if (!own_widened.count(name)) {
            MetaClass widened;
            widened.name = name;
            widened.is_abstract = true;
            result.classes.push_back(widened);
            own_widened.insert(name);
            report.produced_classes.push_back(name);

            MetaClass& original = class_at(endpoint);
            if (std::find(original.superclasses.begin(), original.superclasses.end(), name) ==
                original.superclasses.end())
                original.superclasses.push_back(name);
            for (auto& assoc : result.associations)
                for (auto& role : assoc.roles)
                    if (role.endpoint_class == endpoint) role.endpoint_class = name;
        }
        return name;
    }

    void apply_identity(const EquivalenceEntry& entry) {
        MetaClass left = class_at(entry.left_class);
        MetaClass right = class_at(entry.right_class);

        if (entry.merged_name != entry.left_class && entry.merged_name != entry.right_class)
            ensure_fresh(entry.merged_name);

        MetaClass merged;
        merged.name = entry.merged_name;
        merged.is_abstract = left.is_abstract && right.is_abstract;
        merged.glyph = left.glyph ? left.glyph : right.glyph;
        merged.superclasses = left.superclasses;
        for (const auto& super : right.superclasses)
            if (std::find(merged.superclasses.begin(), merged.superclasses.end(), super) ==
                merged.superclasses.end())
                merged.superclasses.push_back(super);
        merged.attributes = left.attributes;
        add_attribute_union(merged.attributes, right.attributes, merged.name);
        merged.containments = left.containments;
        add_containment_union(merged.containments, right.containments);

        // the merged class takes the left slot; the right one disappears
        auto left_it = std::find_if(result.classes.begin(), result.classes.end(),
                                    [&](const MetaClass& c) { return c.name == entry.left_class; });
        *left_it = merged;
        std::erase_if(result.classes,
                      [&](const MetaClass& c) { return c.name == entry.right_class; });

        rename_class_refs(result, entry.left_class, entry.merged_name);
        rename_class_refs(result, entry.right_class, entry.merged_name);
        identity_renames[entry.left_class] = entry.merged_name;
        identity_renames[entry.right_class] = entry.merged_name;
        report.produced_classes.push_back(entry.merged_name);
    }

    void apply_interface(const EquivalenceEntry& entry) {
        ensure_fresh(entry.merged_name);

        // role participation of both sources, via their superclass closures
        std::set<std::string> endpoints;
        for (const auto& source : {entry.left_class, entry.right_class})
            for (const auto& assoc : result.associations)
                for (const auto& role : assoc.roles)
                    if (is_subtype(result, source, role.endpoint_class))
                        endpoints.insert(role.endpoint_class);

        MetaClass produced;
        produced.name = entry.merged_name;
        result.classes.push_back(produced);
        for (const auto& endpoint : endpoints) {
            std::string widened = widened_endpoint(endpoint);
            MetaClass& self = class_at(entry.merged_name);
            if (std::find(self.superclasses.begin(), self.superclasses.end(), widened) ==
                self.superclasses.end())
                self.superclasses.push_back(widened);
        }

        inheritance_touch[entry.left_class] = {MergeMode::InterfaceInheritance, entry.merged_name};
        inheritance_touch[entry.right_class] = {MergeMode::InterfaceInheritance,
                                                entry.merged_name};
        report.produced_classes.push_back(entry.merged_name);
    }

    void apply_implementation(const EquivalenceEntry& entry) {
        ensure_fresh(entry.merged_name);

        FlattenedClass left = effective_features(result, entry.left_class);
        FlattenedClass right = effective_features(result, entry.right_class);

        MetaClass produced;
        produced.name = entry.merged_name;
        produced.attributes = left.attributes;
        add_attribute_union(produced.attributes, right.attributes, produced.name);
        produced.containments = left.containments;
        add_containment_union(produced.containments, right.containments);

        // containee side: every rule admitting a source also admits the new
        // class, via a parallel rule
        std::vector<std::pair<std::string, Multiplicity>> extra;
        for (const auto& cls : result.classes)
            for (const auto& rule : cls.containments)
                if (is_subtype(result, entry.left_class, rule.child_class) ||
                    is_subtype(result, entry.right_class, rule.child_class))
                    extra.push_back({cls.name, rule.multiplicity});

        result.classes.push_back(produced);
        for (const auto& [owner, multiplicity] : extra) {
            MetaClass& cls = class_at(owner);
            ContainmentRule rule{entry.merged_name, multiplicity};
            if (std::find(cls.containments.begin(), cls.containments.end(), rule) ==
                cls.containments.end())
                cls.containments.push_back(rule);
        }

        inheritance_touch[entry.left_class] = {MergeMode::ImplementationInheritance,
                                               entry.merged_name};
        inheritance_touch[entry.right_class] = {MergeMode::ImplementationInheritance,
                                                entry.merged_name};
        report.produced_classes.push_back(entry.merged_name);
    }
};

}  // namespace

MergeResult merge(const Metamodel& left, const Metamodel& right, const EquivalenceSpec& spec) {
    // the inputs may not share any meta-class (or association)
    {
        std::set<std::string> left_names = all_names(left);
        for (const auto& name : all_names(right))
            if (left_names.count(name))
                throw KernelError(Errc::NameCollision,
                                  "metamodels share the name '" + name + "'");
    }

    {
        std::set<std::string> used;
        for (const auto& entry : spec.entries) {
            if (!class_names(left).count(entry.left_class))
                throw KernelError(Errc::UnknownClassInSpec, "'" + entry.left_class +
                                                                "' is not a class of '" +
                                                                left.name + "'");
            if (!class_names(right).count(entry.right_class))
                throw KernelError(Errc::UnknownClassInSpec, "'" + entry.right_class +
                                                                "' is not a class of '" +
                                                                right.name + "'");
            if (!used.insert(entry.left_class).second)
                throw KernelError(Errc::DuplicateSpecEntry,
                                  "class '" + entry.left_class + "' appears in two entries");
            if (!used.insert(entry.right_class).second)
                throw KernelError(Errc::DuplicateSpecEntry,
                                  "class '" + entry.right_class + "' appears in two entries");
        }
    }

    Merger merger;
    merger.result.name = left.name + "_" + right.name;
    merger.result.version = 1;
    merger.result.classes = left.classes;
    merger.result.classes.insert(merger.result.classes.end(), right.classes.begin(),
                                 right.classes.end());
    merger.result.associations = left.associations;
    merger.result.associations.insert(merger.result.associations.end(),
                                      right.associations.begin(), right.associations.end());

    for (const auto& entry : spec.entries) {
        switch (entry.mode) {
            case MergeMode::Identity: merger.apply_identity(entry); break;
            case MergeMode::InterfaceInheritance: merger.apply_interface(entry); break;
            case MergeMode::ImplementationInheritance: merger.apply_implementation(entry); break;
        }
    }

    // constraints: pure renames ride along, inheritance-touched ones are
    // flagged for review but kept enforceable on their original classes
    std::set<std::string> constraint_names;
    auto carry = [&](const ConstraintDef& con, const std::string& origin) {
        std::string name = con.name;
        if (!constraint_names.insert(name).second) {
            name = origin + "_" + con.name;
            constraint_names.insert(name);
        }

        auto rename_it = merger.identity_renames.find(con.ast ? con.ast->context_class
                                                              : std::string());
        auto touch_it = merger.inheritance_touch.end();
        if (con.ast) touch_it = merger.inheritance_touch.find(con.ast->context_class);

        ConstraintDef carried = con;
        carried.name = name;
        std::vector<std::pair<std::string, std::string>> substitutions;
        if (con.ast && rename_it != merger.identity_renames.end()) {
            auto rewritten = std::make_shared<ConstraintExpr>(*con.ast);
            rewritten->context_class = rename_it->second;
            carried.ast = rewritten;
            carried.text = print_constraint(*rewritten);
            if (rename_it->first != rename_it->second)
                substitutions.push_back({rename_it->first, rename_it->second});
        }

        merger.result.constraints.push_back(carried);
        if (touch_it != merger.inheritance_touch.end()) {
            merger.report.flagged_constraints.push_back(
                {name, "context class '" + touch_it->first + "' feeds " +
                           merge_mode_name(touch_it->second.first) + " inheritance of '" +
                           touch_it->second.second + "'; the constraint does not extend to the "
                           "new class"});
        } else {
            merger.report.rewritten_constraints.push_back({name, std::move(substitutions)});
        }
    };
    for (const auto& con : left.constraints) carry(con, left.name);
    for (const auto& con : right.constraints) carry(con, right.name);

    Diagnostics faults = validate_metamodel(merger.result);
    if (!faults.empty())
        throw KernelError(Errc::MergeConflict,
                          "merged metamodel is not valid: " + faults.front().message);

    // re-check the carried constraints against the merged metamodel
    for (auto& con : merger.result.constraints) {
        auto reparsed = std::make_shared<ConstraintExpr>(
            parse_constraint(con.text, &merger.result));
        con.ast = reparsed;
    }

    return {std::move(merger.result), std::move(merger.report)};
}

Diagnostics check_merged_conformance(const Model& model, const Metamodel& merged,
                                     HeaderCheck header) {
    return check_conformance(model, merged, header);
}

}  // namespace metakernel
