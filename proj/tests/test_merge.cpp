#include "metakernel/merge.hpp"

#include "metakernel/clones.hpp"
#include "metakernel/syntax.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <functional>
#include <set>

using namespace metakernel;
using testsupport::Rng;

namespace {

EquivalenceSpec identity_spec(const std::string& left, const std::string& right,
                              const std::string& merged) {
    EquivalenceSpec spec;
    spec.entries.push_back({left, right, MergeMode::Identity, merged});
    return spec;
}

Errc thrown_code(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const KernelError& error) {
        return error.code();
    }
    throw std::runtime_error("expected a KernelError");
}

Metamodel tiny(const std::string& name, const std::string& cls) {
    Metamodel mm;
    mm.name = name;
    MetaClass c;
    c.name = cls;
    mm.classes.push_back(c);
    return mm;
}

}  // namespace

TEST_CASE("the hybrid-language scenario from the merge figure") {
    Metamodel discrete = testsupport::load_metamodel_sample("discrete.mm");
    Metamodel continuous = testsupport::load_metamodel_sample("continuous.mm");
    EquivalenceSpec spec =
        parse_equivalence_spec(testsupport::read_file(testsupport::sample_path("hybrid.eqv")));

    MergeResult result = merge(discrete, continuous, spec);
    const Metamodel& hybrid = result.metamodel;
    CHECK(validate_metamodel(hybrid).empty());
    CHECK(hybrid.find_class("Behavior") == nullptr);
    const MetaClass* system = hybrid.find_class("System");
    REQUIRE(system != nullptr);
    // union of both sources' attributes
    CHECK(effective_features(hybrid, "System").find_attribute("action") != nullptr);
    CHECK(effective_features(hybrid, "System").find_attribute("name") != nullptr);

    // a System inside a State now conforms
    Model model = testsupport::load_model_sample("hybrid.mdl", hybrid);
    CHECK(check_merged_conformance(model, hybrid).empty());

    // while the unmerged discrete language rejects the same content
    Diagnostics against_discrete = check_structure(model, discrete, HeaderCheck::Ignore);
    bool unknown_system = false;
    for (const auto& diag : against_discrete)
        unknown_system = unknown_system || (diag.code == DiagCode::UnknownEntityClass &&
                                            diag.message.find("System") != std::string::npos);
    CHECK(unknown_system);

    // every input constraint is classified
    CHECK(result.report.rewritten_constraints.size() +
              result.report.flagged_constraints.size() ==
          discrete.constraints.size() + continuous.constraints.size());
    REQUIRE(result.report.rewritten_constraints.size() == 2);
    CHECK(result.report.rewritten_constraints[0].constraint == "behavior_named");
    REQUIRE(result.report.rewritten_constraints[0].substitutions.size() == 1);
    CHECK(result.report.rewritten_constraints[0].substitutions[0].first == "Behavior");
    CHECK(result.report.rewritten_constraints[0].substitutions[0].second == "System");
    CHECK(result.report.rewritten_constraints[1].constraint == "variable_named");
    CHECK(result.report.rewritten_constraints[1].substitutions.empty());
}

TEST_CASE("merging with an empty spec is a disjoint union") {
    Metamodel discrete = testsupport::load_metamodel_sample("discrete.mm");
    Metamodel continuous = testsupport::load_metamodel_sample("continuous.mm");
    MergeResult result = merge(discrete, continuous, {});

    CHECK(result.metamodel.classes.size() ==
          discrete.classes.size() + continuous.classes.size());
    CHECK(result.metamodel.associations.size() ==
          discrete.associations.size() + continuous.associations.size());
    CHECK(result.report.produced_classes.empty());

    // queries restricted to either input agree with that input
    for (const auto& cls : discrete.classes)
        CHECK(effective_features(result.metamodel, cls.name) ==
              effective_features(discrete, cls.name));
    for (const auto& cls : continuous.classes)
        CHECK(effective_features(result.metamodel, cls.name) ==
              effective_features(continuous, cls.name));
}

TEST_CASE("identity union carries both attribute sets and both models") {
    Metamodel left = tiny("L", "A");
    left.classes[0].attributes.push_back(
        {"x", {ValueKind::Integer, {}}, Value{std::int64_t{1}}});
    MetaClass holder;
    holder.name = "HL";
    holder.containments.push_back({"A", {}});
    left.classes.push_back(holder);

    Metamodel right = tiny("R", "B");
    right.classes[0].attributes.push_back({"y", {ValueKind::Boolean, {}}, Value{false}});

    MergeResult result = merge(left, right, identity_spec("A", "B", "AB"));
    const FlattenedClass merged = effective_features(result.metamodel, "AB");
    CHECK(merged.find_attribute("x") != nullptr);
    CHECK(merged.find_attribute("y") != nullptr);

    // a model of either original language conforms after the pure rename
    Model model;
    model.id = "m";
    model.metamodel_name = result.metamodel.name;
    model.metamodel_version = result.metamodel.version;
    EntityId h = instantiate(model, result.metamodel, "HL", std::nullopt);
    instantiate(model, result.metamodel, "AB", h);
    CHECK(check_merged_conformance(model, result.metamodel).empty());
}

TEST_CASE("merge preconditions and conflicts raise specific errors") {
    Metamodel left = tiny("L", "Shared");
    Metamodel right = tiny("R", "Shared");
    CHECK(thrown_code([&] { merge(left, right, {}); }) == Errc::NameCollision);

    Metamodel a = tiny("L", "A");
    Metamodel b = tiny("R", "B");
    CHECK(thrown_code([&] { merge(a, b, identity_spec("Ghost", "B", "X")); }) ==
          Errc::UnknownClassInSpec);
    CHECK(thrown_code([&] { merge(a, b, identity_spec("A", "Ghost", "X")); }) ==
          Errc::UnknownClassInSpec);

    EquivalenceSpec twice;
    twice.entries.push_back({"A", "B", MergeMode::Identity, "X"});
    twice.entries.push_back({"A", "B", MergeMode::InterfaceInheritance, "Y"});
    CHECK(thrown_code([&] { merge(a, b, twice); }) == Errc::DuplicateSpecEntry);

    Metamodel c1 = tiny("L", "A");
    c1.classes[0].attributes.push_back({"v", {ValueKind::Integer, {}}, Value{std::int64_t{0}}});
    Metamodel c2 = tiny("R", "B");
    c2.classes[0].attributes.push_back({"v", {ValueKind::Boolean, {}}, Value{true}});
    CHECK(thrown_code([&] { merge(c1, c2, identity_spec("A", "B", "AB")); }) ==
          Errc::MergeConflict);
}

namespace {

// two small languages exercising roles, containment, and attributes for the
// inheritance-mode checks
Metamodel left_lang() {
    Metamodel mm;
    mm.name = "lhs";
    MetaClass node;
    node.name = "LNode";
    node.attributes.push_back({"weight", {ValueKind::Integer, {}}, Value{std::int64_t{0}}});
    MetaClass box;
    box.name = "LBox";
    box.containments.push_back({"LNode", {}});
    mm.classes.push_back(node);
    mm.classes.push_back(box);
    AssociationDef edge;
    edge.name = "LEdge";
    edge.roles.push_back({"a", "LNode", {}});
    edge.roles.push_back({"b", "LNode", {}});
    mm.associations.push_back(edge);
    return mm;
}

Metamodel right_lang() {
    Metamodel mm;
    mm.name = "rhs";
    MetaClass item;
    item.name = "RItem";
    item.attributes.push_back({"tag", {ValueKind::String, {}}, Value{std::string()}});
    item.containments.push_back({"RPart", {}});
    MetaClass part;
    part.name = "RPart";
    mm.classes.push_back(item);
    mm.classes.push_back(part);
    return mm;
}

}  // namespace

TEST_CASE("interface inheritance transfers role participation only") {
    EquivalenceSpec spec;
    spec.entries.push_back({"LNode", "RItem", MergeMode::InterfaceInheritance, "Signal"});
    MergeResult result = merge(left_lang(), right_lang(), spec);
    const Metamodel& mm = result.metamodel;
    REQUIRE(validate_metamodel(mm).empty());
    REQUIRE(mm.find_class("Signal") != nullptr);

    FlattenedClass merged = effective_features(mm, "Signal");
    CHECK(merged.attributes.empty());
    CHECK(merged.containments.empty());
    // participates wherever LNode participated
    bool plays_a = std::count(merged.roles.begin(), merged.roles.end(),
                              RoleParticipation{"LEdge", "a"}) == 1;
    bool plays_b = std::count(merged.roles.begin(), merged.roles.end(),
                              RoleParticipation{"LEdge", "b"}) == 1;
    CHECK(plays_a);
    CHECK(plays_b);

    // sources keep working and a Signal can fill their links
    Model model;
    model.id = "m";
    model.metamodel_name = mm.name;
    model.metamodel_version = mm.version;
    EntityId n1 = instantiate(model, mm, "LNode", std::nullopt);
    EntityId s = instantiate(model, mm, "Signal", std::nullopt);
    connect(model, mm, "LEdge", {{"a", n1}, {"b", s}}, std::nullopt);
    CHECK(check_merged_conformance(model, mm).empty());

    // but containment does not transfer: LBox cannot hold a Signal
    CHECK(thrown_code([&] {
              EntityId box = instantiate(model, mm, "LBox", std::nullopt);
              instantiate(model, mm, "Signal", box);
          }) == Errc::IllegalContainment);
}

TEST_CASE("implementation inheritance transfers attributes and containment only") {
    EquivalenceSpec spec;
    spec.entries.push_back({"LNode", "RItem", MergeMode::ImplementationInheritance, "Block"});
    MergeResult result = merge(left_lang(), right_lang(), spec);
    const Metamodel& mm = result.metamodel;
    REQUIRE(validate_metamodel(mm).empty());

    FlattenedClass merged = effective_features(mm, "Block");
    CHECK(merged.find_attribute("weight") != nullptr);
    CHECK(merged.find_attribute("tag") != nullptr);
    CHECK(merged.roles.empty());
    // container side: RItem contained RPart, so Block may too
    bool contains_part =
        std::any_of(merged.containments.begin(), merged.containments.end(),
                    [](const ContainmentRule& rule) { return rule.child_class == "RPart"; });
    CHECK(contains_part);

    Model model;
    model.id = "m";
    model.metamodel_name = mm.name;
    model.metamodel_version = mm.version;
    // containee side: LBox held LNode, so it holds Block now
    EntityId box = instantiate(model, mm, "LBox", std::nullopt);
    EntityId block = instantiate(model, mm, "Block", box);
    instantiate(model, mm, "RPart", block);
    CHECK(check_merged_conformance(model, mm).empty());

    // association participation does not transfer
    EntityId n1 = instantiate(model, mm, "LNode", std::nullopt);
    CHECK(thrown_code([&] {
              connect(model, mm, "LEdge", {{"a", n1}, {"b", block}}, std::nullopt);
          }) == Errc::RoleTypeMismatch);
}

TEST_CASE("identity merges are symmetric up to the merged name") {
    Metamodel discrete = testsupport::load_metamodel_sample("discrete.mm");
    Metamodel continuous = testsupport::load_metamodel_sample("continuous.mm");

    MergeResult forward =
        merge(discrete, continuous, identity_spec("Behavior", "System", "System"));
    MergeResult backward =
        merge(continuous, discrete, identity_spec("System", "Behavior", "System"));

    auto names = [](const Metamodel& mm) {
        std::set<std::string> out;
        for (const auto& cls : mm.classes) out.insert(cls.name);
        return out;
    };
    CHECK(names(forward.metamodel) == names(backward.metamodel));
    for (const auto& cls : forward.metamodel.classes) {
        FlattenedClass a = effective_features(forward.metamodel, cls.name);
        FlattenedClass b = effective_features(backward.metamodel, cls.name);
        auto sorted = [](FlattenedClass f) {
            std::sort(f.attributes.begin(), f.attributes.end(),
                      [](const AttributeDef& x, const AttributeDef& y) { return x.name < y.name; });
            std::sort(f.containments.begin(), f.containments.end(),
                      [](const ContainmentRule& x, const ContainmentRule& y) {
                          return x.child_class < y.child_class;
                      });
            std::sort(f.roles.begin(), f.roles.end(),
                      [](const RoleParticipation& x, const RoleParticipation& y) {
                          return std::tie(x.association, x.role) < std::tie(y.association, y.role);
                      });
            return f;
        };
        CHECK(sorted(a) == sorted(b));
    }
}

TEST_CASE("identity merging preserves conformance of source-language models") {
    for (std::uint32_t seed = 900; seed < 915; ++seed) {
        Rng rng(seed);
        Metamodel left = testsupport::random_metamodel(
            rng, {.name = "lhs", .class_prefix = "L", .assoc_prefix = "AL"});
        Metamodel right = testsupport::random_metamodel(
            rng, {.name = "rhs", .class_prefix = "R", .assoc_prefix = "AR"});

        EquivalenceSpec spec;
        int pairs = rng.below(1 + static_cast<int>(
                                      std::min(left.classes.size(), right.classes.size())));
        std::set<std::string> used;
        for (int i = 0; i < pairs; ++i) {
            const MetaClass& l = left.classes[static_cast<std::size_t>(
                rng.below(static_cast<int>(left.classes.size())))];
            const MetaClass& r = right.classes[static_cast<std::size_t>(
                rng.below(static_cast<int>(right.classes.size())))];
            if (used.count(l.name) || used.count(r.name)) continue;
            used.insert(l.name);
            used.insert(r.name);
            spec.entries.push_back({l.name, r.name, MergeMode::Identity,
                                    "M" + std::to_string(i)});
        }

        MergeResult result;
        try {
            result = merge(left, right, spec);
        } catch (const KernelError& error) {
            // attribute clashes between merged classes are legitimate rejections
            REQUIRE(error.code() == Errc::MergeConflict);
            continue;
        }
        REQUIRE(validate_metamodel(result.metamodel).empty());

        Model model = testsupport::random_model(rng, left, {.max_entities = 15});
        for (auto& [id, entity] : model.entities)
            for (const auto& entry : spec.entries)
                if (entity.class_name == entry.left_class) entity.class_name = entry.merged_name;
        CHECK(check_merged_conformance(model, result.metamodel).empty());
    }
}
