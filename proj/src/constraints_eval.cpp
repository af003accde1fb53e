#include "metakernel/constraints.hpp"
#include "metakernel/model.hpp"

#include <map>
#include <variant>
#include <vector>

namespace metakernel {

namespace {

// Runtime value of the evaluator. Collections arise from navigations and are
// consumed by the collection operations.
struct RtVal {
    enum class Kind { Literal, Entity, Link, End, List };

    Kind kind = Kind::Literal;
    Value literal;
    EntityId entity{};
    LinkId link{};
    std::string role;  // End
    std::vector<RtVal> list;

    static RtVal of(Value v) { return {Kind::Literal, std::move(v), {}, {}, {}, {}}; }
    static RtVal of_entity(EntityId id) { return {Kind::Entity, {}, id, {}, {}, {}}; }
    static RtVal of_end(LinkId link, std::string role) {
        return {Kind::End, {}, {}, link, std::move(role), {}};
    }
    static RtVal of_link(LinkId id) { return {Kind::Link, {}, {}, id, {}, {}}; }
    static RtVal of_list(std::vector<RtVal> items) {
        return {Kind::List, {}, {}, {}, {}, std::move(items)};
    }
};

const char* rt_kind_name(RtVal::Kind kind) {
    switch (kind) {
        case RtVal::Kind::Literal: return "literal";
        case RtVal::Kind::Entity: return "entity";
        case RtVal::Kind::Link: return "link";
        case RtVal::Kind::End: return "connection point";
        case RtVal::Kind::List: return "collection";
    }
    return "?";
}

// Recorded as a violation for the current context entity.
struct EvalFault {
    std::string message;
};

class Evaluator {
public:
    Evaluator(const Model& model, const Metamodel& mm, EntityId context)
        : model_(model), mm_(mm), context_(context) {}

    bool eval_bool(const Expr& body) {
        RtVal v = eval(body);
        if (v.kind != RtVal::Kind::Literal || kind_of(v.literal) != ValueKind::Boolean)
            throw EvalFault{"constraint body did not evaluate to a boolean"};
        return std::get<bool>(v.literal);
    }

private:
    RtVal eval(const Expr& e) {
        return std::visit([&](const auto& node) { return eval_node(node); }, e.node);
    }

    RtVal eval_node(const Expr::ContextRef&) { return RtVal::of_entity(context_); }

    RtVal eval_node(const Expr::VarRef& node) {
        auto it = vars_.find(node.name);
        if (it == vars_.end()) throw EvalFault{"unbound name '" + node.name + "'"};
        return it->second;
    }

    RtVal eval_node(const Expr::Literal& node) { return RtVal::of(node.value); }

    RtVal eval_node(const Expr::AttrAccess& node) {
        RtVal recv = eval(*node.receiver);
        if (recv.kind != RtVal::Kind::Entity)
            throw EvalFault{"attribute '" + node.attribute + "' read from a " +
                            rt_kind_name(recv.kind)};
        const Entity& entity = model_.entity_at(recv.entity);
        auto it = entity.attribute_values.find(node.attribute);
        if (it != entity.attribute_values.end()) return RtVal::of(it->second);
        if (mm_.find_class(entity.class_name)) {
            FlattenedClass flat = effective_features(mm_, entity.class_name);
            if (const AttributeDef* attr = flat.find_attribute(node.attribute))
                return RtVal::of(attr->default_value);
        }
        throw EvalFault{"entity of class '" + entity.class_name + "' has no attribute '" +
                        node.attribute + "'"};
    }

    RtVal eval_node(const Expr::Nav& node) {
        RtVal recv = eval(*node.receiver);
        switch (node.op) {
            case NavOp::AttachingConnections: {
                if (recv.kind != RtVal::Kind::Entity)
                    throw EvalFault{"attachingConnections applied to a " +
                                    std::string(rt_kind_name(recv.kind))};
                if (!mm_.find_association(node.argument))
                    throw EvalFault{"unknown association kind '" + node.argument + "'"};
                std::vector<RtVal> links;
                for (const auto& [id, link] : model_.links) {
                    if (link.association_name != node.argument) continue;
                    for (const auto& [role, end] : link.ends)
                        if (end == recv.entity) {
                            links.push_back(RtVal::of_link(id));
                            break;
                        }
                }
                return RtVal::of_list(std::move(links));
            }
            case NavOp::ConnectionPoints: {
                if (recv.kind != RtVal::Kind::Link)
                    throw EvalFault{"connectionPoints applied to a " +
                                    std::string(rt_kind_name(recv.kind))};
                const Link& link = model_.link_at(recv.link);
                std::vector<RtVal> ends;
                if (link.ends.count(node.argument))
                    ends.push_back(RtVal::of_end(recv.link, node.argument));
                return RtVal::of_list(std::move(ends));
            }
            case NavOp::Target: {
                if (recv.kind != RtVal::Kind::End)
                    throw EvalFault{"target applied to a " + std::string(rt_kind_name(recv.kind))};
                const Link& link = model_.link_at(recv.link);
                auto it = link.ends.find(recv.role);
                if (it == link.ends.end())
                    throw EvalFault{"link lost role '" + recv.role + "'"};
                return RtVal::of_entity(it->second);
            }
            case NavOp::Parent: {
                if (recv.kind != RtVal::Kind::Entity)
                    throw EvalFault{"parent applied to a " + std::string(rt_kind_name(recv.kind))};
                const Entity& entity = model_.entity_at(recv.entity);
                if (!entity.parent)
                    throw EvalFault{"parent() of root " + entity_path(model_, entity.id)};
                return RtVal::of_entity(*entity.parent);
            }
        }
        throw EvalFault{"bad navigation"};
    }

    RtVal eval_node(const Expr::Coll& node) {
        RtVal recv = eval(*node.receiver);
        if (recv.kind != RtVal::Kind::List)
            throw EvalFault{"collection operation applied to a " +
                            std::string(rt_kind_name(recv.kind))};
        switch (node.op) {
            case CollOp::ForAll:
            case CollOp::Exists: {
                bool want = node.op == CollOp::ForAll;
                for (const RtVal& element : recv.list) {
                    auto saved = vars_.find(node.binder) != vars_.end()
                                     ? std::optional<RtVal>(vars_[node.binder])
                                     : std::nullopt;
                    vars_[node.binder] = element;
                    bool value = eval_bool(*node.body);
                    if (saved)
                        vars_[node.binder] = *saved;
                    else
                        vars_.erase(node.binder);
                    if (value != want) return RtVal::of(Value{!want});
                }
                return RtVal::of(Value{want});
            }
            case CollOp::TheOnly:
                if (recv.list.size() != 1)
                    throw EvalFault{"theOnly() on a collection of size " +
                                    std::to_string(recv.list.size())};
                return recv.list.front();
            case CollOp::Size:
                return RtVal::of(Value{static_cast<std::int64_t>(recv.list.size())});
        }
        throw EvalFault{"bad collection operation"};
    }

    static bool is_numeric(const RtVal& v) {
        return v.kind == RtVal::Kind::Literal &&
               (kind_of(v.literal) == ValueKind::Integer || kind_of(v.literal) == ValueKind::Real);
    }

    static double as_real(const RtVal& v) {
        if (kind_of(v.literal) == ValueKind::Integer)
            return static_cast<double>(std::get<std::int64_t>(v.literal));
        return std::get<double>(v.literal);
    }

    bool equal(const RtVal& a, const RtVal& b) {
        if (a.kind == RtVal::Kind::Entity && b.kind == RtVal::Kind::Entity)
            return a.entity == b.entity;
        if (a.kind == RtVal::Kind::Link && b.kind == RtVal::Kind::Link) return a.link == b.link;
        if (a.kind == RtVal::Kind::End && b.kind == RtVal::Kind::End)
            return a.link == b.link && a.role == b.role;
        if (a.kind == RtVal::Kind::Literal && b.kind == RtVal::Kind::Literal) {
            if (is_numeric(a) && is_numeric(b)) return as_real(a) == as_real(b);
            // an enum value equals the string naming its literal
            const auto* ea = std::get_if<EnumLiteral>(&a.literal);
            const auto* eb = std::get_if<EnumLiteral>(&b.literal);
            const auto* sa = std::get_if<std::string>(&a.literal);
            const auto* sb = std::get_if<std::string>(&b.literal);
            if (ea && sb) return ea->name == *sb;
            if (sa && eb) return *sa == eb->name;
            return a.literal == b.literal;
        }
        throw EvalFault{std::string("cannot compare a ") + rt_kind_name(a.kind) + " with a " +
                        rt_kind_name(b.kind)};
    }

    RtVal eval_node(const Expr::Compare& node) {
        RtVal lhs = eval(*node.lhs);
        RtVal rhs = eval(*node.rhs);
        switch (node.op) {
            case CmpOp::Eq: return RtVal::of(Value{equal(lhs, rhs)});
            case CmpOp::Ne: return RtVal::of(Value{!equal(lhs, rhs)});
            default: break;
        }
        if (!is_numeric(lhs) || !is_numeric(rhs))
            throw EvalFault{"ordering comparison needs numeric operands"};
        double a = as_real(lhs);
        double b = as_real(rhs);
        bool result = false;
        switch (node.op) {
            case CmpOp::Lt: result = a < b; break;
            case CmpOp::Le: result = a <= b; break;
            case CmpOp::Gt: result = a > b; break;
            case CmpOp::Ge: result = a >= b; break;
            default: break;
        }
        return RtVal::of(Value{result});
    }

    RtVal eval_node(const Expr::Logic& node) {
        bool lhs = eval_bool(*node.lhs);
        switch (node.op) {
            case LogicOp::And:
                if (!lhs) return RtVal::of(Value{false});
                return RtVal::of(Value{eval_bool(*node.rhs)});
            case LogicOp::Or:
                if (lhs) return RtVal::of(Value{true});
                return RtVal::of(Value{eval_bool(*node.rhs)});
            case LogicOp::Implies:
                if (!lhs) return RtVal::of(Value{true});
                return RtVal::of(Value{eval_bool(*node.rhs)});
        }
        throw EvalFault{"bad logic operation"};
    }

    RtVal eval_node(const Expr::Not& node) { return RtVal::of(Value{!eval_bool(*node.operand)}); }

    const Model& model_;
    const Metamodel& mm_;
    EntityId context_;
    std::map<std::string, RtVal> vars_;
};

}  // namespace

ConstraintResult eval_constraint(const Model& model, const Metamodel& mm,
                                 const ConstraintExpr& expr, std::string_view constraint_name) {
    ConstraintResult result;
    result.constraint_name = std::string(constraint_name);

    for (const auto& [id, entity] : model.entities) {
        if (!mm.find_class(entity.class_name)) continue;
        if (!mm.find_class(expr.context_class)) continue;
        if (!is_subtype(mm, entity.class_name, expr.context_class)) continue;
        try {
            Evaluator evaluator(model, mm, id);
            if (!evaluator.eval_bool(*expr.body)) result.violations.push_back({id, {}});
        } catch (const EvalFault& fault) {
            result.violations.push_back({id, fault.message});
        }
    }
    result.overall = result.violations.empty();
    return result;
}

WellFormedness eval_all(const Model& model, const Metamodel& mm) {
    WellFormedness out;
    for (const auto& con : mm.constraints) {
        ConstraintExpr local;
        const ConstraintExpr* expr = con.ast.get();
        if (!expr) {
            local = parse_constraint(con.text, &mm);
            expr = &local;
        }
        ConstraintResult result = eval_constraint(model, mm, *expr, con.name);
        out.verdict = out.verdict && result.overall;
        out.results.push_back(std::move(result));
    }
    return out;
}

}  // namespace metakernel
