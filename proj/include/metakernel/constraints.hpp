#pragma once

#include "metakernel/diagnostics.hpp"
#include "metakernel/ids.hpp"
#include "metakernel/metamodel.hpp"
#include "metakernel/value.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace metakernel {

struct Model;

enum class NavOp { AttachingConnections, ConnectionPoints, Target, Parent };
enum class CollOp { ForAll, Exists, TheOnly, Size };
enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class LogicOp { And, Or, Implies };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Expression tree of the constraint language. The implicit context entity is
// the receiver of the leading navigation chain.
struct Expr {
    struct ContextRef {};
    struct VarRef {
        std::string name;
    };
    struct Literal {
        Value value;
    };
    struct AttrAccess {
        ExprPtr receiver;
        std::string attribute;
    };
    struct Nav {
        ExprPtr receiver;
        NavOp op;
        std::string argument;  // association kind or role name; empty otherwise
    };
    struct Coll {
        ExprPtr receiver;
        CollOp op;
        std::string binder;  // ForAll/Exists only
        ExprPtr body;        // ForAll/Exists only
    };
    struct Compare {
        CmpOp op;
        ExprPtr lhs;
        ExprPtr rhs;
    };
    struct Logic {
        LogicOp op;
        ExprPtr lhs;
        ExprPtr rhs;
    };
    struct Not {
        ExprPtr operand;
    };

    std::variant<ContextRef, VarRef, Literal, AttrAccess, Nav, Coll, Compare, Logic, Not> node;
};

struct ConstraintExpr {
    std::string context_class;
    ExprPtr body;
};

struct ConstraintViolation {
    EntityId context;
    std::string detail;  // empty for a plain false; evaluation-error text otherwise
};

struct ConstraintResult {
    std::string constraint_name;
    bool overall = true;
    std::vector<ConstraintViolation> violations;  // overall iff empty
};

// Parses constraint text. When a metamodel is supplied the expression is
// name- and kind-checked against it; otherwise checking is deferred to
// evaluation. Throws SyntaxError (located) on bad input, and SyntaxError
// with code TypeMismatch for kind errors such as navigating a literal or
// passing a class name where an association kind is required.
ConstraintExpr parse_constraint(std::string_view text, const Metamodel* mm = nullptr);

// Same, reporting error positions relative to a containing file.
ConstraintExpr parse_constraint_at(std::string_view text, const Metamodel* mm,
                                   int base_line, int base_column);

// Canonical text. parse(print(parse(t))) == parse(t).
std::string print_constraint(const ConstraintExpr& expr);

bool same_expr(const ConstraintExpr& a, const ConstraintExpr& b);

// Evaluates the body once per entity whose class is a subtype of the context
// class, in entity-id order. Evaluation errors (theOnly on a non-singleton,
// parent of a root, kind mismatches) are recorded as violations for that
// context entity, never thrown.
ConstraintResult eval_constraint(const Model& model, const Metamodel& mm,
                                 const ConstraintExpr& expr,
                                 std::string_view constraint_name = "");

struct WellFormedness {
    bool verdict = true;
    std::vector<ConstraintResult> results;  // metamodel declaration order
};

// All constraints of the metamodel; verdict is the conjunction.
WellFormedness eval_all(const Model& model, const Metamodel& mm);

}  // namespace metakernel
