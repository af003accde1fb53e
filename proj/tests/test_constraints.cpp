#include "metakernel/constraints.hpp"

#include "metakernel/model.hpp"
#include "support/fixtures.hpp"
#include "support/rng.hpp"

#include <doctest.h>

#include <functional>

using namespace metakernel;
using testsupport::Rng;

namespace {

const char* paper_constraint_text =
    "OutPort.attachingConnections( BufferedConnection )->forAll( c |\n"
    "  c.connectionPoints( \"src\" )->theOnly( ).target( ).parent( ).parent( ) =\n"
    "  c.connectionPoints( \"dst\" )->theOnly( ).target( ).parent( ) )";

int parent_chain_depth(const Expr& e) {
    if (const auto* nav = std::get_if<Expr::Nav>(&e.node)) {
        if (nav->op == NavOp::Parent) return 1 + parent_chain_depth(*nav->receiver);
        return 0;
    }
    return 0;
}

Errc parse_error_code(const std::string& text, const Metamodel* mm) {
    try {
        (void)parse_constraint(text, mm);
    } catch (const SyntaxError& error) {
        return error.code();
    }
    throw std::runtime_error("expected a SyntaxError");
}

}  // namespace

TEST_CASE("the published expression parses into the expected shape") {
    Metamodel mm = testsupport::load_signalflow();
    ConstraintExpr expr = parse_constraint(paper_constraint_text, &mm);
    CHECK(expr.context_class == "OutPort");

    const auto* for_all = std::get_if<Expr::Coll>(&expr.body->node);
    REQUIRE(for_all != nullptr);
    CHECK(for_all->op == CollOp::ForAll);
    CHECK(for_all->binder == "c");

    const auto* attaching = std::get_if<Expr::Nav>(&for_all->receiver->node);
    REQUIRE(attaching != nullptr);
    CHECK(attaching->op == NavOp::AttachingConnections);
    CHECK(attaching->argument == "BufferedConnection");

    const auto* compare = std::get_if<Expr::Compare>(&for_all->body->node);
    REQUIRE(compare != nullptr);
    CHECK(compare->op == CmpOp::Eq);
    CHECK(parent_chain_depth(*compare->lhs) == 2);
    CHECK(parent_chain_depth(*compare->rhs) == 1);
}

TEST_CASE("malformed text is a located syntax error") {
    CHECK_THROWS_AS((void)parse_constraint("Component.size-irrelevant"), SyntaxError);
    CHECK_THROWS_AS((void)parse_constraint(""), SyntaxError);
    CHECK_THROWS_AS((void)parse_constraint("Component."), SyntaxError);
    CHECK_THROWS_AS((void)parse_constraint("Component.forAll(x | x)"), SyntaxError);
    try {
        (void)parse_constraint("OutPort.attachingConnections(\n@)");
    } catch (const SyntaxError& error) {
        CHECK(error.line() == 2);
    }
}

TEST_CASE("size comparisons parse and canonicalize") {
    Metamodel mm = testsupport::load_signalflow();
    ConstraintExpr expr =
        parse_constraint("OutPort.attachingConnections(BufferedConnection)->size() = 0", &mm);
    const auto* compare = std::get_if<Expr::Compare>(&expr.body->node);
    REQUIRE(compare != nullptr);
    const auto* size = std::get_if<Expr::Coll>(&compare->lhs->node);
    REQUIRE(size != nullptr);
    CHECK(size->op == CollOp::Size);
    const auto* zero = std::get_if<Expr::Literal>(&compare->rhs->node);
    REQUIRE(zero != nullptr);
    CHECK(zero->value == Value{std::int64_t{0}});

    std::string printed = print_constraint(expr);
    ConstraintExpr reparsed = parse_constraint(printed, &mm);
    CHECK(print_constraint(reparsed) == printed);
}

TEST_CASE("kind errors are caught at parse time against a metamodel") {
    Metamodel mm = testsupport::load_signalflow();
    CHECK(parse_error_code("OutPort.attachingConnections(Port)->size() = 0", &mm) ==
          Errc::TypeMismatch);
    CHECK(parse_error_code("OutPort.attachingConnections(Nothing)->size() = 0", &mm) ==
          Errc::DanglingReference);
    CHECK(parse_error_code("Ghost.attachingConnections(BufferedConnection)->size() = 0", &mm) ==
          Errc::DanglingReference);
    CHECK(parse_error_code("Component.nosuch = 1", &mm) == Errc::DanglingReference);
    CHECK(parse_error_code("Component.name < 3", &mm) == Errc::TypeMismatch);
    CHECK(parse_error_code("Component.gain", &mm) == Errc::TypeMismatch);  // not boolean
    CHECK(parse_error_code(
              "OutPort.attachingConnections(BufferedConnection)->forAll(c | "
              "c.connectionPoints(\"via\")->size() = 0)",
              &mm) == Errc::DanglingReference);
    // without a metamodel the same text parses
    CHECK_NOTHROW((void)parse_constraint("Component.nosuch = 1"));
}

TEST_CASE("pass-up wiring satisfies the published constraint") {
    Metamodel mm = testsupport::load_signalflow();
    Model model = testsupport::load_model_sample("passup.mdl", mm);
    ConstraintResult result =
        eval_constraint(model, mm, *mm.constraints[0].ast, mm.constraints[0].name);
    CHECK(result.overall);
    CHECK(result.violations.empty());
}

TEST_CASE("sibling out-port wiring violates the published constraint") {
    Metamodel mm = testsupport::load_signalflow();
    Model model = testsupport::load_model_sample("bad_siblings.mdl", mm);
    ConstraintResult result =
        eval_constraint(model, mm, *mm.constraints[0].ast, mm.constraints[0].name);
    CHECK_FALSE(result.overall);
    // both attached OutPorts are failing contexts
    REQUIRE(result.violations.size() == 2);
    CHECK(result.violations[0].context.value == 3);
    CHECK(result.violations[1].context.value == 4);
}

TEST_CASE("constraints hold vacuously") {
    Metamodel mm = testsupport::load_signalflow();
    Model model;
    model.id = "v";
    model.metamodel_name = mm.name;
    model.metamodel_version = mm.version;

    EntityId component = instantiate(model, mm, "Component", std::nullopt);
    ConstraintExpr zero_links =
        parse_constraint("Component.attachingConnections(BufferedConnection)->size() = 0", &mm);
    CHECK(eval_constraint(model, mm, zero_links).overall);

    // no instances of the context class at all
    delete_entity(model, component);
    ConstraintExpr on_ports =
        parse_constraint("OutPort.attachingConnections(BufferedConnection)->size() = 0", &mm);
    CHECK(eval_constraint(model, mm, on_ports).overall);
}

TEST_CASE("evaluation faults become violations, not crashes") {
    Metamodel mm = testsupport::load_signalflow();
    Model model;
    model.id = "f";
    model.metamodel_name = mm.name;
    model.metamodel_version = mm.version;
    EntityId root = instantiate(model, mm, "Component", std::nullopt);

    ConstraintExpr needs_parent = parse_constraint("Component.(self.parent() = self)", &mm);
    ConstraintResult no_parent = eval_constraint(model, mm, needs_parent, "needs_parent");
    REQUIRE(no_parent.violations.size() == 1);
    CHECK(no_parent.violations[0].context == root);
    CHECK(no_parent.violations[0].detail.find("parent()") != std::string::npos);

    ConstraintExpr the_only = parse_constraint(
        "Component.attachingConnections(BufferedConnection)->theOnly() = self", &mm);
    ConstraintResult not_singleton = eval_constraint(model, mm, the_only, "the_only");
    REQUIRE(not_singleton.violations.size() == 1);
    CHECK(not_singleton.violations[0].detail.find("theOnly") != std::string::npos);
}

TEST_CASE("eval_all aggregates in declaration order") {
    Metamodel mm = testsupport::load_signalflow();

    Model empty;
    empty.id = "e";
    empty.metamodel_name = mm.name;
    empty.metamodel_version = mm.version;
    Metamodel unconstrained = mm;
    unconstrained.constraints.clear();
    CHECK(eval_all(empty, unconstrained).verdict);

    Model bad = testsupport::load_model_sample("bad_siblings.mdl", mm);
    WellFormedness wf = eval_all(bad, mm);
    CHECK_FALSE(wf.verdict);
    REQUIRE(wf.results.size() == 1);
    CHECK(wf.results[0].constraint_name == "outport_pass_up");
    CHECK_FALSE(wf.results[0].overall);
}

TEST_CASE("eval_all equals the conjunction of individual evaluations") {
    Metamodel base = testsupport::load_signalflow();
    std::vector<std::string> pool = {
        "Component.attachingConnections(BufferedConnection)->size() = 0",
        "OutPort.attachingConnections(BufferedConnection)->size() >= 0",
        "Component.gain >= 0.0",
        "OutPort.name <> \"forbidden\"",
        paper_constraint_text,
    };

    Metamodel mm = base;
    Model model = testsupport::load_model_sample("fig36b.mdl", mm);
    Rng rng(41);
    for (int round = 0; round < 50; ++round) {
        mm.constraints.clear();
        int count = rng.between(0, 4);
        for (int i = 0; i < count; ++i) {
            ConstraintDef con;
            con.name = "c" + std::to_string(i);
            con.ast = std::make_shared<ConstraintExpr>(
                parse_constraint(pool[static_cast<std::size_t>(rng.below(5))], &base));
            con.text = print_constraint(*con.ast);
            mm.constraints.push_back(con);
        }

        WellFormedness wf = eval_all(model, mm);
        bool expected = true;
        for (const auto& con : mm.constraints)
            expected = expected && eval_constraint(model, mm, *con.ast, con.name).overall;
        CHECK(wf.verdict == expected);
        CHECK(wf.results.size() == mm.constraints.size());
    }
}

TEST_CASE("evaluation is pure and context independent") {
    Metamodel mm = testsupport::load_signalflow();
    Model model = testsupport::load_model_sample("bad_siblings.mdl", mm);
    const ConstraintExpr& expr = *mm.constraints[0].ast;

    Model snapshot = model;
    ConstraintResult first = eval_constraint(model, mm, expr);
    ConstraintResult second = eval_constraint(model, mm, expr);
    CHECK(model == snapshot);
    REQUIRE(first.violations.size() == second.violations.size());
    for (std::size_t i = 0; i < first.violations.size(); ++i)
        CHECK(first.violations[i].context == second.violations[i].context);

    // adding an unrelated subtree leaves existing verdicts untouched
    EntityId extra = instantiate(model, mm, "Component", std::nullopt);
    instantiate(model, mm, "InPort", extra);
    ConstraintResult third = eval_constraint(model, mm, expr);
    REQUIRE(third.violations.size() == first.violations.size());
    for (std::size_t i = 0; i < first.violations.size(); ++i)
        CHECK(third.violations[i].context == first.violations[i].context);
}

namespace {

// random well-formed expression text via a random AST; exercises the
// printer/parser pair without a metamodel
ExprPtr random_expr(Rng& rng, std::vector<std::string>& scope, int depth, bool want_bool);

ExprPtr wrap(Expr e) { return std::make_shared<Expr>(std::move(e)); }

ExprPtr random_chain(Rng& rng, std::vector<std::string>& scope, int depth) {
    ExprPtr base;
    if (!scope.empty() && rng.chance(50))
        base = wrap(Expr{Expr::VarRef{scope[static_cast<std::size_t>(
            rng.below(static_cast<int>(scope.size())))]}});
    else
        base = wrap(Expr{Expr::ContextRef{}});
    int steps = rng.below(3);
    for (int i = 0; i < steps; ++i) {
        switch (rng.below(4)) {
            case 0: base = wrap(Expr{Expr::Nav{base, NavOp::Parent, {}}}); break;
            case 1:
                base = wrap(Expr{Expr::Nav{base, NavOp::AttachingConnections, "Kind"}});
                base = wrap(Expr{Expr::Coll{base, CollOp::TheOnly, {}, nullptr}});
                break;
            case 2: base = wrap(Expr{Expr::AttrAccess{base, "f" + std::to_string(i)}}); break;
            default:
                base = wrap(Expr{Expr::Nav{base, NavOp::AttachingConnections, "Kind"}});
                base = wrap(Expr{Expr::Coll{base, CollOp::Size, {}, nullptr}});
                if (depth > 0 && rng.chance(50))
                    return wrap(Expr{Expr::Compare{CmpOp::Ge, base,
                                                   wrap(Expr{Expr::Literal{Value{std::int64_t{
                                                       rng.between(0, 5)}}}})}});
                break;
        }
    }
    return base;
}

ExprPtr random_bool(Rng& rng, std::vector<std::string>& scope, int depth) {
    if (depth <= 0 || rng.chance(25))
        return wrap(Expr{Expr::Compare{
            rng.chance(50) ? CmpOp::Eq : CmpOp::Ne, random_chain(rng, scope, 0),
            random_chain(rng, scope, 0)}});
    switch (rng.below(5)) {
        case 0:
            return wrap(Expr{Expr::Logic{LogicOp::And, random_bool(rng, scope, depth - 1),
                                         random_bool(rng, scope, depth - 1)}});
        case 1:
            return wrap(Expr{Expr::Logic{LogicOp::Or, random_bool(rng, scope, depth - 1),
                                         random_bool(rng, scope, depth - 1)}});
        case 2:
            return wrap(Expr{Expr::Logic{LogicOp::Implies, random_bool(rng, scope, depth - 1),
                                         random_bool(rng, scope, depth - 1)}});
        case 3: return wrap(Expr{Expr::Not{random_bool(rng, scope, depth - 1)}});
        default: {
            std::string binder = "v" + std::to_string(scope.size());
            ExprPtr coll =
                wrap(Expr{Expr::Nav{random_chain(rng, scope, 0), NavOp::AttachingConnections,
                                    "Kind"}});
            scope.push_back(binder);
            ExprPtr body = random_bool(rng, scope, depth - 1);
            scope.pop_back();
            return wrap(Expr{Expr::Coll{coll, rng.chance(50) ? CollOp::ForAll : CollOp::Exists,
                                        binder, body}});
        }
    }
}

ExprPtr random_expr(Rng& rng, std::vector<std::string>& scope, int depth, bool want_bool) {
    return want_bool ? random_bool(rng, scope, depth) : random_chain(rng, scope, depth);
}

}  // namespace

TEST_CASE("printing is a canonical form: parse(print(x)) prints identically") {
    Rng rng(99);
    for (int round = 0; round < 200; ++round) {
        std::vector<std::string> scope;
        ConstraintExpr expr;
        expr.context_class = "Ctx";
        expr.body = random_expr(rng, scope, 3, true);

        std::string printed = print_constraint(expr);
        CAPTURE(printed);
        ConstraintExpr reparsed = parse_constraint(printed);
        CHECK(print_constraint(reparsed) == printed);
        CHECK(same_expr(expr, reparsed));
    }
}
