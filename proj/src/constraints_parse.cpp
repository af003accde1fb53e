#include "metakernel/constraints.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <vector>

namespace metakernel {

namespace {

enum class Tok {
    End,
    Ident,
    String,
    Integer,
    Real,
    Dot,
    Arrow,
    LParen,
    RParen,
    Pipe,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t int_value = 0;
    double real_value = 0.0;
    int line = 1;
    int column = 1;
};

class Lexer {
public:
    Lexer(std::string_view text, int base_line, int base_column)
        : text_(text), line_(base_line), column_(base_column) {}

    Token next() {
        skip_space();
        Token tok;
        tok.line = line_;
        tok.column = column_;
        if (pos_ >= text_.size()) return tok;

        char c = text_[pos_];
        if (c == '.') return take(tok, Tok::Dot, 1);
        if (c == '(') return take(tok, Tok::LParen, 1);
        if (c == ')') return take(tok, Tok::RParen, 1);
        if (c == '|') return take(tok, Tok::Pipe, 1);
        if (c == '=') return take(tok, Tok::Eq, 1);
        if (c == '-' && peek(1) == '>') return take(tok, Tok::Arrow, 2);
        if (c == '<') {
            if (peek(1) == '>') return take(tok, Tok::Ne, 2);
            if (peek(1) == '=') return take(tok, Tok::Le, 2);
            return take(tok, Tok::Lt, 1);
        }
        if (c == '>') {
            if (peek(1) == '=') return take(tok, Tok::Ge, 2);
            return take(tok, Tok::Gt, 1);
        }
        if (c == '"') return lex_string(tok);
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1)))))
            return lex_number(tok);
        if (c == '_' || std::isalpha(static_cast<unsigned char>(c))) return lex_ident(tok);
        fail(tok, std::string("unexpected character '") + c + "'");
    }

private:
    char peek(std::size_t ahead) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }

    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i, ++pos_) {
            if (text_[pos_] == '\n') {
                ++line_;
                column_ = 1;
            } else {
                ++column_;
            }
        }
    }

    void skip_space() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            advance(1);
    }

    Token take(Token tok, Tok kind, std::size_t n) {
        tok.kind = kind;
        tok.text = std::string(text_.substr(pos_, n));
        advance(n);
        return tok;
    }

    Token lex_string(Token tok) {
        advance(1);
        std::string out;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            char c = text_[pos_];
            if (c == '\\') {
                advance(1);
                if (pos_ >= text_.size()) break;
                switch (text_[pos_]) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case 'r': out += '\r'; break;
                    case '"': out += '"'; break;
                    case '\\': out += '\\'; break;
                    default: fail(tok, "bad escape sequence");
                }
                advance(1);
            } else {
                out += c;
                advance(1);
            }
        }
        if (pos_ >= text_.size()) fail(tok, "unterminated string literal");
        advance(1);
        tok.kind = Tok::String;
        tok.text = std::move(out);
        return tok;
    }

    Token lex_number(Token tok) {
        std::size_t start = pos_;
        if (text_[pos_] == '-') advance(1);
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            advance(1);
        bool real = false;
        if (pos_ < text_.size() && text_[pos_] == '.' &&
            std::isdigit(static_cast<unsigned char>(peek(1)))) {
            real = true;
            advance(1);
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                advance(1);
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_;
            advance(1);
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) advance(1);
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                real = true;
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    advance(1);
            } else {
                pos_ = save;  // 'e' belongs to a following identifier
            }
        }
        std::string_view slice = text_.substr(start, pos_ - start);
        tok.text = std::string(slice);
        if (real) {
            tok.kind = Tok::Real;
            auto [p, ec] = std::from_chars(slice.data(), slice.data() + slice.size(),
                                           tok.real_value);
            if (ec != std::errc()) fail(tok, "bad real literal");
        } else {
            tok.kind = Tok::Integer;
            auto [p, ec] = std::from_chars(slice.data(), slice.data() + slice.size(),
                                           tok.int_value);
            if (ec != std::errc()) fail(tok, "integer literal out of range");
        }
        return tok;
    }

    Token lex_ident(Token tok) {
        std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (text_[pos_] == '_' || std::isalnum(static_cast<unsigned char>(text_[pos_]))))
            advance(1);
        tok.kind = Tok::Ident;
        tok.text = std::string(text_.substr(start, pos_ - start));
        return tok;
    }

    [[noreturn]] void fail(const Token& at, const std::string& message) {
        throw SyntaxError(message, at.line, at.column);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_;
    int column_;
};

ExprPtr make(Expr::ContextRef n) { return std::make_shared<Expr>(Expr{std::move(n)}); }
ExprPtr make(Expr::VarRef n) { return std::make_shared<Expr>(Expr{std::move(n)}); }
ExprPtr make(Expr::Literal n) { return std::make_shared<Expr>(Expr{std::move(n)}); }
ExprPtr make(Expr::AttrAccess n) { return std::make_shared<Expr>(Expr{std::move(n)}); }
ExprPtr make(Expr::Nav n) { return std::make_shared<Expr>(Expr{std::move(n)}); }
ExprPtr make(Expr::Coll n) { return std::make_shared<Expr>(Expr{std::move(n)}); }
ExprPtr make(Expr::Compare n) { return std::make_shared<Expr>(Expr{std::move(n)}); }
ExprPtr make(Expr::Logic n) { return std::make_shared<Expr>(Expr{std::move(n)}); }
ExprPtr make(Expr::Not n) { return std::make_shared<Expr>(Expr{std::move(n)}); }

class Parser {
public:
    Parser(std::string_view text, int base_line, int base_column)
        : lexer_(text, base_line, base_column) {
        current_ = lexer_.next();
    }

    ConstraintExpr parse() {
        ConstraintExpr out;
        Token ctx = expect(Tok::Ident, "context class name");
        if (is_keyword(ctx.text)) fail(ctx, "context class name expected");
        out.context_class = ctx.text;
        expect(Tok::Dot, "'.' after the context class");

        if (current_.kind == Tok::LParen) {
            // parenthesized body with no implicit receiver
            out.body = continue_expression(parse_parenthesized());
        } else {
            ExprPtr head = parse_dot_member(make(Expr::ContextRef{}));
            out.body = continue_expression(parse_members(std::move(head)));
        }
        if (current_.kind != Tok::End) fail(current_, "trailing input after the expression");
        return out;
    }

private:
    static bool is_keyword(const std::string& s) {
        return s == "and" || s == "or" || s == "not" || s == "implies" || s == "true" ||
               s == "false" || s == "self";
    }

    Token expect(Tok kind, const std::string& what) {
        if (current_.kind != kind) fail(current_, what + " expected");
        Token tok = current_;
        current_ = lexer_.next();
        return tok;
    }

    bool accept(Tok kind) {
        if (current_.kind != kind) return false;
        current_ = lexer_.next();
        return true;
    }

    bool accept_word(const char* word) {
        if (current_.kind == Tok::Ident && current_.text == word) {
            current_ = lexer_.next();
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const Token& at, const std::string& message) {
        throw SyntaxError(message, at.line, at.column);
    }

    // expression with an already-parsed leftmost operand
    ExprPtr continue_expression(ExprPtr head) {
        pending_ = std::move(head);
        return parse_implies();
    }

    ExprPtr parse_expression() { return parse_implies(); }

    ExprPtr parse_implies() {
        ExprPtr lhs = parse_or();
        if (accept_word("implies"))
            return make(Expr::Logic{LogicOp::Implies, std::move(lhs), parse_implies()});
        return lhs;
    }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (accept_word("or"))
            lhs = make(Expr::Logic{LogicOp::Or, std::move(lhs), parse_and()});
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_compare();
        while (accept_word("and"))
            lhs = make(Expr::Logic{LogicOp::And, std::move(lhs), parse_compare()});
        return lhs;
    }

    ExprPtr parse_compare() {
        ExprPtr lhs = parse_unary();
        std::optional<CmpOp> op;
        switch (current_.kind) {
            case Tok::Eq: op = CmpOp::Eq; break;
            case Tok::Ne: op = CmpOp::Ne; break;
            case Tok::Lt: op = CmpOp::Lt; break;
            case Tok::Le: op = CmpOp::Le; break;
            case Tok::Gt: op = CmpOp::Gt; break;
            case Tok::Ge: op = CmpOp::Ge; break;
            default: return lhs;
        }
        current_ = lexer_.next();
        return make(Expr::Compare{*op, std::move(lhs), parse_unary()});
    }

    ExprPtr parse_unary() {
        if (!pending_ && accept_word("not")) return make(Expr::Not{parse_unary()});
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr e;
        if (pending_) {
            e = std::move(pending_);
            pending_.reset();
        } else {
            e = parse_primary();
        }
        return parse_members(std::move(e));
    }

    ExprPtr parse_members(ExprPtr receiver) {
        for (;;) {
            if (accept(Tok::Dot)) {
                receiver = parse_dot_member(std::move(receiver));
            } else if (accept(Tok::Arrow)) {
                receiver = parse_collection_member(std::move(receiver));
            } else {
                return receiver;
            }
        }
    }

    ExprPtr parse_dot_member(ExprPtr receiver) {
        Token name = expect(Tok::Ident, "member name");
        if (!accept(Tok::LParen)) return make(Expr::AttrAccess{std::move(receiver), name.text});

        if (name.text == "attachingConnections") {
            Token kind = expect(Tok::Ident, "association kind");
            expect(Tok::RParen, "')'");
            return make(Expr::Nav{std::move(receiver), NavOp::AttachingConnections, kind.text});
        }
        if (name.text == "connectionPoints") {
            std::string role;
            if (current_.kind == Tok::String)
                role = expect(Tok::String, "role name").text;
            else
                role = expect(Tok::Ident, "role name").text;
            expect(Tok::RParen, "')'");
            return make(Expr::Nav{std::move(receiver), NavOp::ConnectionPoints, role});
        }
        if (name.text == "target") {
            expect(Tok::RParen, "')'");
            return make(Expr::Nav{std::move(receiver), NavOp::Target, {}});
        }
        if (name.text == "parent") {
            expect(Tok::RParen, "')'");
            return make(Expr::Nav{std::move(receiver), NavOp::Parent, {}});
        }
        fail(name, "unknown navigation '" + name.text + "'");
    }

    ExprPtr parse_collection_member(ExprPtr receiver) {
        Token name = expect(Tok::Ident, "collection operation");
        expect(Tok::LParen, "'('");
        if (name.text == "forAll" || name.text == "exists") {
            Token binder = expect(Tok::Ident, "binder variable");
            if (is_keyword(binder.text) || binder.text == "self")
                fail(binder, "binder may not be named '" + binder.text + "'");
            expect(Tok::Pipe, "'|' after the binder");
            scopes_.push_back(binder.text);
            ExprPtr body = parse_expression();
            scopes_.pop_back();
            expect(Tok::RParen, "')'");
            CollOp op = name.text == "forAll" ? CollOp::ForAll : CollOp::Exists;
            return make(Expr::Coll{std::move(receiver), op, binder.text, std::move(body)});
        }
        if (name.text == "theOnly") {
            expect(Tok::RParen, "')'");
            return make(Expr::Coll{std::move(receiver), CollOp::TheOnly, {}, nullptr});
        }
        if (name.text == "size") {
            expect(Tok::RParen, "')'");
            return make(Expr::Coll{std::move(receiver), CollOp::Size, {}, nullptr});
        }
        fail(name, "unknown collection operation '" + name.text + "'");
    }

    ExprPtr parse_parenthesized() {
        expect(Tok::LParen, "'('");
        ExprPtr e = parse_expression();
        expect(Tok::RParen, "')'");
        return e;
    }

    ExprPtr parse_primary() {
        switch (current_.kind) {
            case Tok::LParen: return parse_parenthesized();
            case Tok::String: {
                Token tok = expect(Tok::String, "string");
                return make(Expr::Literal{Value{tok.text}});
            }
            case Tok::Integer: {
                Token tok = expect(Tok::Integer, "integer");
                return make(Expr::Literal{Value{tok.int_value}});
            }
            case Tok::Real: {
                Token tok = expect(Tok::Real, "real");
                return make(Expr::Literal{Value{tok.real_value}});
            }
            case Tok::Ident: {
                if (accept_word("true")) return make(Expr::Literal{Value{true}});
                if (accept_word("false")) return make(Expr::Literal{Value{false}});
                if (accept_word("self")) return make(Expr::ContextRef{});
                Token tok = current_;
                if (is_keyword(tok.text)) fail(tok, "expression expected");
                current_ = lexer_.next();
                for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it)
                    if (*it == tok.text) return make(Expr::VarRef{tok.text});
                fail(tok, "unbound name '" + tok.text + "'");
            }
            default: fail(current_, "expression expected");
        }
    }

    Lexer lexer_;
    Token current_;
    ExprPtr pending_;
    std::vector<std::string> scopes_;
};

// ---- static kind checking against a metamodel ------------------------------

struct EvalType {
    enum class Kind { Bool, Int, Real, Str, Enum, Entity, Link, End, Coll, Any };
    Kind kind = Kind::Any;
    std::string name;  // Entity: class (may be empty); Link/End: association
    std::shared_ptr<EvalType> element;  // Coll
};

EvalType any_type() { return {}; }

class KindChecker {
public:
    KindChecker(const Metamodel& mm, std::string context_class)
        : mm_(mm), context_class_(std::move(context_class)) {}

    void check(const ConstraintExpr& expr) {
        if (!mm_.find_class(expr.context_class))
            fail(Errc::DanglingReference,
                 "unknown context class '" + expr.context_class + "'");
        EvalType t = visit(*expr.body);
        if (t.kind != EvalType::Kind::Bool && t.kind != EvalType::Kind::Any)
            fail(Errc::TypeMismatch, "constraint body must be boolean");
    }

private:
    using K = EvalType::Kind;

    [[noreturn]] void fail(Errc code, const std::string& message) {
        throw SyntaxError(message, 1, 1, code);
    }

    EvalType visit(const Expr& e) {
        return std::visit([&](const auto& node) { return visit_node(node); }, e.node);
    }

    EvalType visit_node(const Expr::ContextRef&) {
        return {K::Entity, context_class_, nullptr};
    }

    EvalType visit_node(const Expr::VarRef& node) {
        auto it = bindings_.find(node.name);
        return it == bindings_.end() ? any_type() : it->second;
    }

    EvalType visit_node(const Expr::Literal& node) {
        switch (kind_of(node.value)) {
            case ValueKind::String: return {K::Str, {}, nullptr};
            case ValueKind::Integer: return {K::Int, {}, nullptr};
            case ValueKind::Real: return {K::Real, {}, nullptr};
            case ValueKind::Boolean: return {K::Bool, {}, nullptr};
            case ValueKind::Enum: return {K::Enum, {}, nullptr};
        }
        return any_type();
    }

    EvalType visit_node(const Expr::AttrAccess& node) {
        EvalType recv = visit(*node.receiver);
        if (recv.kind != K::Entity && recv.kind != K::Any)
            fail(Errc::TypeMismatch, "'" + node.attribute + "' needs an entity receiver");
        if (recv.kind == K::Entity && !recv.name.empty()) {
            FlattenedClass flat = effective_features(mm_, recv.name);
            const AttributeDef* attr = flat.find_attribute(node.attribute);
            if (!attr)
                fail(Errc::DanglingReference, "class '" + recv.name + "' has no attribute '" +
                                                  node.attribute + "'");
            switch (attr->type.kind) {
                case ValueKind::String: return {K::Str, {}, nullptr};
                case ValueKind::Integer: return {K::Int, {}, nullptr};
                case ValueKind::Real: return {K::Real, {}, nullptr};
                case ValueKind::Boolean: return {K::Bool, {}, nullptr};
                case ValueKind::Enum: return {K::Enum, {}, nullptr};
            }
        }
        return any_type();
    }

    EvalType visit_node(const Expr::Nav& node) {
        EvalType recv = visit(*node.receiver);
        switch (node.op) {
            case NavOp::AttachingConnections: {
                if (recv.kind != K::Entity && recv.kind != K::Any)
                    fail(Errc::TypeMismatch, "attachingConnections needs an entity receiver");
                if (!mm_.find_association(node.argument)) {
                    if (mm_.find_class(node.argument))
                        fail(Errc::TypeMismatch, "'" + node.argument +
                                                     "' is a class; attachingConnections takes an "
                                                     "association kind");
                    fail(Errc::DanglingReference,
                         "unknown association kind '" + node.argument + "'");
                }
                return {K::Coll, {},
                        std::make_shared<EvalType>(EvalType{K::Link, node.argument, nullptr})};
            }
            case NavOp::ConnectionPoints: {
                if (recv.kind != K::Link && recv.kind != K::Any)
                    fail(Errc::TypeMismatch, "connectionPoints needs a link receiver");
                if (recv.kind == K::Link && !recv.name.empty()) {
                    const AssociationDef* assoc = mm_.find_association(recv.name);
                    if (assoc && !assoc->find_role(node.argument))
                        fail(Errc::DanglingReference, "association '" + recv.name +
                                                          "' has no role '" + node.argument + "'");
                }
                return {K::Coll, {},
                        std::make_shared<EvalType>(EvalType{K::End, recv.name, nullptr})};
            }
            case NavOp::Target:
                if (recv.kind != K::End && recv.kind != K::Any)
                    fail(Errc::TypeMismatch, "target needs a connection-point receiver");
                return {K::Entity, {}, nullptr};
            case NavOp::Parent:
                if (recv.kind != K::Entity && recv.kind != K::Any)
                    fail(Errc::TypeMismatch, "parent needs an entity receiver");
                return {K::Entity, {}, nullptr};
        }
        return any_type();
    }

    EvalType visit_node(const Expr::Coll& node) {
        EvalType recv = visit(*node.receiver);
        if (recv.kind != K::Coll && recv.kind != K::Any)
            fail(Errc::TypeMismatch, "collection operation on a non-collection");
        EvalType element = recv.element ? *recv.element : any_type();
        switch (node.op) {
            case CollOp::ForAll:
            case CollOp::Exists: {
                auto saved = bindings_;
                bindings_[node.binder] = element;
                EvalType body = visit(*node.body);
                bindings_ = std::move(saved);
                if (body.kind != K::Bool && body.kind != K::Any)
                    fail(Errc::TypeMismatch, "quantifier body must be boolean");
                return {K::Bool, {}, nullptr};
            }
            case CollOp::TheOnly: return element;
            case CollOp::Size: return {K::Int, {}, nullptr};
        }
        return any_type();
    }

    static bool numeric(K k) { return k == K::Int || k == K::Real || k == K::Any; }

    EvalType visit_node(const Expr::Compare& node) {
        EvalType lhs = visit(*node.lhs);
        EvalType rhs = visit(*node.rhs);
        if (node.op == CmpOp::Eq || node.op == CmpOp::Ne) {
            bool ok = lhs.kind == K::Any || rhs.kind == K::Any || lhs.kind == rhs.kind ||
                      (numeric(lhs.kind) && numeric(rhs.kind)) ||
                      (lhs.kind == K::Enum && rhs.kind == K::Str) ||
                      (lhs.kind == K::Str && rhs.kind == K::Enum);
            if (!ok) fail(Errc::TypeMismatch, "operands of '=' are not comparable");
        } else {
            if (!numeric(lhs.kind) || !numeric(rhs.kind))
                fail(Errc::TypeMismatch, "ordering comparison needs numeric operands");
        }
        return {K::Bool, {}, nullptr};
    }

    EvalType visit_node(const Expr::Logic& node) {
        require_bool(visit(*node.lhs));
        require_bool(visit(*node.rhs));
        return {K::Bool, {}, nullptr};
    }

    EvalType visit_node(const Expr::Not& node) {
        require_bool(visit(*node.operand));
        return {K::Bool, {}, nullptr};
    }

    void require_bool(const EvalType& t) {
        if (t.kind != K::Bool && t.kind != K::Any)
            fail(Errc::TypeMismatch, "boolean operand expected");
    }

    const Metamodel& mm_;
    std::string context_class_;
    std::map<std::string, EvalType> bindings_;
};

// ---- canonical printing ----------------------------------------------------

enum Precedence {
    PrecImplies = 1,
    PrecOr = 2,
    PrecAnd = 3,
    PrecCompare = 4,
    PrecNot = 5,
    PrecPostfix = 6,
};

int precedence_of(const Expr& e) {
    return std::visit(
        [](const auto& node) -> int {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::Logic>) {
                switch (node.op) {
                    case LogicOp::Implies: return PrecImplies;
                    case LogicOp::Or: return PrecOr;
                    case LogicOp::And: return PrecAnd;
                }
            }
            if constexpr (std::is_same_v<T, Expr::Compare>) return PrecCompare;
            if constexpr (std::is_same_v<T, Expr::Not>) return PrecNot;
            return PrecPostfix;
        },
        e.node);
}

void print_expr(std::string& out, const Expr& e, int min_prec);

void print_child(std::string& out, const Expr& e, int min_prec) {
    if (precedence_of(e) < min_prec) {
        out += "(";
        print_expr(out, e, PrecImplies);
        out += ")";
    } else {
        print_expr(out, e, min_prec);
    }
}

const char* cmp_text(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return " = ";
        case CmpOp::Ne: return " <> ";
        case CmpOp::Lt: return " < ";
        case CmpOp::Le: return " <= ";
        case CmpOp::Gt: return " > ";
        case CmpOp::Ge: return " >= ";
    }
    return " ? ";
}

void print_expr(std::string& out, const Expr& e, int) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::ContextRef>) {
                out += "self";
            } else if constexpr (std::is_same_v<T, Expr::VarRef>) {
                out += node.name;
            } else if constexpr (std::is_same_v<T, Expr::Literal>) {
                out += literal_text(node.value);
            } else if constexpr (std::is_same_v<T, Expr::AttrAccess>) {
                print_child(out, *node.receiver, PrecPostfix);
                out += "." + node.attribute;
            } else if constexpr (std::is_same_v<T, Expr::Nav>) {
                print_child(out, *node.receiver, PrecPostfix);
                switch (node.op) {
                    case NavOp::AttachingConnections:
                        out += ".attachingConnections(" + node.argument + ")";
                        break;
                    case NavOp::ConnectionPoints:
                        out += ".connectionPoints(" + quote_string(node.argument) + ")";
                        break;
                    case NavOp::Target: out += ".target()"; break;
                    case NavOp::Parent: out += ".parent()"; break;
                }
            } else if constexpr (std::is_same_v<T, Expr::Coll>) {
                print_child(out, *node.receiver, PrecPostfix);
                switch (node.op) {
                    case CollOp::ForAll:
                    case CollOp::Exists:
                        out += node.op == CollOp::ForAll ? "->forAll(" : "->exists(";
                        out += node.binder + " | ";
                        print_expr(out, *node.body, PrecImplies);
                        out += ")";
                        break;
                    case CollOp::TheOnly: out += "->theOnly()"; break;
                    case CollOp::Size: out += "->size()"; break;
                }
            } else if constexpr (std::is_same_v<T, Expr::Compare>) {
                print_child(out, *node.lhs, PrecNot);
                out += cmp_text(node.op);
                print_child(out, *node.rhs, PrecNot);
            } else if constexpr (std::is_same_v<T, Expr::Logic>) {
                switch (node.op) {
                    case LogicOp::And:
                        print_child(out, *node.lhs, PrecAnd);
                        out += " and ";
                        print_child(out, *node.rhs, PrecCompare);
                        break;
                    case LogicOp::Or:
                        print_child(out, *node.lhs, PrecOr);
                        out += " or ";
                        print_child(out, *node.rhs, PrecAnd);
                        break;
                    case LogicOp::Implies:
                        print_child(out, *node.lhs, PrecOr);
                        out += " implies ";
                        print_child(out, *node.rhs, PrecImplies);
                        break;
                }
            } else if constexpr (std::is_same_v<T, Expr::Not>) {
                out += "not ";
                print_child(out, *node.operand, PrecNot);
            }
        },
        e.node);
}

// True when the leftmost receiver spine of the body is the context, so the
// canonical text can use the leading-chain form.
const Expr* leftmost_receiver(const Expr& e) {
    return std::visit(
        [&](const auto& node) -> const Expr* {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, Expr::AttrAccess>)
                return leftmost_receiver(*node.receiver);
            else if constexpr (std::is_same_v<T, Expr::Nav>)
                return leftmost_receiver(*node.receiver);
            else if constexpr (std::is_same_v<T, Expr::Coll>)
                return leftmost_receiver(*node.receiver);
            else if constexpr (std::is_same_v<T, Expr::Compare>)
                return leftmost_receiver(*node.lhs);
            else if constexpr (std::is_same_v<T, Expr::Logic>)
                return leftmost_receiver(*node.lhs);
            else
                return &e;
        },
        e.node);
}

}  // namespace

ConstraintExpr parse_constraint_at(std::string_view text, const Metamodel* mm, int base_line,
                                   int base_column) {
    Parser parser(text, base_line, base_column);
    ConstraintExpr expr = parser.parse();
    if (mm) KindChecker(*mm, expr.context_class).check(expr);
    return expr;
}

ConstraintExpr parse_constraint(std::string_view text, const Metamodel* mm) {
    return parse_constraint_at(text, mm, 1, 1);
}

std::string print_constraint(const ConstraintExpr& expr) {
    std::string out = expr.context_class + ".";
    const Expr* leftmost = expr.body ? leftmost_receiver(*expr.body) : nullptr;
    bool chain_form = leftmost && std::holds_alternative<Expr::ContextRef>(leftmost->node);

    std::string body;
    if (expr.body) print_expr(body, *expr.body, PrecImplies);

    if (chain_form && body.rfind("self.", 0) == 0) {
        out += body.substr(5);
    } else if (chain_form && body.rfind("self->", 0) == 0) {
        // leading collection op still needs the parenthesized form
        out += "(" + body + ")";
    } else {
        out += "(" + body + ")";
    }
    return out;
}

bool same_expr(const ConstraintExpr& a, const ConstraintExpr& b) {
    return a.context_class == b.context_class &&
           print_constraint(a) == print_constraint(b);
}

}  // namespace metakernel
