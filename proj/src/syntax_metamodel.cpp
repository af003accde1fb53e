#include "metakernel/constraints.hpp"
#include "metakernel/syntax.hpp"

#include "text_cursor.hpp"

#include <vector>

namespace metakernel {

namespace {

using detail::Cursor;

Multiplicity parse_multiplicity(Cursor& in) {
    Multiplicity m;
    if (!in.accept_char('[')) return m;  // omitted: [0..*]
    m.min = static_cast<std::uint32_t>(in.expect_integer("minimum multiplicity"));
    in.expect_char('.', "'..'");
    in.expect_char('.', "'..'");
    if (in.accept_char('*'))
        m.max.reset();
    else
        m.max = static_cast<std::uint32_t>(in.expect_integer("maximum multiplicity"));
    in.expect_char(']', "']'");
    return m;
}

AttributeType parse_type(Cursor& in) {
    AttributeType type;
    if (in.accept_word("string")) {
        type.kind = ValueKind::String;
    } else if (in.accept_word("integer")) {
        type.kind = ValueKind::Integer;
    } else if (in.accept_word("real")) {
        type.kind = ValueKind::Real;
    } else if (in.accept_word("boolean")) {
        type.kind = ValueKind::Boolean;
    } else if (in.accept_word("enum")) {
        type.kind = ValueKind::Enum;
        in.expect_char('(', "'('");
        do {
            type.enum_literals.push_back(in.expect_ident("enum literal"));
        } while (in.accept_char(','));
        in.expect_char(')', "')'");
    } else {
        in.fail("expected a value type");
    }
    return type;
}

Value parse_typed_literal(Cursor& in, const AttributeType& type) {
    switch (type.kind) {
        case ValueKind::String: return Value{in.expect_string("string literal")};
        case ValueKind::Boolean: {
            if (in.accept_word("true")) return Value{true};
            if (in.accept_word("false")) return Value{false};
            in.fail("expected true or false");
        }
        case ValueKind::Integer: {
            return Value{in.expect_integer("integer literal")};
        }
        case ValueKind::Real: {
            bool real = false;
            std::int64_t int_value = 0;
            double value = in.expect_number(real, int_value, "real literal");
            return Value{value};
        }
        case ValueKind::Enum: {
            std::string name = in.expect_ident("enum literal");
            return Value{EnumLiteral{name}};
        }
    }
    in.fail("bad literal");
}

MetaClass parse_class(Cursor& in, bool is_abstract) {
    MetaClass cls;
    cls.is_abstract = is_abstract;
    cls.name = in.expect_ident("class name");
    if (in.accept_word("extends")) {
        do {
            cls.superclasses.push_back(in.expect_ident("superclass name"));
        } while (in.accept_char(','));
    }
    in.expect_char('{', "'{'");
    for (;;) {
        if (in.accept_char('}')) break;
        if (in.accept_word("attr")) {
            AttributeDef attr;
            attr.name = in.expect_ident("attribute name");
            in.expect_char(':', "':'");
            attr.type = parse_type(in);
            in.expect_char('=', "'='");
            attr.default_value = parse_typed_literal(in, attr.type);
            cls.attributes.push_back(std::move(attr));
        } else if (in.accept_word("contains")) {
            ContainmentRule rule;
            rule.child_class = in.expect_ident("contained class name");
            rule.multiplicity = parse_multiplicity(in);
            cls.containments.push_back(std::move(rule));
        } else if (in.accept_word("glyph")) {
            cls.glyph = in.expect_string("glyph string");
        } else {
            in.fail("expected attr, contains, glyph, or '}'");
        }
    }
    return cls;
}

AssociationDef parse_association(Cursor& in) {
    AssociationDef assoc;
    assoc.name = in.expect_ident("association name");
    in.expect_char('{', "'{'");
    while (!in.accept_char('}')) {
        in.expect_word("role");
        RoleDef role;
        role.name = in.expect_ident("role name");
        in.expect_char(':', "':'");
        role.endpoint_class = in.expect_ident("endpoint class name");
        role.multiplicity = parse_multiplicity(in);
        assoc.roles.push_back(std::move(role));
    }
    return assoc;
}

struct RawConstraint {
    std::string name;
    std::string body;
    int line;
    int column;
};

Metamodel parse_structure(std::string_view text, std::vector<RawConstraint>& raw_constraints) {
    Cursor in(text);
    Metamodel mm;

    in.expect_word("metamodel");
    mm.name = in.expect_ident("metamodel name");
    in.expect_word("version");
    mm.version = static_cast<int>(in.expect_integer("version"));

    while (!in.at_end()) {
        if (in.accept_word("abstract")) {
            in.expect_word("class");
            mm.classes.push_back(parse_class(in, true));
        } else if (in.accept_word("class")) {
            mm.classes.push_back(parse_class(in, false));
        } else if (in.accept_word("association")) {
            mm.associations.push_back(parse_association(in));
        } else if (in.accept_word("constraint")) {
            RawConstraint raw;
            raw.name = in.expect_ident("constraint name");
            in.expect_char('{', "'{'");
            raw.line = in.line();
            raw.column = in.column();
            raw.body = in.take_until_closing_brace();
            in.expect_char('}', "'}'");
            raw_constraints.push_back(std::move(raw));
        } else {
            in.fail("expected class, abstract class, association, or constraint");
        }
    }
    return mm;
}

}  // namespace

Metamodel parse_metamodel_lenient(std::string_view text, Diagnostics& faults) {
    std::vector<RawConstraint> raw_constraints;
    Metamodel mm = parse_structure(text, raw_constraints);

    faults = validate_metamodel(mm);
    bool structure_ok = faults.empty();

    for (const auto& raw : raw_constraints) {
        ConstraintDef con;
        con.name = raw.name;
        con.text = raw.body;
        if (structure_ok) {
            try {
                auto ast = std::make_shared<ConstraintExpr>(
                    parse_constraint_at(raw.body, &mm, raw.line, raw.column));
                con.text = print_constraint(*ast);
                con.ast = std::move(ast);
            } catch (const SyntaxError& error) {
                faults.push_back({Severity::Error, DiagCode::BadConstraint, raw.name,
                                  std::string("constraint '") + raw.name + "': " + error.what(),
                                  {},
                                  {}});
            }
        }
        mm.constraints.push_back(std::move(con));
    }
    if (structure_ok) {
        // duplicate constraint names are checked late, once names are known
        Diagnostics again = validate_metamodel(mm);
        faults.insert(faults.end(), again.begin(), again.end());
    }
    return mm;
}

Metamodel parse_metamodel(std::string_view text) {
    Diagnostics faults;
    Metamodel mm = parse_metamodel_lenient(text, faults);
    if (!faults.empty())
        throw KernelError(Errc::ValidationError,
                          faults.front().message + (faults.size() > 1
                                                        ? " (+" + std::to_string(faults.size() - 1) +
                                                              " more)"
                                                        : ""));
    return mm;
}

std::string serialize_metamodel(const Metamodel& mm) {
    std::string out = "metamodel " + mm.name + " version " + std::to_string(mm.version) + "\n";

    for (const auto& cls : mm.classes) {
        out += "\n";
        out += cls.is_abstract ? "abstract class " : "class ";
        out += cls.name;
        for (std::size_t i = 0; i < cls.superclasses.size(); ++i)
            out += (i == 0 ? " extends " : ", ") + cls.superclasses[i];
        out += " {\n";
        for (const auto& attr : cls.attributes)
            out += "  attr " + attr.name + ": " + type_text(attr.type) + " = " +
                   literal_text(attr.default_value) + "\n";
        for (const auto& rule : cls.containments)
            out += "  contains " + rule.child_class + " " + multiplicity_text(rule.multiplicity) +
                   "\n";
        if (cls.glyph) out += "  glyph " + quote_string(*cls.glyph) + "\n";
        out += "}\n";
    }

    for (const auto& assoc : mm.associations) {
        out += "\nassociation " + assoc.name + " {\n";
        for (const auto& role : assoc.roles)
            out += "  role " + role.name + ": " + role.endpoint_class + " " +
                   multiplicity_text(role.multiplicity) + "\n";
        out += "}\n";
    }

    for (const auto& con : mm.constraints) {
        std::string text = con.ast ? print_constraint(*con.ast) : con.text;
        out += "\nconstraint " + con.name + " {\n  " + text + "\n}\n";
    }

    return out;
}

}  // namespace metakernel
