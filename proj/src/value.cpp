#include "metakernel/value.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace metakernel {

ValueKind kind_of(const Value& value) {
    switch (value.index()) {
        case 0: return ValueKind::String;
        case 1: return ValueKind::Integer;
        case 2: return ValueKind::Real;
        case 3: return ValueKind::Boolean;
        default: return ValueKind::Enum;
    }
}

bool value_matches(const AttributeType& type, const Value& value) {
    if (kind_of(value) != type.kind) return false;
    if (type.kind == ValueKind::Enum) {
        const auto& name = std::get<EnumLiteral>(value).name;
        return std::find(type.enum_literals.begin(), type.enum_literals.end(), name) !=
               type.enum_literals.end();
    }
    return true;
}

const char* kind_name(ValueKind kind) {
    switch (kind) {
        case ValueKind::String: return "string";
        case ValueKind::Integer: return "integer";
        case ValueKind::Real: return "real";
        case ValueKind::Boolean: return "boolean";
        case ValueKind::Enum: return "enum";
    }
    return "?";
}

std::string type_text(const AttributeType& type) {
    if (type.kind != ValueKind::Enum) return kind_name(type.kind);
    std::string out = "enum(";
    for (std::size_t i = 0; i < type.enum_literals.size(); ++i) {
        if (i) out += ", ";
        out += type.enum_literals[i];
    }
    out += ")";
    return out;
}

std::string quote_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default: out += c; break;
        }
    }
    out += "\"";
    return out;
}

// Shortest round-trip decimal form, always distinguishable from an integer
// literal.
std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    std::string out(buf, ptr);
    if (out.find_first_of(".eEni") == std::string::npos) out += ".0";
    return out;
}

std::string literal_text(const Value& value) {
    switch (value.index()) {
        case 0: return quote_string(std::get<std::string>(value));
        case 1: return std::to_string(std::get<std::int64_t>(value));
        case 2: return format_real(std::get<double>(value));
        case 3: return std::get<bool>(value) ? "true" : "false";
        default: return std::get<EnumLiteral>(value).name;
    }
}

}  // namespace metakernel
