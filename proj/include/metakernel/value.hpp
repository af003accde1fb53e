#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace metakernel {

enum class ValueKind { String, Integer, Real, Boolean, Enum };

// An enumeration value, kept distinct from plain strings so that attribute
// values are self-describing in the textual formats.
struct EnumLiteral {
    std::string name;
    friend auto operator<=>(const EnumLiteral&, const EnumLiteral&) = default;
};

using Value = std::variant<std::string, std::int64_t, double, bool, EnumLiteral>;

struct AttributeType {
    ValueKind kind = ValueKind::String;
    std::vector<std::string> enum_literals;  // Enum only

    friend bool operator==(const AttributeType&, const AttributeType&) = default;
};

bool value_matches(const AttributeType& type, const Value& value);
ValueKind kind_of(const Value& value);

const char* kind_name(ValueKind kind);
std::string type_text(const AttributeType& type);

// Serialized literal form: strings quoted, reals always carrying a '.' or
// exponent, enum values bare. parse of the result reproduces the value.
std::string literal_text(const Value& value);

std::string quote_string(const std::string& s);
std::string format_real(double v);

}  // namespace metakernel
