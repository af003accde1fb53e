#pragma once

#include "metakernel/diagnostics.hpp"

#include <cctype>
#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

namespace metakernel::detail {

// Token cursor shared by the .mm/.mdl/.eqv readers. Skips whitespace and
// line comments; every failure is a located SyntaxError.
class Cursor {
public:
    explicit Cursor(std::string_view text) : text_(text) {}

    int line() const { return line_; }
    int column() const { return column_; }

    bool at_end() {
        skip();
        return pos_ >= text_.size();
    }

    char peek_char() {
        skip();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    bool accept_char(char c) {
        skip();
        if (pos_ < text_.size() && text_[pos_] == c) {
            advance(1);
            return true;
        }
        return false;
    }

    void expect_char(char c, const std::string& what) {
        if (!accept_char(c)) fail(std::string("expected ") + what);
    }

    bool peek_ident(std::string_view word) {
        skip();
        std::size_t end = ident_end();
        return end > pos_ && text_.substr(pos_, end - pos_) == word;
    }

    bool accept_word(std::string_view word) {
        skip();
        std::size_t end = ident_end();
        if (end > pos_ && text_.substr(pos_, end - pos_) == word) {
            advance(end - pos_);
            return true;
        }
        return false;
    }

    void expect_word(std::string_view word) {
        if (!accept_word(word)) fail("expected '" + std::string(word) + "'");
    }

    std::string expect_ident(const std::string& what) {
        skip();
        std::size_t end = ident_end();
        if (end == pos_) fail("expected " + what);
        std::string out(text_.substr(pos_, end - pos_));
        advance(end - pos_);
        return out;
    }

    std::int64_t expect_integer(const std::string& what) {
        skip();
        std::size_t start = pos_;
        if (pos_ < text_.size() && text_[pos_] == '-') advance(1);
        std::size_t digits = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            advance(1);
        if (pos_ == digits) fail("expected " + what);
        std::int64_t value = 0;
        auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc()) fail(what + " out of range");
        return value;
    }

    // number in integer or real form; `real` reports which
    double expect_number(bool& real, std::int64_t& int_value, const std::string& what) {
        skip();
        std::size_t start = pos_;
        if (pos_ < text_.size() && text_[pos_] == '-') advance(1);
        std::size_t digits = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            advance(1);
        if (pos_ == digits) fail("expected " + what);
        real = false;
        if (pos_ + 1 < text_.size() && text_[pos_] == '.' &&
            std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
            real = true;
            advance(1);
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                advance(1);
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            advance(1);
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) advance(1);
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                real = true;
                while (pos_ < text_.size() &&
                       std::isdigit(static_cast<unsigned char>(text_[pos_])))
                    advance(1);
            } else {
                pos_ = mark;
            }
        }
        std::string_view slice = text_.substr(start, pos_ - start);
        if (real) {
            double value = 0.0;
            auto [p, ec] = std::from_chars(slice.data(), slice.data() + slice.size(), value);
            if (ec != std::errc()) fail("bad " + what);
            return value;
        }
        auto [p, ec] = std::from_chars(slice.data(), slice.data() + slice.size(), int_value);
        if (ec != std::errc()) fail(what + " out of range");
        return static_cast<double>(int_value);
    }

    std::string expect_string(const std::string& what) {
        skip();
        if (pos_ >= text_.size() || text_[pos_] != '"') fail("expected " + what);
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
                    default: fail("bad escape sequence");
                }
                advance(1);
            } else {
                out += c;
                advance(1);
            }
        }
        if (pos_ >= text_.size()) fail("unterminated string");
        advance(1);
        return out;
    }

    // Raw text up to the matching unnested '}', honoring string literals.
    // The cursor stops at the '}' without consuming it.
    std::string take_until_closing_brace() {
        std::size_t start = pos_;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '}') return std::string(text_.substr(start, pos_ - start));
            if (c == '"') {
                advance(1);
                while (pos_ < text_.size() && text_[pos_] != '"') {
                    if (text_[pos_] == '\\') advance(1);
                    advance(1);
                }
                if (pos_ >= text_.size()) fail("unterminated string");
                advance(1);
            } else {
                advance(1);
            }
        }
        fail("missing '}'");
    }

    [[noreturn]] void fail(const std::string& message, Errc code = Errc::SyntaxError) {
        throw SyntaxError(message, line_, column_, code);
    }

private:
    std::size_t ident_end() const {
        std::size_t end = pos_;
        auto head = [](char c) {
            return c == '_' || std::isalpha(static_cast<unsigned char>(c));
        };
        auto tail = [&](char c) {
            return head(c) || std::isdigit(static_cast<unsigned char>(c));
        };
        if (end < text_.size() && head(text_[end])) {
            ++end;
            while (end < text_.size() && tail(text_[end])) ++end;
        }
        return end;
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

    void skip() {
        for (;;) {
            while (pos_ < text_.size() &&
                   std::isspace(static_cast<unsigned char>(text_[pos_])))
                advance(1);
            if (pos_ + 1 < text_.size() && text_[pos_] == '/' && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance(1);
                continue;
            }
            return;
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
};

}  // namespace metakernel::detail
