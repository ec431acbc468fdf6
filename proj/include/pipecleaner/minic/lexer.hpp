#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pipecleaner/source_pos.hpp"

namespace pipecleaner::minic {

enum class TokenKind : std::uint8_t {
    KwInt, KwChar, KwIf, KwElse, KwWhile, KwReturn,
    Ident, IntLit, CharLit, StringLit,
    LParen, RParen, LBrace, RBrace, LBracket, RBracket,
    Semi, Comma,
    Assign, Eq, Ne, Lt, Le, Gt, Ge,
    Plus, Minus, Star, Slash, Percent,
    Amp, AmpAmp, Pipe, PipePipe, Caret, Shl, Shr,
    Bang, Tilde,
    End,
};

std::string_view describe(TokenKind kind);

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;           // identifier name or decoded string literal
    std::int64_t value = 0;     // integer / character literal value
    SourcePos pos;

    bool operator==(const Token&) const = default;
};

class LexError : public std::runtime_error {
public:
    LexError(SourcePos pos, const std::string& what)
        : std::runtime_error(to_string(pos) + ": " + what), pos_(std::move(pos)) {}
    const SourcePos& pos() const { return pos_; }

private:
    SourcePos pos_;
};

// The returned sequence always ends with a single End token.
std::vector<Token> tokenize(std::string_view source, const std::string& filename);

} // namespace pipecleaner::minic
