#include "pipecleaner/minic/lexer.hpp"

#include <cctype>
#include <limits>
#include <unordered_map>

namespace pipecleaner::minic {

std::string_view describe(TokenKind kind)
{
    switch (kind) {
    case TokenKind::KwInt: return "'int'";
    case TokenKind::KwChar: return "'char'";
    case TokenKind::KwIf: return "'if'";
    case TokenKind::KwElse: return "'else'";
    case TokenKind::KwWhile: return "'while'";
    case TokenKind::KwReturn: return "'return'";
    case TokenKind::Ident: return "identifier";
    case TokenKind::IntLit: return "integer literal";
    case TokenKind::CharLit: return "character literal";
    case TokenKind::StringLit: return "string literal";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::Semi: return "';'";
    case TokenKind::Comma: return "','";
    case TokenKind::Assign: return "'='";
    case TokenKind::Eq: return "'=='";
    case TokenKind::Ne: return "'!='";
    case TokenKind::Lt: return "'<'";
    case TokenKind::Le: return "'<='";
    case TokenKind::Gt: return "'>'";
    case TokenKind::Ge: return "'>='";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::Percent: return "'%'";
    case TokenKind::Amp: return "'&'";
    case TokenKind::AmpAmp: return "'&&'";
    case TokenKind::Pipe: return "'|'";
    case TokenKind::PipePipe: return "'||'";
    case TokenKind::Caret: return "'^'";
    case TokenKind::Shl: return "'<<'";
    case TokenKind::Shr: return "'>>'";
    case TokenKind::Bang: return "'!'";
    case TokenKind::Tilde: return "'~'";
    case TokenKind::End: return "end of input";
    }
    return "token";
}

namespace {

class Lexer {
public:
    Lexer(std::string_view src, const std::string& file) : src_(src), file_(file) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        for (;;) {
            skip_trivia();
            if (at_end()) {
                out.push_back(Token{TokenKind::End, {}, 0, here()});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    bool at_end() const { return i_ >= src_.size(); }
    char peek(std::size_t ahead = 0) const
    {
        return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0';
    }
    SourcePos here() const { return SourcePos{file_, line_, col_}; }

    char advance()
    {
        char c = src_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_trivia()
    {
        while (!at_end()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n')
                    advance();
            } else if (c == '/' && peek(1) == '*') {
                SourcePos start = here();
                advance();
                advance();
                for (;;) {
                    if (at_end())
                        throw LexError(start, "unterminated comment");
                    if (peek() == '*' && peek(1) == '/') {
                        advance();
                        advance();
                        break;
                    }
                    advance();
                }
            } else {
                return;
            }
        }
    }

    static int hex_digit(char c)
    {
        if (c >= '0' && c <= '9')
            return c - '0';
        if (c >= 'a' && c <= 'f')
            return c - 'a' + 10;
        if (c >= 'A' && c <= 'F')
            return c - 'A' + 10;
        return -1;
    }

    // Decodes one (possibly escaped) character inside a char or string literal.
    unsigned char literal_char(const SourcePos& start, char quote)
    {
        if (at_end() || peek() == '\n')
            throw LexError(start, quote == '"' ? "unterminated string literal"
                                               : "unterminated character literal");
        char c = advance();
        if (c != '\\')
            return static_cast<unsigned char>(c);
        if (at_end())
            throw LexError(start, "unterminated escape sequence");
        SourcePos esc = here();
        char e = advance();
        switch (e) {
        case 'n': return '\n';
        case 't': return '\t';
        case 'r': return '\r';
        case '0': return '\0';
        case 'a': return '\a';
        case 'b': return '\b';
        case 'f': return '\f';
        case 'v': return '\v';
        case '\\': return '\\';
        case '\'': return '\'';
        case '"': return '"';
        case '?': return '?';
        case 'x': {
            int hi = hex_digit(peek());
            if (hi < 0)
                throw LexError(esc, "malformed \\x escape");
            advance();
            int value = hi;
            int lo = hex_digit(peek());
            if (lo >= 0) {
                advance();
                value = value * 16 + lo;
            }
            return static_cast<unsigned char>(value);
        }
        default:
            throw LexError(esc, std::string("unknown escape '\\") + e + "'");
        }
    }

    Token make(TokenKind kind, const SourcePos& pos, std::size_t width)
    {
        for (std::size_t k = 0; k < width; ++k)
            advance();
        return Token{kind, {}, 0, pos};
    }

    Token next()
    {
        static const std::unordered_map<std::string_view, TokenKind> keywords = {
            {"int", TokenKind::KwInt},     {"char", TokenKind::KwChar},
            {"if", TokenKind::KwIf},       {"else", TokenKind::KwElse},
            {"while", TokenKind::KwWhile}, {"return", TokenKind::KwReturn},
        };

        SourcePos pos = here();
        char c = peek();

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = i_;
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')
                advance();
            std::string_view word = src_.substr(start, i_ - start);
            if (auto it = keywords.find(word); it != keywords.end())
                return Token{it->second, {}, 0, pos};
            return Token{TokenKind::Ident, std::string(word), 0, pos};
        }

        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::uint64_t value = 0;
            bool overflow = false;
            auto accumulate = [&](unsigned base, int digit) {
                if (value > (std::numeric_limits<std::uint64_t>::max() - digit) / base)
                    overflow = true;
                value = value * base + static_cast<unsigned>(digit);
            };
            if (c == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
                advance();
                advance();
                if (hex_digit(peek()) < 0)
                    throw LexError(pos, "malformed hexadecimal literal");
                while (hex_digit(peek()) >= 0)
                    accumulate(16, hex_digit(advance()));
            } else {
                while (std::isdigit(static_cast<unsigned char>(peek())))
                    accumulate(10, advance() - '0');
            }
            if (std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_')
                throw LexError(here(), std::string("illegal character '") + peek() + "' in number");
            if (overflow || value > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
                throw LexError(pos, "integer literal out of range");
            return Token{TokenKind::IntLit, {}, static_cast<std::int64_t>(value), pos};
        }

        if (c == '\'') {
            advance();
            if (peek() == '\'')
                throw LexError(pos, "empty character literal");
            unsigned char value = literal_char(pos, '\'');
            if (peek() != '\'')
                throw LexError(pos, "unterminated character literal");
            advance();
            return Token{TokenKind::CharLit, {}, value, pos};
        }

        if (c == '"') {
            advance();
            std::string text;
            while (at_end() || peek() != '"') {
                if (at_end())
                    throw LexError(pos, "unterminated string literal");
                text.push_back(static_cast<char>(literal_char(pos, '"')));
            }
            advance();
            return Token{TokenKind::StringLit, std::move(text), 0, pos};
        }

        char n = peek(1);
        switch (c) {
        case '(': return make(TokenKind::LParen, pos, 1);
        case ')': return make(TokenKind::RParen, pos, 1);
        case '{': return make(TokenKind::LBrace, pos, 1);
        case '}': return make(TokenKind::RBrace, pos, 1);
        case '[': return make(TokenKind::LBracket, pos, 1);
        case ']': return make(TokenKind::RBracket, pos, 1);
        case ';': return make(TokenKind::Semi, pos, 1);
        case ',': return make(TokenKind::Comma, pos, 1);
        case '+': return make(TokenKind::Plus, pos, 1);
        case '-': return make(TokenKind::Minus, pos, 1);
        case '*': return make(TokenKind::Star, pos, 1);
        case '/': return make(TokenKind::Slash, pos, 1);
        case '%': return make(TokenKind::Percent, pos, 1);
        case '^': return make(TokenKind::Caret, pos, 1);
        case '~': return make(TokenKind::Tilde, pos, 1);
        case '=': return n == '=' ? make(TokenKind::Eq, pos, 2) : make(TokenKind::Assign, pos, 1);
        case '!': return n == '=' ? make(TokenKind::Ne, pos, 2) : make(TokenKind::Bang, pos, 1);
        case '<':
            if (n == '=')
                return make(TokenKind::Le, pos, 2);
            return n == '<' ? make(TokenKind::Shl, pos, 2) : make(TokenKind::Lt, pos, 1);
        case '>':
            if (n == '=')
                return make(TokenKind::Ge, pos, 2);
            return n == '>' ? make(TokenKind::Shr, pos, 2) : make(TokenKind::Gt, pos, 1);
        case '&': return n == '&' ? make(TokenKind::AmpAmp, pos, 2) : make(TokenKind::Amp, pos, 1);
        case '|': return n == '|' ? make(TokenKind::PipePipe, pos, 2) : make(TokenKind::Pipe, pos, 1);
        default:
            break;
        }
        throw LexError(pos, "illegal character '" + std::string(1, c) + "'");
    }

    std::string_view src_;
    const std::string& file_;
    std::size_t i_ = 0;
    std::uint32_t line_ = 1;
    std::uint32_t col_ = 1;
};

} // namespace

std::vector<Token> tokenize(std::string_view source, const std::string& filename)
{
    return Lexer(source, filename).run();
}

} // namespace pipecleaner::minic
