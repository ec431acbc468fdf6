#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "pipecleaner/minic/ast.hpp"
#include "pipecleaner/minic/lexer.hpp"

namespace pipecleaner::minic {

class ParseError : public std::runtime_error {
public:
    ParseError(SourcePos pos, std::vector<std::string> expected, const std::string& found);
    const SourcePos& pos() const { return pos_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    SourcePos pos_;
    std::vector<std::string> expected_;
};

Program parse(const std::vector<Token>& tokens);

} // namespace pipecleaner::minic
