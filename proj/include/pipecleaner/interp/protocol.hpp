#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "pipecleaner/interp/run_result.hpp"

namespace pipecleaner::interp {

// Line-based executor record, one `KEY=value` per line:
//   OUTCOME=EXIT|FAILSTOP|CRASH|STEPLIMIT|OOM
//   CODE=<n>                                   exit only
//   POLICY= RULE= CLASS= LOC<i>= MSG= DETAIL<i>=  failstop only
//   CRASH=<kind> LOC1=<file:line>              crash only
//   DIRTYREAD=<file:line>;<0xaddr>;<hex bytes> zero or more
//   STDOUT_B64=<base64>
// Columns and run statistics are not carried.
std::string encode_result(const RunResult& result);

class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

RunResult decode_result(std::string_view text);

} // namespace pipecleaner::interp
