#include "pipecleaner/interp/protocol.hpp"

#include <charconv>
#include <map>
#include <sstream>

#include <openssl/evp.h>

namespace pipecleaner::interp {

namespace {

std::string base64_encode(std::string_view bytes)
{
    std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
    int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                            reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::string base64_decode(std::string_view text)
{
    if (text.size() % 4 != 0)
        throw ProtocolError("STDOUT_B64 length is not a multiple of 4");
    std::string out(3 * (text.size() / 4) + 1, '\0');
    int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                            reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
    if (n < 0)
        throw ProtocolError("STDOUT_B64 is not valid base64");
    // EVP_DecodeBlock keeps the zero bytes that stand for padding.
    std::size_t pad = 0;
    if (!text.empty() && text.back() == '=')
        pad = text.size() > 1 && text[text.size() - 2] == '=' ? 2 : 1;
    out.resize(static_cast<std::size_t>(n) - pad);
    return out;
}

std::string hex(std::string_view bytes)
{
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    for (unsigned char c : bytes) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 15]);
    }
    return out;
}

std::string unhex(std::string_view text)
{
    if (text.size() % 2 != 0)
        throw ProtocolError("odd-length hex string");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9')
            return c - '0';
        if (c >= 'a' && c <= 'f')
            return c - 'a' + 10;
        throw ProtocolError(std::string("bad hex digit '") + c + "'");
    };
    std::string out;
    for (std::size_t i = 0; i < text.size(); i += 2)
        out.push_back(static_cast<char>(nibble(text[i]) * 16 + nibble(text[i + 1])));
    return out;
}

template <typename Int>
Int number(std::string_view text, int base = 10)
{
    Int v{};
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v, base);
    if (ec != std::errc() || end != text.data() + text.size())
        throw ProtocolError("bad number '" + std::string(text) + "'");
    return v;
}

SourcePos parse_pos(std::string_view text)
{
    auto colon = text.rfind(':');
    if (colon == std::string_view::npos)
        throw ProtocolError("bad location '" + std::string(text) + "'");
    return SourcePos{std::string(text.substr(0, colon)), number<std::uint32_t>(text.substr(colon + 1)), 1};
}

void check_line(const std::string& s)
{
    if (s.find('\n') != std::string::npos)
        throw ProtocolError("field contains a newline");
}

} // namespace

std::string encode_result(const RunResult& result)
{
    std::ostringstream out;
    struct Visitor {
        std::ostringstream& out;
        void operator()(const Exit& e) { out << "OUTCOME=EXIT\nCODE=" << e.code << "\n"; }
        void operator()(const policy::FailStop& f)
        {
            for (const auto* s : {&f.policy, &f.rule, &f.bug_class, &f.message})
                check_line(*s);
            out << "OUTCOME=FAILSTOP\nPOLICY=" << f.policy << "\nRULE=" << f.rule << "\nCLASS=" << f.bug_class
                << "\n";
            for (std::size_t i = 0; i < f.locations.size(); ++i)
                out << "LOC" << i + 1 << "=" << to_string(f.locations[i]) << "\n";
            out << "MSG=" << f.message << "\n";
            for (std::size_t i = 0; i < f.detail.size(); ++i) {
                check_line(f.detail[i]);
                out << "DETAIL" << i + 1 << "=" << f.detail[i] << "\n";
            }
        }
        void operator()(const Crash& c)
        {
            out << "OUTCOME=CRASH\nCRASH=" << interp::to_string(c.kind) << "\nLOC1=" << to_string(c.pos) << "\n";
        }
        void operator()(const StepLimit&) { out << "OUTCOME=STEPLIMIT\n"; }
        void operator()(const OutOfMemory&) { out << "OUTCOME=OOM\n"; }
    };
    std::visit(Visitor{out}, result.outcome);
    for (const auto& ev : result.deferred_events) {
        out << "DIRTYREAD=" << to_string(ev.srcpos) << ";0x" << std::hex << ev.addr.value << std::dec << ";"
            << hex(ev.bytes_read) << "\n";
    }
    out << "STDOUT_B64=" << base64_encode(result.stdout_bytes) << "\n";
    return out.str();
}

RunResult decode_result(std::string_view text)
{
    std::string outcome;
    std::map<std::string, std::string, std::less<>> fields;
    std::map<std::size_t, std::string> locs;
    std::map<std::size_t, std::string> details;
    RunResult r;
    bool saw_stdout = false;

    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view line = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
        start = nl == std::string_view::npos ? text.size() : nl + 1;
        if (line.empty())
            continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ProtocolError("line without '=': " + std::string(line));
        std::string_view key = line.substr(0, eq);
        std::string_view value = line.substr(eq + 1);

        if (key == "DIRTYREAD") {
            auto last = value.rfind(';');
            auto mid = last == std::string_view::npos ? last : value.rfind(';', last - 1);
            if (mid == std::string_view::npos || value.substr(mid + 1, 2) != "0x")
                throw ProtocolError("bad DIRTYREAD record");
            r.deferred_events.push_back(DirtyReadEvent{
                parse_pos(value.substr(0, mid)),
                Address{number<std::uint64_t>(value.substr(mid + 3, last - mid - 3), 16)},
                unhex(value.substr(last + 1))});
        } else if (key == "STDOUT_B64") {
            r.stdout_bytes = base64_decode(value);
            saw_stdout = true;
        } else if (key.starts_with("LOC") && key.size() > 3) {
            locs[number<std::size_t>(key.substr(3))] = std::string(value);
        } else if (key.starts_with("DETAIL") && key.size() > 6) {
            details[number<std::size_t>(key.substr(6))] = std::string(value);
        } else {
            fields[std::string(key)] = std::string(value);
        }
    }

    auto field = [&](std::string_view key) -> const std::string& {
        auto it = fields.find(key);
        if (it == fields.end())
            throw ProtocolError("missing " + std::string(key));
        return it->second;
    };
    auto ordered = [](const std::map<std::size_t, std::string>& m) {
        std::vector<std::string> out;
        std::size_t expect = 1;
        for (const auto& [i, v] : m) {
            if (i != expect++)
                throw ProtocolError("numbered fields are not contiguous from 1");
            out.push_back(v);
        }
        return out;
    };

    const std::string& kind = field("OUTCOME");
    if (kind == "EXIT") {
        r.outcome = Exit{number<std::int64_t>(field("CODE"))};
    } else if (kind == "FAILSTOP") {
        policy::FailStop f;
        f.policy = field("POLICY");
        f.rule = field("RULE");
        f.bug_class = field("CLASS");
        f.message = field("MSG");
        for (const auto& l : ordered(locs))
            f.locations.push_back(parse_pos(l));
        f.detail = ordered(details);
        r.outcome = std::move(f);
    } else if (kind == "CRASH") {
        Crash c;
        if (!parse_crash_kind(field("CRASH"), c.kind))
            throw ProtocolError("unknown crash kind " + field("CRASH"));
        auto l = ordered(locs);
        if (l.size() != 1)
            throw ProtocolError("crash needs exactly one location");
        c.pos = parse_pos(l[0]);
        r.outcome = c;
    } else if (kind == "STEPLIMIT") {
        r.outcome = StepLimit{};
    } else if (kind == "OOM") {
        r.outcome = OutOfMemory{};
    } else {
        throw ProtocolError("unknown OUTCOME " + kind);
    }
    if (!saw_stdout)
        throw ProtocolError("missing STDOUT_B64");
    return r;
}

} // namespace pipecleaner::interp
