#include "qmtbdd/quantum.hpp"

#include <cctype>
#include <charconv>
#include <optional>
#include <sstream>

namespace qmtbdd {

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line)
{
}

namespace {

// Circuits larger than this cannot be indexed by a 64-bit basis index.
constexpr unsigned kMaxQubits = 62;

std::optional<GateKind> kind_from_name(std::string_view name)
{
    for (GateKind k : {GateKind::H, GateKind::X, GateKind::Z, GateKind::CX, GateKind::CCX, GateKind::RY, GateKind::RZ,
                       GateKind::CP, GateKind::P}) {
        if (mnemonic(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

// Cursor over one statement (without its ';'). Errors carry the line of the
// character being looked at.
class Cursor {
public:
    Cursor(std::string_view text, std::size_t first_line) : text_(text), line_(first_line) {}

    [[noreturn]] void fail(const std::string& message) const { throw ParseError(line_, message); }

    void skip_space()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            if (text_[pos_] == '\n') {
                ++line_;
            }
            ++pos_;
        }
    }

    bool at_end()
    {
        skip_space();
        return pos_ == text_.size();
    }

    char peek()
    {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    void expect(char c)
    {
        if (peek() != c) {
            if (pos_ == text_.size()) {
                fail(std::string("expected '") + c + "' before end of statement");
            }
            fail(std::string("expected '") + c + "', found '" + text_[pos_] + "'");
        }
        ++pos_;
    }

    std::string_view word()
    {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        return text_.substr(start, pos_ - start);
    }

    unsigned integer(const char* what)
    {
        skip_space();
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        unsigned value = 0;
        const auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (start == pos_ || ec != std::errc()) {
            fail(std::string("expected ") + what);
        }
        (void)ptr;
        return value;
    }

    // Everything up to the closing parenthesis, trimmed.
    std::string_view until_paren()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && text_[pos_] != ')') {
            if (text_[pos_] == '\n') {
                ++line_;
            }
            ++pos_;
        }
        if (pos_ == text_.size()) {
            fail("missing ')' after angle");
        }
        std::string_view s = text_.substr(start, pos_ - start);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
            s.remove_prefix(1);
        }
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
            s.remove_suffix(1);
        }
        return s;
    }

    std::size_t line() const { return line_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_;
};

unsigned parse_qubit(Cursor& cur, unsigned n)
{
    if (cur.word() != "q") {
        cur.fail("expected qubit operand q[<index>]");
    }
    cur.expect('[');
    const unsigned index = cur.integer("qubit index");
    cur.expect(']');
    if (index >= n) {
        cur.fail("qubit index " + std::to_string(index) + " out of range for qreg q[" + std::to_string(n) + "]");
    }
    return index;
}

} // namespace

Circuit parse_circuit(std::string_view text)
{
    // Drop comments, keeping newlines so line numbers survive.
    std::string clean;
    clean.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '/' && i + 1 < text.size() && text[i + 1] == '/') {
            while (i < text.size() && text[i] != '\n') {
                ++i;
            }
            if (i < text.size()) {
                clean.push_back('\n');
            }
            continue;
        }
        clean.push_back(text[i]);
    }

    Circuit c;
    bool have_qreg = false;
    std::size_t line = 1;
    std::size_t start = 0;
    while (start < clean.size()) {
        const std::size_t semi = clean.find(';', start);
        const std::string_view stmt =
            std::string_view(clean).substr(start, semi == std::string::npos ? std::string::npos : semi - start);
        Cursor cur(stmt, line);
        for (char ch : stmt) {
            line += ch == '\n' ? 1 : 0;
        }
        start = semi == std::string::npos ? clean.size() : semi + 1;

        if (cur.at_end()) {
            continue;
        }
        if (semi == std::string::npos) {
            cur.fail("statement not terminated by ';'");
        }
        const std::size_t stmt_line = cur.line();
        const std::string_view name = cur.word();
        if (name.empty()) {
            cur.fail("expected a statement");
        }
        if (name == "qreg") {
            if (have_qreg) {
                cur.fail("duplicate qreg declaration");
            }
            if (cur.word() != "q") {
                cur.fail("register must be named q");
            }
            cur.expect('[');
            const unsigned n = cur.integer("register size");
            cur.expect(']');
            if (n == 0 || n > kMaxQubits) {
                cur.fail("register size must be between 1 and " + std::to_string(kMaxQubits));
            }
            if (!cur.at_end()) {
                cur.fail("unexpected text after qreg declaration");
            }
            c.n = n;
            have_qreg = true;
            continue;
        }

        const auto kind = kind_from_name(name);
        if (!kind) {
            throw ParseError(stmt_line, "unknown gate '" + std::string(name) + "'");
        }
        if (!have_qreg) {
            throw ParseError(stmt_line, "gate before qreg declaration");
        }
        Gate g{*kind, {}, {}};
        if (cur.peek() == '(') {
            if (!takes_angle(*kind)) {
                cur.fail(std::string(name) + " takes no angle");
            }
            cur.expect('(');
            const std::string_view angle_text = cur.until_paren();
            try {
                g.angle = Angle::parse(angle_text);
            } catch (const std::invalid_argument& e) {
                cur.fail(e.what());
            }
            cur.expect(')');
        } else if (takes_angle(*kind)) {
            cur.fail(std::string(name) + " needs an angle argument");
        }
        g.qubits.push_back(parse_qubit(cur, c.n));
        while (cur.peek() == ',') {
            cur.expect(',');
            g.qubits.push_back(parse_qubit(cur, c.n));
        }
        if (!cur.at_end()) {
            cur.fail("unexpected text after operands");
        }
        try {
            g.validate(c.n);
        } catch (const CircuitError& e) {
            throw ParseError(stmt_line, e.what());
        }
        c.gates.push_back(std::move(g));
    }
    if (!have_qreg) {
        throw ParseError(line, "missing qreg declaration");
    }
    return c;
}

std::string emit_circuit(const Circuit& c)
{
    c.validate();
    std::ostringstream out;
    out << "qreg q[" << c.n << "];\n";
    for (const auto& g : c.gates) {
        out << mnemonic(g.kind);
        if (takes_angle(g.kind)) {
            out << '(' << g.angle.to_string() << ')';
        }
        for (std::size_t i = 0; i < g.qubits.size(); ++i) {
            out << (i == 0 ? " " : ",") << "q[" << g.qubits[i] << ']';
        }
        out << ";\n";
    }
    return out.str();
}

} // namespace qmtbdd
