// Copyright 2026 The qstack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qstack/qasm.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include <fmt/format.h>

#include "qstack/errors.hpp"

namespace qstack {

namespace {

enum class Tok { Ident, Int, Real, String, Symbol, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int line = 1;
    int column = 1;
};

constexpr std::array<std::string_view, 24> kUnsupportedKeywords{
    "if", "else", "for", "while", "gate", "def", "defcal", "cal", "reset", "ctrl", "negctrl",
    "inv", "pow", "input", "output", "const", "let", "box", "delay", "qreg", "creg", "opaque",
    "extern", "return",
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space_and_comments();
            Token t;
            t.line = line_;
            t.column = col_;
            if (pos_ >= src_.size()) {
                t.kind = Tok::End;
                out.push_back(t);
                return out;
            }
            const char c = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                t.kind = Tok::Ident;
                while (pos_ < src_.size() &&
                       (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                    t.text += advance();
                }
            } else if (src_.substr(pos_, 2) == "\xCF\x80") { // U+03C0
                t.kind = Tok::Ident;
                t.text = "pi";
                pos_ += 2;
                ++col_;
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '.' && pos_ + 1 < src_.size() &&
                        std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
                lex_number(t);
            } else if (c == '"') {
                t.kind = Tok::String;
                advance();
                while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') {
                    t.text += advance();
                }
                if (pos_ >= src_.size() || src_[pos_] != '"') {
                    throw QasmError(ErrorCode::SyntaxError, "unterminated string literal", t.line, t.column);
                }
                advance();
            } else if (src_.substr(pos_, 2) == "->") {
                t.kind = Tok::Symbol;
                t.text = "->";
                advance();
                advance();
            } else if (std::string_view(";[](),=+-*/{}@:<>!&|^%~").find(c) != std::string_view::npos) {
                t.kind = Tok::Symbol;
                t.text = std::string(1, advance());
            } else {
                throw QasmError(ErrorCode::SyntaxError, fmt::format("unexpected character '{}'", c),
                                t.line, t.column);
            }
            out.push_back(std::move(t));
        }
    }

private:
    char advance() {
        const char c = src_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_space_and_comments() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (src_.substr(pos_, 2) == "//") {
                while (pos_ < src_.size() && src_[pos_] != '\n') {
                    advance();
                }
            } else if (src_.substr(pos_, 2) == "/*") {
                const int l = line_;
                const int cc = col_;
                advance();
                advance();
                while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") {
                    advance();
                }
                if (pos_ >= src_.size()) {
                    throw QasmError(ErrorCode::SyntaxError, "unterminated block comment", l, cc);
                }
                advance();
                advance();
            } else {
                return;
            }
        }
    }

    void lex_number(Token& t) {
        bool real = false;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            t.text += advance();
        }
        if (pos_ < src_.size() && src_[pos_] == '.') {
            real = true;
            t.text += advance();
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                t.text += advance();
            }
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            real = true;
            t.text += advance();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
                t.text += advance();
            }
            if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                throw QasmError(ErrorCode::SyntaxError, "malformed exponent", t.line, t.column);
            }
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                t.text += advance();
            }
        }
        t.kind = real ? Tok::Real : Tok::Int;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

struct PendingGate {
    Gate gate;
    int line;
    int column;
};

struct Register {
    std::string name;
    int size = 0;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    QuantumCircuit run() {
        if (is_ident("OPENQASM")) {
            parse_version();
        }
        while (peek().kind != Tok::End) {
            statement();
        }
        if (!qreg_) {
            throw QasmError(ErrorCode::InvalidCircuit, "program declares no qubit register", peek().line,
                            peek().column);
        }
        QuantumCircuit circuit(qreg_->size, creg_ ? creg_->size : 0);
        for (auto& p : pending_) {
            try {
                circuit.append(std::move(p.gate));
            } catch (const Error& e) {
                throw QasmError(e.code(), e.what(), p.line, p.column);
            }
        }
        return circuit;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
        return toks_[i];
    }

    const Token& next() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) {
            ++pos_;
        }
        return t;
    }

    bool is_symbol(std::string_view s, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Symbol && peek(ahead).text == s;
    }

    bool is_ident(std::string_view s, std::size_t ahead = 0) const {
        return peek(ahead).kind == Tok::Ident && peek(ahead).text == s;
    }

    [[noreturn]] static void fail(ErrorCode code, const Token& at, const std::string& msg) {
        throw QasmError(code, msg, at.line, at.column);
    }

    static std::string describe(const Token& t) {
        return t.kind == Tok::End ? std::string("end of input") : fmt::format("'{}'", t.text);
    }

    void expect_symbol(std::string_view s) {
        if (!is_symbol(s)) {
            fail(ErrorCode::SyntaxError, peek(), fmt::format("expected '{}', found {}", s, describe(peek())));
        }
        next();
    }

    std::string expect_ident() {
        if (peek().kind != Tok::Ident) {
            fail(ErrorCode::SyntaxError, peek(), fmt::format("expected identifier, found {}", describe(peek())));
        }
        return next().text;
    }

    int expect_int() {
        const Token& t = peek();
        if (t.kind != Tok::Int) {
            fail(ErrorCode::SyntaxError, t, fmt::format("expected integer, found {}", describe(t)));
        }
        int value = 0;
        const auto* first = t.text.data();
        const auto* last = first + t.text.size();
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last) {
            fail(ErrorCode::SyntaxError, t, fmt::format("integer '{}' out of range", t.text));
        }
        next();
        return value;
    }

    void parse_version() {
        const Token start = next();
        const Token& v = peek();
        if (v.kind != Tok::Int && v.kind != Tok::Real) {
            fail(ErrorCode::SyntaxError, v, "expected version number after OPENQASM");
        }
        if (v.text != "3" && v.text != "3.0") {
            fail(ErrorCode::UnsupportedConstruct, v, fmt::format("unsupported OpenQASM version {}", v.text));
        }
        next();
        expect_symbol(";");
        (void)start;
    }

    void statement() {
        const Token& t = peek();
        if (t.kind != Tok::Ident) {
            fail(ErrorCode::SyntaxError, t, fmt::format("expected statement, found {}", describe(t)));
        }
        for (auto kw : kUnsupportedKeywords) {
            if (t.text == kw) {
                fail(ErrorCode::UnsupportedConstruct, t, fmt::format("'{}' is not supported", kw));
            }
        }
        if (t.text == "OPENQASM") {
            fail(ErrorCode::SyntaxError, t, "version statement must come first");
        }
        if (t.text == "include") {
            next();
            if (peek().kind != Tok::String) {
                fail(ErrorCode::SyntaxError, peek(), "expected file name after include");
            }
            const Token file = next();
            if (file.text != "stdgates.inc") {
                fail(ErrorCode::UnsupportedConstruct, file,
                     fmt::format("only stdgates.inc may be included, not \"{}\"", file.text));
            }
            expect_symbol(";");
            return;
        }
        if (t.text == "qubit" || t.text == "bit") {
            declaration();
            return;
        }
        if (t.text == "measure") {
            arrow_measure();
            return;
        }
        if (t.text == "barrier") {
            barrier();
            return;
        }
        if (creg_ && t.text == creg_->name && (is_symbol("[", 1) || is_symbol("=", 1))) {
            assign_measure();
            return;
        }
        gate_application();
    }

    void declaration() {
        const Token kw = next();
        const bool quantum = kw.text == "qubit";
        int size = 1;
        if (is_symbol("[")) {
            next();
            const Token& st = peek();
            size = expect_int();
            if (size <= 0 && quantum) {
                fail(ErrorCode::InvalidCircuit, st, "qubit register size must be positive");
            }
            if (size < 0) {
                fail(ErrorCode::InvalidCircuit, st, "bit register size must be non-negative");
            }
            expect_symbol("]");
        }
        const Token& nt = peek();
        std::string name = expect_ident();
        expect_symbol(";");
        auto& slot = quantum ? qreg_ : creg_;
        if (slot) {
            fail(ErrorCode::UnsupportedConstruct, kw,
                 fmt::format("only one {} register is supported", quantum ? "qubit" : "bit"));
        }
        if ((qreg_ && qreg_->name == name) || (creg_ && creg_->name == name)) {
            fail(ErrorCode::SyntaxError, nt, fmt::format("'{}' is already declared", name));
        }
        slot = Register{std::move(name), size};
    }

    // Returns an index into the named register; -1 when the whole register is named.
    int indexed_operand(const std::optional<Register>& reg, const char* what, bool allow_whole) {
        const Token& nt = peek();
        const std::string name = expect_ident();
        if (!reg || reg->name != name) {
            fail(ErrorCode::SyntaxError, nt, fmt::format("'{}' is not a declared {} register", name, what));
        }
        if (!is_symbol("[")) {
            if (allow_whole) {
                return -1;
            }
            fail(ErrorCode::UnsupportedConstruct, peek(), "register broadcast is not supported; index the operand");
        }
        next();
        const Token& it = peek();
        const int idx = expect_int();
        expect_symbol("]");
        if (idx < 0 || idx >= reg->size) {
            fail(ErrorCode::IndexOutOfRange, it,
                 fmt::format("index {} out of range for {}[{}]", idx, reg->name, reg->size));
        }
        return idx;
    }

    void arrow_measure() {
        const Token start = next();
        const int q = indexed_operand(qreg_, "qubit", false);
        expect_symbol("->");
        const int c = indexed_operand(creg_, "bit", false);
        expect_symbol(";");
        pending_.push_back({Gate::measure(q, c), start.line, start.column});
    }

    void assign_measure() {
        const Token start = peek();
        if (is_symbol("=", 1)) {
            fail(ErrorCode::UnsupportedConstruct, start, "whole-register measurement is not supported");
        }
        const int c = indexed_operand(creg_, "bit", false);
        expect_symbol("=");
        if (!is_ident("measure")) {
            fail(ErrorCode::UnsupportedConstruct, peek(), "classical expressions are not supported");
        }
        next();
        const int q = indexed_operand(qreg_, "qubit", false);
        expect_symbol(";");
        pending_.push_back({Gate::measure(q, c), start.line, start.column});
    }

    void barrier() {
        const Token start = next();
        std::vector<int> qubits;
        if (!is_symbol(";")) {
            for (;;) {
                const int q = indexed_operand(qreg_, "qubit", true);
                if (q < 0) {
                    for (int i = 0; i < qreg_->size; ++i) {
                        qubits.push_back(i);
                    }
                } else {
                    qubits.push_back(q);
                }
                if (!is_symbol(",")) {
                    break;
                }
                next();
            }
        } else if (qreg_) {
            for (int i = 0; i < qreg_->size; ++i) {
                qubits.push_back(i);
            }
        }
        expect_symbol(";");
        pending_.push_back({Gate::barrier(std::move(qubits)), start.line, start.column});
    }

    void gate_application() {
        const Token start = next();
        const auto kind = gate_from_name(start.text);
        if (!kind || *kind == GateKind::Measure || *kind == GateKind::Barrier) {
            if (is_symbol("=")) {
                fail(ErrorCode::UnsupportedConstruct, start, "classical assignment is not supported");
            }
            fail(ErrorCode::UnsupportedConstruct, start, fmt::format("unknown gate '{}'", start.text));
        }
        if (!qreg_) {
            fail(ErrorCode::SyntaxError, start, "gate used before any qubit register is declared");
        }
        Gate g;
        g.kind = *kind;
        if (is_symbol("(")) {
            next();
            if (!is_symbol(")")) {
                for (;;) {
                    g.params.push_back(expression());
                    if (!is_symbol(",")) {
                        break;
                    }
                    next();
                }
            }
            expect_symbol(")");
        }
        for (;;) {
            g.qubits.push_back(indexed_operand(qreg_, "qubit", false));
            if (!is_symbol(",")) {
                break;
            }
            next();
        }
        expect_symbol(";");
        pending_.push_back({std::move(g), start.line, start.column});
    }

    double expression() {
        double v = term();
        while (is_symbol("+") || is_symbol("-")) {
            const bool plus = next().text == "+";
            const double r = term();
            v = plus ? v + r : v - r;
        }
        return v;
    }

    double term() {
        double v = factor();
        while (is_symbol("*") || is_symbol("/")) {
            const bool mul = next().text == "*";
            const double r = factor();
            v = mul ? v * r : v / r;
        }
        return v;
    }

    double factor() {
        const Token& t = peek();
        if (is_symbol("-")) {
            next();
            return -factor();
        }
        if (is_symbol("+")) {
            next();
            return factor();
        }
        if (is_symbol("(")) {
            next();
            const double v = expression();
            expect_symbol(")");
            return v;
        }
        if (t.kind == Tok::Int || t.kind == Tok::Real) {
            double v = 0.0;
            const auto* first = t.text.data();
            const auto* last = first + t.text.size();
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc() || ptr != last) {
                fail(ErrorCode::SyntaxError, t, fmt::format("malformed number '{}'", t.text));
            }
            next();
            return v;
        }
        if (t.kind == Tok::Ident) {
            if (t.text == "pi") {
                next();
                return std::numbers::pi;
            }
            if (t.text == "tau") {
                next();
                return 2.0 * std::numbers::pi;
            }
            fail(ErrorCode::UnsupportedConstruct, t, fmt::format("unsupported identifier '{}' in expression", t.text));
        }
        fail(ErrorCode::SyntaxError, t, fmt::format("expected expression, found {}", describe(t)));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::optional<Register> qreg_;
    std::optional<Register> creg_;
    std::vector<PendingGate> pending_;
};

} // namespace

QuantumCircuit parse_qasm(std::string_view text) {
    return Parser(Lexer(text).run()).run();
}

std::string emit_qasm(const QuantumCircuit& circuit) {
    std::string out = "OPENQASM 3;\ninclude \"stdgates.inc\";\n";
    out += fmt::format("qubit[{}] q;\n", circuit.n_qubits());
    if (circuit.n_clbits() > 0) {
        out += fmt::format("bit[{}] c;\n", circuit.n_clbits());
    }
    for (const auto& g : circuit.gates()) {
        switch (g.kind) {
        case GateKind::Measure:
            out += fmt::format("c[{}] = measure q[{}];\n", g.clbit, g.qubits[0]);
            continue;
        case GateKind::Barrier:
            out += "barrier";
            for (std::size_t i = 0; i < g.qubits.size(); ++i) {
                out += fmt::format("{}q[{}]", i == 0 ? " " : ", ", g.qubits[i]);
            }
            out += ";\n";
            continue;
        default:
            break;
        }
        out += g.name();
        if (!g.params.empty()) {
            out += '(';
            for (std::size_t i = 0; i < g.params.size(); ++i) {
                out += fmt::format("{}{:.17g}", i == 0 ? "" : ", ", g.params[i]);
            }
            out += ')';
        }
        for (std::size_t i = 0; i < g.qubits.size(); ++i) {
            out += fmt::format("{}q[{}]", i == 0 ? " " : ", ", g.qubits[i]);
        }
        out += ";\n";
    }
    return out;
}

} // namespace qstack
